//! Drops rows that break entity constraints, then removes duplicates.

use dataspace::agent::discover;
use dataspace::catalog::{Catalog, Constraint, Element, ElementPath};
use dataspace::engine::{clean_coagulate, clean_cut, execute, Session};
use dataspace::metalang::{parse, validate, Comparator};
use dataspace::Value;

fn main() -> Result<(), dataspace::Error> {
    let mut catalog = discover("data/warehouse", &Catalog::new())?;
    let stock = ElementPath::entity("warehouse", "stock");
    catalog.upsert(
        Some(&stock),
        Element::Constraint(Constraint::new("qty", Comparator::Gt, Value::number(0.0), "empty shelf")),
    )?;

    let mut session = Session::new("demo");
    let rs = execute(&validate(&parse("Se(stock)")?, &catalog)?, &catalog, &mut session)?;
    let entity = catalog.model("warehouse").and_then(|m| m.entity("stock")).expect("discovered above");
    let kept = clean_cut(&rs, entity);
    println!("{} rows, {} satisfy every constraint", rs.len(), kept.len());

    let items = execute(&validate(&parse("Se(stock.item)")?, &catalog)?, &catalog, &mut session)?;
    print!("{}", clean_coagulate(&items).render_table());
    Ok(())
}
