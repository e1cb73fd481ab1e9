//! Translates queries over the warehouse tables into SQL.

use dataspace::agent::discover;
use dataspace::catalog::Catalog;
use dataspace::metalang::{parse, validate, Bindings};
use dataspace::sqlgen::translate_with;

fn main() -> Result<(), dataspace::Error> {
    let catalog = discover("data/warehouse", &Catalog::new())?;
    let params: Bindings = [("limit".to_string(), 5.0), ("cap".to_string(), 5.5)].into();
    for q in [
        "Se(stock.region, stock.qty Agg SUM)",
        "Cons(stock, qty > limit, price <= cap / 2)",
        "Differ(stock.item, shipments.item)",
        "Inters(stock.region, shipments.region)",
    ] {
        let vq = validate(&parse(q)?, &catalog)?;
        match translate_with(&vq, &params) {
            Ok(sql) => println!("{q}\n  {sql}"),
            Err(e) => println!("{q}\n  not translatable: {e}"),
        }
    }
    Ok(())
}
