//! One query language over CSV, XML, JSON and text sources.

use dataspace::agent::{discover, discoverable_files};
use dataspace::catalog::Catalog;
use dataspace::engine::{execute, Session};
use dataspace::metalang::{parse, validate};

fn main() -> Result<(), dataspace::Error> {
    let mut catalog = Catalog::new();
    for path in discoverable_files("data/corpus")? {
        catalog = discover(path, &catalog)?;
    }
    let mut session = Session::new("demo").with_param("floor", 2.0);
    for q in [
        "Se(sales.region, sales.amount Agg SUM)",
        "Se(orders.total Agg SUM, products.price Agg SUM)",
        "Union(sales.region, customers.region)",
        "Cons(sales, amount > floor * 3)",
        "Se(reviews)",
    ] {
        let vq = validate(&parse(q)?, &catalog)?;
        let rs = execute(&vq, &catalog, &mut session)?;
        let mut sources = rs.provenance.clone();
        sources.sort();
        sources.dedup();
        println!("> {q}  (from {})", sources.join(", "));
        print!("{}", rs.render_table());
        println!();
    }
    Ok(())
}
