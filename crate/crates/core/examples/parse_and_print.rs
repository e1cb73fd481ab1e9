//! Parses a few queries and prints them back in canonical form.

use dataspace::metalang::{parse, pretty_print};

fn main() {
    let queries = [
        "Se( sales.region ,sales.amount Agg SUM )",
        "Cons(sales, amount>floor*3)",
        "Union(sales.region,customers.region)",
        "profile(sales,reviews.2)",
        "Se(sales; amount)",
    ];
    for q in queries {
        match parse(q) {
            Ok(ast) => println!("{q:<45} => {}", pretty_print(&ast)),
            Err(e) => println!("{q:<45} => error: {e}"),
        }
    }
}
