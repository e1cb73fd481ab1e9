#![allow(dead_code)]

pub mod grammar;
pub mod sqlref;

use dataspace::agent::{discover, discoverable_files};
use dataspace::catalog::Catalog;

pub const CORPUS: &str = "data/corpus";
pub const WAREHOUSE: &str = "data/warehouse";
pub const GOLDEN: &str = "tests/golden/corpus_catalog.json";

/// Discovers every file of the fixture corpus, in name order, into an empty
/// catalog. Paths stay relative to the package root.
pub fn discover_corpus() -> Catalog {
    let mut catalog = Catalog::new();
    for path in discoverable_files(CORPUS).unwrap() {
        catalog = discover(&path, &catalog).unwrap();
    }
    catalog
}

/// The two warehouse tables discovered as one directory source.
pub fn warehouse() -> Catalog {
    discover(WAREHOUSE, &Catalog::new()).unwrap()
}
