//! Runs the discovery agent over every file in data/corpus and prints what it
//! found. Run from the crate directory.

use dataspace::agent::{discover_traced, discoverable_files};
use dataspace::catalog::Catalog;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut catalog = Catalog::new();
    for path in discoverable_files("data/corpus")? {
        let (result, trace) = discover_traced(&path, &catalog);
        let states: Vec<&str> = trace.entries.iter().map(|e| e.state.as_str()).collect();
        println!("{}: {}", path.display(), states.join(" -> "));
        catalog = result?;
    }
    for m in catalog.models() {
        println!("\nmodel {} [{}]", m.name, m.meta_model_name);
        for e in &m.entities {
            for a in &e.attributes {
                println!("  {}.{}: {}", e.name, a.name, a.ty);
            }
        }
    }
    Ok(())
}
