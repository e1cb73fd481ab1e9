//! Builds the co-occurrence net of a text file and asks for neighbours.

use dataspace::adapters::{build_semantic_net, Format, SourceDescriptor};
use dataspace::agent::discover;
use dataspace::catalog::Catalog;
use dataspace::engine::{execute, Session};
use dataspace::metalang::{parse, validate};

fn main() -> Result<(), dataspace::Error> {
    let src = SourceDescriptor::new("semantic_net", Format::Txt, "data/semantic_net.txt");
    let net = build_semantic_net(&src)?;
    println!("{} terms, {} edges, total weight {}", net.nodes.len(), net.edges.len(), net.total_weight());

    let catalog = discover("data/semantic_net.txt", &Catalog::new())?;
    let vq = validate(&parse("Semant(semantic_net.data)")?, &catalog)?;
    print!("{}", execute(&vq, &catalog, &mut Session::new("demo"))?.render_table());
    Ok(())
}
