//! Searches text sources line by line.

use dataspace::adapters::{keyword_search, Format, SourceDescriptor};

fn main() -> Result<(), dataspace::Error> {
    let src = SourceDescriptor::new("reviews", Format::Txt, "data/corpus/reviews.txt");
    for word in ["east", "shipping", "nothing"] {
        let hits = keyword_search(&src, word)?;
        println!("{word}: {} line(s)", hits.len());
        print!("{}", hits.render_table());
    }
    Ok(())
}
