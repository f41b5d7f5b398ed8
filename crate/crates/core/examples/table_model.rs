//! Turn a table into a first-order model and print its valuation.
//!
//! `cargo run --example table_model -- fixtures/tables/karl.json`

use std::path::PathBuf;

use tablefol::table::{build_model_with_layout, load_table, KeyLexicon};
use tablefol::text::Stopwords;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures/tables/karl.json".into()));
    let t = load_table(&path)?;
    let (m, layout) = build_model_with_layout(&t, &KeyLexicon::default(), &Stopwords::default());
    for row in &layout {
        let ids: Vec<&str> = row.entities.iter().map(|e| e.id()).collect();
        println!("{:<24} {:?} {:<20} {ids:?}", row.key, row.sort, row.predicate);
    }
    let domain: Vec<&str> = m.domain().iter().map(|d| d.id()).collect();
    println!("\nD = {domain:?}");
    for (pred, tuples) in m.valuation() {
        let shown: Vec<String> =
            tuples.iter().map(|t| t.iter().map(|i| i.id()).collect::<Vec<_>>().join(",")).collect();
        println!("  {pred}: {{{}}}", shown.join("; "));
    }
    Ok(())
}
