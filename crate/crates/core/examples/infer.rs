//! Run the full pipeline on one table and hypothesis and print the trace.
//!
//! `cargo run --example infer -- fixtures/tables/bryce.json "Bryce Dallas Howard has two children."`

use std::path::Path;

use tablefol::engine::{Engine, EngineConfig};
use tablefol::fixtures::FixtureSet;
use tablefol::table::load_table;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let table = args.next().unwrap_or_else(|| "fixtures/tables/bryce.json".into());
    let hypothesis = args.next().unwrap_or_else(|| "Bryce Dallas Howard has two children.".into());
    let set = FixtureSet::load(Path::new("fixtures"))?;
    let engine = Engine::new(set.resources(), EngineConfig::default());
    let v = engine.infer(&load_table(Path::new(&table))?, &hypothesis);
    println!("{}", serde_json::to_string_pretty(&v)?);
    Ok(())
}
