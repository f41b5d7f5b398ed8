//! Time the naive and optimized checkers on the benchmark fixture.
//!
//! `cargo run --release --example benchmark -- fixtures/bench`

use std::path::PathBuf;

use tablefol::checker::{benchmark, CheckerOptions};
use tablefol::engine::{Engine, EngineConfig};
use tablefol::fixtures::{compiled_cases, FixtureSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures/bench".into()));
    let set = FixtureSet::load(&dir)?;
    let engine = Engine::new(set.resources(), EngineConfig::default());
    let pairs: Vec<_> = compiled_cases(&set, &engine)?.into_iter().map(|(_, f, m)| (f, m)).collect();
    let r = benchmark(&pairs, &CheckerOptions::default())?;
    println!("{} cases", pairs.len());
    for (label, rows) in [("measured", &r.runs), ("reference", &r.reference)] {
        for row in rows {
            println!("{label:<10} {:<10} mean {:>10.6}s  max {:>10.6}s", row.evaluator, row.mean_s, row.max_s);
        }
    }
    Ok(())
}
