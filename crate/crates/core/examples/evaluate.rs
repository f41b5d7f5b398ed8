//! Score the engine on the fixture corpus, with and without knowledge
//! injection.

use std::path::Path;

use tablefol::engine::{Engine, EngineConfig};
use tablefol::fixtures::FixtureSet;
use tablefol::knowledge::InjectionConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let set = FixtureSet::load(Path::new("fixtures"))?;
    let cases = set.test_cases();
    for enabled in [true, false] {
        let config =
            EngineConfig { injection: InjectionConfig { enabled, ..Default::default() }, ..Default::default() };
        let r = Engine::new(set.resources(), config).evaluate(&cases, &set.tables);
        println!(
            "injection {}: {}/{} correct, sets all correct {:.3} ({:.3} excluding neutral sets)",
            if enabled { "on " } else { "off" },
            r.correct,
            r.case_count,
            r.per_set_all_correct,
            r.per_set_all_correct_excl_neutral
        );
        for (comp, t) in &r.per_comparative {
            println!("  {comp:<14} {}/{}", t.correct, t.total);
        }
    }
    Ok(())
}
