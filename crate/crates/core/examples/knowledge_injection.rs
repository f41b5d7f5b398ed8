//! Add hypothesis predicates to a model when the relatedness base links
//! them to a key.

use std::path::Path;

use tablefol::fixtures::FixtureSet;
use tablefol::grammar::{hypothesis_terms, preprocess, Lexicon};
use tablefol::knowledge::{inject, InjectionConfig};
use tablefol::table::{build_model, filter_rows, KeyLexicon};
use tablefol::text::Stopwords;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let set = FixtureSet::load(Path::new("fixtures"))?;
    let r = set.resources();
    let (keys, sw, lexicon) = (KeyLexicon::default(), Stopwords::default(), Lexicon::default());
    for (id, h) in [("jodie", "Jodie Whittaker has had one husband."), ("karl", "Karl Ferdinand Braun won one award.")]
    {
        let t = &set.tables[id];
        let filtered = filter_rows(t, h, r.embeddings.as_ref(), &sw, 2);
        let m = build_model(&filtered, &keys, &sw);
        let terms = hypothesis_terms(&preprocess(h, &[t.title.as_str()]), &lexicon, &sw);
        let (_, added) = inject(&m, &filtered, &terms, &InjectionConfig::default(), &r.kb, &keys, &sw);
        println!("{h}\n  terms: {:?}", terms.iter().map(|t| &t.term).collect::<Vec<_>>());
        if added.is_empty() {
            println!("  nothing injected");
        }
        for a in added {
            println!(
                "  injected {} from key {:?} via {} (score {}, {} tuples)",
                a.predicate, a.key, a.key_term, a.score, a.size
            );
        }
    }
    Ok(())
}
