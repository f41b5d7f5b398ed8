//! Expand one base hypothesis into its problem set with gold labels.

use tablefol::dataset::{generate_problem_set, write_cases, BaseHypothesis, Frame, NounForms};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = BaseHypothesis {
        id: None,
        table_id: "karachi".into(),
        subject: "Karachi".into(),
        noun: Some(NounForms { singular: "district".into(), plural: "districts".into() }),
        frame: Frame::HasNoun,
        n: Some(6),
        stated: None,
    };
    let cases = generate_problem_set(&base)?;
    for c in &cases {
        println!("{}  {}", c.gold, c.hypothesis);
    }
    let married = BaseHypothesis {
        table_id: "joe_biden".into(),
        frame: Frame::TimesAdverb("married".into()),
        subject: "Joe Biden".into(),
        noun: None,
        n: Some(2),
        ..base
    };
    let mut out = Vec::new();
    write_cases(&generate_problem_set(&married)?, &mut out)?;
    print!("\n{}", String::from_utf8(out)?);
    Ok(())
}
