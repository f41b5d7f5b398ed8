//! Check a few formulas against a small hand-built model with both
//! evaluators.

use std::collections::{BTreeMap, BTreeSet};

use tablefol::checker::{evaluate_optimized, CheckerOptions};
use tablefol::fol::{evaluate_naive, parse_formula, Assignment, Individual, Model};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ind = |s: &str| Individual::new(s);
    let unary = |xs: &[&str]| xs.iter().map(|x| vec![ind(x)]).collect::<BTreeSet<_>>();
    let mut v = BTreeMap::new();
    // X0 is a boy, X1 and X2 are girls
    v.insert("boy".to_string(), unary(&["X0"]));
    v.insert("girl".to_string(), unary(&["X1", "X2"]));
    v.insert(
        "like".to_string(),
        [("X0", "X1"), ("X0", "X2"), ("X1", "X0")].iter().map(|(a, b)| vec![ind(a), ind(b)]).collect(),
    );
    let m = Model::new(vec![ind("X0"), ind("X1"), ind("X2")], v)?;

    for text in [
        "exists x.exists y.(boy(x) & like(x,y))",
        "exists x.exists y.(girl(x) & girl(y) & like(x,y))",
        "exists x.exists y.(cat(y) & like(x,y))",
        "all x.(girl(x) -> exists y.(boy(y) & like(y,x)))",
    ] {
        let f = parse_formula(text)?;
        let naive = evaluate_naive(&f, &m, &Assignment::new())?;
        let opt = evaluate_optimized(&f, &m, &CheckerOptions::default())?;
        println!("{naive:<9} {:<9} {:>2} bindings  {f}", opt.value, opt.assignments_tried);
    }
    Ok(())
}
