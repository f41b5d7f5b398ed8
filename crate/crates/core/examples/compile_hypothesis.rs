//! Show the derivation and formula for hypotheses in the grammar fragment.
//!
//! `cargo run --example compile_hypothesis -- "Karachi has at most six districts."`

use tablefol::grammar::{compile_with_derivation, preprocess, Lexicon};

fn main() {
    let lexicon = Lexicon::default();
    let titles = ["Bryce Dallas Howard", "Joe Biden", "Karachi", "Karl Ferdinand Braun"];
    let mut inputs: Vec<String> = std::env::args().skip(1).collect();
    if inputs.is_empty() {
        inputs = [
            "Bryce Dallas Howard has two children.",
            "Karachi has less than seven districts.",
            "Karachi has a half dozen districts.",
            "Joe Biden has married twice.",
            "Karl Ferdinand Braun won exactly one award.",
            "Karachi has at most six districts.",
        ]
        .map(String::from)
        .to_vec();
    }
    for h in &inputs {
        let tokens = preprocess(h, &titles);
        println!("{h}\n  tokens:  {tokens:?}");
        match compile_with_derivation(&tokens, &lexicon) {
            Ok((f, d)) => println!("  tree:    {d}\n  formula: {f}\n"),
            Err(e) => println!("  error:   {e}\n"),
        }
    }
}
