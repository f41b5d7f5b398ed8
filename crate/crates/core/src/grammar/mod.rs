//! Compiling numerical-comparative hypotheses into formulas.
//!
//! A small categorial grammar covers sentences of the forms
//!
//! ```text
//! Subject (has|have|had|has had|VerbPast) [Comparative] Numeral Noun
//! Subject has VerbPP [Comparative] (Numeral times|twice|once)
//! ```
//!
//! and composes their meanings bottom-up with the semantics of
//! [`counting_formula`] and [`event_counting_formula`].

mod category;
mod ccg;
mod lexicon;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fol::{Formula, Term, Var};
use crate::knowledge::HypoTerm;
use crate::table::title_predicate;
use crate::text::{number_word, singularize, Stopwords};

pub use category::{CatParseError, Category};
pub use ccg::{compile, compile_with_derivation, Derivation, Rule};
pub use lexicon::{Lexicon, LexiconError, Template};

/// Largest count the compiler will expand.
pub const MAX_COUNT: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparative {
    Bare,
    LessThan,
    NoMoreThan,
    Exactly,
    AtLeast,
    NoLessThan,
    MoreThan,
}

impl Comparative {
    /// In problem-set generation order.
    pub const ALL: [Comparative; 7] = [
        Comparative::Bare,
        Comparative::LessThan,
        Comparative::NoMoreThan,
        Comparative::Exactly,
        Comparative::AtLeast,
        Comparative::NoLessThan,
        Comparative::MoreThan,
    ];

    /// Words placed before the numeral; `None` for a bare numeral.
    pub fn phrase(self) -> Option<&'static str> {
        match self {
            Comparative::Bare => None,
            Comparative::LessThan => Some("less than"),
            Comparative::NoMoreThan => Some("no more than"),
            Comparative::Exactly => Some("exactly"),
            Comparative::AtLeast => Some("at least"),
            Comparative::NoLessThan => Some("no less than"),
            Comparative::MoreThan => Some("more than"),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Comparative::Bare => "bare",
            Comparative::LessThan => "less_than",
            Comparative::NoMoreThan => "no_more_than",
            Comparative::Exactly => "exactly",
            Comparative::AtLeast => "at_least",
            Comparative::NoLessThan => "no_less_than",
            Comparative::MoreThan => "more_than",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Comparative::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for Comparative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quantity {
    pub comparative: Comparative,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("count {0} exceeds the supported maximum of {MAX_COUNT}")]
    Unsupported(u32),
    #[error("unknown numeral {0:?}")]
    UnknownNumeral(String),
    #[error("sentence is outside the grammar fragment: {0}")]
    OutOfFragment(String),
    #[error("sentence has {0} readings")]
    Ambiguous(usize),
    #[error("empty sentence")]
    Empty,
}

/// Value of a numeral phrase. Words may be separated by spaces or
/// underscores.
pub fn numeral_value(phrase: &str) -> Result<u32, CompileError> {
    let norm = phrase.trim().to_lowercase().replace('_', " ");
    let words: Vec<&str> = norm.split_whitespace().collect();
    let v = match words.as_slice() {
        [w] if !w.is_empty() && w.chars().all(|c| c.is_ascii_digit()) => w.parse().ok(),
        [w] => number_word(w).or(match *w {
            "once" => Some(1),
            "twice" => Some(2),
            "dozen" => Some(12),
            _ => None,
        }),
        ["a", "dozen"] => Some(12),
        ["a", "half", "dozen"] | ["half", "a", "dozen"] => Some(6),
        _ => None,
    };
    v.ok_or_else(|| CompileError::UnknownNumeral(phrase.to_string()))
}

const PHRASES: &[&[&str]] = &[
    &["no", "more", "than"],
    &["no", "less", "than"],
    &["a", "half", "dozen"],
    &["half", "a", "dozen"],
    &["less", "than"],
    &["more", "than"],
    &["at", "least"],
    &["a", "dozen"],
    &["has", "had"],
    &["have", "had"],
];

fn clean_word(w: &str) -> String {
    w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase()
}

/// Split a hypothesis into lowercase tokens. Known titles become single
/// proper-noun tokens (`bryce_dallas_howard_`), the longest match winning,
/// and multiword function phrases are joined with underscores.
pub fn preprocess(sentence: &str, known_titles: &[&str]) -> Vec<String> {
    let words: Vec<String> = sentence.split_whitespace().map(clean_word).filter(|w| !w.is_empty()).collect();
    let mut titles: Vec<(Vec<String>, String)> = known_titles
        .iter()
        .map(|t| {
            let ws: Vec<String> = t.split_whitespace().map(clean_word).filter(|w| !w.is_empty()).collect();
            (ws, title_predicate(t))
        })
        .filter(|(ws, _)| !ws.is_empty())
        .collect();
    titles.sort_by_key(|t| std::cmp::Reverse(t.0.len()));

    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < words.len() {
        for (ws, joined) in &titles {
            if words[i..].starts_with(ws) {
                out.push(joined.clone());
                i += ws.len();
                continue 'outer;
            }
        }
        for p in PHRASES {
            if words[i..].iter().map(String::as_str).take(p.len()).eq(p.iter().copied()) && words.len() - i >= p.len() {
                out.push(p.join("_"));
                i += p.len();
                continue 'outer;
            }
        }
        out.push(words[i].clone());
        i += 1;
    }
    out
}

fn check_count(k: u32) -> Result<(), CompileError> {
    if k > MAX_COUNT {
        Err(CompileError::Unsupported(k))
    } else {
        Ok(())
    }
}

fn at_least(vars: &[Var], restrictor: Option<&str>, body: &dyn Fn(&Term) -> Formula) -> Formula {
    if vars.is_empty() {
        return Formula::True;
    }
    let terms: Vec<Term> = vars.iter().map(Term::from).collect();
    let mut parts = Vec::new();
    if let Some(r) = restrictor {
        parts.extend(terms.iter().map(|t| Formula::pred(r, [t.clone()])));
    }
    parts.extend(terms.iter().map(body));
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            parts.push(Formula::not(Formula::eq(terms[i].clone(), terms[j].clone())));
        }
    }
    Formula::exists_many(vars.to_vec(), Formula::and_all(parts))
}

fn less_than(vars: &[Var], restrictor: Option<&str>, body: &dyn Fn(&Term) -> Formula) -> Formula {
    if vars.is_empty() {
        return Formula::falsum();
    }
    let terms: Vec<Term> = vars.iter().map(Term::from).collect();
    let mut parts = Vec::new();
    if let Some(r) = restrictor {
        parts.extend(terms.iter().map(|t| Formula::pred(r, [t.clone()])));
    }
    parts.extend(terms.iter().map(body));
    let mut eqs = Vec::new();
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            eqs.push(Formula::eq(terms[i].clone(), terms[j].clone()));
        }
    }
    Formula::forall_many(vars.to_vec(), Formula::imp(Formula::and_all(parts), Formula::or_all(eqs)))
}

fn count(
    comp: Comparative,
    k: u32,
    var: &dyn Fn(u32) -> Var,
    restrictor: Option<&str>,
    body: &dyn Fn(&Term) -> Formula,
) -> Result<Formula, CompileError> {
    check_count(k)?;
    let vars = |n: u32| (0..n).map(var).collect::<Vec<_>>();
    Ok(match comp {
        Comparative::Bare | Comparative::AtLeast | Comparative::NoLessThan => at_least(&vars(k), restrictor, body),
        Comparative::MoreThan => at_least(&vars(k + 1), restrictor, body),
        Comparative::LessThan => less_than(&vars(k), restrictor, body),
        Comparative::NoMoreThan => less_than(&vars(k + 1), restrictor, body),
        Comparative::Exactly if k == 0 => less_than(&vars(1), restrictor, body),
        Comparative::Exactly => {
            Formula::and(at_least(&vars(k), restrictor, body), less_than(&vars(k + 1), restrictor, body))
        }
    })
}

/// Counting quantifier over entities `x0, x1, …`: how many individuals
/// satisfy both `restrictor` and `body`, compared against `k`.
pub fn counting_formula(
    comp: Comparative,
    k: u32,
    restrictor: &str,
    body: impl Fn(&Term) -> Formula,
) -> Result<Formula, CompileError> {
    count(comp, k, &|i| Var::new(format!("x{i}")), Some(restrictor), &body)
}

/// Counting quantifier over events `e1, e2, …` with no restrictor;
/// `event_body(e_i)` says that `e_i` is one of the counted events.
pub fn event_counting_formula(
    comp: Comparative,
    k: u32,
    event_body: impl Fn(&Term) -> Formula,
) -> Result<Formula, CompileError> {
    count(comp, k, &|i| Var::new(format!("e{}", i + 1)), None, &event_body)
}

/// Content words of a tokenized hypothesis with their part of speech, for
/// knowledge injection. Proper nouns, numerals, comparatives and the
/// possessive verb are left out.
pub fn hypothesis_terms(tokens: &[String], lexicon: &Lexicon, stopwords: &Stopwords) -> Vec<HypoTerm> {
    let mut out: Vec<HypoTerm> = Vec::new();
    for tok in tokens {
        if tok.ends_with('_') || numeral_value(tok).is_ok() || stopwords.contains(tok) {
            continue;
        }
        let term = match lexicon.entries(tok) {
            [] => HypoTerm::noun(&singularize(tok)),
            entries => match entries.iter().find_map(|(_, t)| t.verb_lemma()) {
                Some("have") | None => continue,
                Some(lemma) => HypoTerm::verb(lemma),
            },
        };
        if !out.contains(&term) {
            out.push(term);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse_formula;

    #[test]
    fn numerals() {
        assert_eq!(numeral_value("a half dozen"), Ok(6));
        assert_eq!(numeral_value("a_half_dozen"), Ok(6));
        assert_eq!(numeral_value("13"), Ok(13));
        assert_eq!(numeral_value("zero"), Ok(0));
        assert_eq!(numeral_value("twice"), Ok(2));
        assert_eq!(numeral_value("a dozen"), Ok(12));
        assert!(numeral_value("many").is_err());
    }

    #[test]
    fn preprocess_joins_titles_and_phrases() {
        assert_eq!(
            preprocess("Bryce Dallas Howard has two children.", &["Bryce Dallas Howard"]),
            ["bryce_dallas_howard_", "has", "two", "children"]
        );
        assert_eq!(preprocess("Karachi has six districts.", &["Karachi"]), ["karachi_", "has", "six", "districts"]);
        assert_eq!(preprocess("X y.", &[]), ["x", "y"]);
        assert_eq!(
            preprocess("Jodie Whittaker has had no more than a half dozen husbands.", &["Jodie", "Jodie Whittaker"]),
            ["jodie_whittaker_", "has_had", "no_more_than", "a_half_dozen", "husbands"]
        );
    }

    #[test]
    fn table_one_shapes() {
        let body = |t: &Term| Formula::pred("F", [t.clone()]);
        let a = counting_formula(Comparative::LessThan, 2, "book", body).unwrap();
        let want = parse_formula("all x0 x1.(book(x0) & book(x1) & F(x0) & F(x1) -> (x0 = x1))").unwrap();
        assert_eq!(a, want);
        let b = counting_formula(Comparative::AtLeast, 2, "book", body).unwrap();
        let want = parse_formula("exists x0 x1.(book(x0) & book(x1) & F(x0) & F(x1) & -(x0 = x1))").unwrap();
        assert_eq!(b, want);
        let c = event_counting_formula(Comparative::Bare, 2, |e| Formula::pred("V", [e.clone()])).unwrap();
        assert_eq!(c, parse_formula("exists e1 e2.(V(e1) & V(e2) & -(e1 = e2))").unwrap());
        let once = event_counting_formula(Comparative::Bare, 1, |e| Formula::pred("V", [e.clone()])).unwrap();
        assert_eq!(once, parse_formula("exists e1.V(e1)").unwrap());
        assert_eq!(counting_formula(Comparative::AtLeast, 0, "book", body).unwrap(), Formula::True);
        assert_eq!(counting_formula(Comparative::Exactly, 13, "book", body), Err(CompileError::Unsupported(13)));
    }

    #[test]
    fn comparative_names_round_trip() {
        for c in Comparative::ALL {
            assert_eq!(Comparative::from_name(c.name()), Some(c));
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{}\"", c.name()));
        }
    }
}
