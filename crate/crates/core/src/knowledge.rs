//! Bridging paraphrases between hypothesis words and table keys.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fol::{Individual, Model, Sort};
use crate::table::{build_model_with_layout, KeyLexicon, Table};
use crate::text::{tokenize, Stopwords};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    Noun,
    Verb,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HypoTerm {
    pub term: String,
    pub pos: Pos,
}

impl HypoTerm {
    pub fn noun(term: &str) -> Self {
        HypoTerm { term: term.into(), pos: Pos::Noun }
    }

    pub fn verb(term: &str) -> Self {
        HypoTerm { term: term.into(), pos: Pos::Verb }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KbError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// Symmetric term-pair relatedness scores. Missing pairs score 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RelatednessKB {
    scores: HashMap<(String, String), f64>,
}

fn pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl RelatednessKB {
    /// `term_a<TAB>term_b<TAB>score` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, KbError> {
        let mut kb = RelatednessKB::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| KbError::Format { line: i + 1, message };
            let cols: Vec<&str> = line.split('\t').collect();
            let [a, b, s] = cols.as_slice() else {
                return Err(err(format!("expected 3 tab-separated fields, found {}", cols.len())));
            };
            let score: f64 = s.trim().parse().map_err(|e| err(format!("bad score {s:?}: {e}")))?;
            if !(0.0..=1.0).contains(&score) {
                return Err(err(format!("score {score} outside [0, 1]")));
            }
            kb.insert(&a.trim().to_lowercase(), &b.trim().to_lowercase(), score);
        }
        Ok(kb)
    }

    pub fn load(path: &Path) -> Result<Self, KbError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| KbError::Io { path: path.display().to_string(), message: e.to_string() })?;
        RelatednessKB::parse(&text)
    }

    pub fn insert(&mut self, a: &str, b: &str, score: f64) {
        self.scores.insert(pair(a, b), score);
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

pub fn relatedness(a: &str, b: &str, kb: &RelatednessKB) -> f64 {
    kb.scores.get(&pair(a, b)).copied().unwrap_or(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InjectionConfig {
    pub threshold: f64,
    pub enabled: bool,
}

impl Default for InjectionConfig {
    fn default() -> Self {
        InjectionConfig { threshold: DEFAULT_THRESHOLD, enabled: true }
    }
}

/// One predicate added by [`inject`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Injection {
    pub predicate: String,
    pub pos: Pos,
    pub key: String,
    pub key_term: String,
    pub score: f64,
    pub size: usize,
}

/// Terms a key offers for comparison: its predicate and its word tokens.
fn key_terms(predicate: &str, key: &str) -> Vec<String> {
    let mut terms = vec![predicate.to_string()];
    for t in predicate.split('_').map(String::from).chain(tokenize(key)) {
        if !terms.contains(&t) {
            terms.push(t);
        }
    }
    terms
}

/// Add hypothesis predicates to `m` over the extensions of related keys of
/// the filtered table `t`. Existing predicates are never touched.
pub fn inject(
    m: &Model,
    t: &Table,
    terms: &[HypoTerm],
    cfg: &InjectionConfig,
    kb: &RelatednessKB,
    lex: &KeyLexicon,
    stopwords: &Stopwords,
) -> (Model, Vec<Injection>) {
    let mut out = m.clone();
    let mut log: Vec<Injection> = Vec::new();
    if !cfg.enabled {
        return (out, log);
    }
    let (_, layout) = build_model_with_layout(t, lex, stopwords);
    let mut next_event = m
        .domain()
        .iter()
        .filter_map(|d| d.sorted_index())
        .filter(|(s, _)| *s == Sort::Event)
        .map(|(_, i)| i + 1)
        .max()
        .unwrap_or(0);
    for term in terms {
        if m.has_predicate(&term.term) {
            continue;
        }
        for row in &layout {
            let (key_term, score) = key_terms(&row.predicate, &row.key)
                .into_iter()
                .map(|k| {
                    let s = relatedness(&k, &term.term, kb);
                    (k, s)
                })
                .fold((String::new(), f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
            if score <= cfg.threshold {
                continue;
            }
            let size = match term.pos {
                Pos::Noun => {
                    let members: BTreeSet<&Individual> = row.entities.iter().collect();
                    out.declare(&term.term);
                    for x in &members {
                        out.add_tuple(&term.term, vec![(*x).clone()]).expect("entity is in the domain");
                    }
                    members.len()
                }
                Pos::Verb => {
                    out.declare(&term.term);
                    for x in &row.entities {
                        let v = Individual::event(next_event);
                        next_event += 1;
                        out.add_individual(v.clone()).expect("fresh event id");
                        out.add_tuple(&term.term, vec![v.clone()]).expect("unary");
                        out.add_tuple("Subj", vec![v.clone(), Individual::entity(0)]).expect("binary");
                        out.add_tuple("Acc", vec![v, x.clone()]).expect("binary");
                    }
                    row.entities.len()
                }
            };
            log.push(Injection {
                predicate: term.term.clone(),
                pos: term.pos,
                key: row.key.clone(),
                key_term,
                score,
                size,
            });
        }
    }
    (out, log)
}
