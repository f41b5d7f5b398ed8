//! The whole pipeline: filter rows, build the model, inject related
//! predicates, compile the hypothesis, check it, and read off a label.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::checker::{evaluate_optimized, CheckerOptions};
use crate::dataset::{Label, TestCase};
use crate::fol::{evaluate_naive_until, Assignment, Formula, Model, TruthValue};
use crate::grammar::{compile, hypothesis_terms, preprocess, Comparative, CompileError, Lexicon};
use crate::knowledge::{inject, Injection, InjectionConfig, RelatednessKB};
use crate::table::{build_model, filter_rows, EmbeddingProvider, HashEmbeddings, KeyLexicon, Table, DEFAULT_ROWS};
use crate::text::Stopwords;

/// Shared read-only inputs.
#[derive(Debug, Clone)]
pub struct Resources {
    pub embeddings: Arc<dyn EmbeddingProvider>,
    pub stopwords: Stopwords,
    pub keys: KeyLexicon,
    pub lexicon: Lexicon,
    pub kb: RelatednessKB,
}

impl Default for Resources {
    fn default() -> Self {
        Resources {
            embeddings: Arc::new(HashEmbeddings::default()),
            stopwords: Stopwords::default(),
            keys: KeyLexicon::default(),
            lexicon: Lexicon::default(),
            kb: RelatednessKB::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    pub rows: usize,
    pub injection: InjectionConfig,
    pub checker: CheckerOptions,
    /// Use the reference evaluator instead of the optimized one.
    pub naive: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            rows: DEFAULT_ROWS,
            injection: InjectionConfig::default(),
            checker: CheckerOptions::default(),
            naive: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub filtered_keys: Vec<String>,
    pub tokens: Vec<String>,
    pub injected_predicates: Vec<String>,
    pub injections: Vec<Injection>,
    pub formula_text: Option<String>,
    pub truth_value: Option<TruthValue>,
    /// Model-checking time in seconds.
    pub elapsed: f64,
    pub assignments_tried: Option<u64>,
    /// Why the label is neutral without a checked formula.
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub label: Label,
    pub trace: Trace,
}

/// Everything computed before model checking.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub filtered: Table,
    pub tokens: Vec<String>,
    pub model: Model,
    pub injections: Vec<Injection>,
    pub formula: Result<Formula, CompileError>,
}

pub fn label_of(v: TruthValue) -> Label {
    match v {
        TruthValue::True => Label::Entailment,
        TruthValue::False => Label::Contradiction,
        TruthValue::Undefined | TruthValue::TimedOut => Label::Neutral,
    }
}

#[derive(Debug, Clone)]
pub struct Engine {
    pub resources: Resources,
    pub config: EngineConfig,
}

impl Engine {
    pub fn new(resources: Resources, config: EngineConfig) -> Self {
        Engine { resources, config }
    }

    pub fn prepare(&self, table: &Table, hypothesis: &str) -> Prepared {
        let r = &self.resources;
        let filtered = filter_rows(table, hypothesis, r.embeddings.as_ref(), &r.stopwords, self.config.rows.max(1));
        let model = build_model(&filtered, &r.keys, &r.stopwords);
        let tokens = preprocess(hypothesis, &[table.title.as_str()]);
        let terms = hypothesis_terms(&tokens, &r.lexicon, &r.stopwords);
        let (model, injections) =
            inject(&model, &filtered, &terms, &self.config.injection, &r.kb, &r.keys, &r.stopwords);
        let formula = compile(&tokens, &r.lexicon);
        Prepared { filtered, tokens, model, injections, formula }
    }

    /// Check `f` against `m` with the configured evaluator.
    pub fn check(&self, f: &Formula, m: &Model) -> Result<(TruthValue, Duration, Option<u64>), String> {
        if self.config.naive {
            let start = Instant::now();
            let v = evaluate_naive_until(f, m, &Assignment::new(), Some(start + self.config.checker.timeout))
                .map_err(|e| e.to_string())?;
            Ok((v, start.elapsed(), None))
        } else {
            let r = evaluate_optimized(f, m, &self.config.checker).map_err(|e| e.to_string())?;
            Ok((r.value, r.elapsed, Some(r.assignments_tried)))
        }
    }

    /// Label a hypothesis against a table. Never fails: anything that stops
    /// the pipeline yields a neutral verdict with the reason in the trace.
    pub fn infer(&self, table: &Table, hypothesis: &str) -> Verdict {
        let p = self.prepare(table, hypothesis);
        let mut trace = Trace {
            filtered_keys: p.filtered.rows.iter().map(|r| r.key.clone()).collect(),
            tokens: p.tokens.clone(),
            injected_predicates: p.injections.iter().map(|i| i.predicate.clone()).collect(),
            injections: p.injections.clone(),
            formula_text: None,
            truth_value: None,
            elapsed: 0.0,
            assignments_tried: None,
            reason: None,
        };
        let formula = match p.formula {
            Ok(f) => f,
            Err(e) => {
                trace.reason = Some(format!("compile error: {e}"));
                return Verdict { label: Label::Neutral, trace };
            }
        };
        trace.formula_text = Some(formula.to_string());
        match self.check(&formula, &p.model) {
            Ok((v, elapsed, tried)) => {
                trace.truth_value = Some(v);
                trace.elapsed = elapsed.as_secs_f64();
                trace.assignments_tried = tried;
                match v {
                    TruthValue::Undefined => trace.reason = Some("formula mentions a predicate the model lacks".into()),
                    TruthValue::TimedOut => trace.reason = Some("model checking timed out".into()),
                    _ => {}
                }
                Verdict { label: label_of(v), trace }
            }
            Err(e) => {
                trace.reason = Some(format!("checker error: {e}"));
                Verdict { label: Label::Neutral, trace }
            }
        }
    }

    /// Run every case, in parallel, against its table.
    pub fn evaluate(&self, cases: &[TestCase], tables: &HashMap<String, Table>) -> EvalReport {
        evaluate_with(cases, |case| match tables.get(&case.table_id) {
            None => Prediction::errored(),
            Some(t) => {
                let v = self.infer(t, &case.hypothesis);
                Prediction {
                    label: Some(v.label),
                    timed_out: v.trace.truth_value == Some(TruthValue::TimedOut),
                    elapsed: v.trace.elapsed,
                }
            }
        })
    }
}

/// One system answer. `label: None` marks a case that could not be run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Option<Label>,
    pub timed_out: bool,
    pub elapsed: f64,
}

impl Prediction {
    pub fn of(label: Label) -> Self {
        Prediction { label: Some(label), timed_out: false, elapsed: 0.0 }
    }

    pub fn errored() -> Self {
        Prediction { label: None, timed_out: false, elapsed: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub correct: usize,
    pub total: usize,
}

impl Tally {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub mean_s: f64,
    pub max_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub case_count: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub per_comparative_accuracy: BTreeMap<Comparative, f64>,
    pub per_comparative: BTreeMap<Comparative, Tally>,
    pub set_count: usize,
    pub per_set_all_correct: f64,
    /// Sets with at least one non-neutral gold.
    pub non_neutral_set_count: usize,
    pub per_set_all_correct_excl_neutral: f64,
    pub timed_out: usize,
    pub errored: usize,
    pub timing: Timing,
}

/// Score `predict` on `cases`. Cases run concurrently; the report does not
/// depend on scheduling.
pub fn evaluate_with<F>(cases: &[TestCase], predict: F) -> EvalReport
where
    F: Fn(&TestCase) -> Prediction + Sync,
{
    let preds: Vec<Prediction> = cases.par_iter().map(&predict).collect();
    let mut per_comp: BTreeMap<Comparative, Tally> = BTreeMap::new();
    let mut sets: BTreeMap<&str, (bool, bool)> = BTreeMap::new();
    let (mut correct, mut timed_out, mut errored) = (0, 0, 0);
    for (case, p) in cases.iter().zip(&preds) {
        let ok = p.label == Some(case.gold);
        correct += ok as usize;
        timed_out += p.timed_out as usize;
        errored += p.label.is_none() as usize;
        let t = per_comp.entry(case.comparative).or_insert(Tally { correct: 0, total: 0 });
        t.total += 1;
        t.correct += ok as usize;
        let s = sets.entry(&case.set_id).or_insert((true, false));
        s.0 &= ok;
        s.1 |= case.gold != Label::Neutral;
    }
    let all_ok = sets.values().filter(|s| s.0).count();
    let non_neutral: Vec<_> = sets.values().filter(|s| s.1).collect();
    let non_neutral_ok = non_neutral.iter().filter(|s| s.0).count();
    let frac = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let total_s: f64 = preds.iter().map(|p| p.elapsed).sum();
    EvalReport {
        case_count: cases.len(),
        correct,
        accuracy: frac(correct, cases.len()),
        per_comparative_accuracy: per_comp.iter().map(|(c, t)| (*c, t.fraction())).collect(),
        per_comparative: per_comp,
        set_count: sets.len(),
        per_set_all_correct: frac(all_ok, sets.len()),
        non_neutral_set_count: non_neutral.len(),
        per_set_all_correct_excl_neutral: frac(non_neutral_ok, non_neutral.len()),
        timed_out,
        errored,
        timing: Timing {
            mean_s: if preds.is_empty() { 0.0 } else { total_s / preds.len() as f64 },
            max_s: preds.iter().map(|p| p.elapsed).fold(0.0, f64::max),
            total_s,
        },
    }
}
