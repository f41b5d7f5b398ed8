//! Worked examples on disk.
//!
//! ```text
//! DIR/tables/*.json     tables, id = file stem
//! DIR/models/*.json     hand-written models
//! DIR/kb.tsv            relatedness scores
//! DIR/embeddings.txt    word vectors for row scoring
//! DIR/bases.jsonl       base hypotheses
//! DIR/cases.jsonl       one named case per line
//! ```
//!
//! Every file is optional; an empty directory loads as an empty set.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::dataset::{generate_problem_set, read_bases, BaseHypothesis, Label, TestCase};
use crate::engine::{Engine, Resources};
use crate::fol::{parse_formula, Formula, Individual, Model, TruthValue};
use crate::knowledge::RelatednessKB;
use crate::table::{load_table, FileEmbeddings, OovPolicy, Table};

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("{}: {message}", path.display())]
    Load { path: PathBuf, message: String },
    #[error("{}: duplicate {what} {name:?}", path.display())]
    Duplicate { path: PathBuf, what: &'static str, name: String },
    #[error("{}: case {case:?} refers to missing {what} {name:?}", path.display())]
    Missing { path: PathBuf, case: String, what: &'static str, name: String },
}

fn load_err(path: &Path, message: impl ToString) -> FixtureError {
    FixtureError::Load { path: path.to_path_buf(), message: message.to_string() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelCheck {
    pub formula: Formula,
    pub expected: TruthValue,
}

/// A table/hypothesis pair with its expected outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCase {
    pub table_id: String,
    pub table: Table,
    pub hypothesis: String,
    pub expected: Label,
    pub expected_without_injection: Option<Label>,
    pub filtered_keys: Option<Vec<String>>,
    pub formula: Option<Formula>,
    /// Facts the final model must contain.
    pub model_excerpt: Option<BTreeMap<String, BTreeSet<Vec<Individual>>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FixtureBody {
    Model {
        model: Model,
        checks: Vec<ModelCheck>,
    },
    Pair(Box<PairCase>),
    /// A generated problem set, with the golds of some of its cases pinned.
    ProblemSet {
        base: BaseHypothesis,
        table: Table,
        cases: Vec<TestCase>,
        shown: Vec<(String, Label)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureCase {
    pub name: String,
    pub body: FixtureBody,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCase {
    name: String,
    #[serde(default)]
    model: Option<String>,
    #[serde(default)]
    checks: Vec<RawCheck>,
    #[serde(default)]
    table: Option<String>,
    #[serde(default)]
    hypothesis: Option<String>,
    #[serde(default)]
    expected: Option<Label>,
    #[serde(default)]
    expected_without_injection: Option<Label>,
    #[serde(default)]
    filtered_keys: Option<Vec<String>>,
    #[serde(default)]
    formula: Option<String>,
    #[serde(default)]
    model_excerpt: Option<BTreeMap<String, BTreeSet<Vec<Individual>>>>,
    #[serde(default)]
    set: Option<String>,
    #[serde(default)]
    shown: Vec<RawShown>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheck {
    formula: String,
    expected: TruthValue,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShown {
    hypothesis: String,
    gold: Label,
}

/// Everything in a fixture directory.
#[derive(Debug, Clone, Default)]
pub struct FixtureSet {
    pub tables: HashMap<String, Table>,
    pub bases: Vec<BaseHypothesis>,
    pub kb: Option<RelatednessKB>,
    pub embeddings: Option<FileEmbeddings>,
    pub cases: Vec<FixtureCase>,
}

impl FixtureSet {
    pub fn load(dir: &Path) -> Result<Self, FixtureError> {
        if !dir.is_dir() {
            return Err(load_err(dir, "not a directory"));
        }
        let tables = load_table_dir(&dir.join("tables"))?;
        let bases_path = dir.join("bases.jsonl");
        let bases = if bases_path.exists() {
            let f = std::fs::File::open(&bases_path).map_err(|e| load_err(&bases_path, e))?;
            read_bases(std::io::BufReader::new(f)).map_err(|e| load_err(&bases_path, e))?
        } else {
            Vec::new()
        };
        let mut ids = HashSet::new();
        for b in &bases {
            if !ids.insert(b.set_id()) {
                return Err(FixtureError::Duplicate { path: bases_path, what: "set", name: b.set_id().into() });
            }
        }
        let kb_path = dir.join("kb.tsv");
        let kb =
            kb_path.exists().then(|| RelatednessKB::load(&kb_path).map_err(|e| load_err(&kb_path, e))).transpose()?;
        let emb_path = dir.join("embeddings.txt");
        let embeddings = emb_path
            .exists()
            .then(|| FileEmbeddings::load(&emb_path, OovPolicy::Hash).map_err(|e| load_err(&emb_path, e)))
            .transpose()?;
        let cases = load_cases(dir, &tables, &bases)?;
        Ok(FixtureSet { tables, bases, kb, embeddings, cases })
    }

    /// Default resources with this set's KB and embeddings swapped in.
    pub fn resources(&self) -> Resources {
        let mut r = Resources::default();
        if let Some(kb) = &self.kb {
            r.kb = kb.clone();
        }
        if let Some(e) = &self.embeddings {
            r.embeddings = Arc::new(e.clone());
        }
        r
    }

    pub fn case(&self, name: &str) -> Option<&FixtureCase> {
        self.cases.iter().find(|c| c.name == name)
    }

    /// Every labeled (table, hypothesis) test case: pairs and problem sets.
    /// Pairs become singleton sets named after the case.
    pub fn test_cases(&self) -> Vec<TestCase> {
        let mut out = Vec::new();
        for c in &self.cases {
            match &c.body {
                FixtureBody::Pair(p) => out.push(TestCase {
                    set_id: c.name.clone(),
                    hypothesis: p.hypothesis.clone(),
                    gold: p.expected,
                    comparative: crate::grammar::Comparative::Bare,
                    k: 0,
                    table_id: p.table_id.clone(),
                }),
                FixtureBody::ProblemSet { cases, .. } => out.extend(cases.iter().cloned()),
                FixtureBody::Model { .. } => {}
            }
        }
        out
    }
}

/// One compiled (formula, model) pair per generated case of every base in
/// the set, with the case it came from.
pub fn compiled_cases(set: &FixtureSet, engine: &Engine) -> Result<Vec<(TestCase, Formula, Model)>, FixtureError> {
    let mut out = Vec::new();
    for base in &set.bases {
        let oops = |m: String| FixtureError::Load { path: PathBuf::from("bases.jsonl"), message: m };
        let table = set.tables.get(&base.table_id).ok_or_else(|| oops(format!("no table {:?}", base.table_id)))?;
        for case in generate_problem_set(base).map_err(|e| oops(e.to_string()))? {
            let p = engine.prepare(table, &case.hypothesis);
            let f = p.formula.map_err(|e| oops(format!("{:?}: {e}", case.hypothesis)))?;
            out.push((case, f, p.model));
        }
    }
    Ok(out)
}

pub fn load_fixtures(dir: &Path) -> Result<Vec<FixtureCase>, FixtureError> {
    FixtureSet::load(dir).map(|s| s.cases)
}

/// Load every `*.json` table in `dir`, keyed by file stem. A missing
/// directory yields no tables.
pub fn load_table_dir(dir: &Path) -> Result<HashMap<String, Table>, FixtureError> {
    let mut tables = HashMap::new();
    if !dir.is_dir() {
        return Ok(tables);
    }
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| load_err(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    for p in paths {
        let id = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let t = load_table(&p).map_err(|e| load_err(&p, e))?;
        tables.insert(id, t);
    }
    Ok(tables)
}

fn load_cases(
    dir: &Path,
    tables: &HashMap<String, Table>,
    bases: &[BaseHypothesis],
) -> Result<Vec<FixtureCase>, FixtureError> {
    let path = dir.join("cases.jsonl");
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(&path).map_err(|e| load_err(&path, e))?;
    let mut out: Vec<FixtureCase> = Vec::new();
    let mut names = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let at = |m: String| load_err(&path, format!("line {}: {m}", i + 1));
        let raw: RawCase = serde_json::from_str(line).map_err(|e| at(e.to_string()))?;
        if !names.insert(raw.name.clone()) {
            return Err(FixtureError::Duplicate { path, what: "case", name: raw.name });
        }
        let missing = |what, name: &str| FixtureError::Missing {
            path: path.clone(),
            case: raw.name.clone(),
            what,
            name: name.to_string(),
        };
        let table = |id: &str| tables.get(id).cloned().ok_or_else(|| missing("table", id));
        let body = match (&raw.model, &raw.table, &raw.set) {
            (Some(model_file), None, None) => {
                let mp = dir.join(model_file);
                let bytes = std::fs::read(&mp).map_err(|_| missing("model", model_file))?;
                let model: Model = serde_json::from_slice(&bytes).map_err(|e| load_err(&mp, e))?;
                let checks = raw
                    .checks
                    .iter()
                    .map(|c| {
                        let formula = parse_formula(&c.formula).map_err(|e| at(format!("{:?}: {e}", c.formula)))?;
                        Ok(ModelCheck { formula, expected: c.expected })
                    })
                    .collect::<Result<_, FixtureError>>()?;
                FixtureBody::Model { model, checks }
            }
            (None, Some(tid), None) => {
                let (Some(hypothesis), Some(expected)) = (&raw.hypothesis, raw.expected) else {
                    return Err(at("a table case needs `hypothesis` and `expected`".into()));
                };
                let formula = raw
                    .formula
                    .as_deref()
                    .map(|f| parse_formula(f).map_err(|e| at(format!("{f:?}: {e}"))))
                    .transpose()?;
                FixtureBody::Pair(Box::new(PairCase {
                    table_id: tid.clone(),
                    table: table(tid)?,
                    hypothesis: hypothesis.clone(),
                    expected,
                    expected_without_injection: raw.expected_without_injection,
                    filtered_keys: raw.filtered_keys.clone(),
                    formula,
                    model_excerpt: raw.model_excerpt.clone(),
                }))
            }
            (None, None, Some(set)) => {
                let base = bases.iter().find(|b| b.set_id() == set).ok_or_else(|| missing("set", set))?;
                let cases = generate_problem_set(base).map_err(|e| at(e.to_string()))?;
                let shown: Vec<(String, Label)> = raw.shown.iter().map(|s| (s.hypothesis.clone(), s.gold)).collect();
                for (h, _) in &shown {
                    if !cases.iter().any(|c| &c.hypothesis == h) {
                        return Err(at(format!("{h:?} is not generated by set {set:?}")));
                    }
                }
                FixtureBody::ProblemSet { base: base.clone(), table: table(&base.table_id)?, cases, shown }
            }
            _ => return Err(at("a case needs exactly one of `model`, `table` or `set`".into())),
        };
        out.push(FixtureCase { name: raw.name, body });
    }
    Ok(out)
}
