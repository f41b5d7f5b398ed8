//! Key/value tables: loading, row filtering and model construction.

mod embed;

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fol::{Individual, Model};
use crate::text::{singularize, tokenize, Stopwords};

pub use embed::{EmbeddingError, EmbeddingProvider, FileEmbeddings, HashEmbeddings, OovPolicy, DEFAULT_DIM};

const DEFAULT_VERB_KEYS: &str = include_str!("../../data/verb_keys.tsv");
const DEFAULT_NOUN_KEYS: &str = include_str!("../../data/noun_keys.txt");

pub const DEFAULT_ROWS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub key: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("table title is empty")]
    EmptyTitle,
    #[error("row {row} ({key:?}) has no values")]
    EmptyRow { row: usize, key: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// Parse a table document. A row whose value list is a single string is
/// split on commas outside parentheses.
pub fn parse_table(doc: &[u8]) -> Result<Table, TableError> {
    let raw: Table = serde_json::from_slice(doc).map_err(|e| TableError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Table::new(raw.title, raw.rows)
}

pub fn load_table(path: &Path) -> Result<Table, TableError> {
    let bytes =
        std::fs::read(path).map_err(|e| TableError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_table(&bytes)
}

impl Table {
    pub fn new(title: String, rows: Vec<Row>) -> Result<Self, TableError> {
        if title.trim().is_empty() {
            return Err(TableError::EmptyTitle);
        }
        let mut out = Vec::with_capacity(rows.len());
        for (i, row) in rows.into_iter().enumerate() {
            let values: Vec<String> = match row.values.as_slice() {
                [one] => split_top_level(one),
                many => many.iter().map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect(),
            };
            if values.is_empty() {
                return Err(TableError::EmptyRow { row: i, key: row.key });
            }
            out.push(Row { key: row.key, values });
        }
        Ok(Table { title, rows: out })
    }

    pub fn row(&self, key: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.key == key)
    }

    pub fn keys(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.key.as_str()).collect()
    }
}

fn split_top_level(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth <= 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts.into_iter().map(str::trim).filter(|p| !p.is_empty()).map(String::from).collect()
}

/// `Σ_j max_k h_j · t_k` over hypothesis tokens `h` and the row's key tokens
/// followed by its value tokens.
pub fn score_row(hypothesis_tokens: &[String], row: &Row, emb: &dyn EmbeddingProvider) -> f64 {
    let row_vecs: Vec<Vec<f64>> = row_tokens(row).iter().map(|t| emb.vector(t)).collect();
    if row_vecs.is_empty() {
        return 0.0;
    }
    hypothesis_tokens
        .iter()
        .map(|h| {
            let hv = emb.vector(h);
            row_vecs.iter().map(|t| embed::dot(&hv, t)).fold(f64::NEG_INFINITY, f64::max)
        })
        .sum()
}

pub fn row_tokens(row: &Row) -> Vec<String> {
    let mut toks = tokenize(&row.key);
    for v in &row.values {
        toks.extend(tokenize(v));
    }
    toks
}

/// Content tokens of a hypothesis: stopwords and numbers removed.
pub fn hypothesis_tokens(hypothesis: &str, stopwords: &Stopwords) -> Vec<String> {
    tokenize(hypothesis).into_iter().filter(|t| !stopwords.is_stop(t)).collect()
}

/// Scores of every row against the hypothesis, in row order.
pub fn row_scores(t: &Table, hypothesis: &str, emb: &dyn EmbeddingProvider, stopwords: &Stopwords) -> Vec<f64> {
    let h = hypothesis_tokens(hypothesis, stopwords);
    t.rows.iter().map(|r| score_row(&h, r, emb)).collect()
}

/// Keep the `k` best rows, in their original order. Equal scores favour the
/// earlier row.
pub fn filter_rows(t: &Table, hypothesis: &str, emb: &dyn EmbeddingProvider, stopwords: &Stopwords, k: usize) -> Table {
    assert!(k >= 1, "must keep at least one row");
    if t.rows.len() <= k {
        return t.clone();
    }
    let scores = row_scores(t, hypothesis, emb, stopwords);
    let mut order: Vec<usize> = (0..t.rows.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut keep: Vec<usize> = order.into_iter().take(k).collect();
    keep.sort_unstable();
    Table { title: t.title.clone(), rows: keep.into_iter().map(|i| t.rows[i].clone()).collect() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KeySort {
    NounKey,
    VerbKey,
}

/// Word lists behind [`classify_key`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyLexicon {
    verbs: HashMap<String, String>,
    nouns: HashSet<String>,
}

impl Default for KeyLexicon {
    fn default() -> Self {
        KeyLexicon::parse(DEFAULT_VERB_KEYS, DEFAULT_NOUN_KEYS)
    }
}

impl KeyLexicon {
    /// `verbs`: `surface<TAB>lemma` lines. `nouns`: one word per line.
    pub fn parse(verbs: &str, nouns: &str) -> Self {
        let content = |l: &&str| !l.trim().is_empty() && !l.starts_with('#');
        let verbs = verbs
            .lines()
            .filter(content)
            .filter_map(|l| {
                let mut it = l.split('\t').map(str::trim);
                let surface = it.next()?.to_lowercase();
                let lemma = it.next().map(str::to_lowercase).unwrap_or_else(|| surface.clone());
                Some((surface, lemma))
            })
            .collect();
        let nouns = nouns.lines().filter(content).map(|l| l.trim().to_lowercase()).collect();
        KeyLexicon { verbs, nouns }
    }

    pub fn lemma(&self, surface: &str) -> Option<&str> {
        self.verbs.get(surface).map(String::as_str)
    }
}

pub fn classify_key(key: &str, lex: &KeyLexicon) -> KeySort {
    let Some(head) = tokenize(&strip_parens(key)).into_iter().next() else {
        return KeySort::NounKey;
    };
    if lex.verbs.contains_key(&head) || (head.ends_with("ed") && !lex.nouns.contains(&head)) {
        KeySort::VerbKey
    } else {
        KeySort::NounKey
    }
}

fn strip_parens(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut depth = 0usize;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

pub fn normalize_key(key: &str) -> String {
    let toks: Vec<String> = tokenize(&strip_parens(key)).iter().map(|t| singularize(t)).collect();
    toks.join("_")
}

/// Predicate name for a value; `None` when nothing survives normalization.
pub fn normalize_value(value: &str, stopwords: &Stopwords) -> Option<String> {
    let toks: Vec<String> = tokenize(&strip_parens(value))
        .into_iter()
        .filter(|t| !stopwords.contains(t))
        .map(|t| singularize(&t))
        .collect();
    (!toks.is_empty()).then(|| toks.join("_"))
}

/// `Bryce Dallas Howard` → `bryce_dallas_howard_`.
pub fn title_predicate(title: &str) -> String {
    let mut s = tokenize(title).join("_");
    s.push('_');
    s
}

/// The predicate a row's key contributes to the model.
pub fn key_predicate(key: &str, lex: &KeyLexicon) -> String {
    if classify_key(key, lex) == KeySort::VerbKey {
        let head = tokenize(&strip_parens(key)).into_iter().next().unwrap_or_default();
        if let Some(lemma) = lex.lemma(&head) {
            return lemma.to_string();
        }
    }
    normalize_key(key)
}

/// Where each row's values ended up in the model built from a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowLayout {
    pub key: String,
    pub predicate: String,
    pub sort: KeySort,
    /// Value entities, one per value.
    pub entities: Vec<Individual>,
    /// For verb keys, the event carrying each value; empty for noun keys.
    pub events: Vec<Individual>,
}

/// Build the model for an (already filtered) table.
pub fn build_model(t: &Table, lex: &KeyLexicon, stopwords: &Stopwords) -> Model {
    build_model_with_layout(t, lex, stopwords).0
}

pub fn build_model_with_layout(t: &Table, lex: &KeyLexicon, stopwords: &Stopwords) -> (Model, Vec<RowLayout>) {
    let title = Individual::entity(0);
    let have = Individual::event(0);
    let mut entities = vec![title.clone()];
    let mut events = vec![have.clone()];
    let mut facts: Vec<(String, Vec<Individual>)> = vec![
        (title_predicate(&t.title), vec![title.clone()]),
        ("have".into(), vec![have.clone()]),
        ("Subj".into(), vec![have.clone(), title.clone()]),
    ];
    let mut layout = Vec::with_capacity(t.rows.len());
    for (r, row) in t.rows.iter().enumerate() {
        let sort = classify_key(&row.key, lex);
        let mut pred = key_predicate(&row.key, lex);
        if pred.is_empty() {
            pred = format!("key_{r}");
        }
        let mut rl =
            RowLayout { key: row.key.clone(), predicate: pred.clone(), sort, entities: Vec::new(), events: Vec::new() };
        for (i, value) in row.values.iter().enumerate() {
            let x = Individual::entity(entities.len());
            entities.push(x.clone());
            let vpred = normalize_value(value, stopwords).unwrap_or_else(|| format!("value_{r}_{i}"));
            facts.push((vpred, vec![x.clone()]));
            match sort {
                KeySort::NounKey => {
                    facts.push((pred.clone(), vec![x.clone()]));
                    facts.push(("Acc".into(), vec![have.clone(), x.clone()]));
                }
                KeySort::VerbKey => {
                    let v = Individual::event(events.len());
                    events.push(v.clone());
                    facts.push((pred.clone(), vec![v.clone()]));
                    facts.push(("Subj".into(), vec![v.clone(), title.clone()]));
                    facts.push(("Acc".into(), vec![v.clone(), x.clone()]));
                    rl.events.push(v);
                }
            }
            rl.entities.push(x);
        }
        layout.push(rl);
    }
    entities.extend(events);
    let mut m = Model::new(entities, Default::default()).expect("fresh individuals are distinct");
    for (p, tuple) in facts {
        // Acc and Subj are binary, everything else unary
        m.add_tuple(&p, tuple).expect("construction respects arity");
    }
    (m, layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::order_domain;

    fn table(title: &str, rows: &[(&str, &[&str])]) -> Table {
        Table::new(
            title.into(),
            rows.iter()
                .map(|(k, vs)| Row { key: k.to_string(), values: vs.iter().map(|v| v.to_string()).collect() })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn parse_splits_single_string_values() {
        let doc = br#"{"title": "Karachi", "rows": [
            {"key": "Districts", "values": ["Central Karachi, East Karachi, South Karachi, West Karachi, Korangi, Malir"]},
            {"key": "Born", "values": ["November 20, 1942 (age 79)", "Scranton, Pennsylvania"]}
        ]}"#;
        let t = parse_table(doc).unwrap();
        assert_eq!(t.rows[0].values.len(), 6);
        assert_eq!(t.rows[1].values[0], "November 20, 1942 (age 79)");
        assert_eq!(split_top_level("a (b, c), d"), ["a (b, c)", "d"]);
    }

    #[test]
    fn parse_errors() {
        let e = parse_table(b"{\"title\": \"K\",\n \"rows\": [}").unwrap_err();
        assert!(matches!(e, TableError::Syntax { line: 2, .. }), "{e:?}");
        assert_eq!(parse_table(br#"{"title": " ", "rows": []}"#), Err(TableError::EmptyTitle));
        assert!(matches!(
            parse_table(br#"{"title": "K", "rows": [{"key": "A", "values": []}]}"#),
            Err(TableError::EmptyRow { row: 0, .. })
        ));
        assert_eq!(parse_table(br#"{"title": "K", "rows": []}"#).unwrap().rows.len(), 0);
    }

    #[test]
    fn key_classes() {
        let lex = KeyLexicon::default();
        assert_eq!(classify_key("Spouse(s)", &lex), KeySort::NounKey);
        assert_eq!(classify_key("Born", &lex), KeySort::VerbKey);
        assert_eq!(classify_key("Districts", &lex), KeySort::NounKey);
        assert_eq!(classify_key("Signed", &lex), KeySort::VerbKey);
        assert_eq!(classify_key("Breed", &lex), KeySort::NounKey);
        assert_eq!(key_predicate("Directed by", &lex), "direct");
        assert_eq!(key_predicate("Born", &lex), "born");
    }

    #[test]
    fn normalization() {
        let sw = Stopwords::default();
        assert_eq!(normalize_key("Awards"), "award");
        assert_eq!(normalize_key("Spouse(s)"), "spouse");
        assert_eq!(normalize_key("Political party"), "political_party");
        assert_eq!(normalize_value("Nobel Prize in Physics (1909)", &sw).unwrap(), "nobel_prize_physic");
        assert_eq!(normalize_value("Christian Contreras", &sw).unwrap(), "christian_contreras");
        assert_eq!(normalize_value("Sindh", &sw).unwrap(), "sindh");
        assert_eq!(normalize_value("(the)", &sw), None);
        assert_eq!(title_predicate("Bryce Dallas Howard"), "bryce_dallas_howard_");
    }

    #[test]
    fn jodie_model() {
        let t = table("Jodie Whittaker", &[("Spouse", &["Christian Contreras"])]);
        let m = build_model(&t, &KeyLexicon::default(), &Stopwords::default());
        let ids: Vec<&str> = m.domain().iter().map(|d| d.id()).collect();
        assert_eq!(ids, ["X0", "X1", "V0"]);
        let one = |p: &str| m.extension(p).unwrap().iter().cloned().collect::<Vec<_>>();
        let x = |s: &str| Individual::new(s);
        assert_eq!(one("spouse"), vec![vec![x("X1")]]);
        assert_eq!(one("christian_contreras"), vec![vec![x("X1")]]);
        assert_eq!(one("jodie_whittaker_"), vec![vec![x("X0")]]);
        assert_eq!(one("have"), vec![vec![x("V0")]]);
        assert_eq!(one("Subj"), vec![vec![x("V0"), x("X0")]]);
        assert_eq!(one("Acc"), vec![vec![x("V0"), x("X1")]]);
    }

    #[test]
    fn verb_rows_get_events() {
        let t = table(
            "Joe Biden",
            &[("Born", &["November 20, 1942 (age 79)", "Scranton"]), ("Spouse(s)", &["Neilia Hunter", "Jill Jacobs"])],
        );
        let (m, layout) = build_model_with_layout(&t, &KeyLexicon::default(), &Stopwords::default());
        let ids: Vec<&str> = m.domain().iter().map(|d| d.id()).collect();
        assert_eq!(ids, ["X0", "X1", "X2", "X3", "X4", "V0", "V1", "V2"]);
        assert_eq!(m.unary_members("born"), [Individual::new("V1"), Individual::new("V2")]);
        assert_eq!(m.extension("Acc").unwrap().len(), 4);
        assert_eq!(m.extension("Subj").unwrap().len(), 3);
        assert_eq!(layout[0].events.len(), 2);
        assert_eq!(layout[1].entities, [Individual::new("X3"), Individual::new("X4")]);
        assert_eq!(order_domain(&m).unwrap(), m);
    }

    #[test]
    fn filtering_keeps_top_rows_in_order() {
        let t = table("T", &[("p", &["p"]), ("q", &["q"]), ("r", &["r"])]);
        let emb = HashEmbeddings::default();
        let sw = Stopwords::default();
        let f = filter_rows(&t, "r p", &emb, &sw, 2);
        assert_eq!(f.keys(), ["p", "r"]);
        // all scores equal for an empty hypothesis: earliest rows win
        let f = filter_rows(&t, "the", &emb, &sw, 2);
        assert_eq!(f.keys(), ["p", "q"]);
        let one = table("T", &[("p", &["p"])]);
        assert_eq!(filter_rows(&one, "zzz", &emb, &sw, 2), one);
    }
}
