//! Problem sets: every base hypothesis "exactly n" is rewritten with each
//! comparative around n−1, n and n+1, and labeled arithmetically.

use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::Comparative;
use crate::text::number_name;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "E")]
    Entailment,
    #[serde(rename = "C")]
    Contradiction,
    #[serde(rename = "N")]
    Neutral,
}

impl Label {
    pub fn letter(self) -> char {
        match self {
            Label::Entailment => 'E',
            Label::Contradiction => 'C',
            Label::Neutral => 'N',
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NounForms {
    pub singular: String,
    pub plural: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// `Subject has … nouns.`
    HasNoun,
    /// `Subject won … nouns.` with the given past-tense verb.
    VerbPast(String),
    /// `Subject has married … times.` with the given participle.
    TimesAdverb(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseHypothesis {
    /// Problem-set id; defaults to the table id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub table_id: String,
    pub subject: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noun: Option<NounForms>,
    pub frame: Frame,
    /// The true count, or `None` when the table does not settle it.
    pub n: Option<u32>,
    /// Count used to phrase a neutral set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stated: Option<u32>,
}

impl BaseHypothesis {
    pub fn set_id(&self) -> &str {
        self.id.as_deref().unwrap_or(&self.table_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub set_id: String,
    pub hypothesis: String,
    pub gold: Label,
    pub comparative: Comparative,
    pub k: u32,
    pub table_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("set {0}: n = 0 leaves no smaller numeral to compare against")]
    ZeroCount(String),
    #[error("set {0}: neutral base needs a stated count")]
    MissingStated(String),
    #[error("set {0}: {1} frame needs a noun")]
    MissingNoun(String, &'static str),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("io: {0}")]
    Io(String),
}

/// `None` for `n` means the table neither entails nor contradicts.
pub fn gold_label(comp: Comparative, k: u32, n: Option<u32>) -> Label {
    let Some(n) = n else { return Label::Neutral };
    let holds = match comp {
        Comparative::LessThan => n < k,
        Comparative::NoMoreThan => n <= k,
        Comparative::Exactly => n == k,
        Comparative::Bare | Comparative::AtLeast | Comparative::NoLessThan => n >= k,
        Comparative::MoreThan => n > k,
    };
    if holds {
        Label::Entailment
    } else {
        Label::Contradiction
    }
}

/// Variants nobody would write: any zero, and "less than one".
pub fn is_unnatural(comp: Comparative, k: u32) -> bool {
    k == 0 || (comp == Comparative::LessThan && k == 1)
}

/// Words up to twenty, digits above.
pub fn numeral_words(k: u32) -> String {
    number_name(k).map(str::to_string).unwrap_or_else(|| k.to_string())
}

pub fn render_hypothesis(base: &BaseHypothesis, comp: Comparative, k: u32) -> Result<String, DatasetError> {
    let mut words = vec![base.subject.clone()];
    let comp_words = comp.phrase().map(str::to_string);
    match &base.frame {
        Frame::HasNoun | Frame::VerbPast(_) => {
            let noun = base.noun.as_ref().ok_or_else(|| DatasetError::MissingNoun(base.set_id().into(), "noun"))?;
            words.push(match &base.frame {
                Frame::VerbPast(v) => v.clone(),
                _ => "has".into(),
            });
            words.extend(comp_words);
            words.push(numeral_words(k));
            words.push(if k == 1 { noun.singular.clone() } else { noun.plural.clone() });
        }
        Frame::TimesAdverb(v) => {
            words.push("has".into());
            words.push(v.clone());
            words.extend(comp_words);
            words.push(match k {
                1 => "once".into(),
                2 => "twice".into(),
                _ => format!("{} times", numeral_words(k)),
            });
        }
    }
    Ok(format!("{}.", words.join(" ")))
}

/// Cases ordered by numeral, then comparative.
pub fn generate_problem_set(base: &BaseHypothesis) -> Result<Vec<TestCase>, DatasetError> {
    let id = base.set_id().to_string();
    let count = match (base.n, base.stated) {
        (Some(0), _) => return Err(DatasetError::ZeroCount(id)),
        (Some(n), _) => n,
        (None, Some(s)) if s > 0 => s,
        (None, Some(_)) => return Err(DatasetError::ZeroCount(id)),
        (None, None) => return Err(DatasetError::MissingStated(id)),
    };
    let mut out = Vec::new();
    for k in [count - 1, count, count + 1] {
        for comp in Comparative::ALL {
            if is_unnatural(comp, k) {
                continue;
            }
            out.push(TestCase {
                set_id: id.clone(),
                hypothesis: render_hypothesis(base, comp, k)?,
                gold: gold_label(comp, k, base.n),
                comparative: comp,
                k,
                table_id: base.table_id.clone(),
            });
        }
    }
    Ok(out)
}

fn read_jsonl<T: serde::de::DeserializeOwned>(reader: impl BufRead) -> Result<Vec<T>, DatasetError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| DatasetError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|e| DatasetError::Format { line: i + 1, message: e.to_string() })?,
        );
    }
    Ok(out)
}

pub fn read_bases(reader: impl BufRead) -> Result<Vec<BaseHypothesis>, DatasetError> {
    read_jsonl(reader)
}

pub fn read_cases(reader: impl BufRead) -> Result<Vec<TestCase>, DatasetError> {
    read_jsonl(reader)
}

pub fn write_cases(cases: &[TestCase], mut w: impl std::io::Write) -> std::io::Result<()> {
    for c in cases {
        serde_json::to_writer(&mut w, c)?;
        writeln!(w)?;
    }
    Ok(())
}
