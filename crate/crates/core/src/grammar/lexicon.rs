use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use super::{Category, Comparative};

const DEFAULT_LEXICON: &str = include_str!("../../data/lexicon.tsv");

/// Which semantic recipe a lexical entry uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Template {
    /// Transitive verb with the given event predicate.
    Tv(String),
    /// Intransitive verb.
    Iv(String),
    /// Auxiliary: identity on verb phrases.
    Aux,
    Comparative(Comparative),
    /// `times`, waiting for a numeral on its left.
    Times,
    /// `once`, `twice`: a complete event count.
    Freq(u32),
}

impl Template {
    pub fn parse(id: &str) -> Option<Self> {
        let (head, arg) = id.split_once(':').unwrap_or((id, ""));
        Some(match (head, arg) {
            ("tv", l) if !l.is_empty() => Template::Tv(l.to_string()),
            ("iv", l) if !l.is_empty() => Template::Iv(l.to_string()),
            ("aux", "") => Template::Aux,
            ("comp", c) => Template::Comparative(Comparative::from_name(c)?),
            ("times", "") => Template::Times,
            ("freq", k) => Template::Freq(k.parse().ok()?),
            _ => return None,
        })
    }

    pub fn verb_lemma(&self) -> Option<&str> {
        match self {
            Template::Tv(l) | Template::Iv(l) => Some(l),
            _ => None,
        }
    }

    fn fits(&self, cat: &Category) -> bool {
        let vp = || Category::bwd(Category::atom("S"), Category::atom("NP"));
        let adverb = || Category::bwd(vp(), vp());
        match self {
            Template::Tv(_) => *cat == Category::fwd(vp(), Category::atom("NP")),
            Template::Iv(_) => *cat == vp(),
            Template::Aux => *cat == Category::fwd(vp(), vp()),
            Template::Comparative(_) => matches!(cat, Category::Fwd(..)) || *cat == adverb(),
            Template::Times | Template::Freq(_) => *cat == adverb(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("lexicon line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// Closed-class and verb entries. Nouns, numerals and proper nouns are
/// recognized without entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    entries: HashMap<String, Vec<(Category, Template)>>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::parse(DEFAULT_LEXICON).expect("built-in lexicon is well formed")
    }
}

impl Lexicon {
    /// `surface<TAB>category<TAB>template-id` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut entries: HashMap<String, Vec<(Category, Template)>> = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| LexiconError::Format { line: i + 1, message };
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [surface, cat, template] = cols.as_slice() else {
                return Err(err(format!("expected 3 tab-separated fields, found {}", cols.len())));
            };
            let cat: Category = cat.parse().map_err(|e: super::CatParseError| err(e.to_string()))?;
            let template = Template::parse(template).ok_or_else(|| err(format!("unknown template {template:?}")))?;
            if !template.fits(&cat) {
                return Err(err(format!("template {template:?} does not fit category {cat}")));
            }
            entries.entry(surface.to_lowercase()).or_default().push((cat, template));
        }
        Ok(Lexicon { entries })
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LexiconError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Lexicon::parse(&text)
    }

    pub fn entries(&self, surface: &str) -> &[(Category, Template)] {
        self.entries.get(surface).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_lexicon_loads() {
        let lx = Lexicon::default();
        assert!(lx.entries("won").iter().any(|(_, t)| *t == Template::Tv("win".into())));
        assert!(lx.entries("husbands").is_empty());
    }

    #[test]
    fn rejects_bad_lines() {
        let e = Lexicon::parse("won\t(S\\NP)/NP\n").unwrap_err();
        assert!(matches!(e, LexiconError::Format { line: 1, .. }));
        let e = Lexicon::parse("# c\nwon\tS\\NP\ttv:win\n").unwrap_err();
        assert!(matches!(e, LexiconError::Format { line: 2, .. }));
        assert!(Lexicon::parse("x\tN\tblah\n").is_err());
    }
}
