//! Tokenization, stopwords and noun singularization shared by the table
//! compiler and the hypothesis compiler.

use std::collections::HashSet;
use std::path::Path;

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

const NUMBER_WORDS: [&str; 21] = [
    "zero",
    "one",
    "two",
    "three",
    "four",
    "five",
    "six",
    "seven",
    "eight",
    "nine",
    "ten",
    "eleven",
    "twelve",
    "thirteen",
    "fourteen",
    "fifteen",
    "sixteen",
    "seventeen",
    "eighteen",
    "nineteen",
    "twenty",
];

/// Lowercase and split on anything that is not a letter or digit.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).map(str::to_lowercase).collect()
}

/// Value of a number word from zero to twenty.
pub fn number_word(token: &str) -> Option<u32> {
    NUMBER_WORDS.iter().position(|w| *w == token).map(|i| i as u32)
}

pub fn number_name(k: u32) -> Option<&'static str> {
    NUMBER_WORDS.get(k as usize).copied()
}

/// Digits, number words and dozen-style counters.
pub fn is_numeric_token(token: &str) -> bool {
    (!token.is_empty() && token.chars().all(|c| c.is_ascii_digit()))
        || number_word(token).is_some()
        || matches!(token, "dozen" | "half")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stopwords {
    words: HashSet<String>,
}

impl Default for Stopwords {
    fn default() -> Self {
        Stopwords::parse(DEFAULT_STOPWORDS)
    }
}

impl Stopwords {
    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Stopwords { words }
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        Ok(Stopwords::parse(&std::fs::read_to_string(path)?))
    }

    /// Listed in the file. Says nothing about numbers.
    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    /// Listed, or numeric. This is the test used when filtering rows.
    pub fn is_stop(&self, token: &str) -> bool {
        self.contains(token) || is_numeric_token(token)
    }
}

const IRREGULAR: &[(&str, &str)] = &[
    ("children", "child"),
    ("people", "person"),
    ("men", "man"),
    ("women", "woman"),
    ("wives", "wife"),
    ("lives", "life"),
    ("knives", "knife"),
    ("leaves", "leaf"),
    ("halves", "half"),
    ("shelves", "shelf"),
    ("wolves", "wolf"),
    ("feet", "foot"),
    ("teeth", "tooth"),
    ("mice", "mouse"),
    ("geese", "goose"),
    ("oxen", "ox"),
    ("alumni", "alumnus"),
    ("criteria", "criterion"),
    ("phenomena", "phenomenon"),
    ("indices", "index"),
    ("analyses", "analysis"),
    ("theses", "thesis"),
    ("crises", "crisis"),
    ("movies", "movie"),
    ("cookies", "cookie"),
    ("zombies", "zombie"),
    ("calories", "calorie"),
    ("houses", "house"),
    ("horses", "horse"),
    ("courses", "course"),
    ("nurses", "nurse"),
    ("verses", "verse"),
    ("responses", "response"),
    ("uses", "use"),
    ("causes", "cause"),
    ("cases", "case"),
    ("bases", "base"),
    ("phases", "phase"),
    ("releases", "release"),
    ("databases", "database"),
    ("spouses", "spouse"),
    ("purposes", "purpose"),
    ("licenses", "license"),
    ("expenses", "expense"),
    ("franchises", "franchise"),
    ("premises", "premise"),
    ("promises", "promise"),
    ("ties", "tie"),
    ("lies", "lie"),
    ("pies", "pie"),
];

const INVARIANT: &[&str] = &[
    "series",
    "species",
    "news",
    "data",
    "sheep",
    "fish",
    "deer",
    "aircraft",
    "means",
    "headquarters",
    "is",
    "was",
    "texas",
    "vegas",
    "christmas",
    "atlas",
    "contreras",
    "burgos",
    "carlos",
    "lucas",
    "thomas",
    "douglas",
    "nicholas",
    "marcus",
    "james",
    "charles",
    "jones",
    "has",
    "this",
    "its",
    "his",
    "hers",
    "yes",
    "us",
    "gas",
    "bus",
];

/// Crude English singularization of one lowercase token.
pub fn singularize(token: &str) -> String {
    if let Some((_, s)) = IRREGULAR.iter().find(|(p, _)| *p == token) {
        return s.to_string();
    }
    if token.len() <= 3 || INVARIANT.contains(&token) {
        return token.to_string();
    }
    if let Some(stem) = token.strip_suffix("ies") {
        return format!("{stem}y");
    }
    for tail in ["xes", "ches", "shes", "zes", "sses"] {
        if token.ends_with(tail) {
            return token[..token.len() - 2].to_string();
        }
    }
    if token.ends_with("ses") {
        return token[..token.len() - 2].to_string();
    }
    if token.ends_with("ss") || token.ends_with("us") || token.ends_with("is") {
        return token.to_string();
    }
    match token.strip_suffix('s') {
        Some(stem) => stem.to_string(),
        None => token.to_string(),
    }
}
