use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A categorial type. `Fwd(x, y)` is `x/y` (argument to the right) and
/// `Bwd(x, y)` is `x\y` (argument to the left).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Category {
    Atom(String),
    Fwd(Box<Category>, Box<Category>),
    Bwd(Box<Category>, Box<Category>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad category {text:?} at byte {offset}: {message}")]
pub struct CatParseError {
    pub text: String,
    pub offset: usize,
    pub message: String,
}

impl Category {
    pub fn atom(name: &str) -> Self {
        Category::Atom(name.to_string())
    }

    pub fn fwd(result: Category, arg: Category) -> Self {
        Category::Fwd(Box::new(result), Box::new(arg))
    }

    pub fn bwd(result: Category, arg: Category) -> Self {
        Category::Bwd(Box::new(result), Box::new(arg))
    }

    pub fn is_atom(&self, name: &str) -> bool {
        matches!(self, Category::Atom(a) if a == name)
    }

    /// Number of arguments before an atomic result.
    pub fn arity(&self) -> usize {
        match self {
            Category::Atom(_) => 0,
            Category::Fwd(r, _) | Category::Bwd(r, _) => 1 + r.arity(),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn side(c: &Category, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match c {
                Category::Atom(a) => f.write_str(a),
                _ => write!(f, "({c})"),
            }
        }
        match self {
            Category::Atom(a) => f.write_str(a),
            Category::Fwd(r, a) | Category::Bwd(r, a) => {
                side(r, f)?;
                f.write_str(if matches!(self, Category::Fwd(..)) { "/" } else { "\\" })?;
                side(a, f)
            }
        }
    }
}

impl FromStr for Category {
    type Err = CatParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = CatParser { src: s.as_bytes(), text: s, pos: 0 };
        let c = p.category()?;
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(c)
    }
}

struct CatParser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl CatParser<'_> {
    fn error(&self, message: &str) -> CatParseError {
        CatParseError { text: self.text.to_string(), offset: self.pos, message: message.to_string() }
    }

    fn category(&mut self) -> Result<Category, CatParseError> {
        let mut acc = self.primary()?;
        while let Some(&c) = self.src.get(self.pos) {
            let fwd = match c {
                b'/' => true,
                b'\\' => false,
                _ => break,
            };
            self.pos += 1;
            let arg = self.primary()?;
            acc = if fwd { Category::fwd(acc, arg) } else { Category::bwd(acc, arg) };
        }
        Ok(acc)
    }

    fn primary(&mut self) -> Result<Category, CatParseError> {
        match self.src.get(self.pos) {
            Some(b'(') => {
                self.pos += 1;
                let c = self.category()?;
                if self.src.get(self.pos) != Some(&b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(c)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric()) {
                    self.pos += 1;
                }
                if self.src.get(self.pos) == Some(&b'[') {
                    while self.src.get(self.pos).is_some_and(|c| *c != b']') {
                        self.pos += 1;
                    }
                    if self.src.get(self.pos).is_none() {
                        return Err(self.error("unclosed feature"));
                    }
                    self.pos += 1;
                }
                Ok(Category::Atom(self.text[start..self.pos].to_string()))
            }
            _ => Err(self.error("expected an atom or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        for s in ["N", "N/N", "(S\\NP)/NP", "(S\\NP)\\(S\\NP)", "((S\\NP)\\(S\\NP))/((S\\NP)\\(S\\NP))", "S[dcl]\\NP"] {
            let c: Category = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
        let tv: Category = "S\\NP/NP".parse().unwrap();
        assert_eq!(tv, "(S\\NP)/NP".parse().unwrap());
        assert_eq!(tv.arity(), 2);
        assert!("(S\\NP".parse::<Category>().is_err());
        assert!("S/".parse::<Category>().is_err());
    }
}
