use thiserror::Error;

use super::{Formula, Individual, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    And,
    Or,
    Imp,
    Not,
    Eq,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (at, tok) = lx.next()?;
            let end = tok == Tok::End;
            out.push((at, tok));
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(usize, Tok), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let at = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            return Ok((at, Tok::End));
        };
        let single = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            b'.' => Some(Tok::Dot),
            b'&' => Some(Tok::And),
            b'|' => Some(Tok::Or),
            b'=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            return Ok((at, t));
        }
        if c == b'-' {
            if bytes.get(self.pos + 1) == Some(&b'>') {
                self.pos += 2;
                return Ok((at, Tok::Imp));
            }
            self.pos += 1;
            return Ok((at, Tok::Not));
        }
        if c.is_ascii_alphanumeric() || c == b'_' {
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            return Ok((at, Tok::Ident(self.src[at..self.pos].to_string())));
        }
        Err(ParseError {
            offset: at,
            message: format!("unexpected character {:?}", self.src[at..].chars().next().unwrap()),
        })
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
}

/// Parse the textual formula syntax: `exists v.`, `all v.`, `&`, `|`, `->`,
/// `-` (negation), `=`, `pred(a,b)`, `True` and parentheses.
///
/// Binder bodies extend as far to the right as possible; `&` and `|` are
/// left-associative and `->` is right-associative. A binder may list several
/// variables (`exists x0 x1.`), which nests one quantifier per variable.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: Lexer::tokens(text)?, i: 0 };
    let f = p.formula()?;
    match p.peek() {
        Tok::End => Ok(f),
        t => Err(p.error(format!("trailing input starting with {t:?}"))),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].1
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].1.clone();
        if t != Tok::End {
            self.i += 1;
        }
        t
    }

    fn error(&self, message: String) -> ParseError {
        ParseError { offset: self.toks[self.i].0, message }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {tok:?}, found {:?}", self.peek())))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Imp {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(kw) if kw == "exists" || kw == "all" || kw == "forall" => {
                self.bump();
                let mut vars = Vec::new();
                while let Tok::Ident(name) = self.peek().clone() {
                    if !starts_lower(&name) {
                        return Err(self.error(format!("binder needs a variable, found {name}")));
                    }
                    self.bump();
                    vars.push(Var::new(name));
                }
                if vars.is_empty() {
                    return Err(self.error("binder without variables".into()));
                }
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if kw == "exists" { Formula::exists_many(vars, body) } else { Formula::forall_many(vars, body) })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) => {
                if name == "True" && *self.peek_at(1) != Tok::LParen {
                    self.bump();
                    return Ok(Formula::True);
                }
                if *self.peek_at(1) == Tok::LParen {
                    self.bump();
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        loop {
                            args.push(self.term()?);
                            if *self.peek() == Tok::Comma {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen)?;
                    return Ok(Formula::Pred { name, args });
                }
                let lhs = self.term()?;
                self.expect(Tok::Eq)?;
                let rhs = self.term()?;
                Ok(Formula::Eq(lhs, rhs))
            }
            t => Err(self.error(format!("expected a formula, found {t:?}"))),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                if name.starts_with(|c: char| c.is_ascii_uppercase()) {
                    Ok(Term::Ind(Individual::new(name)))
                } else {
                    Ok(Term::Var(Var::new(name)))
                }
            }
            t => Err(self.error(format!("expected a term, found {t:?}"))),
        }
    }
}

fn starts_lower(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase())
}
