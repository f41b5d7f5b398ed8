//! First-order formulas over entity and event individuals.
//!
//! The AST is deliberately small: n-ary predicates, identity, the usual
//! connectives, the two quantifiers and the nullary constant `True`.
//! Variable names carry their sort by prefix (`x…` entities, `e…` events),
//! individual ids by an upper-case prefix (`X…` entities, `V…`/`E…` events).

mod model;
mod naive;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub(crate) use model::IndexedModel;
pub use model::{Model, ModelError};
pub use naive::{evaluate_naive, evaluate_naive_until, Assignment, EvalError};
pub use parse::{parse_formula, ParseError};

/// Outcome of checking a formula against a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TruthValue {
    True,
    False,
    /// The formula mentions a predicate the valuation does not define.
    Undefined,
    /// The deadline passed before evaluation finished.
    TimedOut,
}

impl TruthValue {
    pub fn from_bool(b: bool) -> Self {
        if b {
            TruthValue::True
        } else {
            TruthValue::False
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            TruthValue::True => "True",
            TruthValue::False => "False",
            TruthValue::Undefined => "Undefined",
            TruthValue::TimedOut => "TimedOut",
        })
    }
}

/// Sort of a variable or individual, read from its name prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Entity,
    Event,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "variable names are nonempty");
        Var(name)
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// `x…` ranges over entities, `e…` over events; anything else is unsorted.
    pub fn sort(&self) -> Option<Sort> {
        match self.0.as_bytes()[0] {
            b'x' => Some(Sort::Entity),
            b'e' => Some(Sort::Event),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Individual(String);

impl Individual {
    pub fn new(id: impl Into<String>) -> Self {
        Individual(id.into())
    }

    pub fn entity(index: usize) -> Self {
        Individual(format!("X{index}"))
    }

    pub fn event(index: usize) -> Self {
        Individual(format!("V{index}"))
    }

    pub fn id(&self) -> &str {
        &self.0
    }

    /// Sort and numeric index for ids of the form `X<n>`, `V<n>` or `E<n>`.
    pub fn sorted_index(&self) -> Option<(Sort, usize)> {
        let (head, tail) = self.0.split_at_checked(1)?;
        let sort = match head {
            "X" => Sort::Entity,
            "V" | "E" => Sort::Event,
            _ => return None,
        };
        if tail.is_empty() || !tail.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        Some((sort, tail.parse().ok()?))
    }

    pub fn sort(&self) -> Option<Sort> {
        self.sorted_index().map(|(s, _)| s)
    }
}

impl fmt::Display for Individual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Individual {
    fn from(s: &str) -> Self {
        Individual::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Ind(Individual),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Var::new(name))
    }

    pub fn ind(id: &str) -> Self {
        Term::Ind(Individual::new(id))
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Self {
        Term::Var(v)
    }
}

impl From<&Var> for Term {
    fn from(v: &Var) -> Self {
        Term::Var(v.clone())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => v.fmt(f),
            Term::Ind(i) => i.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    Pred { name: String, args: Vec<Term> },
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    ForAll(Var, Box<Formula>),
}

impl Formula {
    pub fn pred<I, T>(name: impl Into<String>, args: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<Term>,
    {
        Formula::Pred { name: name.into(), args: args.into_iter().map(Into::into).collect() }
    }

    pub fn eq(lhs: impl Into<Term>, rhs: impl Into<Term>) -> Self {
        Formula::Eq(lhs.into(), rhs.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Self {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    pub fn exists(v: impl Into<Var>, body: Formula) -> Self {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn forall(v: impl Into<Var>, body: Formula) -> Self {
        Formula::ForAll(v.into(), Box::new(body))
    }

    /// `¬True`, used where an empty disjunction is needed.
    pub fn falsum() -> Self {
        Formula::not(Formula::True)
    }

    /// Left-nested conjunction; empty input gives `True`.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; empty input gives `¬True`.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::or).unwrap_or_else(Formula::falsum)
    }

    /// Nest `exists` binders, outermost first.
    pub fn exists_many(vars: impl IntoIterator<Item = Var>, body: Formula) -> Self {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter().rev().fold(body, |acc, v| Formula::exists(v, acc))
    }

    pub fn forall_many(vars: impl IntoIterator<Item = Var>, body: Formula) -> Self {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter().rev().fold(body, |acc, v| Formula::forall(v, acc))
    }

    pub fn free_variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// All predicate names occurring in the formula.
    pub fn predicate_names(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Pred { name, .. } = f {
                out.insert(name.as_str());
            }
        });
        out
    }

    /// Every variable name bound by a quantifier.
    pub fn bound_variables(&self) -> BTreeSet<&Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Exists(v, _) | Formula::ForAll(v, _) = f {
                out.insert(v);
            }
        });
        out
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::True | Formula::Pred { .. } | Formula::Eq(..) => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.quantifier_depth().max(r.quantifier_depth())
            }
            Formula::Exists(_, b) | Formula::ForAll(_, b) => 1 + b.quantifier_depth(),
        }
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::True | Formula::Pred { .. } | Formula::Eq(..) => {}
            Formula::Not(a) | Formula::Exists(_, a) | Formula::ForAll(_, a) => a.visit(f),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }

    /// Drop `True` conjuncts: `A ∧ True → A`, `True ∧ A → A`.
    pub fn simplify_true(&self) -> Formula {
        match self {
            Formula::True | Formula::Pred { .. } | Formula::Eq(..) => self.clone(),
            Formula::Not(a) => Formula::not(a.simplify_true()),
            Formula::And(l, r) => match (l.simplify_true(), r.simplify_true()) {
                (Formula::True, x) | (x, Formula::True) => x,
                (l, r) => Formula::and(l, r),
            },
            Formula::Or(l, r) => Formula::or(l.simplify_true(), r.simplify_true()),
            Formula::Imp(l, r) => Formula::imp(l.simplify_true(), r.simplify_true()),
            Formula::Exists(v, b) => Formula::exists(v.clone(), b.simplify_true()),
            Formula::ForAll(v, b) => Formula::forall(v.clone(), b.simplify_true()),
        }
    }

    /// Structural equality up to consistent renaming of bound variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        alpha_eq(self, other, &mut Vec::new())
    }
}

fn collect_free<'a>(f: &'a Formula, bound: &mut Vec<&'a Var>, out: &mut BTreeSet<Var>) {
    let term = |t: &Term, bound: &Vec<&Var>, out: &mut BTreeSet<Var>| {
        if let Term::Var(v) = t {
            if !bound.contains(&v) {
                out.insert(v.clone());
            }
        }
    };
    match f {
        Formula::True => {}
        Formula::Pred { args, .. } => args.iter().for_each(|t| term(t, bound, out)),
        Formula::Eq(a, b) => {
            term(a, bound, out);
            term(b, bound, out);
        }
        Formula::Not(a) => collect_free(a, bound, out),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
            collect_free(l, bound, out);
            collect_free(r, bound, out);
        }
        Formula::Exists(v, b) | Formula::ForAll(v, b) => {
            bound.push(v);
            collect_free(b, bound, out);
            bound.pop();
        }
    }
}

fn alpha_eq<'a>(a: &'a Formula, b: &'a Formula, scope: &mut Vec<(&'a Var, &'a Var)>) -> bool {
    let term_eq = |x: &Term, y: &Term, scope: &Vec<(&Var, &Var)>| match (x, y) {
        (Term::Ind(i), Term::Ind(j)) => i == j,
        (Term::Var(v), Term::Var(w)) => {
            let lv = scope.iter().rev().find(|(l, _)| *l == v);
            let rw = scope.iter().rev().find(|(_, r)| *r == w);
            match (lv, rw) {
                (Some((_, r)), Some((l, _))) => *r == w && *l == v,
                (None, None) => v == w,
                _ => false,
            }
        }
        _ => false,
    };
    match (a, b) {
        (Formula::True, Formula::True) => true,
        (Formula::Pred { name: n1, args: a1 }, Formula::Pred { name: n2, args: a2 }) => {
            n1 == n2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| term_eq(x, y, scope))
        }
        (Formula::Eq(a1, b1), Formula::Eq(a2, b2)) => term_eq(a1, a2, scope) && term_eq(b1, b2, scope),
        (Formula::Not(x), Formula::Not(y)) => alpha_eq(x, y, scope),
        (Formula::And(l1, r1), Formula::And(l2, r2))
        | (Formula::Or(l1, r1), Formula::Or(l2, r2))
        | (Formula::Imp(l1, r1), Formula::Imp(l2, r2)) => alpha_eq(l1, l2, scope) && alpha_eq(r1, r2, scope),
        (Formula::Exists(v, x), Formula::Exists(w, y)) | (Formula::ForAll(v, x), Formula::ForAll(w, y)) => {
            scope.push((v, w));
            let eq = alpha_eq(x, y, scope);
            scope.pop();
            eq
        }
        _ => false,
    }
}

/// A formula whose printed form ends in an open binder body must be wrapped
/// when something follows it.
fn ends_open(f: &Formula) -> bool {
    match f {
        Formula::Exists(..) | Formula::ForAll(..) => true,
        Formula::Not(a) => ends_open(a),
        _ => false,
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("True"),
            Formula::Pred { name, args } => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Formula::Eq(a, b) => write!(f, "({a} = {b})"),
            Formula::Not(a) => write!(f, "-{a}"),
            Formula::And(..) | Formula::Or(..) => {
                let op = if matches!(self, Formula::And(..)) { " & " } else { " | " };
                // flatten left-nested chains of the same connective
                let mut items = Vec::new();
                let mut cur = self;
                loop {
                    match (self, cur) {
                        (Formula::And(..), Formula::And(l, r)) | (Formula::Or(..), Formula::Or(l, r)) => {
                            items.push(r.as_ref());
                            cur = l;
                        }
                        _ => {
                            items.push(cur);
                            break;
                        }
                    }
                }
                items.reverse();
                f.write_str("(")?;
                let last = items.len() - 1;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    if i < last && ends_open(item) {
                        write!(f, "({item})")?;
                    } else {
                        write!(f, "{item}")?;
                    }
                }
                f.write_str(")")
            }
            Formula::Imp(l, r) => {
                if ends_open(l) {
                    write!(f, "(({l}) -> {r})")
                } else {
                    write!(f, "({l} -> {r})")
                }
            }
            Formula::Exists(v, b) => write!(f, "exists {v}.{b}"),
            Formula::ForAll(v, b) => write!(f, "all {v}.{b}"),
        }
    }
}
