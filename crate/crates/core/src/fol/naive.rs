//! Reference evaluator: every quantifier walks the whole domain in order.

use std::collections::BTreeMap;
use std::time::Instant;

use thiserror::Error;

use super::{Formula, IndexedModel, Individual, Model, Term, TruthValue, Var};

pub type Assignment = BTreeMap<Var, Individual>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("free variable {0} has no value in the assignment")]
    UnboundVariable(Var),
    #[error("individual {0} is not in the domain")]
    UnknownIndividual(Individual),
}

enum Arg {
    Slot(usize),
    Const(u32),
}

enum Node {
    True,
    Atom { rel: usize, args: Vec<Arg> },
    Eq(Arg, Arg),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Imp(Box<Node>, Box<Node>),
    Exists(usize, Box<Node>),
    ForAll(usize, Box<Node>),
}

struct Lowering<'a> {
    model: &'a IndexedModel,
    scope: Vec<(&'a Var, usize)>,
    slots: usize,
}

impl<'a> Lowering<'a> {
    fn arg(&self, t: &Term) -> Result<Arg, EvalError> {
        match t {
            Term::Var(v) => self
                .scope
                .iter()
                .rev()
                .find(|(w, _)| *w == v)
                .map(|(_, s)| Arg::Slot(*s))
                .ok_or_else(|| EvalError::UnboundVariable(v.clone())),
            Term::Ind(i) => {
                self.model.individual(i.id()).map(Arg::Const).ok_or_else(|| EvalError::UnknownIndividual(i.clone()))
            }
        }
    }

    fn lower(&mut self, f: &'a Formula) -> Result<Node, EvalError> {
        Ok(match f {
            Formula::True => Node::True,
            Formula::Pred { name, args } => Node::Atom {
                rel: self.model.predicate(name).expect("predicates checked before lowering"),
                args: args.iter().map(|a| self.arg(a)).collect::<Result<_, _>>()?,
            },
            Formula::Eq(a, b) => Node::Eq(self.arg(a)?, self.arg(b)?),
            Formula::Not(a) => Node::Not(Box::new(self.lower(a)?)),
            Formula::And(l, r) => Node::And(Box::new(self.lower(l)?), Box::new(self.lower(r)?)),
            Formula::Or(l, r) => Node::Or(Box::new(self.lower(l)?), Box::new(self.lower(r)?)),
            Formula::Imp(l, r) => Node::Imp(Box::new(self.lower(l)?), Box::new(self.lower(r)?)),
            Formula::Exists(v, b) | Formula::ForAll(v, b) => {
                let slot = self.slots;
                self.slots += 1;
                self.scope.push((v, slot));
                let body = Box::new(self.lower(b)?);
                self.scope.pop();
                if matches!(f, Formula::Exists(..)) {
                    Node::Exists(slot, body)
                } else {
                    Node::ForAll(slot, body)
                }
            }
        })
    }
}

struct Interrupted;

struct Eval<'a> {
    model: &'a IndexedModel,
    env: Vec<u32>,
    deadline: Option<Instant>,
}

impl Eval<'_> {
    fn value(&self, a: &Arg) -> u32 {
        match a {
            Arg::Slot(s) => self.env[*s],
            Arg::Const(c) => *c,
        }
    }

    fn eval(&mut self, n: &Node) -> Result<bool, Interrupted> {
        Ok(match n {
            Node::True => true,
            Node::Atom { rel, args } => {
                let ext = &self.model.extensions[*rel];
                match args.as_slice() {
                    [a] => ext.contains(&[self.value(a)]),
                    [a, b] => ext.contains(&[self.value(a), self.value(b)]),
                    _ => {
                        let vals: Vec<u32> = args.iter().map(|a| self.value(a)).collect();
                        ext.contains(&vals)
                    }
                }
            }
            Node::Eq(a, b) => self.value(a) == self.value(b),
            Node::Not(a) => !self.eval(a)?,
            Node::And(l, r) => self.eval(l)? && self.eval(r)?,
            Node::Or(l, r) => self.eval(l)? || self.eval(r)?,
            Node::Imp(l, r) => !self.eval(l)? || self.eval(r)?,
            Node::Exists(slot, body) => {
                for d in 0..self.model.size as u32 {
                    self.tick()?;
                    self.env[*slot] = d;
                    if self.eval(body)? {
                        return Ok(true);
                    }
                }
                false
            }
            Node::ForAll(slot, body) => {
                for d in 0..self.model.size as u32 {
                    self.tick()?;
                    self.env[*slot] = d;
                    if !self.eval(body)? {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }

    #[inline]
    fn tick(&self) -> Result<(), Interrupted> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Interrupted),
            _ => Ok(()),
        }
    }
}

/// Evaluate `f` in `m` under `assignment` with plain NLTK-style semantics.
///
/// A predicate name missing from the valuation anywhere in `f` makes the
/// result `Undefined`. Identity is always defined.
pub fn evaluate_naive(f: &Formula, m: &Model, assignment: &Assignment) -> Result<TruthValue, EvalError> {
    evaluate_naive_until(f, m, assignment, None)
}

/// As [`evaluate_naive`], but gives up with `TimedOut` once `deadline` passes.
pub fn evaluate_naive_until(
    f: &Formula,
    m: &Model,
    assignment: &Assignment,
    deadline: Option<Instant>,
) -> Result<TruthValue, EvalError> {
    if let Some(v) = f.free_variables().into_iter().find(|v| !assignment.contains_key(v)) {
        return Err(EvalError::UnboundVariable(v));
    }
    let indexed = IndexedModel::new(m);
    let mut lowering = Lowering { model: &indexed, scope: Vec::new(), slots: 0 };
    let mut env = Vec::new();
    for (v, ind) in assignment {
        let d = indexed.individual(ind.id()).ok_or_else(|| EvalError::UnknownIndividual(ind.clone()))?;
        lowering.scope.push((v, lowering.slots));
        lowering.slots += 1;
        env.push(d);
    }
    if f.predicate_names().iter().any(|p| !m.has_predicate(p)) {
        // individuals and variables are still checked above for usage errors
        return Ok(TruthValue::Undefined);
    }
    let node = lowering.lower(f)?;
    env.resize(lowering.slots, 0);
    let mut ev = Eval { model: &indexed, env, deadline };
    Ok(match ev.eval(&node) {
        Ok(b) => TruthValue::from_bool(b),
        Err(Interrupted) => TruthValue::TimedOut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse_formula;
    use std::collections::BTreeSet;

    fn three_people() -> Model {
        let ind = |s: &str| Individual::new(s);
        let mut v: BTreeMap<String, BTreeSet<Vec<Individual>>> = BTreeMap::new();
        let mut put = |p: &str, ts: &[&[&str]]| {
            v.insert(p.into(), ts.iter().map(|t| t.iter().map(|s| ind(s)).collect()).collect());
        };
        put("alice", &[&["G1"]]);
        put("bob", &[&["B1"]]);
        put("cathy", &[&["G2"]]);
        put("boy", &[&["B1"]]);
        put("girl", &[&["G1"], &["G2"]]);
        put("like", &[&["B1", "G1"], &["B1", "G2"], &["G1", "B1"]]);
        Model::new(vec![ind("B1"), ind("G1"), ind("G2")], v).unwrap()
    }

    fn eval(s: &str, m: &Model) -> TruthValue {
        evaluate_naive(&parse_formula(s).unwrap(), m, &Assignment::new()).unwrap()
    }

    #[test]
    fn three_outcomes() {
        let m = three_people();
        assert_eq!(eval("exists x.exists y.(boy(x) & like(x,y))", &m), TruthValue::True);
        assert_eq!(eval("exists x.exists y.(girl(x) & girl(y) & like(x,y))", &m), TruthValue::False);
        assert_eq!(eval("exists x.exists y.(cat(y) & like(x,y))", &m), TruthValue::Undefined);
    }

    #[test]
    fn undefined_is_absorbing_through_connectives() {
        let m = three_people();
        assert_eq!(eval("True | cat(B1)", &m), TruthValue::Undefined);
        assert_eq!(eval("-(exists y.cat(y))", &m), TruthValue::Undefined);
    }

    #[test]
    fn free_variables_need_values() {
        let m = three_people();
        let f = parse_formula("boy(x)").unwrap();
        assert_eq!(evaluate_naive(&f, &m, &Assignment::new()), Err(EvalError::UnboundVariable(Var::new("x"))));
        let mut g = Assignment::new();
        g.insert(Var::new("x"), Individual::new("B1"));
        assert_eq!(evaluate_naive(&f, &m, &g), Ok(TruthValue::True));
        g.insert(Var::new("x"), Individual::new("Z9"));
        assert!(matches!(evaluate_naive(&f, &m, &g), Err(EvalError::UnknownIndividual(_))));
    }

    #[test]
    fn shadowing_binds_innermost() {
        let m = three_people();
        assert_eq!(eval("exists x.(boy(x) & exists x.girl(x))", &m), TruthValue::True);
        assert_eq!(eval("exists x.(boy(x) & exists x.-girl(x) & girl(x))", &m), TruthValue::False);
    }

    #[test]
    fn equality_is_identity() {
        let m = three_people();
        assert_eq!(eval("all x.(x = x)", &m), TruthValue::True);
        assert_eq!(eval("exists x.exists y.(girl(x) & girl(y) & -(x = y))", &m), TruthValue::True);
        assert_eq!(eval("exists x.exists y.(boy(x) & boy(y) & -(x = y))", &m), TruthValue::False);
    }

    #[test]
    fn past_deadline_times_out() {
        let m = three_people();
        let f = parse_formula("exists x.boy(x)").unwrap();
        let past = Instant::now();
        std::thread::sleep(std::time::Duration::from_millis(2));
        assert_eq!(evaluate_naive_until(&f, &m, &Assignment::new(), Some(past)), Ok(TruthValue::TimedOut));
    }
}
