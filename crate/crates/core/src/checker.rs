//! Optimized model checking.
//!
//! Same truth conditions as [`crate::fol::evaluate_naive`], with four
//! enumeration restrictions that can be toggled independently:
//!
//! * domain ordering: entities `X0..` first, then events `V0..`;
//! * sort constraint: `x…` variables range over entities and `e…` variables
//!   over events, for both quantifiers;
//! * distinctness pruning: inside a chain of nested existential entity
//!   quantifiers a candidate already bound further out is skipped, and an
//!   existential event variable skips the values of outer variables its body
//!   explicitly requires it to differ from;
//! * partial evaluation: after each binding the quantifier body is evaluated
//!   in three-valued logic with the still-unbound variables unknown, and the
//!   subtree is skipped when the outcome is already fixed.
//!
//! The last one is only sound for formulas whose multi-witness existentials
//! carry explicit inequations, which is what the hypothesis compiler emits.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fol::{evaluate_naive, Assignment, Formula, IndexedModel, Individual, Model, Sort, Term, TruthValue, Var};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckerOptions {
    pub timeout: Duration,
    pub sort_constraint: bool,
    pub distinctness_pruning: bool,
    pub domain_ordering: bool,
    pub partial_evaluation: bool,
}

impl Default for CheckerOptions {
    fn default() -> Self {
        CheckerOptions {
            timeout: DEFAULT_TIMEOUT,
            sort_constraint: true,
            distinctness_pruning: true,
            domain_ordering: true,
            partial_evaluation: true,
        }
    }
}

impl CheckerOptions {
    /// Every restriction off: enumerates exactly like the naive evaluator.
    pub fn unoptimized() -> Self {
        CheckerOptions {
            timeout: DEFAULT_TIMEOUT,
            sort_constraint: false,
            distinctness_pruning: false,
            domain_ordering: false,
            partial_evaluation: false,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        assert!(!timeout.is_zero(), "timeout must be positive");
        self.timeout = timeout;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub value: TruthValue,
    pub elapsed: Duration,
    /// Number of quantifier bindings made.
    pub assignments_tried: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("malformed individual id {0:?}: expected X<n>, V<n> or E<n>")]
    MalformedId(String),
    #[error("formula is not closed: {0} is free")]
    OpenFormula(Var),
    #[error("individual {0} is not in the domain")]
    UnknownIndividual(Individual),
}

/// Reorder the domain as `X0, X1, …, V0, V1, …` (events named `E<n>` sort
/// with the `V`s). The valuation is untouched.
pub fn order_domain(m: &Model) -> Result<Model, CheckError> {
    let mut keyed = m
        .domain()
        .iter()
        .map(|d| d.sorted_index().map(|k| (k, d.clone())).ok_or_else(|| CheckError::MalformedId(d.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    keyed.sort_by_key(|k| k.0);
    Ok(m.with_domain_order(keyed.into_iter().map(|(_, d)| d).collect()))
}

#[derive(Clone, Copy)]
enum Arg {
    Slot(usize),
    Const(u32),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Range {
    All,
    Entities,
    Events,
}

enum Node {
    True,
    Atom {
        rel: usize,
        args: Vec<Arg>,
    },
    Eq(Arg, Arg),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Imp(Box<Node>, Box<Node>),
    /// `pigeonhole` counts the `distinct_from` slots known to hold pairwise
    /// different values of `range`.
    Exists {
        slot: usize,
        range: Range,
        distinct_from: Vec<usize>,
        pigeonhole: usize,
        body: Box<Node>,
    },
    ForAll {
        slot: usize,
        range: Range,
        body: Box<Node>,
    },
}

struct Lowering<'a> {
    model: &'a IndexedModel,
    opts: &'a CheckerOptions,
    scope: Vec<(&'a Var, usize)>,
    slots: usize,
    /// per slot: the range and the slots its candidates were kept apart from
    pruned: Vec<(Range, Vec<usize>)>,
}

/// Variables `u` for which `f` is false whenever `u = v`: a `-(u = v)`
/// conjunct, looking through existentials that bind neither.
fn forced_apart<'f>(f: &'f Formula, v: &Var, bound: &mut Vec<&'f Var>, out: &mut Vec<&'f Var>) {
    match f {
        Formula::And(l, r) => {
            forced_apart(l, v, bound, out);
            forced_apart(r, v, bound, out);
        }
        Formula::Exists(w, b) if w != v => {
            bound.push(w);
            forced_apart(b, v, bound, out);
            bound.pop();
        }
        Formula::Not(inner) => {
            if let Formula::Eq(Term::Var(a), Term::Var(b)) = inner.as_ref() {
                let u = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    return;
                };
                if u != v && !bound.contains(&u) && !out.contains(&u) {
                    out.push(u);
                }
            }
        }
        _ => {}
    }
}

impl<'a> Lowering<'a> {
    fn arg(&self, t: &Term) -> Result<Arg, CheckError> {
        match t {
            Term::Var(v) => self
                .scope
                .iter()
                .rev()
                .find(|(w, _)| *w == v)
                .map(|(_, s)| Arg::Slot(*s))
                .ok_or_else(|| CheckError::OpenFormula(v.clone())),
            Term::Ind(i) => {
                self.model.individual(i.id()).map(Arg::Const).ok_or_else(|| CheckError::UnknownIndividual(i.clone()))
            }
        }
    }

    fn range(&self, v: &Var) -> Range {
        match (self.opts.sort_constraint, v.sort()) {
            (true, Some(Sort::Entity)) => Range::Entities,
            (true, Some(Sort::Event)) => Range::Events,
            _ => Range::All,
        }
    }

    /// `chain` holds the slots of enclosing existential entity variables
    /// reachable without crossing a universal, a negation or the left of an
    /// implication.
    fn lower(&mut self, f: &'a Formula, chain: &mut Vec<usize>) -> Result<Node, CheckError> {
        Ok(match f {
            Formula::True => Node::True,
            Formula::Pred { name, args } => Node::Atom {
                rel: self.model.predicate(name).expect("predicates checked before lowering"),
                args: args.iter().map(|a| self.arg(a)).collect::<Result<_, _>>()?,
            },
            Formula::Eq(a, b) => Node::Eq(self.arg(a)?, self.arg(b)?),
            Formula::Not(a) => Node::Not(Box::new(self.lower(a, &mut Vec::new())?)),
            Formula::And(l, r) => Node::And(Box::new(self.lower(l, chain)?), Box::new(self.lower(r, chain)?)),
            Formula::Or(l, r) => Node::Or(Box::new(self.lower(l, chain)?), Box::new(self.lower(r, chain)?)),
            Formula::Imp(l, r) => Node::Imp(Box::new(self.lower(l, &mut Vec::new())?), Box::new(self.lower(r, chain)?)),
            Formula::Exists(v, b) => {
                let slot = self.bind(v);
                let range = self.range(v);
                let entity = v.sort() == Some(Sort::Entity);
                let (distinct_from, pigeonhole) = if !self.opts.distinctness_pruning {
                    (Vec::new(), 0)
                } else if entity {
                    (chain.clone(), chain.len())
                } else {
                    self.explicit_apart(v, b, range)
                };
                self.pruned[slot] = (range, distinct_from.clone());
                if entity {
                    chain.push(slot);
                }
                let body = self.lower(b, chain);
                if entity {
                    chain.pop();
                }
                self.scope.pop();
                Node::Exists { slot, range, distinct_from, pigeonhole, body: Box::new(body?) }
            }
            Formula::ForAll(v, b) => {
                let slot = self.bind(v);
                let body = self.lower(b, &mut Vec::new());
                self.scope.pop();
                Node::ForAll { slot, range: self.range(v), body: Box::new(body?) }
            }
        })
    }

    /// Outer slots that `v` (just bound) must differ from for `body` to
    /// hold, and how many of them are already pairwise apart in `range`.
    fn explicit_apart(&self, v: &Var, body: &Formula, range: Range) -> (Vec<usize>, usize) {
        let mut vars = Vec::new();
        forced_apart(body, v, &mut Vec::new(), &mut vars);
        let outer = &self.scope[..self.scope.len() - 1];
        let mut slots: Vec<usize> =
            vars.iter().filter_map(|u| outer.iter().rev().find(|(w, _)| w == u).map(|(_, s)| *s)).collect();
        slots.sort_unstable();
        let clique = slots.iter().enumerate().all(|(i, &b)| {
            let (r, apart) = &self.pruned[b];
            *r == range && slots[..i].iter().all(|a| apart.contains(a))
        });
        let pigeonhole = if clique { slots.len() } else { 0 };
        (slots, pigeonhole)
    }

    fn bind(&mut self, v: &'a Var) -> usize {
        let slot = self.slots;
        self.slots += 1;
        self.pruned.push((Range::All, Vec::new()));
        self.scope.push((v, slot));
        slot
    }
}

struct Interrupted;

/// Strong Kleene truth value; `Unknown` when the outcome depends on an
/// unbound variable.
#[derive(Clone, Copy, PartialEq, Eq)]
enum K3 {
    True,
    False,
    Unknown,
}

impl K3 {
    fn not(self) -> K3 {
        match self {
            K3::True => K3::False,
            K3::False => K3::True,
            K3::Unknown => K3::Unknown,
        }
    }
}

struct Search<'a> {
    model: &'a IndexedModel,
    partial: bool,
    bound: Vec<bool>,
    all: Vec<u32>,
    entities: Vec<u32>,
    events: Vec<u32>,
    env: Vec<u32>,
    deadline: Instant,
    tried: u64,
}

/// The clock is read once per this many bindings.
const CLOCK_STRIDE: u64 = 64;

impl Search<'_> {
    #[inline]
    fn value(&self, a: Arg) -> u32 {
        match a {
            Arg::Slot(s) => self.env[s],
            Arg::Const(c) => c,
        }
    }

    #[inline]
    fn bind(&mut self, slot: usize, d: u32) -> Result<(), Interrupted> {
        self.tried += 1;
        if self.tried.is_multiple_of(CLOCK_STRIDE) && Instant::now() >= self.deadline {
            return Err(Interrupted);
        }
        self.env[slot] = d;
        Ok(())
    }

    fn candidates(&self, range: Range) -> &[u32] {
        match range {
            Range::All => &self.all,
            Range::Entities => &self.entities,
            Range::Events => &self.events,
        }
    }

    fn known(&self, a: Arg) -> bool {
        match a {
            Arg::Slot(s) => self.bound[s],
            Arg::Const(_) => true,
        }
    }

    fn partial_eval(&self, n: &Node) -> K3 {
        match n {
            Node::True => K3::True,
            Node::Atom { args, .. } if !args.iter().all(|a| self.known(*a)) => K3::Unknown,
            Node::Eq(a, b) if !(self.known(*a) && self.known(*b)) => K3::Unknown,
            Node::Atom { .. } | Node::Eq(..) => {
                if self.atom(n) {
                    K3::True
                } else {
                    K3::False
                }
            }
            Node::Not(a) => self.partial_eval(a).not(),
            Node::And(l, r) => match self.partial_eval(l) {
                K3::False => K3::False,
                K3::True => self.partial_eval(r),
                K3::Unknown => match self.partial_eval(r) {
                    K3::False => K3::False,
                    _ => K3::Unknown,
                },
            },
            Node::Or(l, r) => match self.partial_eval(l) {
                K3::True => K3::True,
                K3::False => self.partial_eval(r),
                K3::Unknown => match self.partial_eval(r) {
                    K3::True => K3::True,
                    _ => K3::Unknown,
                },
            },
            Node::Imp(l, r) => match self.partial_eval(l) {
                K3::False => K3::True,
                K3::True => self.partial_eval(r),
                K3::Unknown => match self.partial_eval(r) {
                    K3::True => K3::True,
                    _ => K3::Unknown,
                },
            },
            Node::Exists { range, pigeonhole, body, .. } => {
                if self.candidates(*range).len() <= *pigeonhole {
                    return K3::False;
                }
                self.partial_eval(body)
            }
            Node::ForAll { range, body, .. } => {
                if self.candidates(*range).is_empty() {
                    return K3::True;
                }
                self.partial_eval(body)
            }
        }
    }

    fn atom(&self, n: &Node) -> bool {
        match n {
            Node::Atom { rel, args } => {
                let ext = &self.model.extensions[*rel];
                match args.as_slice() {
                    [a] => ext.contains(&[self.value(*a)]),
                    [a, b] => ext.contains(&[self.value(*a), self.value(*b)]),
                    _ => {
                        let vals: Vec<u32> = args.iter().map(|a| self.value(*a)).collect();
                        ext.contains(&vals)
                    }
                }
            }
            Node::Eq(a, b) => self.value(*a) == self.value(*b),
            _ => unreachable!("atom() on a compound node"),
        }
    }

    /// Value of `body` for the binding just made, or `None` to search on.
    #[inline]
    fn settled(&self, body: &Node) -> Option<bool> {
        if !self.partial {
            return None;
        }
        match self.partial_eval(body) {
            K3::True => Some(true),
            K3::False => Some(false),
            K3::Unknown => None,
        }
    }

    fn quantify(
        &mut self,
        slot: usize,
        range: Range,
        distinct_from: &[usize],
        body: &Node,
        universal: bool,
    ) -> Result<bool, Interrupted> {
        let n = self.candidates(range).len();
        self.bound[slot] = true;
        let mut outcome = Ok(universal);
        for i in 0..n {
            let d = self.candidates(range)[i];
            if distinct_from.iter().any(|s| self.env[*s] == d) {
                continue;
            }
            if let Err(e) = self.bind(slot, d) {
                outcome = Err(e);
                break;
            }
            let v = match self.settled(body) {
                Some(v) => Ok(v),
                None => self.eval(body),
            };
            match v {
                Ok(v) if v != universal => {
                    outcome = Ok(v);
                    break;
                }
                Ok(_) => {}
                Err(e) => {
                    outcome = Err(e);
                    break;
                }
            }
        }
        self.bound[slot] = false;
        outcome
    }

    fn eval(&mut self, n: &Node) -> Result<bool, Interrupted> {
        Ok(match n {
            Node::True => true,
            Node::Atom { .. } | Node::Eq(..) => self.atom(n),
            Node::Not(a) => !self.eval(a)?,
            Node::And(l, r) => self.eval(l)? && self.eval(r)?,
            Node::Or(l, r) => self.eval(l)? || self.eval(r)?,
            Node::Imp(l, r) => !self.eval(l)? || self.eval(r)?,
            Node::Exists { slot, range, distinct_from, body, .. } => {
                self.quantify(*slot, *range, distinct_from, body, false)?
            }
            Node::ForAll { slot, range, body } => self.quantify(*slot, *range, &[], body, true)?,
        })
    }
}

/// Check a closed formula against a model under `opts`.
pub fn evaluate_optimized(f: &Formula, m: &Model, opts: &CheckerOptions) -> Result<CheckResult, CheckError> {
    let start = Instant::now();
    let deadline = start + opts.timeout;
    if let Some(v) = f.free_variables().into_iter().next() {
        return Err(CheckError::OpenFormula(v));
    }
    let ordered;
    let m = if opts.domain_ordering {
        ordered = order_domain(m)?;
        &ordered
    } else {
        m
    };
    if f.predicate_names().iter().any(|p| !m.has_predicate(p)) {
        return Ok(CheckResult { value: TruthValue::Undefined, elapsed: start.elapsed(), assignments_tried: 0 });
    }
    let indexed = IndexedModel::new(m);
    let mut lowering = Lowering { model: &indexed, opts, scope: Vec::new(), slots: 0, pruned: Vec::new() };
    let node = lowering.lower(f, &mut Vec::new())?;

    let mut entities = Vec::new();
    let mut events = Vec::new();
    for (i, d) in m.domain().iter().enumerate() {
        match d.sort() {
            Some(Sort::Entity) => entities.push(i as u32),
            Some(Sort::Event) => events.push(i as u32),
            // unsorted ids stay reachable from both sorts
            None => {
                entities.push(i as u32);
                events.push(i as u32);
            }
        }
    }
    let mut search = Search {
        model: &indexed,
        partial: opts.partial_evaluation,
        bound: vec![false; lowering.slots],
        all: (0..indexed.size as u32).collect(),
        entities,
        events,
        env: vec![0; lowering.slots],
        deadline,
        tried: 0,
    };
    let value = match search.eval(&node) {
        Ok(b) => TruthValue::from_bool(b),
        Err(Interrupted) => TruthValue::TimedOut,
    };
    let mut elapsed = start.elapsed();
    if value == TruthValue::TimedOut && elapsed < opts.timeout {
        // the stride check fires at or after the deadline, never before
        elapsed = opts.timeout;
    }
    Ok(CheckResult { value, elapsed, assignments_tried: search.tried })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub evaluator: String,
    pub mean_s: f64,
    pub max_s: f64,
    pub n_cases: usize,
    pub n_agreements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub runs: Vec<TimingRow>,
    /// Published timings for the same setup (mean, max seconds), kept for
    /// side-by-side reading; they are not comparable in absolute terms.
    pub reference: Vec<TimingRow>,
}

impl BenchmarkReport {
    pub fn row(&self, evaluator: &str) -> Option<&TimingRow> {
        self.runs.iter().find(|r| r.evaluator == evaluator)
    }
}

/// Time the naive evaluator (no deadline) against [`evaluate_optimized`] on
/// each pair. Agreement counts cases where both return the same value.
pub fn benchmark(pairs: &[(Formula, Model)], opts: &CheckerOptions) -> Result<BenchmarkReport, CheckError> {
    assert!(!pairs.is_empty(), "benchmark needs at least one case");
    let mut naive_times = Vec::with_capacity(pairs.len());
    let mut opt_times = Vec::with_capacity(pairs.len());
    let mut agreements = 0;
    for (f, m) in pairs {
        let t = Instant::now();
        let naive = evaluate_naive(f, m, &Assignment::new()).map_err(|e| match e {
            crate::fol::EvalError::UnboundVariable(v) => CheckError::OpenFormula(v),
            crate::fol::EvalError::UnknownIndividual(i) => CheckError::UnknownIndividual(i),
        })?;
        naive_times.push(t.elapsed().as_secs_f64());
        let opt = evaluate_optimized(f, m, opts)?;
        opt_times.push(opt.elapsed.as_secs_f64());
        if opt.value == naive {
            agreements += 1;
        }
    }
    let row = |name: &str, times: &[f64]| TimingRow {
        evaluator: name.to_string(),
        mean_s: times.iter().sum::<f64>() / times.len() as f64,
        max_s: times.iter().cloned().fold(0.0, f64::max),
        n_cases: times.len(),
        n_agreements: agreements,
    };
    let reference = |name: &str, mean_s: f64, max_s: f64| TimingRow {
        evaluator: name.to_string(),
        mean_s,
        max_s,
        n_cases: 124,
        n_agreements: 124,
    };
    Ok(BenchmarkReport {
        runs: vec![row("naive", &naive_times), row("optimized", &opt_times)],
        reference: vec![reference("naive", 3.20, 185.17), reference("optimized", 0.04, 1.26)],
    })
}
