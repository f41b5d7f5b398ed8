//! Chart parsing over categories with meanings built from closures.

use std::fmt;
use std::rc::Rc;

use super::lexicon::Template;
use super::{
    check_count, counting_formula, event_counting_formula, numeral_value, Category, Comparative, CompileError, Lexicon,
    Quantity,
};
use crate::fol::{Formula, Term, Var};
use crate::text::singularize;

type Prop = Rc<dyn Fn(&Term) -> Formula>;
/// Noun phrase meaning `λF1.λF2.…`.
type Quant = Rc<dyn Fn(&Prop, &Prop) -> Formula>;
/// Verb phrase meaning `λQ.λK.…`, `K` being a condition on the main event.
type VpSem = Rc<dyn Fn(&Quant, &Prop) -> Formula>;

#[derive(Clone)]
enum Sem {
    Noun(String),
    Counted { noun: String, q: Quantity },
    Numeral { k: u32, comp: Option<Comparative> },
    Comp(Comparative),
    Np(Quant),
    Tv(String),
    Vp(VpSem),
    Aux,
    Times,
    Adverb { q: Quantity, fixed: bool },
    S(Formula),
    Compose(Rc<Sem>, Rc<Sem>),
}

/// `Err(None)`: the combination is not meaningful. `Err(Some(e))`: it is,
/// but cannot be built.
type Applied = Result<Sem, Option<CompileError>>;

fn truth() -> Prop {
    Rc::new(|_| Formula::True)
}

fn conj(a: &Prop, b: &Prop) -> Prop {
    let (a, b) = (a.clone(), b.clone());
    Rc::new(move |t| Formula::and(a(t), b(t)))
}

fn proper_np(pred: String) -> Quant {
    Rc::new(move |f1, f2| {
        let x = Term::var("x");
        Formula::exists(
            Var::new("x"),
            Formula::and(Formula::and(Formula::pred(pred.as_str(), [x.clone()]), f1(&x)), f2(&x)),
        )
    })
}

fn counted_np(noun: String, q: Quantity) -> Quant {
    Rc::new(move |f1, f2| {
        let body = conj(f1, f2);
        counting_formula(q.comparative, q.k, &noun, |t| body(t)).expect("count checked when built")
    })
}

fn event(lemma: &str, subject: &Term, object: Option<&Term>, k: &Prop) -> Formula {
    let e = Term::var("e");
    let mut f = Formula::and(Formula::pred(lemma, [e.clone()]), Formula::pred("Subj", [e.clone(), subject.clone()]));
    if let Some(y) = object {
        f = Formula::and(f, Formula::pred("Acc", [e.clone(), y.clone()]));
    }
    Formula::exists(Var::new("e"), Formula::and(f, k(&e)))
}

fn transitive(lemma: String, object: Quant) -> VpSem {
    Rc::new(move |subject, k| {
        let (lemma, object, k) = (lemma.clone(), object.clone(), k.clone());
        let body: Prop = Rc::new(move |x| {
            let (lemma, x, k) = (lemma.clone(), x.clone(), k.clone());
            let inner: Prop = Rc::new(move |y| event(&lemma, &x, Some(y), &k));
            object(&truth(), &inner)
        });
        subject(&truth(), &body)
    })
}

fn intransitive(lemma: String) -> VpSem {
    Rc::new(move |subject, k| {
        let (lemma, k) = (lemma.clone(), k.clone());
        let body: Prop = Rc::new(move |x| event(&lemma, x, None, &k));
        subject(&truth(), &body)
    })
}

fn counted_events(vp: VpSem, q: Quantity) -> VpSem {
    Rc::new(move |subject, k| {
        event_counting_formula(q.comparative, q.k, |ei| {
            let (k, ei) = (k.clone(), ei.clone());
            let same: Prop = Rc::new(move |e| Formula::and(k(e), Formula::eq(e.clone(), ei.clone())));
            vp(subject, &same)
        })
        .expect("count checked when built")
    })
}

fn apply(f: &Sem, a: &Sem) -> Applied {
    use Sem::*;
    Ok(match (f, a) {
        (Compose(outer, inner), _) => apply(outer, &apply(inner, a)?)?,
        (Numeral { k, comp }, Noun(noun)) => {
            check_count(*k).map_err(Some)?;
            let q = Quantity { comparative: comp.unwrap_or(Comparative::Bare), k: *k };
            Counted { noun: noun.clone(), q }
        }
        (Numeral { k, comp }, Times) => {
            check_count(*k).map_err(Some)?;
            let q = Quantity { comparative: comp.unwrap_or(Comparative::Bare), k: *k };
            Adverb { q, fixed: false }
        }
        (Comp(c), Numeral { k, comp: None }) => Numeral { k: *k, comp: Some(*c) },
        (Comp(c), Adverb { q, fixed: true }) if q.comparative == Comparative::Bare => {
            Adverb { q: Quantity { comparative: *c, k: q.k }, fixed: true }
        }
        (Tv(lemma), Np(object)) => Vp(transitive(lemma.clone(), object.clone())),
        (Aux, Vp(v)) => Vp(v.clone()),
        (Adverb { q, .. }, Vp(v)) => Vp(counted_events(v.clone(), *q)),
        (Vp(v), Np(subject)) => S(v(subject, &truth()).simplify_true()),
        _ => return Err(None),
    })
}

fn lift(cat: Category, sem: Sem) -> Option<(Category, Sem)> {
    match (&cat, sem) {
        (c, Sem::Counted { noun, q }) if c.is_atom("N") => Some((Category::atom("NP"), Sem::Np(counted_np(noun, q)))),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    ForwardApplication,
    BackwardApplication,
    ForwardComposition,
}

impl Rule {
    fn symbol(self) -> &'static str {
        match self {
            Rule::ForwardApplication => ">",
            Rule::BackwardApplication => "<",
            Rule::ForwardComposition => ">B",
        }
    }
}

/// How a sentence was put together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    Leaf {
        token: String,
        cat: Category,
    },
    /// Counted noun to noun phrase.
    Lift {
        cat: Category,
        child: Rc<Derivation>,
    },
    Binary {
        rule: Rule,
        cat: Category,
        left: Rc<Derivation>,
        right: Rc<Derivation>,
    },
}

impl Derivation {
    pub fn category(&self) -> &Category {
        match self {
            Derivation::Leaf { cat, .. } | Derivation::Lift { cat, .. } | Derivation::Binary { cat, .. } => cat,
        }
    }

    pub fn leaves(&self) -> Vec<&str> {
        match self {
            Derivation::Leaf { token, .. } => vec![token],
            Derivation::Lift { child, .. } => child.leaves(),
            Derivation::Binary { left, right, .. } => {
                let mut l = left.leaves();
                l.extend(right.leaves());
                l
            }
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Derivation::Leaf { token, cat } => write!(f, "[{cat} {token}]"),
            Derivation::Lift { cat, child } => write!(f, "[{cat} lex {child}]"),
            Derivation::Binary { rule, cat, left, right } => {
                write!(f, "[{cat} {} {left} {right}]", rule.symbol())
            }
        }
    }
}

#[derive(Clone)]
struct Item {
    cat: Category,
    sem: Sem,
    deriv: Rc<Derivation>,
}

fn lexical(token: &str, lexicon: &Lexicon) -> Vec<Item> {
    let leaf = |cat: &Category| Rc::new(Derivation::Leaf { token: token.to_string(), cat: cat.clone() });
    let item = |cat: Category, sem: Sem| Item { deriv: leaf(&cat), cat, sem };
    let vp = || Category::bwd(Category::atom("S"), Category::atom("NP"));
    let adverb = || Category::bwd(vp(), vp());

    if token.len() > 1 && token.ends_with('_') {
        return vec![item(Category::atom("NP"), Sem::Np(proper_np(token.to_string())))];
    }
    let entries = lexicon.entries(token);
    if !entries.is_empty() {
        return entries
            .iter()
            .map(|(cat, t)| {
                let sem = match t {
                    Template::Tv(l) => Sem::Tv(l.clone()),
                    Template::Iv(l) => Sem::Vp(intransitive(l.clone())),
                    Template::Aux => Sem::Aux,
                    Template::Comparative(c) => Sem::Comp(*c),
                    Template::Times => Sem::Times,
                    Template::Freq(k) => {
                        Sem::Adverb { q: Quantity { comparative: Comparative::Bare, k: *k }, fixed: true }
                    }
                };
                item(cat.clone(), sem)
            })
            .collect();
    }
    if let Ok(k) = numeral_value(token) {
        let n = Category::atom("N");
        return vec![
            item(Category::fwd(n.clone(), n), Sem::Numeral { k, comp: None }),
            item(Category::fwd(adverb(), adverb()), Sem::Numeral { k, comp: None }),
        ];
    }
    vec![item(Category::atom("N"), Sem::Noun(singularize(token)))]
}

fn combine(l: &Item, r: &Item, noted: &mut Option<CompileError>) -> Vec<Item> {
    let mut out = Vec::new();
    let mut push = |rule: Rule, cat: Category, sem: Applied| match sem {
        Ok(sem) => out.push(Item {
            deriv: Rc::new(Derivation::Binary {
                rule,
                cat: cat.clone(),
                left: l.deriv.clone(),
                right: r.deriv.clone(),
            }),
            cat,
            sem,
        }),
        Err(Some(e)) => {
            noted.get_or_insert(e);
        }
        Err(None) => {}
    };
    if let Category::Fwd(x, y) = &l.cat {
        if **y == r.cat {
            push(Rule::ForwardApplication, (**x).clone(), apply(&l.sem, &r.sem));
        }
        if let Category::Fwd(y2, z) = &r.cat {
            if y == y2 {
                let sem = Sem::Compose(Rc::new(l.sem.clone()), Rc::new(r.sem.clone()));
                push(Rule::ForwardComposition, Category::fwd((**x).clone(), (**z).clone()), Ok(sem));
            }
        }
    }
    if let Category::Bwd(x, y) = &r.cat {
        if **y == l.cat {
            push(Rule::BackwardApplication, (**x).clone(), apply(&r.sem, &l.sem));
        }
    }
    out
}

fn with_lifts(items: Vec<Item>) -> Vec<Item> {
    let mut out = Vec::with_capacity(items.len());
    for it in items {
        if let Some((cat, sem)) = lift(it.cat.clone(), it.sem.clone()) {
            let deriv = Rc::new(Derivation::Lift { cat: cat.clone(), child: it.deriv.clone() });
            out.push(Item { cat, sem, deriv });
        }
        out.push(it);
    }
    out
}

/// Compile preprocessed tokens to a closed formula.
pub fn compile(tokens: &[String], lexicon: &Lexicon) -> Result<Formula, CompileError> {
    compile_with_derivation(tokens, lexicon).map(|(f, _)| f)
}

pub fn compile_with_derivation(tokens: &[String], lexicon: &Lexicon) -> Result<(Formula, Derivation), CompileError> {
    let n = tokens.len();
    if n == 0 {
        return Err(CompileError::Empty);
    }
    let mut noted = None;
    // chart[i][len - 1] holds items spanning tokens i..i+len
    let mut chart: Vec<Vec<Vec<Item>>> = vec![vec![Vec::new(); n]; n];
    for (i, tok) in tokens.iter().enumerate() {
        chart[i][0] = with_lifts(lexical(tok, lexicon));
    }
    for len in 2..=n {
        for i in 0..=n - len {
            let mut cell = Vec::new();
            for split in 1..len {
                for l in &chart[i][split - 1] {
                    for r in &chart[i + split][len - split - 1] {
                        cell.extend(combine(l, r, &mut noted));
                    }
                }
            }
            chart[i][len - 1] = with_lifts(cell);
        }
    }
    let mut readings: Vec<(Formula, Rc<Derivation>)> = Vec::new();
    for it in &chart[0][n - 1] {
        if let Sem::S(f) = &it.sem {
            if !readings.iter().any(|(g, _)| g.alpha_eq(f)) {
                readings.push((f.clone(), it.deriv.clone()));
            }
        }
    }
    match readings.len() {
        1 => {
            let (f, d) = readings.pop().unwrap();
            Ok((f, (*d).clone()))
        }
        0 => Err(noted.unwrap_or_else(|| CompileError::OutOfFragment(tokens.join(" ")))),
        k => Err(CompileError::Ambiguous(k)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse_formula;
    use crate::grammar::preprocess;

    fn compile_str(s: &str, titles: &[&str]) -> Result<Formula, CompileError> {
        compile(&preprocess(s, titles), &Lexicon::default())
    }

    #[test]
    fn possessive_with_two() {
        let f = compile_str("Bryce Dallas Howard has two children.", &["Bryce Dallas Howard"]).unwrap();
        let want = parse_formula(
            "exists x.(bryce_dallas_howard_(x) & exists x0 x1.(child(x0) & child(x1) \
             & (exists e.(have(e) & Subj(e,x) & Acc(e,x0))) & (exists e.(have(e) & Subj(e,x) & Acc(e,x1))) \
             & -(x0 = x1)))",
        )
        .unwrap();
        assert!(f.alpha_eq(&want), "{f}");
    }

    #[test]
    fn transitive_verb_uses_lemma() {
        let f = compile_str("Karl Ferdinand Braun won one award.", &["Karl Ferdinand Braun"]).unwrap();
        let want = parse_formula(
            "exists x.(karl_ferdinand_braun_(x) & exists x0.(award(x0) & exists e.(win(e) & Subj(e,x) & Acc(e,x0))))",
        )
        .unwrap();
        assert!(f.alpha_eq(&want), "{f}");
    }

    #[test]
    fn has_had_one() {
        let f = compile_str("Jodie Whittaker has had one husband.", &["Jodie Whittaker"]).unwrap();
        let want = parse_formula(
            "exists x.(jodie_whittaker_(x) & exists x0.(husband(x0) & exists e.(have(e) & Subj(e,x) & Acc(e,x0))))",
        )
        .unwrap();
        assert!(f.alpha_eq(&want), "{f}");
    }

    #[test]
    fn event_counts() {
        let twice = compile_str("Joe has married twice.", &["Joe"]).unwrap();
        let want = parse_formula(
            "exists e1 e2.((exists x.(joe_(x) & exists e.(marry(e) & Subj(e,x) & (e = e1)))) \
             & (exists x.(joe_(x) & exists e.(marry(e) & Subj(e,x) & (e = e2)))) & -(e1 = e2))",
        )
        .unwrap();
        assert!(twice.alpha_eq(&want), "{twice}");
        let once = compile_str("Joe has married once.", &["Joe"]).unwrap();
        assert!(!once.to_string().contains("-(e1"));
        for s in [
            "Joe has married exactly two times.",
            "Joe has married exactly twice.",
            "Joe has married no more than 3 times.",
        ] {
            let f = compile_str(s, &["Joe"]).unwrap();
            assert!(f.is_closed());
        }
    }

    #[test]
    fn comparatives_compile() {
        for c in Comparative::ALL {
            let phrase = c.phrase().map(|p| format!("{p} ")).unwrap_or_default();
            let s = format!("Karachi has {phrase}six districts.");
            let f = compile_str(&s, &["Karachi"]).unwrap();
            assert!(f.is_closed(), "{s}");
        }
        assert!(compile_str("Karachi has a half dozen districts.", &["Karachi"]).is_ok());
    }

    #[test]
    fn rejects_outside_fragment() {
        assert!(matches!(compile_str("Karachi has districts.", &["Karachi"]), Err(CompileError::OutOfFragment(_))));
        assert!(compile_str("Jimmy Eat World has been on 13 labels.", &["Jimmy Eat World"]).is_err());
        assert_eq!(compile_str("Karachi has 13 districts.", &["Karachi"]), Err(CompileError::Unsupported(13)));
        assert_eq!(compile(&[], &Lexicon::default()), Err(CompileError::Empty));
    }

    #[test]
    fn derivation_covers_tokens() {
        let toks = preprocess("Bryce Dallas Howard has two children.", &["Bryce Dallas Howard"]);
        let (_, d) = compile_with_derivation(&toks, &Lexicon::default()).unwrap();
        assert_eq!(d.leaves(), toks.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(d.category().is_atom("S"));
    }
}
