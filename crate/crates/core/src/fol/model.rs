use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Individual;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate individual {0} in domain")]
    DuplicateIndividual(String),
    #[error("predicate {pred} mentions {individual}, which is not in the domain")]
    UnknownIndividual { pred: String, individual: String },
    #[error("predicate {pred} has tuples of arity {expected} and {found}")]
    MixedArity { pred: String, expected: usize, found: usize },
    #[error("malformed individual id {0:?}")]
    MalformedId(String),
}

/// A finite first-order structure: an ordered domain and a valuation mapping
/// predicate names to sets of argument tuples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct Model {
    domain: Vec<Individual>,
    valuation: BTreeMap<String, BTreeSet<Vec<Individual>>>,
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    domain: Vec<Individual>,
    valuation: BTreeMap<String, BTreeSet<Vec<Individual>>>,
}

impl TryFrom<RawModel> for Model {
    type Error = ModelError;

    fn try_from(raw: RawModel) -> Result<Self, Self::Error> {
        Model::new(raw.domain, raw.valuation)
    }
}

impl From<Model> for RawModel {
    fn from(m: Model) -> Self {
        RawModel { domain: m.domain, valuation: m.valuation }
    }
}

impl Model {
    pub fn new(
        domain: Vec<Individual>,
        valuation: BTreeMap<String, BTreeSet<Vec<Individual>>>,
    ) -> Result<Self, ModelError> {
        let mut seen = HashSet::new();
        for d in &domain {
            if d.id().is_empty() {
                return Err(ModelError::MalformedId(String::new()));
            }
            if !seen.insert(d) {
                return Err(ModelError::DuplicateIndividual(d.to_string()));
            }
        }
        for (pred, tuples) in &valuation {
            let mut arity = None;
            for t in tuples {
                match arity {
                    None => arity = Some(t.len()),
                    Some(a) if a != t.len() => {
                        return Err(ModelError::MixedArity { pred: pred.clone(), expected: a, found: t.len() })
                    }
                    _ => {}
                }
                if let Some(ind) = t.iter().find(|i| !seen.contains(i)) {
                    return Err(ModelError::UnknownIndividual { pred: pred.clone(), individual: ind.to_string() });
                }
            }
        }
        Ok(Model { domain, valuation })
    }

    pub fn empty() -> Self {
        Model { domain: Vec::new(), valuation: BTreeMap::new() }
    }

    pub fn domain(&self) -> &[Individual] {
        &self.domain
    }

    pub fn valuation(&self) -> &BTreeMap<String, BTreeSet<Vec<Individual>>> {
        &self.valuation
    }

    pub fn has_predicate(&self, name: &str) -> bool {
        self.valuation.contains_key(name)
    }

    pub fn extension(&self, name: &str) -> Option<&BTreeSet<Vec<Individual>>> {
        self.valuation.get(name)
    }

    /// Members of a unary predicate, in domain order.
    pub fn unary_members(&self, name: &str) -> Vec<Individual> {
        let Some(ext) = self.valuation.get(name) else { return Vec::new() };
        self.domain.iter().filter(|d| ext.contains(std::slice::from_ref(*d))).cloned().collect()
    }

    pub fn contains(&self, individual: &Individual) -> bool {
        self.domain.contains(individual)
    }

    pub fn add_individual(&mut self, individual: Individual) -> Result<(), ModelError> {
        if self.domain.contains(&individual) {
            return Err(ModelError::DuplicateIndividual(individual.to_string()));
        }
        self.domain.push(individual);
        Ok(())
    }

    /// Make sure `name` is in the valuation, possibly with an empty extension.
    pub fn declare(&mut self, name: &str) {
        self.valuation.entry(name.to_string()).or_default();
    }

    pub fn add_tuple(&mut self, name: &str, tuple: Vec<Individual>) -> Result<(), ModelError> {
        if let Some(ind) = tuple.iter().find(|i| !self.domain.contains(i)) {
            return Err(ModelError::UnknownIndividual { pred: name.to_string(), individual: ind.to_string() });
        }
        let ext = self.valuation.entry(name.to_string()).or_default();
        if let Some(first) = ext.iter().next() {
            if first.len() != tuple.len() {
                return Err(ModelError::MixedArity {
                    pred: name.to_string(),
                    expected: first.len(),
                    found: tuple.len(),
                });
            }
        }
        ext.insert(tuple);
        Ok(())
    }

    /// Same valuation over a reordered domain. `order` must be a permutation.
    pub(crate) fn with_domain_order(&self, order: Vec<Individual>) -> Model {
        debug_assert_eq!(order.len(), self.domain.len());
        Model { domain: order, valuation: self.valuation.clone() }
    }
}

/// Predicate extension over individual indices.
#[derive(Debug, Clone)]
pub(crate) enum Extension {
    Unary(Vec<bool>),
    Binary { n: usize, bits: Vec<bool> },
    Nary(HashSet<Vec<u32>>),
    Empty,
}

impl Extension {
    #[inline]
    pub(crate) fn contains(&self, args: &[u32]) -> bool {
        match (self, args) {
            (Extension::Unary(bits), [a]) => bits[*a as usize],
            (Extension::Binary { n, bits }, [a, b]) => bits[*a as usize * n + *b as usize],
            (Extension::Nary(set), _) => set.contains(args),
            _ => false,
        }
    }
}

/// A model with individuals and predicates resolved to dense indices.
#[derive(Debug, Clone)]
pub(crate) struct IndexedModel {
    ids: HashMap<String, u32>,
    preds: HashMap<String, usize>,
    pub(crate) extensions: Vec<Extension>,
    pub(crate) size: usize,
}

impl IndexedModel {
    pub(crate) fn new(m: &Model) -> Self {
        let n = m.domain.len();
        let ids: HashMap<String, u32> =
            m.domain.iter().enumerate().map(|(i, d)| (d.id().to_string(), i as u32)).collect();
        let mut preds = HashMap::new();
        let mut extensions = Vec::new();
        for (name, tuples) in &m.valuation {
            let arity = tuples.iter().next().map(Vec::len);
            let idx = |t: &Vec<Individual>| -> Vec<u32> { t.iter().map(|i| ids[i.id()]).collect() };
            let ext = match arity {
                None => Extension::Empty,
                Some(1) => {
                    let mut bits = vec![false; n];
                    for t in tuples {
                        bits[idx(t)[0] as usize] = true;
                    }
                    Extension::Unary(bits)
                }
                Some(2) => {
                    let mut bits = vec![false; n * n];
                    for t in tuples {
                        let v = idx(t);
                        bits[v[0] as usize * n + v[1] as usize] = true;
                    }
                    Extension::Binary { n, bits }
                }
                Some(_) => Extension::Nary(tuples.iter().map(idx).collect()),
            };
            preds.insert(name.clone(), extensions.len());
            extensions.push(ext);
        }
        IndexedModel { ids, preds, extensions, size: n }
    }

    pub(crate) fn individual(&self, id: &str) -> Option<u32> {
        self.ids.get(id).copied()
    }

    pub(crate) fn predicate(&self, name: &str) -> Option<usize> {
        self.preds.get(name).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ind(s: &str) -> Individual {
        Individual::new(s)
    }

    #[test]
    fn rejects_invariant_violations() {
        let dup = Model::new(vec![ind("X0"), ind("X0")], BTreeMap::new());
        assert!(matches!(dup, Err(ModelError::DuplicateIndividual(_))));

        let mut v = BTreeMap::new();
        v.insert("p".to_string(), BTreeSet::from([vec![ind("X1")]]));
        let unknown = Model::new(vec![ind("X0")], v);
        assert!(matches!(unknown, Err(ModelError::UnknownIndividual { .. })));

        let mut v = BTreeMap::new();
        v.insert("p".to_string(), BTreeSet::from([vec![ind("X0")], vec![ind("X0"), ind("X0")]]));
        let mixed = Model::new(vec![ind("X0")], v);
        assert!(matches!(mixed, Err(ModelError::MixedArity { .. })));
    }

    #[test]
    fn json_shape() {
        let json = r#"{"domain": ["X0","X1","V0"], "valuation": {"pred": [["X0"],["X1"]], "Subj": [["V0","X0"]]}}"#;
        let m: Model = serde_json::from_str(json).unwrap();
        assert_eq!(m.domain().len(), 3);
        assert_eq!(m.extension("pred").unwrap().len(), 2);
        let back = serde_json::to_value(&m).unwrap();
        assert_eq!(back["valuation"]["Subj"], serde_json::json!([["V0", "X0"]]));
        let bad = r#"{"domain": ["X0"], "valuation": {"pred": [["X9"]]}}"#;
        assert!(serde_json::from_str::<Model>(bad).is_err());
    }

    #[test]
    fn add_tuple_checks_arity() {
        let mut m = Model::new(vec![ind("X0"), ind("V0")], BTreeMap::new()).unwrap();
        m.add_tuple("Subj", vec![ind("V0"), ind("X0")]).unwrap();
        assert!(m.add_tuple("Subj", vec![ind("V0")]).is_err());
        assert!(m.add_tuple("Subj", vec![ind("V0"), ind("X5")]).is_err());
    }
}
