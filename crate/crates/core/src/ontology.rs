//! Direct `subClassOf` relations between types.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;

/// Direct super-types per type, with the reverse edge kept for sub-type
/// queries. No transitive closure is ever computed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OntologyIndex {
    subclass_of: BTreeMap<String, BTreeSet<String>>,
    subclasses: BTreeMap<String, BTreeSet<String>>,
}

impl OntologyIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `sub subClassOf sup`. Self-loops are ignored; returns whether
    /// a new edge was added.
    pub fn add_subclass(&mut self, sub: &str, sup: &str) -> bool {
        if sub == sup {
            return false;
        }
        let added = self
            .subclass_of
            .entry(String::from(sub))
            .or_default()
            .insert(String::from(sup));
        if added {
            self.subclasses
                .entry(String::from(sup))
                .or_default()
                .insert(String::from(sub));
        }
        added
    }

    /// Types declared directly under `type_iri`; empty for unknown types.
    pub fn direct_subtypes(&self, type_iri: &str) -> BTreeSet<String> {
        self.subclasses.get(type_iri).cloned().unwrap_or_default()
    }

    pub fn direct_supertypes(&self, type_iri: &str) -> BTreeSet<String> {
        self.subclass_of.get(type_iri).cloned().unwrap_or_default()
    }

    /// Whether the type appears on either side of any edge.
    pub fn contains(&self, type_iri: &str) -> bool {
        self.subclass_of.contains_key(type_iri) || self.subclasses.contains_key(type_iri)
    }

    pub fn edge_count(&self) -> usize {
        self.subclass_of.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.subclass_of.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn single_edge() {
        let mut idx = OntologyIndex::new();
        idx.add_subclass("Cat", "Animal");
        let subs: Vec<_> = idx.direct_subtypes("Animal").into_iter().collect();
        assert_eq!(subs, ["Cat"]);
    }

    #[test]
    fn empty_index() {
        let idx = OntologyIndex::new();
        assert!(idx.is_empty());
        assert!(idx.direct_subtypes("Animal").is_empty());
    }

    #[test]
    fn chain_is_not_transitive() {
        let mut idx = OntologyIndex::new();
        idx.add_subclass("Cat", "Mammal");
        idx.add_subclass("Mammal", "Animal");
        let subs: Vec<_> = idx.direct_subtypes("Animal").into_iter().collect();
        assert_eq!(subs, ["Mammal"]);
    }

    #[test]
    fn self_loop_dropped() {
        let mut idx = OntologyIndex::new();
        assert!(!idx.add_subclass("Thing", "Thing"));
        assert!(idx.is_empty());
        assert!(idx.direct_subtypes("Thing").is_empty());
    }

    #[test]
    fn duplicate_edge_counted_once() {
        let mut idx = OntologyIndex::new();
        assert!(idx.add_subclass("Cat", "Animal"));
        assert!(!idx.add_subclass("Cat", "Animal"));
        assert_eq!(idx.edge_count(), 1);
    }
}
