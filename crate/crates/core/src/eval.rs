//! Recall@k under strict relevance.

use alloc::vec;
use alloc::vec::Vec;

use crate::recommend::{RecommendationList, TypeId};

/// The explicitly asserted types of one test entity. Types the scorer does
/// not know still count towards the denominator.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Truth {
    known: Vec<TypeId>,
    total: usize,
}

impl Truth {
    /// Resolves each distinct truth IRI through `lookup`.
    pub fn resolve<'a, I, F>(iris: I, mut lookup: F) -> Self
    where
        I: IntoIterator<Item = &'a str>,
        F: FnMut(&str) -> Option<TypeId>,
    {
        let mut all: Vec<&str> = iris.into_iter().collect();
        all.sort_unstable();
        all.dedup();
        let mut known: Vec<TypeId> = all.iter().filter_map(|t| lookup(t)).collect();
        known.sort_unstable();
        Self {
            known,
            total: all.len(),
        }
    }

    pub fn from_ids(mut ids: Vec<TypeId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        let total = ids.len();
        Self { known: ids, total }
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn contains(&self, id: TypeId) -> bool {
        self.known.binary_search(&id).is_ok()
    }
}

/// `|top-k ∩ truth| / |truth|`; `None` when the truth set is empty.
pub fn recall_at_k(ranked: &RecommendationList, truth: &Truth, k: usize) -> Option<f64> {
    if truth.is_empty() {
        return None;
    }
    let hits = ranked
        .entries
        .iter()
        .take(k)
        .filter(|e| truth.contains(e.type_id))
        .count();
    Some(hits as f64 / truth.len() as f64)
}

/// Recall@1..=k_max in one walk down the list.
pub fn recall_curve(ranked: &RecommendationList, truth: &Truth, k_max: usize) -> Option<Vec<f64>> {
    if truth.is_empty() {
        return None;
    }
    let denom = truth.len() as f64;
    let mut hits = 0usize;
    let mut curve = Vec::with_capacity(k_max);
    for k in 0..k_max {
        if let Some(e) = ranked.entries.get(k) {
            if truth.contains(e.type_id) {
                hits += 1;
            }
        }
        curve.push(hits as f64 / denom);
    }
    Some(curve)
}

/// Running means of Recall@k and recommendation counts over test entities.
#[derive(Debug, Clone, PartialEq)]
pub struct RecallAccumulator {
    k_max: usize,
    sums: Vec<f64>,
    nonzero: u64,
    evaluated: u64,
    excluded: u64,
}

impl RecallAccumulator {
    pub fn new(k_max: usize) -> Self {
        Self {
            k_max,
            sums: vec![0.0; k_max],
            nonzero: 0,
            evaluated: 0,
            excluded: 0,
        }
    }

    /// Adds one entity. Entities with an empty truth set are excluded and
    /// counted; returns whether the entity was used.
    pub fn add(&mut self, ranked: &RecommendationList, truth: &Truth) -> bool {
        match recall_curve(ranked, truth, self.k_max) {
            None => {
                self.excluded += 1;
                false
            }
            Some(curve) => {
                for (s, r) in self.sums.iter_mut().zip(curve) {
                    *s += r;
                }
                self.nonzero += ranked.nonzero_count() as u64;
                self.evaluated += 1;
                true
            }
        }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn evaluated(&self) -> u64 {
        self.evaluated
    }

    pub fn excluded(&self) -> u64 {
        self.excluded
    }

    /// Mean Recall@k for k = 1..=k_max (zeros when nothing was evaluated).
    pub fn mean_recall(&self) -> Vec<f64> {
        let n = self.evaluated.max(1) as f64;
        self.sums.iter().map(|s| s / n).collect()
    }

    /// Mean number of types with nonzero probability per entity.
    pub fn recs_per_entity(&self) -> f64 {
        self.nonzero as f64 / self.evaluated.max(1) as f64
    }
}
