//! Scoring query vectors against type embeddings.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::embedder::TypeEmbeddingModel;
use crate::error::{Error, Result};
use crate::vector;

/// Index of a type in a model vocabulary. Vocabularies are sorted by IRI,
/// so comparing ids compares IRIs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeId(pub u32);

impl TypeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredType {
    pub type_id: TypeId,
    pub raw: f64,
    pub probability: f64,
}

/// Ranked types for one query: raw score descending, ties by IRI.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecommendationList {
    pub entries: Vec<ScoredType>,
}

impl RecommendationList {
    /// Sorts `entries` into ranking order.
    pub fn from_unsorted(mut entries: Vec<ScoredType>) -> Self {
        entries.sort_unstable_by(rank_order);
        Self { entries }
    }

    /// Keeps the first `k` entries (all of them when fewer). Order is kept.
    pub fn top_k(mut self, k: usize) -> Self {
        self.entries.truncate(k);
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first(&self) -> Option<&ScoredType> {
        self.entries.first()
    }

    /// Number of entries with a strictly positive probability.
    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().filter(|e| e.probability > 0.0).count()
    }
}

fn rank_order(a: &ScoredType, b: &ScoredType) -> Ordering {
    b.raw.total_cmp(&a.raw).then(a.type_id.cmp(&b.type_id))
}

/// Turns raw dot products into a probability distribution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Normalizer {
    /// `exp(s) / sum exp(s)` with temperature 1.
    #[default]
    Softmax,
    /// `(1 + s) / 2`, then divided by the sum.
    ShiftedSum,
}

impl Normalizer {
    pub fn apply(self, entries: &mut [ScoredType]) {
        if entries.is_empty() {
            return;
        }
        match self {
            Normalizer::Softmax => {
                let max = entries
                    .iter()
                    .map(|e| e.raw)
                    .fold(f64::NEG_INFINITY, f64::max);
                let mut sum = 0.0;
                for e in entries.iter_mut() {
                    e.probability = libm::exp(e.raw - max);
                    sum += e.probability;
                }
                for e in entries.iter_mut() {
                    e.probability /= sum;
                }
            }
            Normalizer::ShiftedSum => {
                let mut sum = 0.0;
                for e in entries.iter_mut() {
                    e.probability = ((1.0 + e.raw) * 0.5).max(0.0);
                    sum += e.probability;
                }
                if sum > 0.0 {
                    for e in entries.iter_mut() {
                        e.probability /= sum;
                    }
                } else {
                    let u = 1.0 / entries.len() as f64;
                    for e in entries.iter_mut() {
                        e.probability = u;
                    }
                }
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Normalizer::Softmax => "softmax",
            Normalizer::ShiftedSum => "shifted-sum",
        }
    }
}

impl fmt::Display for Normalizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Normalizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "softmax" => Ok(Normalizer::Softmax),
            "shifted-sum" => Ok(Normalizer::ShiftedSum),
            _ => Err(Error::InvalidParameter("normalizer must be softmax or shifted-sum")),
        }
    }
}

/// Anything that ranks a type vocabulary for a query vector.
pub trait TypeScorer {
    fn dim(&self) -> usize;
    fn type_count(&self) -> usize;
    fn type_iri(&self, id: TypeId) -> &str;
    fn type_id(&self, iri: &str) -> Option<TypeId>;
    fn score(&self, query: &[f64]) -> Result<RecommendationList>;
}

/// Copies `query` into `buf` and scales it to unit length when its norm is
/// off by more than 1e-6.
pub(crate) fn unit_query<'a>(
    query: &'a [f64],
    dim: usize,
    buf: &'a mut Vec<f64>,
) -> Result<&'a [f64]> {
    if query.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: query.len(),
        });
    }
    let n = vector::norm(query);
    if (n - 1.0).abs() <= 1e-6 {
        return Ok(query);
    }
    buf.clear();
    buf.extend_from_slice(query);
    vector::normalize(buf).ok_or(Error::DegenerateQuery)?;
    Ok(buf)
}

/// Dot-product recommender over a finalized [`TypeEmbeddingModel`].
#[derive(Debug, Clone, Copy)]
pub struct Recommender<'m> {
    model: &'m TypeEmbeddingModel,
    normalizer: Normalizer,
}

impl<'m> Recommender<'m> {
    pub fn new(model: &'m TypeEmbeddingModel, normalizer: Normalizer) -> Self {
        Self { model, normalizer }
    }

    pub fn model(&self) -> &'m TypeEmbeddingModel {
        self.model
    }

    pub fn normalizer(&self) -> Normalizer {
        self.normalizer
    }

    /// Full distribution over every type in the model.
    pub fn score_types(&self, query: &[f64]) -> Result<RecommendationList> {
        let dim = self.model.dim();
        let mut buf = Vec::new();
        let q = unit_query(query, dim, &mut buf)?;
        let mut entries: Vec<ScoredType> = (0..self.model.len())
            .map(|i| {
                let id = TypeId(i as u32);
                ScoredType {
                    type_id: id,
                    raw: vector::dot(q, self.model.vector(id)),
                    probability: 0.0,
                }
            })
            .collect();
        self.normalizer.apply(&mut entries);
        Ok(RecommendationList::from_unsorted(entries))
    }
}

impl TypeScorer for Recommender<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn type_count(&self) -> usize {
        self.model.len()
    }

    fn type_iri(&self, id: TypeId) -> &str {
        self.model.type_iri(id)
    }

    fn type_id(&self, iri: &str) -> Option<TypeId> {
        self.model.type_id(iri)
    }

    fn score(&self, query: &[f64]) -> Result<RecommendationList> {
        self.score_types(query)
    }
}
