//! Weighted k-nearest-neighbour type recommender, the comparison baseline.
//!
//! Every query is an exact full scan over the training matrix. A neighbour
//! with similarity `w` adds `max(w, 0)` to each of its labels; only labels
//! with a positive total are returned.

use alloc::string::String;
use alloc::vec::Vec;

use crate::embedder::TypeCensus;
use crate::error::{Error, Result};
use crate::recommend::{unit_query, RecommendationList, ScoredType, TypeId, TypeScorer};
use crate::store::EntityEmbeddingStore;
use crate::vector;

#[derive(Debug, Clone)]
pub struct KnnIndex {
    dim: usize,
    k: usize,
    matrix: Vec<f64>,
    labels: Vec<Vec<TypeId>>,
    types: Vec<String>,
}

impl KnnIndex {
    /// Indexes every embedded entity with at least one type, in store order.
    pub fn build(store: &EntityEmbeddingStore, census: &TypeCensus, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1"));
        }
        let rows = census.entity_rows();
        if rows.is_empty() {
            return Err(Error::NoTrainingData);
        }
        let dim = store.dim();
        let mut matrix = Vec::with_capacity(rows.len() * dim);
        let mut labels = Vec::with_capacity(rows.len());
        for &r in &rows {
            matrix.extend_from_slice(store.row(r));
            labels.push(census.entity_types(r).unwrap_or_default().to_vec());
        }
        if k > rows.len() {
            log::warn!("k = {k} exceeds the {} training rows; using all of them", rows.len());
        }
        Ok(Self {
            dim,
            k,
            matrix,
            labels,
            types: census.types().to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Neighbours actually used per query: `min(k, n)`.
    pub fn effective_k(&self) -> usize {
        self.k.min(self.len())
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.matrix[i * self.dim..(i + 1) * self.dim]
    }

    pub fn labels(&self, i: usize) -> &[TypeId] {
        &self.labels[i]
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    /// Bytes held by the training matrix and labels.
    pub fn memory_bytes(&self) -> usize {
        self.matrix.len() * core::mem::size_of::<f64>()
            + self.labels.iter().map(|l| l.len() * 4 + 24).sum::<usize>()
    }

    /// The `min(k, n)` most similar rows as `(row, similarity)`, most similar
    /// first; equal similarities keep row order.
    pub fn neighbors(&self, query: &[f64]) -> Result<Vec<(usize, f64)>> {
        let mut buf = Vec::new();
        let q = unit_query(query, self.dim, &mut buf)?;
        let k = self.effective_k();
        let mut best: Vec<(usize, f64)> = Vec::with_capacity(k + 1);
        for (i, row) in self.matrix.chunks_exact(self.dim).enumerate() {
            let sim = vector::dot(q, row);
            if best.len() == k && !(sim > best[k - 1].1) {
                continue;
            }
            let pos = best.partition_point(|&(_, s)| s >= sim);
            best.insert(pos, (i, sim));
            best.truncate(k);
        }
        Ok(best)
    }

    pub fn knn_recommend(&self, query: &[f64]) -> Result<RecommendationList> {
        let neighbors = self.neighbors(query)?;
        let mut entries: Vec<ScoredType> = Vec::new();
        for (row, sim) in neighbors {
            let w = sim.max(0.0);
            if w == 0.0 {
                continue;
            }
            for &t in &self.labels[row] {
                match entries.iter_mut().find(|e| e.type_id == t) {
                    Some(e) => e.raw += w,
                    None => entries.push(ScoredType {
                        type_id: t,
                        raw: w,
                        probability: 0.0,
                    }),
                }
            }
        }
        let total: f64 = entries.iter().map(|e| e.raw).sum();
        for e in entries.iter_mut() {
            e.probability = e.raw / total;
        }
        Ok(RecommendationList::from_unsorted(entries))
    }
}

impl TypeScorer for KnnIndex {
    fn dim(&self) -> usize {
        self.dim
    }

    fn type_count(&self) -> usize {
        self.types.len()
    }

    fn type_iri(&self, id: TypeId) -> &str {
        &self.types[id.index()]
    }

    fn type_id(&self, iri: &str) -> Option<TypeId> {
        self.types
            .binary_search_by(|t| t.as_str().cmp(iri))
            .ok()
            .map(|i| TypeId(i as u32))
    }

    fn score(&self, query: &[f64]) -> Result<RecommendationList> {
        self.knn_recommend(query)
    }
}
