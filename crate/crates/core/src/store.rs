//! In-memory entity embeddings keyed by IRI.

use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::vector;

/// What happened to a row offered to [`EntityEmbeddingStore::insert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    Inserted,
    /// The IRI was already present; its row now holds the new vector.
    Replaced,
    /// Norm below [`vector::DEGENERATE_NORM`]; nothing stored.
    Degenerate,
    /// Value count differs from the store dimension; nothing stored.
    WrongDimension { found: usize },
}

/// An `n x dim` row-major matrix of entity vectors with an IRI index.
///
/// Rows keep first-insertion order; a duplicate IRI overwrites its existing
/// row in place. Once built the store is read-only and can be shared freely.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityEmbeddingStore {
    dim: usize,
    ids: Vec<String>,
    index: HashMap<String, usize>,
    matrix: Vec<f64>,
}

impl EntityEmbeddingStore {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ids: Vec::new(),
            index: HashMap::new(),
            matrix: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, rows: usize) -> Self {
        Self {
            dim,
            ids: Vec::with_capacity(rows),
            index: HashMap::with_capacity(rows),
            matrix: Vec::with_capacity(rows.saturating_mul(dim)),
        }
    }

    /// Adds (or replaces) the vector for `iri`. When `normalize` is set the
    /// stored row is scaled to unit length. Degenerate vectors are rejected
    /// regardless of `normalize`.
    pub fn insert(&mut self, iri: &str, values: &[f64], normalize: bool) -> InsertOutcome {
        if values.len() != self.dim {
            return InsertOutcome::WrongDimension {
                found: values.len(),
            };
        }
        let n = vector::norm(values);
        if !(n >= vector::DEGENERATE_NORM) || !n.is_finite() {
            return InsertOutcome::Degenerate;
        }
        let scale = if normalize { n } else { 1.0 };
        match self.index.get(iri) {
            Some(&row) => {
                let dst = &mut self.matrix[row * self.dim..(row + 1) * self.dim];
                for (d, v) in dst.iter_mut().zip(values) {
                    *d = v / scale;
                }
                InsertOutcome::Replaced
            }
            None => {
                let row = self.ids.len();
                self.ids.push(String::from(iri));
                self.index.insert(String::from(iri), row);
                self.matrix.extend(values.iter().map(|v| v / scale));
                InsertOutcome::Inserted
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// The stored row for `iri`, or `None` when the IRI is unknown.
    pub fn get_vector(&self, iri: &str) -> Option<&[f64]> {
        self.row_of(iri).map(|r| self.row(r))
    }

    pub fn row_of(&self, iri: &str) -> Option<usize> {
        self.index.get(iri).copied()
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.matrix[row * self.dim..(row + 1) * self.dim]
    }

    pub fn id(&self, row: usize) -> &str {
        &self.ids[row]
    }

    /// Rows in store order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&str, &[f64])> + '_ {
        self.ids
            .iter()
            .enumerate()
            .map(move |(r, id)| (id.as_str(), self.row(r)))
    }

    /// Bytes held by the vector matrix.
    pub fn matrix_bytes(&self) -> usize {
        self.matrix.len() * core::mem::size_of::<f64>()
    }
}
