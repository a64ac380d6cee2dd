//! Two-pass derivation of type embeddings from entity embeddings.
//!
//! Pass one ([`TypeCounter`]) collects the distinct types of every embedded
//! entity. Pass two ([`Accumulator`]) replays the same assertions and adds
//! `s / |T(s)|` into the accumulator of each distinct `(s, t)` pair. The
//! accumulators are finally projected onto the unit sphere
//! ([`Accumulator::finalize`]).
//!
//! State is bounded by the number of distinct embedded `(entity, type)`
//! pairs plus `|T| * dim` floats; repeated assertion lines cost nothing.
//! Assertions whose subject has no embedding are excluded from both passes.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::recommend::TypeId;
use crate::store::EntityEmbeddingStore;
use crate::vector;

/// How a single assertion was treated by either pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observation {
    /// First sighting of this `(entity, type)` pair in the pass.
    Added,
    /// The pair was already seen in this pass.
    Duplicate,
    /// The subject has no embedding.
    Unembedded,
    /// Pass two saw a pair that pass one never counted.
    Mismatch,
}

/// Per-pass assertion tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PassStats {
    pub assertions: u64,
    pub added: u64,
    pub duplicates: u64,
    pub unembedded: u64,
    pub mismatched: u64,
}

impl PassStats {
    fn record(&mut self, o: Observation) {
        self.assertions += 1;
        match o {
            Observation::Added => self.added += 1,
            Observation::Duplicate => self.duplicates += 1,
            Observation::Unembedded => self.unembedded += 1,
            Observation::Mismatch => self.mismatched += 1,
        }
    }
}

/// First pass: distinct types per embedded entity.
pub struct TypeCounter<'s> {
    store: &'s EntityEmbeddingStore,
    type_ids: HashMap<String, u32>,
    type_names: Vec<String>,
    entity_types: HashMap<u32, Vec<u32>>,
    stats: PassStats,
}

impl<'s> TypeCounter<'s> {
    pub fn new(store: &'s EntityEmbeddingStore) -> Self {
        Self {
            store,
            type_ids: HashMap::new(),
            type_names: Vec::new(),
            entity_types: HashMap::new(),
            stats: PassStats::default(),
        }
    }

    pub fn observe(&mut self, subject: &str, type_iri: &str) -> Observation {
        let outcome = match self.store.row_of(subject) {
            None => Observation::Unembedded,
            Some(row) => {
                let tid = match self.type_ids.get(type_iri) {
                    Some(&t) => t,
                    None => {
                        let t = self.type_names.len() as u32;
                        self.type_names.push(String::from(type_iri));
                        self.type_ids.insert(String::from(type_iri), t);
                        t
                    }
                };
                let types = self.entity_types.entry(row as u32).or_default();
                if types.contains(&tid) {
                    Observation::Duplicate
                } else {
                    types.push(tid);
                    Observation::Added
                }
            }
        };
        self.stats.record(outcome);
        outcome
    }

    pub fn stats(&self) -> PassStats {
        self.stats
    }

    /// Freezes the counts. Type ids are reassigned in IRI order.
    pub fn finish(self) -> TypeCensus {
        let mut order: Vec<u32> = (0..self.type_names.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| self.type_names[a as usize].cmp(&self.type_names[b as usize]));
        let mut remap = vec![0u32; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old as usize] = new as u32;
        }
        let mut names: Vec<Option<String>> = self.type_names.into_iter().map(Some).collect();
        let types: Vec<String> = order
            .iter()
            .map(|&old| names[old as usize].take().unwrap_or_default())
            .collect();
        let type_index = types
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        let entity_types = self
            .entity_types
            .into_iter()
            .map(|(row, ts)| {
                let mut ts: Vec<TypeId> = ts.into_iter().map(|t| TypeId(remap[t as usize])).collect();
                ts.sort_unstable();
                (row, ts)
            })
            .collect();
        TypeCensus {
            dim: self.store.dim(),
            types,
            type_index,
            entity_types,
            stats: self.stats,
        }
    }
}

/// Result of the first pass: the type vocabulary and, per embedded entity,
/// its distinct asserted types.
#[derive(Debug, Clone)]
pub struct TypeCensus {
    dim: usize,
    types: Vec<String>,
    type_index: HashMap<String, u32>,
    entity_types: HashMap<u32, Vec<TypeId>>,
    stats: PassStats,
}

impl TypeCensus {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Type vocabulary sorted by IRI; position is the [`TypeId`].
    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn type_id(&self, iri: &str) -> Option<TypeId> {
        self.type_index.get(iri).map(|&i| TypeId(i))
    }

    pub fn type_iri(&self, id: TypeId) -> &str {
        &self.types[id.index()]
    }

    /// Number of embedded entities with at least one assertion.
    pub fn entity_count(&self) -> usize {
        self.entity_types.len()
    }

    /// `|T(s)|` for the entity at store row `row`.
    pub fn entity_type_count(&self, row: usize) -> Option<usize> {
        self.entity_types.get(&(row as u32)).map(Vec::len)
    }

    /// Distinct types of the entity at store row `row`, sorted.
    pub fn entity_types(&self, row: usize) -> Option<&[TypeId]> {
        self.entity_types.get(&(row as u32)).map(Vec::as_slice)
    }

    /// Store rows of all counted entities, ascending.
    pub fn entity_rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self.entity_types.keys().map(|&r| r as usize).collect();
        rows.sort_unstable();
        rows
    }

    pub fn stats(&self) -> PassStats {
        self.stats
    }

    pub fn accumulator<'a>(&'a self, store: &'a EntityEmbeddingStore) -> Accumulator<'a> {
        Accumulator::new(self, store)
    }
}

/// Second pass: weighted sums `M[t] = sum over s of s / |T(s)|`.
pub struct Accumulator<'a> {
    census: &'a TypeCensus,
    store: &'a EntityEmbeddingStore,
    sums: Vec<f64>,
    support: Vec<u64>,
    seen: HashSet<(u32, u32)>,
    stats: PassStats,
}

impl<'a> Accumulator<'a> {
    pub fn new(census: &'a TypeCensus, store: &'a EntityEmbeddingStore) -> Self {
        let t = census.types.len();
        Self {
            census,
            store,
            sums: vec![0.0; t * census.dim],
            support: vec![0; t],
            seen: HashSet::new(),
            stats: PassStats::default(),
        }
    }

    pub fn census(&self) -> &'a TypeCensus {
        self.census
    }

    pub fn observe(&mut self, subject: &str, type_iri: &str) -> Observation {
        let outcome = self.classify(subject, type_iri);
        self.stats.record(outcome);
        outcome
    }

    fn classify(&mut self, subject: &str, type_iri: &str) -> Observation {
        let Some(row) = self.store.row_of(subject) else {
            return Observation::Unembedded;
        };
        let (Some(types), Some(tid)) = (
            self.census.entity_types(row),
            self.census.type_id(type_iri),
        ) else {
            return Observation::Mismatch;
        };
        if types.binary_search(&tid).is_err() {
            return Observation::Mismatch;
        }
        if !self.seen.insert((row as u32, tid.0)) {
            return Observation::Duplicate;
        }
        let count = types.len() as f64;
        let dim = self.census.dim;
        let dst = &mut self.sums[tid.index() * dim..(tid.index() + 1) * dim];
        for (m, s) in dst.iter_mut().zip(self.store.row(row)) {
            *m += s / count;
        }
        self.support[tid.index()] += 1;
        Observation::Added
    }

    pub fn stats(&self) -> PassStats {
        self.stats
    }

    /// The running sum `M[t]` for a census type.
    pub fn sum(&self, id: TypeId) -> &[f64] {
        let dim = self.census.dim;
        &self.sums[id.index() * dim..(id.index() + 1) * dim]
    }

    pub fn support(&self, id: TypeId) -> u64 {
        self.support[id.index()]
    }

    /// Adds another accumulator over the same census into this one. Shards
    /// must see disjoint `(entity, type)` pairs for the sum to be exact.
    pub fn merge(&mut self, other: Accumulator<'_>) {
        debug_assert!(core::ptr::eq(self.census, other.census));
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        for (a, b) in self.support.iter_mut().zip(&other.support) {
            *a += b;
        }
        self.seen.extend(other.seen);
        let s = &mut self.stats;
        s.assertions += other.stats.assertions;
        s.added += other.stats.added;
        s.duplicates += other.stats.duplicates;
        s.unembedded += other.stats.unembedded;
        s.mismatched += other.stats.mismatched;
    }

    /// Projects every accumulator onto the unit sphere. Types whose sum has
    /// norm below [`vector::DEGENERATE_NORM`] are left out and listed in
    /// [`TypeEmbeddingModel::dropped`].
    pub fn finalize(self) -> TypeEmbeddingModel {
        let dim = self.census.dim;
        let mut types = Vec::new();
        let mut vectors = Vec::new();
        let mut accumulators = Vec::new();
        let mut support = Vec::new();
        let mut dropped = Vec::new();
        for (i, name) in self.census.types.iter().enumerate() {
            let m = &self.sums[i * dim..(i + 1) * dim];
            let mut v = m.to_vec();
            if vector::normalize(&mut v).is_none() {
                dropped.push(name.clone());
                continue;
            }
            types.push(name.clone());
            vectors.extend_from_slice(&v);
            accumulators.extend_from_slice(m);
            support.push(self.support[i]);
        }
        TypeEmbeddingModel::assemble(dim, types, vectors, Some(accumulators), support, dropped)
    }
}

/// Unit-norm type vectors, sorted by type IRI.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeEmbeddingModel {
    dim: usize,
    types: Vec<String>,
    type_index: HashMap<String, u32>,
    vectors: Vec<f64>,
    accumulators: Option<Vec<f64>>,
    support: Vec<u64>,
    dropped: Vec<String>,
}

/// Tolerance on the norm of type vectors supplied from outside.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-9;

impl TypeEmbeddingModel {
    pub fn empty(dim: usize) -> Self {
        Self::assemble(dim, Vec::new(), Vec::new(), Some(Vec::new()), Vec::new(), Vec::new())
    }

    fn assemble(
        dim: usize,
        types: Vec<String>,
        vectors: Vec<f64>,
        accumulators: Option<Vec<f64>>,
        support: Vec<u64>,
        dropped: Vec<String>,
    ) -> Self {
        let type_index = types
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Self {
            dim,
            types,
            type_index,
            vectors,
            accumulators,
            support,
            dropped,
        }
    }

    /// Builds a model from `(type IRI, support, unit vector)` records, as read
    /// back from a model file. Records may come in any order.
    pub fn from_records(dim: usize, mut records: Vec<(String, u64, Vec<f64>)>) -> Result<Self> {
        records.sort_by(|a, b| a.0.cmp(&b.0));
        let mut types = Vec::with_capacity(records.len());
        let mut vectors = Vec::with_capacity(records.len() * dim);
        let mut support = Vec::with_capacity(records.len());
        for (name, sup, v) in records {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            let n = vector::norm(&v);
            if !((n - 1.0).abs() <= UNIT_NORM_TOLERANCE) {
                return Err(Error::NotUnitNorm { type_iri: name, norm: n });
            }
            if types.last() == Some(&name) {
                return Err(Error::DuplicateType(name));
            }
            types.push(name);
            vectors.extend_from_slice(&v);
            support.push(sup);
        }
        Ok(Self::assemble(dim, types, vectors, None, support, Vec::new()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn type_iri(&self, id: TypeId) -> &str {
        &self.types[id.index()]
    }

    pub fn type_id(&self, iri: &str) -> Option<TypeId> {
        self.type_index.get(iri).map(|&i| TypeId(i))
    }

    pub fn vector(&self, id: TypeId) -> &[f64] {
        &self.vectors[id.index() * self.dim..(id.index() + 1) * self.dim]
    }

    pub fn get_vector(&self, iri: &str) -> Option<&[f64]> {
        self.type_id(iri).map(|id| self.vector(id))
    }

    /// The pre-normalization sum `M[t]`; only present on freshly built models.
    pub fn accumulator(&self, id: TypeId) -> Option<&[f64]> {
        self.accumulators
            .as_ref()
            .map(|a| &a[id.index() * self.dim..(id.index() + 1) * self.dim])
    }

    /// Number of distinct entities that contributed to the type.
    pub fn support(&self, id: TypeId) -> u64 {
        self.support[id.index()]
    }

    /// Types whose accumulator had no direction.
    pub fn dropped(&self) -> &[String] {
        &self.dropped
    }

    /// Bytes held by the type vectors.
    pub fn vector_bytes(&self) -> usize {
        self.vectors.len() * core::mem::size_of::<f64>()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TypeId, &str, &[f64])> + '_ {
        self.types
            .iter()
            .enumerate()
            .map(move |(i, t)| (TypeId(i as u32), t.as_str(), self.vector(TypeId(i as u32))))
    }
}
