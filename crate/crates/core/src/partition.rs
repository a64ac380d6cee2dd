//! Seeded, type-stratified assignment of assertions to folds.
//!
//! Types are visited in id order and dealt round-robin onto folds, carrying
//! the fold cursor from one type to the next; each type's fold labels are
//! then shuffled across its assertions. Per-type fold counts therefore differ
//! by at most one, and so do the fold totals.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Fold labels for every assertion, indexed by assertion position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSpec {
    pub fold_count: usize,
    pub seed: u64,
    pub assignment: Vec<u16>,
}

impl PartitionSpec {
    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = alloc::vec![0usize; self.fold_count];
        for &f in &self.assignment {
            sizes[f as usize] += 1;
        }
        sizes
    }

    /// Assigns assertions whose type ids are given in stream order.
    pub fn assign(type_of: &[u32], type_count: usize, fold_count: usize, seed: u64) -> Result<Self> {
        let mut counts = alloc::vec![0usize; type_count];
        for &t in type_of {
            counts[t as usize] += 1;
        }
        let mut p = StratifiedPartitioner::new(&counts, fold_count, seed)?;
        let assignment = type_of.iter().map(|&t| p.next_fold(t)).collect();
        Ok(Self {
            fold_count,
            seed,
            assignment,
        })
    }
}

/// Hands out the shuffled fold sequence of each type, one assertion at a time.
#[derive(Debug, Clone)]
pub struct StratifiedPartitioner {
    sequences: Vec<Vec<u16>>,
    cursors: Vec<usize>,
    sparse_types: usize,
}

impl StratifiedPartitioner {
    /// `counts[t]` is the number of assertions of type `t`.
    pub fn new(counts: &[usize], fold_count: usize, seed: u64) -> Result<Self> {
        if fold_count < 2 {
            return Err(Error::InvalidParameter("fold count must be at least 2"));
        }
        if fold_count > u16::MAX as usize {
            return Err(Error::InvalidParameter("fold count too large"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cursor = 0usize;
        let mut sparse_types = 0;
        let sequences = counts
            .iter()
            .map(|&c| {
                if c > 0 && c < fold_count {
                    sparse_types += 1;
                }
                let mut seq: Vec<u16> = (0..c).map(|i| ((cursor + i) % fold_count) as u16).collect();
                cursor = (cursor + c) % fold_count;
                seq.shuffle(&mut rng);
                seq
            })
            .collect();
        if sparse_types > 0 {
            log::warn!("{sparse_types} types have fewer assertions than folds; some folds lack them");
        }
        Ok(Self {
            sequences,
            cursors: alloc::vec![0; counts.len()],
            sparse_types,
        })
    }

    /// Types with fewer assertions than folds.
    pub fn sparse_types(&self) -> usize {
        self.sparse_types
    }

    /// Fold of the next assertion of type `t`.
    ///
    /// # Panics
    /// If called more times for `t` than its declared count.
    pub fn next_fold(&mut self, t: u32) -> u16 {
        let t = t as usize;
        let f = self.sequences[t][self.cursors[t]];
        self.cursors[t] += 1;
        f
    }
}
