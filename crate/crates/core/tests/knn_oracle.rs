//! kNN recommendations against a full-sort brute-force oracle.

mod common;

use std::collections::BTreeMap;

use rand::Rng;
use typeforge_core::{EntityEmbeddingStore, KnnIndex, TypeCounter, TypeScorer};

/// Sorts every training row by (similarity desc, row asc), keeps k, and sums
/// clamped similarities per label.
fn oracle(index: &KnnIndex, q: &[f64], k: usize) -> Vec<(String, f64)> {
    let mut sims: Vec<(f64, usize)> = (0..index.len())
        .map(|i| (typeforge_core::vector::dot(q, index.row(i)), i))
        .collect();
    sims.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut scores: BTreeMap<String, f64> = BTreeMap::new();
    for &(s, i) in sims.iter().take(k) {
        if s <= 0.0 {
            continue;
        }
        for t in index.labels(i) {
            *scores.entry(index.type_iri(*t).to_string()).or_default() += s;
        }
    }
    let mut out: Vec<(String, f64)> = scores.into_iter().collect();
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    out
}

#[test]
fn fifty_random_instances_match_oracle() {
    let mut r = common::rng(17);
    for instance in 0..50 {
        let n = r.random_range(1..=5000);
        let dim = r.random_range(2..=16);
        let types = r.random_range(1..=30);
        let mut store = EntityEmbeddingStore::new(dim);
        for i in 0..n {
            store.insert(&format!("e{i}"), &common::random_unit(&mut r, dim), true);
        }
        let mut c = TypeCounter::new(&store);
        for i in 0..n {
            for _ in 0..r.random_range(1..=3) {
                c.observe(&format!("e{i}"), &format!("T{}", r.random_range(0..types)));
            }
        }
        let census = c.finish();
        for k in [1, 5, 10] {
            let index = KnnIndex::build(&store, &census, k).unwrap();
            for _ in 0..5 {
                let q = common::random_unit(&mut r, dim);
                let got: Vec<(String, f64)> = index
                    .knn_recommend(&q)
                    .unwrap()
                    .entries
                    .iter()
                    .map(|e| (index.type_iri(e.type_id).to_string(), e.raw))
                    .collect();
                let want = oracle(&index, &q, k);
                assert_eq!(got.len(), want.len(), "instance {instance} k {k}");
                for (g, w) in got.iter().zip(&want) {
                    assert_eq!(g.0, w.0, "instance {instance} k {k}");
                    assert!((g.1 - w.1).abs() <= 1e-12);
                }
                let max_labels = (0..index.len()).map(|i| index.labels(i).len()).max().unwrap();
                assert!(got.len() <= k * max_labels);
            }
        }
    }
}
