mod common;

use proptest::prelude::*;
use rand::Rng;
use typeforge_core::{
    EntityEmbeddingStore, Normalizer, Recommender, TypeCounter, TypeEmbeddingModel, TypeId,
};

fn f1_model() -> TypeEmbeddingModel {
    let mut s = EntityEmbeddingStore::new(2);
    s.insert("e1", &[1.0, 0.0], true);
    s.insert("e2", &[0.0, 1.0], true);
    s.insert("e3", &[0.6, 0.8], true);
    let pairs = [("e1", "A"), ("e2", "A"), ("e2", "B"), ("e3", "B")];
    let mut c = TypeCounter::new(&s);
    for (a, b) in pairs {
        c.observe(a, b);
    }
    let census = c.finish();
    let mut acc = census.accumulator(&s);
    for (a, b) in pairs {
        acc.observe(a, b);
    }
    acc.finalize()
}

fn names(model: &TypeEmbeddingModel, q: &[f64]) -> Vec<(String, f64)> {
    Recommender::new(model, Normalizer::Softmax)
        .score_types(q)
        .unwrap()
        .entries
        .iter()
        .map(|e| (model.type_iri(e.type_id).to_string(), e.raw))
        .collect()
}

#[test]
fn f1_query_x_axis() {
    let m = f1_model();
    let got = names(&m, &[1.0, 0.0]);
    assert_eq!(got[0].0, "A");
    assert!((got[0].1 - 0.894427191).abs() < 1e-9);
    assert!((got[1].1 - 0.4190581774).abs() < 1e-9);
}

#[test]
fn f1_query_y_axis() {
    let m = f1_model();
    let got = names(&m, &[0.0, 1.0]);
    assert_eq!(got[0].0, "B");
    assert!((got[0].1 - 0.9079593843).abs() < 1e-9);
    assert!((got[1].1 - 0.4472135955).abs() < 1e-9);
}

#[test]
fn self_similarity_is_one() {
    let m = f1_model();
    let a = m.get_vector("A").unwrap().to_vec();
    let got = names(&m, &a);
    assert_eq!(got[0].0, "A");
    assert!((got[0].1 - 1.0).abs() <= 1e-12);
}

#[test]
fn top_k_truncation() {
    let m = f1_model();
    let r = Recommender::new(&m, Normalizer::Softmax);
    let top1 = r.score_types(&[1.0, 0.0]).unwrap().top_k(1);
    assert_eq!(top1.len(), 1);
    assert_eq!(m.type_iri(top1.entries[0].type_id), "A");
    assert_eq!(r.score_types(&[1.0, 0.0]).unwrap().top_k(10).len(), 2);
}

#[test]
fn equal_scores_rank_by_iri() {
    let m = TypeEmbeddingModel::from_records(
        2,
        vec![
            ("Zeta".into(), 1, vec![1.0, 0.0]),
            ("Alpha".into(), 1, vec![1.0, 0.0]),
            ("Mid".into(), 1, vec![0.0, 1.0]),
        ],
    )
    .unwrap();
    let list = Recommender::new(&m, Normalizer::Softmax).score_types(&[1.0, 0.0]).unwrap();
    let order: Vec<&str> = list.top_k(2).entries.iter().map(|e| m.type_iri(e.type_id)).collect();
    assert_eq!(order, ["Alpha", "Zeta"]);
}

#[test]
fn empty_model_empty_list_and_dimension_mismatch() {
    let m = TypeEmbeddingModel::empty(3);
    let r = Recommender::new(&m, Normalizer::Softmax);
    assert!(r.score_types(&[1.0, 0.0, 0.0]).unwrap().is_empty());
    assert!(r.score_types(&[1.0, 0.0]).is_err());
}

/// Independent oracle: plain dot products, sorted by score then IRI.
fn oracle_ranking(model: &TypeEmbeddingModel, q: &[f64]) -> Vec<TypeId> {
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut scored: Vec<(f64, &str, TypeId)> = model
        .iter()
        .map(|(id, name, v)| (v.iter().zip(q).map(|(a, b)| a * b / n).sum::<f64>(), name, id))
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(b.1)));
    scored.into_iter().map(|s| s.2).collect()
}

#[test]
fn random_queries_rank_like_oracle_with_monotone_probabilities() {
    let mut r = common::rng(5);
    let dim = 12;
    let records: Vec<_> = (0..40)
        .map(|i| (format!("T{i:02}"), 1, common::random_unit(&mut r, dim)))
        .collect();
    let m = TypeEmbeddingModel::from_records(dim, records).unwrap();
    for norm in [Normalizer::Softmax, Normalizer::ShiftedSum] {
        let rec = Recommender::new(&m, norm);
        for _ in 0..1000 {
            let scale = r.random_range(0.1..10.0);
            let q: Vec<f64> = common::random_unit(&mut r, dim).iter().map(|x| x * scale).collect();
            let list = rec.score_types(&q).unwrap();
            let ids: Vec<TypeId> = list.entries.iter().map(|e| e.type_id).collect();
            assert_eq!(ids, oracle_ranking(&m, &q));
            let sum: f64 = list.entries.iter().map(|e| e.probability).sum();
            assert!((sum - 1.0).abs() <= 1e-9);
            for w in list.entries.windows(2) {
                assert!(w[0].probability >= w[1].probability);
            }
            if norm == Normalizer::Softmax {
                assert!(list.entries.iter().all(|e| e.probability > 0.0));
            }
        }
    }
}

proptest! {
    #[test]
    fn query_scale_does_not_change_ranking(
        q in prop::collection::vec(-1.0f64..1.0, 2),
        scale in 0.01f64..100.0,
    ) {
        prop_assume!(q.iter().map(|x| x * x).sum::<f64>() > 1e-6);
        let m = f1_model();
        let r = Recommender::new(&m, Normalizer::Softmax);
        let a = r.score_types(&q).unwrap();
        let scaled: Vec<f64> = q.iter().map(|x| x * scale).collect();
        let b = r.score_types(&scaled).unwrap();
        let ia: Vec<_> = a.entries.iter().map(|e| e.type_id).collect();
        let ib: Vec<_> = b.entries.iter().map(|e| e.type_id).collect();
        prop_assert_eq!(ia, ib);
    }
}
