mod common;

use common::{kmeans_2d, purity, sphere_clusters};
use typeforge_core::tsne::{tsne, TsneConfig};

fn spread(coords: &[[f64; 2]]) -> f64 {
    let mut max: f64 = 0.0;
    for a in coords {
        for b in coords {
            max = max.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
        }
    }
    max
}

#[test]
fn three_clusters_are_pure_under_three_means() {
    let (data, labels) = sphere_clusters(11, 3, 10, 16, 0.05);
    let out = tsne(&data, 30, 16, &TsneConfig::default()).unwrap();
    let assign = kmeans_2d(&out.coords, 3, 5);
    assert_eq!(purity(&assign, &labels, 3), 1.0);
}

#[test]
fn kl_non_increasing_after_exaggeration() {
    let (data, _) = sphere_clusters(12, 3, 10, 16, 0.05);
    let cfg = TsneConfig::default();
    let out = tsne(&data, 30, 16, &cfg).unwrap();
    let half = cfg.iterations / 2;
    let mut worst: f64 = 0.0;
    for w in out.kl_history[half..].windows(2) {
        worst = worst.max(w[1] - w[0]);
    }
    println!("worst KL step increase {worst:e}; final KL {}", out.kl_history.last().unwrap());
    assert!(worst <= 1e-6);
}

#[test]
fn output_is_centered_and_entropy_matches() {
    let (data, _) = sphere_clusters(13, 3, 10, 8, 0.1);
    let out = tsne(&data, 30, 8, &TsneConfig::default()).unwrap();
    for c in 0..2 {
        let mean: f64 = out.coords.iter().map(|p| p[c]).sum::<f64>() / 30.0;
        assert!(mean.abs() <= 1e-9, "column {c} mean {mean}");
    }
    for h in &out.entropies {
        assert!((h.exp() - out.perplexity).abs() <= 1e-4);
    }
}

#[test]
fn deterministic_per_seed() {
    let (data, _) = sphere_clusters(14, 3, 10, 8, 0.1);
    let cfg = TsneConfig { seed: 99, ..TsneConfig::default() };
    let a = tsne(&data, 30, 8, &cfg).unwrap();
    let b = tsne(&data, 30, 8, &cfg).unwrap();
    assert_eq!(a, b);
    let c = tsne(&data, 30, 8, &TsneConfig { seed: 100, ..cfg }).unwrap();
    assert_ne!(a.coords, c.coords);
}

/// Exact t-SNE adapts each bandwidth to the local input scale, so rows that
/// differ only by 1e-6 noise still get the requested perplexity and a finite,
/// reproducible layout.
#[test]
fn near_duplicate_rows() {
    let mut r = common::rng(3);
    let base = common::random_unit(&mut r, 8);
    let mut dup = Vec::new();
    for _ in 0..5 {
        let mut v: Vec<f64> = base.iter().map(|x| x + 1e-6 * common::gaussian(&mut r)).collect();
        common::unit(&mut v);
        dup.extend(v);
    }
    let cfg = TsneConfig::default();
    let a = tsne(&dup, 5, 8, &cfg).unwrap();
    assert!(a.coords.iter().all(|p| p[0].is_finite() && p[1].is_finite()));
    assert!(spread(&a.coords) > 0.0);
    for h in &a.entropies {
        assert!((h.exp() - a.perplexity).abs() <= 1e-4);
    }
    assert_eq!(a, tsne(&dup, 5, 8, &cfg).unwrap());
}
