#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn unit(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

pub fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
    unit(&mut v);
    v
}

/// `k` Gaussian clusters of `per` points each on the unit sphere.
pub fn sphere_clusters(seed: u64, k: usize, per: usize, dim: usize, spread: f64) -> (Vec<f64>, Vec<usize>) {
    let mut r = rng(seed);
    let centers: Vec<Vec<f64>> = (0..k).map(|_| random_unit(&mut r, dim)).collect();
    let mut data = Vec::new();
    let mut labels = Vec::new();
    for (c, center) in centers.iter().enumerate() {
        for _ in 0..per {
            let mut v: Vec<f64> = center.iter().map(|x| x + spread * gaussian(&mut r)).collect();
            unit(&mut v);
            data.extend(v);
            labels.push(c);
        }
    }
    (data, labels)
}

/// Lloyd's k-means on 2-D points, best of several seeded restarts.
pub fn kmeans_2d(points: &[[f64; 2]], k: usize, seed: u64) -> Vec<usize> {
    let mut r = rng(seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..20 {
        let mut centers: Vec<[f64; 2]> = Vec::new();
        while centers.len() < k {
            let p = points[r.random_range(0..points.len())];
            if !centers.contains(&p) {
                centers.push(p);
            }
        }
        let mut assign = vec![0; points.len()];
        for _ in 0..100 {
            for (i, p) in points.iter().enumerate() {
                assign[i] = (0..k)
                    .min_by(|&a, &b| d2(p, &centers[a]).total_cmp(&d2(p, &centers[b])))
                    .unwrap();
            }
            for (c, center) in centers.iter_mut().enumerate() {
                let members: Vec<&[f64; 2]> = points.iter().zip(&assign).filter(|(_, &a)| a == c).map(|(p, _)| p).collect();
                if !members.is_empty() {
                    let n = members.len() as f64;
                    *center = [
                        members.iter().map(|p| p[0]).sum::<f64>() / n,
                        members.iter().map(|p| p[1]).sum::<f64>() / n,
                    ];
                }
            }
        }
        let inertia: f64 = points.iter().zip(&assign).map(|(p, &a)| d2(p, &centers[a])).sum();
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, assign));
        }
    }
    best.unwrap().1
}

fn d2(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Fraction of points whose cluster's majority label matches their own.
pub fn purity(assign: &[usize], labels: &[usize], k: usize) -> f64 {
    let mut correct = 0;
    for c in 0..k {
        let mut counts = std::collections::BTreeMap::new();
        for (a, l) in assign.iter().zip(labels) {
            if *a == c {
                *counts.entry(*l).or_insert(0) += 1;
            }
        }
        correct += counts.values().max().copied().unwrap_or(0);
    }
    correct as f64 / assign.len() as f64
}
