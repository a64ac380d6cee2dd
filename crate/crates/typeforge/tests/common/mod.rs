#![allow(dead_code)]

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use typeforge::ntriples::RDF_TYPE;
use typeforge_core::EntityEmbeddingStore;

pub fn type_iri(t: usize) -> String {
    format!("http://ex.org/type/T{t:03}")
}

pub fn entity_iri(i: usize) -> String {
    format!("http://ex.org/entity/{i}")
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

/// Entities scattered around one (or, for a fraction `multi`, two) random
/// type centres on the unit sphere.
pub struct Corpus {
    pub dim: usize,
    pub type_count: usize,
    pub store: EntityEmbeddingStore,
    /// (entity, type) index pairs in file order.
    pub assertions: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug)]
pub struct CorpusSpec {
    pub types: usize,
    pub dim: usize,
    pub entities: usize,
    pub multi: f64,
    /// Per-coordinate noise standard deviation.
    pub noise: f64,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            types: 415,
            dim: 64,
            entities: 50_000,
            multi: 0.05,
            noise: 0.0125,
            seed: 7,
        }
    }
}

pub fn corpus(spec: CorpusSpec) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let centres: Vec<Vec<f64>> = (0..spec.types).map(|_| random_unit(&mut rng, spec.dim)).collect();
    let mut store = EntityEmbeddingStore::with_capacity(spec.dim, spec.entities);
    let mut assertions = Vec::with_capacity(spec.entities * 11 / 10);
    let mut v = vec![0.0; spec.dim];
    for i in 0..spec.entities {
        let t = rng.random_range(0..spec.types);
        v.copy_from_slice(&centres[t]);
        assertions.push((i, t));
        if rng.random::<f64>() < spec.multi {
            let mut u = rng.random_range(0..spec.types - 1);
            if u >= t {
                u += 1;
            }
            v.iter_mut().zip(&centres[u]).for_each(|(a, b)| *a += b);
            assertions.push((i, u));
        }
        for x in v.iter_mut() {
            *x += spec.noise * gaussian(&mut rng);
        }
        store.insert(&entity_iri(i), &v, true);
    }
    Corpus {
        dim: spec.dim,
        type_count: spec.types,
        store,
        assertions,
    }
}

impl Corpus {
    pub fn write_assertions(&self, path: &Path) {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path).unwrap());
        for &(e, t) in &self.assertions {
            writeln!(w, "<{}> <{RDF_TYPE}> <{}> .", entity_iri(e), type_iri(t)).unwrap();
        }
        w.flush().unwrap();
    }
}
