//! Exact (O(m^2)) t-SNE into two dimensions.
//!
//! Input affinities use a Gaussian kernel per point whose precision is found
//! by bisection so that the conditional distribution has the requested
//! perplexity. The joint distribution is the symmetrized conditional one.
//! The embedding uses a Student-t kernel and is optimized by gradient descent
//! on KL(P || Q) with momentum, per-coordinate gains, and early exaggeration.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::vector;

const MIN_PROB: f64 = 1e-12;
const ENTROPY_TOLERANCE: f64 = 1e-10;
const MAX_BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub early_exaggeration: f64,
    /// Iterations run with exaggerated input affinities.
    pub exaggeration_iterations: usize,
    pub initial_momentum: f64,
    pub final_momentum: f64,
    pub momentum_switch: usize,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        Self {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            early_exaggeration: 12.0,
            exaggeration_iterations: 250,
            initial_momentum: 0.5,
            final_momentum: 0.8,
            momentum_switch: 250,
            seed: 0,
        }
    }
}

impl TsneConfig {
    /// Largest admissible perplexity for `m` points: just under `(m - 1) / 3`.
    pub fn perplexity_bound(m: usize) -> f64 {
        (m.saturating_sub(1)) as f64 / 3.0
    }

    /// The perplexity actually used for `m` points; values at or above the
    /// bound are pulled just below it.
    pub fn effective_perplexity(&self, m: usize) -> f64 {
        let bound = Self::perplexity_bound(m);
        if self.perplexity < bound {
            self.perplexity
        } else {
            bound * (1.0 - 1e-6)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsneOutput {
    /// One `[x, y]` per input row, column means zero.
    pub coords: Vec<[f64; 2]>,
    /// KL(P || Q) before each iteration and once after the last one.
    pub kl_history: Vec<f64>,
    /// Per-point entropy (nats) of the conditional input distribution.
    pub entropies: Vec<f64>,
    pub perplexity: f64,
}

/// Conditional affinities `p_{j|i}` for row `i` given squared distances to
/// every other point (`dist[i]` is ignored). Returns the achieved entropy.
fn conditional_row(dist: &[f64], i: usize, target_entropy: f64, out: &mut [f64]) -> f64 {
    let m = dist.len();
    let dmin = dist
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &d)| d)
        .fold(f64::INFINITY, f64::min);
    let mut beta = 1.0;
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    let mut entropy = 0.0;
    for _ in 0..MAX_BISECTION_STEPS {
        let mut sum = 0.0;
        let mut weighted = 0.0;
        for j in 0..m {
            if j == i {
                out[j] = 0.0;
                continue;
            }
            let d = dist[j] - dmin;
            let p = libm::exp(-beta * d);
            out[j] = p;
            sum += p;
            weighted += d * p;
        }
        entropy = libm::log(sum) + beta * weighted / sum;
        for p in out.iter_mut() {
            *p /= sum;
        }
        let diff = entropy - target_entropy;
        if diff.abs() < ENTROPY_TOLERANCE {
            break;
        }
        if diff > 0.0 {
            lo = beta;
            beta = if hi.is_infinite() { beta * 2.0 } else { 0.5 * (beta + hi) };
        } else {
            hi = beta;
            beta = 0.5 * (beta + lo);
        }
    }
    entropy
}

/// Symmetrized joint input affinities plus per-point entropies.
pub fn joint_probabilities(data: &[f64], m: usize, dim: usize, perplexity: f64) -> (Vec<f64>, Vec<f64>) {
    let target = libm::log(perplexity);
    let mut dist = vec![0.0; m * m];
    for i in 0..m {
        for j in (i + 1)..m {
            let d = vector::squared_distance(&data[i * dim..(i + 1) * dim], &data[j * dim..(j + 1) * dim]);
            dist[i * m + j] = d;
            dist[j * m + i] = d;
        }
    }
    let mut cond = vec![0.0; m * m];
    let mut entropies = Vec::with_capacity(m);
    for i in 0..m {
        let (row_d, row_p) = (&dist[i * m..(i + 1) * m], &mut cond[i * m..(i + 1) * m]);
        entropies.push(conditional_row(row_d, i, target, row_p));
    }
    let mut p = vec![0.0; m * m];
    let scale = 1.0 / (2.0 * m as f64);
    for i in 0..m {
        for j in 0..m {
            if i != j {
                p[i * m + j] = ((cond[i * m + j] + cond[j * m + i]) * scale).max(MIN_PROB);
            }
        }
    }
    (p, entropies)
}

/// Student-t numerators `1 / (1 + |y_i - y_j|^2)` and their sum.
fn student_t(y: &[[f64; 2]], num: &mut [f64]) -> f64 {
    let m = y.len();
    let mut sum = 0.0;
    for i in 0..m {
        num[i * m + i] = 0.0;
        for j in (i + 1)..m {
            let dx = y[i][0] - y[j][0];
            let dy = y[i][1] - y[j][1];
            let v = 1.0 / (1.0 + dx * dx + dy * dy);
            num[i * m + j] = v;
            num[j * m + i] = v;
            sum += 2.0 * v;
        }
    }
    sum
}

fn kl_divergence(p: &[f64], num: &[f64], num_sum: f64, m: usize) -> f64 {
    let mut kl = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                let pij = p[i * m + j];
                let qij = (num[i * m + j] / num_sum).max(MIN_PROB);
                kl += pij * libm::log(pij / qij);
            }
        }
    }
    kl
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

fn center(y: &mut [[f64; 2]]) {
    let m = y.len() as f64;
    for c in 0..2 {
        let mean = y.iter().map(|p| p[c]).sum::<f64>() / m;
        for p in y.iter_mut() {
            p[c] -= mean;
        }
    }
}

/// Projects `m` rows of `dim` values (row-major `data`) to two dimensions.
pub fn tsne(data: &[f64], m: usize, dim: usize, config: &TsneConfig) -> Result<TsneOutput> {
    if data.len() != m * dim {
        return Err(Error::DimensionMismatch {
            expected: m * dim,
            found: data.len(),
        });
    }
    if m < 5 {
        return Err(Error::TooFewPoints { found: m, required: 5 });
    }
    if !(config.learning_rate > 0.0) || config.iterations == 0 || !(config.perplexity > 0.0) {
        return Err(Error::InvalidParameter(
            "perplexity, learning rate and iterations must be positive",
        ));
    }
    let perplexity = config.effective_perplexity(m);
    let (p, entropies) = joint_probabilities(data, m, dim, perplexity);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut y: Vec<[f64; 2]> = (0..m)
        .map(|_| [1e-4 * standard_normal(&mut rng), 1e-4 * standard_normal(&mut rng)])
        .collect();
    let mut update = vec![[0.0f64; 2]; m];
    let mut gains = vec![[1.0f64; 2]; m];
    let mut num = vec![0.0; m * m];
    let mut grad = vec![[0.0f64; 2]; m];
    let mut kl_history = Vec::with_capacity(config.iterations + 1);

    for iter in 0..config.iterations {
        let num_sum = student_t(&y, &mut num);
        kl_history.push(kl_divergence(&p, &num, num_sum, m));

        let exaggeration = if iter < config.exaggeration_iterations {
            config.early_exaggeration
        } else {
            1.0
        };
        let momentum = if iter < config.momentum_switch {
            config.initial_momentum
        } else {
            config.final_momentum
        };

        for i in 0..m {
            let mut g = [0.0f64; 2];
            for j in 0..m {
                if i == j {
                    continue;
                }
                let nij = num[i * m + j];
                let qij = (nij / num_sum).max(MIN_PROB);
                let mult = (exaggeration * p[i * m + j] - qij) * nij;
                g[0] += mult * (y[i][0] - y[j][0]);
                g[1] += mult * (y[i][1] - y[j][1]);
            }
            grad[i] = [4.0 * g[0], 4.0 * g[1]];
        }

        for i in 0..m {
            for c in 0..2 {
                let same_sign = (grad[i][c] > 0.0) == (update[i][c] > 0.0);
                gains[i][c] = if same_sign { gains[i][c] * 0.8 } else { gains[i][c] + 0.2 };
                gains[i][c] = gains[i][c].max(0.01);
                update[i][c] = momentum * update[i][c] - config.learning_rate * gains[i][c] * grad[i][c];
                y[i][c] += update[i][c];
            }
        }
        center(&mut y);
        if y.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::NonFinite { iteration: iter });
        }
    }
    let num_sum = student_t(&y, &mut num);
    kl_history.push(kl_divergence(&p, &num, num_sum, m));
    center(&mut y);

    Ok(TsneOutput {
        coords: y,
        kl_history,
        entropies,
        perplexity,
    })
}
