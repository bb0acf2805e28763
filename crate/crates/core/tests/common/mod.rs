//! Shared generators and independent oracles for the integration suites.
#![allow(dead_code)]

pub mod graphs;
pub mod http;
pub mod ranking;

use foilbench_core::hn_loss::{unit_normalize, LossBatch, Matrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Rows drawn from an isotropic Gaussian and scaled to unit norm.
pub fn unit_rows<R: Rng>(rng: &mut R, rows: usize, d: usize) -> Matrix {
    let data = (0..rows * d).map(|_| gaussian(rng)).collect();
    unit_normalize(&Matrix::from_flat(rows, d, data).unwrap())
}

/// A random batch of unit-norm embeddings. Items only get generated negatives when the
/// batch has in-batch negatives to normalize their weights against.
pub fn random_batch<R: Rng>(rng: &mut R, n: usize, d: usize, max_gen: usize) -> LossBatch {
    let video = unit_rows(rng, n, d);
    let text = unit_rows(rng, n, d);
    let generated = (0..n)
        .map(|_| {
            let k = if n > 1 { rng.random_range(0..=max_gen) } else { 0 };
            unit_rows(rng, k, d)
        })
        .collect();
    LossBatch::new(video, text, generated).unwrap()
}

/// Symmetric InfoNCE computed as softmax cross-entropy over the similarity matrix.
pub fn symmetric_infonce(v: &Matrix, t: &Matrix, tau: f64) -> f64 {
    let n = v.rows();
    let sim: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| v.row(i).iter().zip(t.row(j)).map(|(a, b)| a * b).sum::<f64>() / tau)
                .collect()
        })
        .collect();
    let xent = |logits: Vec<f64>, target: usize| {
        let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + logits.iter().map(|x| (x - m).exp()).sum::<f64>().ln();
        lse - logits[target]
    };
    let mut total = 0.0;
    for (i, row) in sim.iter().enumerate() {
        total += xent(row.clone(), i);
        total += xent((0..n).map(|j| sim[j][i]).collect(), i);
    }
    total / n as f64
}
