//! Integral geometry: invariant measures on circles and lines, linking
//! counts, and Monte Carlo estimators of the energies.

pub mod chords;
pub mod crossings;
pub mod circles;
pub mod lines3;

use crate::rng::stream;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// A Monte Carlo mean with its batch-means standard error.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub n_batches: u64,
    pub discard_rate: f64,
    /// Radius window `(r_min, r_max)` when the sampler truncates.
    pub truncation: Option<(f64, f64)>,
    /// Bound on the measure-weighted integrand outside the window.
    pub tail_bound: f64,
}

impl MCEstimate {
    /// `a·X + b`.
    pub fn affine(self, a: f64, b: f64) -> Self {
        MCEstimate { mean: a * self.mean + b, std_error: a.abs() * self.std_error, tail_bound: a.abs() * self.tail_bound, ..self }
    }

    /// Number of standard errors separating the mean from `x`.
    pub fn z_score(&self, x: f64) -> f64 {
        (self.mean - x).abs() / self.std_error.max(1e-300)
    }
}

/// Run `n_batches` reproducible batches of `per_batch` draws.  `draw`
/// returns `K` values per accepted sample or `None` for a discarded one;
/// discarded draws count as zero so every mean is over all draws.
pub fn run_batches<const K: usize>(
    seed: u64,
    n_batches: u64,
    per_batch: u64,
    draw: impl Fn(&mut ChaCha8Rng) -> Option<[f64; K]> + Sync,
) -> [MCEstimate; K] {
    let batches: Vec<([f64; K], u64)> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b);
            let mut sum = [0.0; K];
            let mut discarded = 0;
            for _ in 0..per_batch {
                match draw(&mut rng) {
                    Some(v) => {
                        for k in 0..K {
                            sum[k] += v[k];
                        }
                    }
                    None => discarded += 1,
                }
            }
            (sum.map(|s| s / per_batch as f64), discarded)
        })
        .collect();
    let nb = n_batches as f64;
    let discarded: u64 = batches.iter().map(|b| b.1).sum();
    std::array::from_fn(|k| {
        let mean = batches.iter().map(|b| b.0[k]).sum::<f64>() / nb;
        let var = batches.iter().map(|b| (b.0[k] - mean).powi(2)).sum::<f64>() / (nb - 1.0).max(1.0);
        MCEstimate {
            mean,
            std_error: (var / nb).sqrt(),
            n_samples: n_batches * per_batch,
            n_batches,
            discard_rate: discarded as f64 / (n_batches * per_batch) as f64,
            truncation: None,
            tail_bound: 0.0,
        }
    })
}

/// Split `n` samples into batches of reasonable size.
pub fn batching(n: u64) -> (u64, u64) {
    let nb = n.clamp(1, 64);
    (nb, n.div_ceil(nb))
}
