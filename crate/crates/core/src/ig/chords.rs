//! Chord-length distribution `A_K(s)` and the measure `f(r, K)` of circles
//! of radius `r` linked with a curve.
//!
//! `A_K(s) = ∫_K Σ_q cos θ_p · sign(cos θ_q) dp`, the sum running over the
//! points `q ∈ K` with `|q - p| = s`.  These points are the roots of the
//! trigonometric polynomial `|K(t) - p|² - s²` of degree `2M`, so each
//! shell is located exactly rather than by binning.

use super::crossings::Trig;
use crate::curve::ClosedCurve;
use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::quad::OrderedSum;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Number of nodes on the curve for the outer integral of `A_K`.
pub const OUTER_NODES: usize = 1024;

fn shell_sum(k: &ClosedCurve, tp: f64, s: f64) -> f64 {
    let (p, dp) = k.point_d1(tp);
    let g = Trig::from_fn(2 * k.modes(), |t| (k.point(t) - p).norm_squared() - s * s);
    let Ok(roots) = g.roots(1e-13 * s * s) else { return 0.0 };
    roots
        .into_iter()
        .map(|t| {
            let (q, dq) = k.point_d1(t);
            let d = q - p;
            dp.dot(&d) / s * dq.dot(&d).signum()
        })
        .sum()
}

/// `A_K(s)` at one chord length.
pub fn chord_density(k: &ClosedCurve, s: f64) -> f64 {
    if s <= 0.0 {
        return 2.0 * k.arclength();
    }
    let h = TAU / OUTER_NODES as f64;
    (0..OUTER_NODES).into_par_iter().map(|i| shell_sum(k, h * i as f64, s)).ordered_sum() * h
}

/// `A_K(s)` on a grid of chord lengths.
pub fn chord_distribution(k: &ClosedCurve, s_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if s_grid.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(Error::Config("chord lengths must be finite and nonnegative".into()));
    }
    let k = k.to_space();
    Ok(s_grid.iter().map(|&s| (s, chord_density(&k, s))).collect())
}

/// Intercept and `s²` slope of `A_K` near `s = 0`, fitted on
/// `s = diam · {0.01, 0.02, ..., 0.05}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChordLimit {
    pub intercept: f64,
    pub slope: f64,
    pub twice_length: f64,
}

pub fn chord_limit(k: &ClosedCurve) -> Result<ChordLimit> {
    let diam = k.diameter();
    let grid: Vec<f64> = (1..=5).map(|i| 0.01 * diam * i as f64).collect();
    let pts = chord_distribution(k, &grid)?;
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (s, v)| (a + s * s, b + v));
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(a, b), (s, v)| (a + s.powi(4), b + s * s * v));
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(ChordLimit { intercept: (sy - slope * sx) / n, slope, twice_length: 2.0 * k.arclength() })
}

/// `f(r, K) = π ∫₀^{2r} A_K(s) √(4r² - s²) ds`, with `s = 2r sin φ`.
pub fn dcb_radius_measure(k: &ClosedCurve, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Config(format!("radius must be positive, got {r}")));
    }
    let k = k.to_space();
    let g = GaussLegendre::g16();
    let panels = 8;
    let w = FRAC_PI_2 / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        for (phi, wt) in g.mapped(i as f64 * w, (i + 1) as f64 * w) {
            let c = phi.cos();
            total += wt * chord_density(&k, 2.0 * r * phi.sin()) * 4.0 * r * r * c * c;
        }
    }
    Ok(PI * total)
}
