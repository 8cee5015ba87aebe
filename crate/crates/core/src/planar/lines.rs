//! Integrals over the space of lines in the plane, `dℓ = dr dθ`.
//!
//! A line is `{x : x·u(θ) = r}` with `u(θ) = (cos θ, sin θ)`, `θ ∈ [0, π)`
//! and `r ∈ ℝ`.  For fixed `θ` the height `h(t) = K(t)·u` splits every
//! boundary curve into monotone branches; between consecutive critical
//! values of `h` the set of crossings varies smoothly, and the substitution
//! `r = a + (b - a)(1 - cos φ)/2` absorbs the square-root behaviour at the
//! folds.

use super::Estimate;
use crate::curve::{ClosedCurve, Vec3};
use crate::domain::PlanarDomain;
use crate::error::{Error, Result};
use crate::quad::{bisect, pow2_at_least, GaussLegendre};
use crate::quad::OrderedSum;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

/// A monotone piece `[t0, t1]` of the height function on one curve.
#[derive(Debug, Clone, Copy)]
pub struct Branch {
    pub curve: usize,
    pub t0: f64,
    pub t1: f64,
    pub h0: f64,
    pub h1: f64,
}

/// One crossing of a line with the curve system.
#[derive(Debug, Clone, Copy)]
pub struct Crossing {
    /// Position along the line, `K(t)·u⊥`.
    pub y: f64,
    /// `+1` when the curve crosses in the direction of `u`.
    pub sign: f64,
    pub curve: usize,
    pub t: f64,
}

/// Intersections of lines with a fixed system of planar curves.
pub struct LineSlicer<'a> {
    curves: Vec<&'a ClosedCurve>,
    grid: Vec<usize>,
}

pub fn direction(theta: f64) -> (Vec3, Vec3) {
    let (s, c) = theta.sin_cos();
    (Vec3::new(c, s, 0.0), Vec3::new(-s, c, 0.0))
}

impl<'a> LineSlicer<'a> {
    pub fn new(curves: &[&'a ClosedCurve]) -> Self {
        let grid = curves.iter().map(|c| pow2_at_least(16 * c.modes() + 64)).collect();
        LineSlicer { curves: curves.to_vec(), grid }
    }

    pub fn curves(&self) -> &[&'a ClosedCurve] {
        &self.curves
    }

    /// Monotone branches of `t ↦ K(t)·u` on every curve.
    pub fn branches(&self, u: &Vec3) -> Vec<Branch> {
        let mut out = Vec::new();
        for (ci, c) in self.curves.iter().enumerate() {
            let n = self.grid[ci];
            let dh = |t: f64| c.point_d1(t).1.dot(u);
            let vals: Vec<f64> = (0..=n).map(|j| dh(TAU * j as f64 / n as f64)).collect();
            let mut crit = Vec::new();
            for j in 0..n {
                if (vals[j] < 0.0) != (vals[j + 1] < 0.0) {
                    let a = TAU * j as f64 / n as f64;
                    crit.push(bisect(a, a + TAU / n as f64, dh, 1e-15));
                }
            }
            if crit.len() < 2 {
                continue;
            }
            for k in 0..crit.len() {
                let t0 = crit[k];
                let t1 = if k + 1 < crit.len() { crit[k + 1] } else { crit[0] + TAU };
                out.push(Branch { curve: ci, t0, t1, h0: c.point(t0).dot(u), h1: c.point(t1).dot(u) });
            }
        }
        out
    }

    /// Crossings of the line `x·u = r`.
    pub fn crossings(&self, branches: &[Branch], u: &Vec3, v: &Vec3, r: f64) -> Vec<Crossing> {
        let mut out = Vec::new();
        for b in branches {
            let (lo, hi) = if b.h0 < b.h1 { (b.h0, b.h1) } else { (b.h1, b.h0) };
            if r <= lo || r >= hi {
                continue;
            }
            let c = self.curves[b.curve];
            let t = bisect(b.t0, b.t1, |t| c.point(t).dot(u) - r, 1e-15);
            let (p, d) = c.point_d1(t);
            out.push(Crossing { y: p.dot(v), sign: d.dot(u).signum(), curve: b.curve, t });
        }
        out
    }

    /// Sorted distinct critical values of the height.
    pub fn critical_values(branches: &[Branch]) -> Vec<f64> {
        let mut c: Vec<f64> = branches.iter().flat_map(|b| [b.h0, b.h1]).collect();
        c.sort_by(f64::total_cmp);
        let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
        c.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * scale);
        c
    }

    /// `∫_ℝ f(crossings) dr` at direction `θ`.
    pub fn integrate_r(&self, theta: f64, nphi: &GaussLegendre, f: &(impl Fn(&[Crossing]) -> f64 + Sync)) -> f64 {
        let (u, v) = direction(theta);
        let br = self.branches(&u);
        let cv = Self::critical_values(&br);
        let mut total = 0.0;
        for w in cv.windows(2) {
            let (a, b) = (w[0], w[1]);
            total += nphi.integrate(0.0, PI, |phi| {
                let r = a + (b - a) * 0.5 * (1.0 - phi.cos());
                let jac = 0.5 * (b - a) * phi.sin();
                let xs = self.crossings(&br, &u, &v, r);
                if xs.is_empty() {
                    0.0
                } else {
                    jac * f(&xs)
                }
            });
        }
        total
    }

    /// `∫_0^π ∫_ℝ f dr dθ`, trapezoid in `θ` with `ntheta` nodes.
    pub fn integrate(&self, ntheta: usize, nphi: usize, f: impl Fn(&[Crossing]) -> f64 + Sync) -> f64 {
        let g = GaussLegendre::new(nphi);
        let h = PI / ntheta as f64;
        (0..ntheta).into_par_iter().map(|k| self.integrate_r(h * (k as f64 + 0.5), &g, &f)).ordered_sum() * h
    }
}

/// `Σ_{i≠j} ε_i ε_j / |y_i - y_j|` over ordered pairs of crossings.
pub fn segment_pair_sum(xs: &[Crossing]) -> f64 {
    let mut s = 0.0;
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            if i != j {
                s += xs[i].sign * xs[j].sign / (xs[i].y - xs[j].y).abs();
            }
        }
    }
    s
}

fn converged_lines(slicer: &LineSlicer, f: impl Fn(&[Crossing]) -> f64 + Sync + Copy, start: usize, cap: usize) -> Estimate {
    let mut n = start;
    let mut prev = slicer.integrate(n, 24, f);
    let mut err = f64::INFINITY;
    while 2 * n <= cap {
        n *= 2;
        let cur = slicer.integrate(n, 24, f);
        err = (cur - prev).abs();
        prev = cur;
        if err < 1e-10 * (1.0 + cur.abs()) {
            break;
        }
    }
    Estimate { value: prev, error: err, n }
}

/// `E(K) = -½ ∫ Σ_{ordered pairs} ε(p) ε(q) / |q - p| dℓ`.
pub fn segment_energy(curves: &[&ClosedCurve]) -> Result<Estimate> {
    if curves.iter().any(|c| !c.is_planar()) {
        return Err(Error::Schema("line geometry needs planar curves".into()));
    }
    let slicer = LineSlicer::new(curves);
    let m = super::max_modes(curves);
    let e = converged_lines(&slicer, |xs| -0.5 * segment_pair_sum(xs), pow2_at_least(8 * m + 56), 1024);
    Ok(e)
}

/// `E(K) = ∫ dℓ / L(ℓ ∩ Ω)` for a convex domain.
pub fn convex_chord_energy(domain: &PlanarDomain) -> Result<Estimate> {
    if !domain.is_simply_connected() {
        return Err(Error::Geometry("the chord formula needs a convex domain".into()));
    }
    let k = &domain.components()[0].outer;
    let (kmin, _) = k.curvature_range();
    if kmin < 0.0 {
        return Err(Error::Geometry(format!("the domain is not convex (curvature {kmin:e})")));
    }
    let slicer = LineSlicer::new(&[k]);
    let chord = |xs: &[Crossing]| if xs.len() == 2 { 1.0 / (xs[0].y - xs[1].y).abs() } else { 0.0 };
    Ok(converged_lines(&slicer, chord, pow2_at_least(8 * k.modes() + 56), 1024))
}

/// `∫ #(ℓ ∩ K) dℓ`, which equals twice the total length.
pub fn crofton_measure(curves: &[&ClosedCurve]) -> f64 {
    let slicer = LineSlicer::new(curves);
    let n = 256;
    let h = PI / n as f64;
    (0..n)
        .into_par_iter()
        .map(|k| {
            let (u, _) = direction(h * (k as f64 + 0.5));
            slicer.branches(&u).iter().map(|b| (b.h1 - b.h0).abs()).sum::<f64>()
        })
        .ordered_sum()
        * h
}
