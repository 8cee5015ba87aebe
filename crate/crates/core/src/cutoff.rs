//! Double integrals over pairs of curve points.
//!
//! Kernels are written per `ds dt` in the curve parameters and receive
//! `(p, p', q, q')`.  Three evaluation strategies are provided: the
//! periodic trapezoid rule on the torus (smooth integrands, with a
//! diagonal fill for self pairs), the chord-distance cutoff `|q - p| > ε`
//! (graded Gauss-Legendre panels towards the cutoff), and nearly singular
//! pairs of distinct curves (graded panels around the closest approach).

use crate::curve::{ClosedCurve, Jet, Vec3};
use crate::curve::refine_root;
use crate::quad::{graded_panels, uniform_panels, GaussLegendre};
use crate::renorm::ladder;
use crate::quad::OrderedSum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Integrand per `ds dt`.
pub trait PairKernel: Fn(&Vec3, &Vec3, &Vec3, &Vec3) -> f64 + Sync {}
impl<F: Fn(&Vec3, &Vec3, &Vec3, &Vec3) -> f64 + Sync> PairKernel for F {}

/// `dp·dq / |q - p|²`.
pub fn dots(p: &Vec3, dp: &Vec3, q: &Vec3, dq: &Vec3) -> f64 {
    let d = q - p;
    dp.dot(dq) / d.norm_squared()
}

/// `cos θ_p cos θ_q dp dq / |q - p|²`.
pub fn coscos(p: &Vec3, dp: &Vec3, q: &Vec3, dq: &Vec3) -> f64 {
    let d = q - p;
    let r2 = d.norm_squared();
    dp.dot(&d) * dq.dot(&d) / (r2 * r2)
}

/// `cos τ sin θ_p sin θ_q dp dq / |q - p|²`; in the plane this is the
/// product of the signed sines.
pub fn sinsin(p: &Vec3, dp: &Vec3, q: &Vec3, dq: &Vec3) -> f64 {
    let d = q - p;
    let r2 = d.norm_squared();
    dp.cross(&d).dot(&dq.cross(&d)) / (r2 * r2)
}

/// `sin τ sin θ_p sin θ_q dp dq / |q - p|²`.
pub fn sintau(p: &Vec3, dp: &Vec3, q: &Vec3, dq: &Vec3) -> f64 {
    let d = q - p;
    let r = d.norm();
    dp.cross(dq).dot(&d) / (r * r * r)
}

/// Diagonal limit of [`sinsin`] per `ds²`: `-κ²|K'|²/4`.
pub fn sinsin_diagonal(j: &Jet) -> f64 {
    let s2 = j.d1.norm_squared();
    -0.25 * j.d1.cross(&j.d2).norm_squared() / (s2 * s2)
}

/// Trapezoid rule over all ordered pairs of components on an `n × n`
/// grid per pair; the diagonal of each self pair takes `diag`.
pub fn torus_integral(curves: &[&ClosedCurve], n: usize, kernel: impl PairKernel, diag: impl Fn(&Jet) -> f64 + Sync) -> f64 {
    let h = TAU / n as f64;
    let jets: Vec<Vec<Jet>> = curves
        .iter()
        .map(|c| (0..n).into_par_iter().map(|i| c.jet(h * i as f64)).collect())
        .collect();
    let mut total = 0.0;
    for a in 0..curves.len() {
        for b in 0..curves.len() {
            let (ja, jb) = (&jets[a], &jets[b]);
            let s: f64 = (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut acc = 0.0;
                    for k in 0..n {
                        if a == b && i == k {
                            acc += diag(&ja[i]);
                        } else {
                            acc += kernel(&ja[i].p, &ja[i].d1, &jb[k].p, &jb[k].d1);
                        }
                    }
                    acc
                })
                .ordered_sum();
            total += s * h * h;
        }
    }
    total
}

/// [`torus_integral`] at doubling resolutions until two successive values
/// agree to `rel_tol`; returns the value and the resolution used.
pub fn torus_integral_converged(
    curves: &[&ClosedCurve],
    kernel: impl PairKernel,
    diag: impl Fn(&Jet) -> f64 + Sync,
    rel_tol: f64,
    cap: usize,
) -> (f64, usize) {
    let m = curves.iter().map(|c| c.modes()).max().unwrap_or(1);
    let mut n = crate::quad::pow2_at_least(4 * m + 60).max(64);
    let mut prev = torus_integral(curves, n, &kernel, &diag);
    while 2 * n <= cap {
        n *= 2;
        let cur = torus_integral(curves, n, &kernel, &diag);
        if (cur - prev).abs() <= rel_tol * (1.0 + cur.abs()) {
            return (cur, n);
        }
        prev = cur;
    }
    (prev, n)
}

/// Trapezoid rule for `∬ kernel` over `K₁ × K₂` on an `n × n` grid.
pub fn pair_torus(k1: &ClosedCurve, k2: &ClosedCurve, n: usize, kernel: impl PairKernel) -> f64 {
    let h = TAU / n as f64;
    let a: Vec<(Vec3, Vec3)> = (0..n).map(|i| k1.point_d1(h * i as f64)).collect();
    let b: Vec<(Vec3, Vec3)> = (0..n).map(|i| k2.point_d1(h * i as f64)).collect();
    let s: f64 = a
        .par_iter()
        .map(|(p, dp)| b.iter().map(|(q, dq)| kernel(p, dp, q, dq)).sum::<f64>())
        .ordered_sum();
    s * h * h
}

/// Value of a doubling sequence of quadratures, with the last change as error.
#[derive(Debug, Clone, Copy)]
pub struct Converged {
    pub value: f64,
    pub error: f64,
    pub n: usize,
}

/// Evaluate `f(n)` at doubling `n` from `start` until successive values
/// agree to `rel_tol` or `cap` is reached.
pub fn converge(start: usize, cap: usize, rel_tol: f64, f: impl Fn(usize) -> f64) -> Converged {
    let mut n = start;
    let mut prev = f(n);
    let mut err = f64::INFINITY;
    while 2 * n <= cap {
        n *= 2;
        let cur = f(n);
        err = (cur - prev).abs();
        prev = cur;
        if err <= rel_tol * (1.0 + cur.abs()) {
            break;
        }
    }
    Converged { value: prev, error: err, n }
}

fn max_panel(c: &ClosedCurve) -> f64 {
    (TAU / (4 * c.modes() + 16) as f64).min(0.25)
}

/// Inner integral over `t` of `kernel(p, dp, K(t), K'(t))` restricted to
/// `|K(t) - p| > eps`.  `self_param` is the parameter of `p` when `p`
/// lies on the same curve.
pub fn inner_cutoff(p: &Vec3, dp: &Vec3, curve: &ClosedCurve, self_param: Option<f64>, eps: f64, kernel: &impl PairKernel) -> f64 {
    let g = GaussLegendre::g16();
    let nt = (16 * curve.modes() + 240).max(256);
    let e2 = eps * eps;
    let hfun = |t: f64| (curve.point(t) - p).norm_squared() - e2;
    let t0 = self_param.unwrap_or(0.0);
    let grid: Vec<f64> = (0..=nt).map(|k| t0 + TAU * k as f64 / nt as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&t| if self_param.is_some() && (t == t0 || t == t0 + TAU) { -e2 } else { hfun(t) }).collect();
    let start = match vals.iter().position(|&v| v < 0.0) {
        Some(k) => k,
        None => {
            return uniform_panels(t0, t0 + TAU, max_panel(curve))
                .into_iter()
                .map(|(a, b)| {
                    g.integrate(a, b, |t| {
                        let (q, dq) = curve.point_d1(t);
                        kernel(p, dp, &q, &dq)
                    })
                })
                .sum();
        }
    };
    // roots in cyclic order starting from a node inside the excluded region
    let mut roots: Vec<f64> = Vec::new();
    for m in 0..nt {
        let k = (start + m) % nt;
        let shift = if k < start { TAU } else { 0.0 };
        let (va, vb) = (vals[k], vals[k + 1]);
        if (va < 0.0) != (vb < 0.0) {
            roots.push(refine_root(grid[k] + shift, grid[k + 1] + shift, hfun));
        }
    }
    let mut total = 0.0;
    for pair in roots.chunks(2) {
        if pair.len() < 2 {
            break;
        }
        let (a, b) = (pair[0], pair[1]);
        let ha = 0.25 * eps / curve.point_d1(a).1.norm();
        let hb = 0.25 * eps / curve.point_d1(b).1.norm();
        for (x, y) in graded_panels(a, b, ha, hb, max_panel(curve)) {
            total += g.integrate(x, y, |t| {
                let (q, dq) = curve.point_d1(t);
                kernel(p, dp, &q, &dq)
            });
        }
    }
    total
}

/// `∬_{|q - p| > eps}` over all ordered pairs of components, with
/// the outer integral by the trapezoid rule on `ns` nodes.
pub fn cutoff_integral(curves: &[&ClosedCurve], eps: f64, ns: usize, kernel: impl PairKernel) -> f64 {
    let h = TAU / ns as f64;
    let mut total = 0.0;
    for (a, ca) in curves.iter().enumerate() {
        let s: f64 = (0..ns)
            .into_par_iter()
            .map(|i| {
                let sp = h * i as f64;
                let (p, dp) = ca.point_d1(sp);
                curves
                    .iter()
                    .enumerate()
                    .map(|(b, cb)| inner_cutoff(&p, &dp, cb, (a == b).then_some(sp), eps, &kernel))
                    .sum::<f64>()
            })
            .ordered_sum();
        total += s * h;
    }
    total
}

/// `∬ kernel` over `K₁ × K₂` for disjoint but possibly close curves; the
/// inner integral is graded around the closest point of `K₂`.
pub fn near_pair_integral(k1: &ClosedCurve, k2: &ClosedCurve, ns: usize, kernel: impl PairKernel) -> f64 {
    let h = TAU / ns as f64;
    let g = GaussLegendre::g16();
    let coarse = k2.samples((16 * k2.modes() + 240).max(256));
    let s: f64 = (0..ns)
        .into_par_iter()
        .map(|i| {
            let sp = h * i as f64;
            let (p, dp) = k1.point_d1(sp);
            let (tc, dist) = k2.closest_point(&p, &coarse);
            let h0 = 0.25 * dist / k2.point_d1(tc).1.norm();
            graded_panels(tc, tc + TAU, h0, h0, max_panel(k2))
                .into_iter()
                .map(|(a, b)| {
                    g.integrate(a, b, |t| {
                        let (q, dq) = k2.point_d1(t);
                        kernel(&p, &dp, &q, &dq)
                    })
                })
                .sum::<f64>()
        })
        .ordered_sum();
    s * h
}

/// Largest length below which a curve system looks locally like a set of
/// separated, nearly straight arcs.
pub fn curve_system_reach(curves: &[&ClosedCurve]) -> f64 {
    let mut r = f64::INFINITY;
    for c in curves {
        let (lo, hi) = c.curvature_range();
        r = r.min(1.0 / lo.abs().max(hi.abs())).min(0.5 * c.min_self_distance());
    }
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            r = r.min(0.5 * curves[i].distance_to(curves[j]));
        }
    }
    r
}

/// Largest distance between two points of the system, from samples.
pub fn system_diameter(curves: &[&ClosedCurve]) -> f64 {
    let pts: Vec<Vec3> = curves.iter().flat_map(|c| c.samples(256).p).collect();
    pts.par_iter()
        .map(|p| pts.iter().map(|q| (q - p).norm()).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max)
}

/// Integrand of a chord-cutoff energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutoffForm {
    /// `-¼ ∬ dp·dq / |q - p|²`, counterterm `L/(2ε)`.
    Dots,
    /// `-½ ∬ cos θ_p cos θ_q dp dq / |q - p|²`, counterterm `L/ε`.
    Coscos,
}

impl CutoffForm {
    pub fn counterterm(self, length: f64) -> f64 {
        match self {
            CutoffForm::Dots => 0.5 * length,
            CutoffForm::Coscos => length,
        }
    }
}

/// Prefactored cutoff integrals on the default ladder, without counterterm.
pub fn cutoff_ladder(curves: &[&ClosedCurve], form: CutoffForm) -> Vec<(f64, f64)> {
    let top = (system_diameter(curves) / 16.0).min(0.5 * curve_system_reach(curves));
    let m = curves.iter().map(|c| c.modes()).max().unwrap_or(1);
    let ns = crate::quad::pow2_at_least(8 * m + 64).max(128);
    ladder(top, 0.5, 6)
        .into_iter()
        .map(|eps| {
            let v = match form {
                CutoffForm::Dots => -0.25 * cutoff_integral(curves, eps, ns, dots),
                CutoffForm::Coscos => -0.5 * cutoff_integral(curves, eps, ns, coscos),
            };
            (eps, v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_dots_cutoff_matches_closed_form() {
        let c = ClosedCurve::circle(0.0, 0.0, 1.0).unwrap();
        for &eps in &[0.2, 0.05, 0.01] {
            let v = cutoff_integral(&[&c], eps, 64, dots);
            let u0 = 2.0 * (eps / 2.0f64).asin();
            let exact = TAU * ((2.0 / eps) * (1.0 - eps * eps / 4.0).sqrt() - PI + u0);
            assert!((v - exact).abs() < 1e-10 * exact, "eps {eps}: {v} vs {exact}");
        }
    }

    #[test]
    fn circle_sinsin_torus_is_constant() {
        let c = ClosedCurve::circle(0.0, 0.0, 2.0).unwrap();
        let v = torus_integral(&[&c], 32, sinsin, sinsin_diagonal);
        assert!((v + PI * PI).abs() < 1e-12);
    }

    #[test]
    fn near_pair_resolves_close_circles() {
        let a = ClosedCurve::circle(0.0, 0.0, 1.0).unwrap();
        let b = ClosedCurve::circle(0.0, 0.0, 0.99).unwrap();
        let v = near_pair_integral(&a, &b, 64, dots);
        // concentric circles: ∮∮ r R cos(u)/(r²+R²-2rR cos u) = 2π·2π·(r/R)/(1-(r/R)^2)·... closed form
        let (r, rr) = (0.99f64, 1.0f64);
        let inner = |u: f64| r * rr * u.cos() / (r * r + rr * rr - 2.0 * r * rr * u.cos());
        let exact = TAU * crate::curve::periodic_gauss(inner, 4000);
        assert!((v - exact).abs() < 1e-9 * exact.abs(), "{v} {exact}");
    }
}
