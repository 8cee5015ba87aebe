//! Roots of real trigonometric polynomials, and crossings of a curve
//! through planes, disks and half-planes.

use crate::curve::{ClosedCurve, Vec3};
use crate::error::{Error, Result};
use crate::quad::bisect;
use std::f64::consts::TAU;

/// `c0 + Σ_k a_k cos kt + b_k sin kt`.
#[derive(Debug, Clone)]
pub struct Trig {
    pub c0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl Trig {
    pub fn degree(&self) -> usize {
        self.a.len()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (s1, c1) = t.sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut v = self.c0;
        for (ak, bk) in self.a.iter().zip(&self.b) {
            v += ak * c + bk * s;
            let nc = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = nc;
        }
        v
    }

    pub fn eval_d1(&self, t: f64) -> f64 {
        let (s1, c1) = t.sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut v = 0.0;
        for (k0, (ak, bk)) in self.a.iter().zip(&self.b).enumerate() {
            v += (k0 + 1) as f64 * (bk * c - ak * s);
            let nc = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = nc;
        }
        v
    }

    /// Interpolate a trigonometric polynomial of the given degree from samples of `f`.
    pub fn from_fn(degree: usize, f: impl Fn(f64) -> f64) -> Self {
        let n = 2 * degree + 1;
        let vals: Vec<f64> = (0..n).map(|j| f(TAU * j as f64 / n as f64)).collect();
        let c0 = vals.iter().sum::<f64>() / n as f64;
        let mut a = vec![0.0; degree];
        let mut b = vec![0.0; degree];
        for k in 1..=degree {
            for (j, v) in vals.iter().enumerate() {
                let (s, c) = (TAU * (k * j) as f64 / n as f64).sin_cos();
                a[k - 1] += v * c;
                b[k - 1] += v * s;
            }
            a[k - 1] *= 2.0 / n as f64;
            b[k - 1] *= 2.0 / n as f64;
        }
        Trig { c0, a, b }
    }

    /// `(K(t) - c)·n`.
    pub fn plane(k: &ClosedCurve, c: &Vec3, n: &Vec3) -> Self {
        Trig {
            c0: (k.a0() - c).dot(n),
            a: k.cos_coeffs().iter().map(|v| v.dot(n)).collect(),
            b: k.sin_coeffs().iter().map(|v| v.dot(n)).collect(),
        }
    }

    fn curvature_bound(&self) -> f64 {
        self.a.iter().zip(&self.b).enumerate().map(|(k0, (a, b))| ((k0 + 1) as f64).powi(2) * (a.abs() + b.abs())).sum()
    }

    /// All roots in `[0, 2π)`, located on a shifted grid of `8·degree + 16`
    /// nodes and refined by bisection.  A double root (an extremum with `|value| < tol`
    /// that does not cross zero) is reported as a degenerate sample.
    pub fn roots(&self, tol: f64) -> Result<Vec<f64>> {
        let n = 8 * self.degree() + 16;
        let h = TAU / n as f64;
        let near = 0.5 * self.curvature_bound() * h * h;
        let t0 = 0.318_309_886 * h;
        let mut vals: Vec<f64> = (0..n).map(|j| self.eval(t0 + h * j as f64)).collect();
        vals.push(vals[0]);
        let neg = |v: f64| v < 0.0;
        let mut roots = Vec::new();
        for j in 0..n {
            let (lo, hi) = (t0 + h * j as f64, t0 + h * (j + 1) as f64);
            let (g0, g1) = (vals[j], vals[j + 1]);
            if neg(g0) != neg(g1) {
                roots.push(bisect(lo, hi, |t| self.eval(t), 1e-12));
                continue;
            }
            if g0.abs() > near || g1.abs() > near {
                continue;
            }
            let (d0, d1) = (self.eval_d1(lo), self.eval_d1(hi));
            if neg(d0) == neg(d1) {
                continue;
            }
            let tm = bisect(lo, hi, |t| self.eval_d1(t), 1e-13);
            let gm = self.eval(tm);
            if gm.abs() < tol {
                return Err(Error::DegenerateSample(format!("tangential crossing near t = {tm}")));
            }
            if neg(gm) != neg(g0) {
                roots.push(bisect(lo, tm, |t| self.eval(t), 1e-12));
                roots.push(bisect(tm, hi, |t| self.eval(t), 1e-12));
            }
        }
        let mut roots: Vec<f64> = roots.into_iter().map(|t| t.rem_euclid(TAU)).collect();
        roots.sort_by(f64::total_cmp);
        Ok(roots)
    }
}

/// A transversal passage of a curve through a plane.
#[derive(Debug, Clone, Copy)]
pub struct PlaneCrossing {
    pub t: f64,
    pub point: Vec3,
    /// `K'(t)·n`.
    pub normal_velocity: f64,
    pub speed: f64,
}

/// Crossings of `k` through the plane through `c` with normal `n`.
pub fn plane_crossings(k: &ClosedCurve, c: &Vec3, n: &Vec3, tol: f64) -> Result<Vec<PlaneCrossing>> {
    let g = Trig::plane(k, c, n);
    g.roots(tol)?
        .into_iter()
        .map(|t| {
            let (p, dp) = k.point_d1(t);
            let nv = dp.dot(n);
            let speed = dp.norm();
            if nv.abs() < 1e-9 * speed {
                return Err(Error::DegenerateSample(format!("curve nearly tangent to the plane at t = {t}")));
            }
            Ok(PlaneCrossing { t, point: p, normal_velocity: nv, speed })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_cos_kt() {
        let g = Trig { c0: 0.0, a: vec![0.0, 0.0, 1.0], b: vec![0.0; 3] };
        let r = g.roots(1e-12).unwrap();
        assert_eq!(r.len(), 6);
        for (i, t) in r.iter().enumerate() {
            assert!((t - (TAU / 12.0 + i as f64 * TAU / 6.0)).abs() < 1e-11);
        }
    }

    #[test]
    fn close_root_pairs_between_nodes_are_found() {
        let n = 8 + 16;
        let h = TAU / n as f64;
        let mid = 3.5 * h;
        let g = Trig { c0: -(1.0 - 1e-6), a: vec![mid.cos()], b: vec![mid.sin()] };
        let r = g.roots(1e-14).unwrap();
        assert_eq!(r.len(), 2);
        let tangent = Trig { c0: -1.0, a: vec![mid.cos()], b: vec![mid.sin()] };
        assert!(tangent.roots(1e-10).is_err());
    }

    #[test]
    fn interpolation_recovers_coefficients() {
        let f = |t: f64| 0.3 + 2.0 * (2.0 * t).cos() - 0.5 * (3.0 * t).sin();
        let g = Trig::from_fn(4, f);
        for t in [0.1, 1.7, 4.0] {
            assert!((g.eval(t) - f(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn circle_crosses_a_plane_twice_with_opposite_signs() {
        let c = ClosedCurve::circle(0.0, 0.0, 1.0).unwrap().to_space();
        let x = plane_crossings(&c, &Vec3::new(0.3, 0.0, 0.0), &Vec3::x(), 1e-12).unwrap();
        assert_eq!(x.len(), 2);
        assert!(x[0].normal_velocity * x[1].normal_velocity < 0.0);
        for p in &x {
            assert!((p.point.x - 0.3).abs() < 1e-11);
        }
    }
}
