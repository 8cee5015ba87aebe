//! Lines in the plane and in space.
//!
//! Space lines are parametrized by a direction `u ∈ S²` and a base point in
//! the plane through the origin orthogonal to `u`; sampled lines are drawn
//! through a ball containing the curves, so the weight is `4π · πρ²`.  The
//! absolute normalization of the line measure is not fixed a priori; the
//! identity `∫ λ(ℓ,K₁) λ(ℓ,K₂) dℓ = ∬ cos θ₁ cos θ₂ dp₁ dp₂` is used to
//! calibrate it once, and the calibrated constant is then held fixed.

use super::circles::{orthonormal_pair, random_unit};
use super::crossings::{plane_crossings, Trig};
use super::{batching, run_batches, MCEstimate};
use crate::curve::{ClosedCurve, Vec3};
use crate::cutoff::{converge, pair_torus, torus_integral, Converged};
use crate::error::{Error, Result};
use crate::quad::pow2_at_least;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// An oriented line `{base + s·direction}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Line3 {
    pub base: Vec3,
    pub direction: Vec3,
}

fn coefficient_scale(k: &ClosedCurve) -> f64 {
    k.a0().norm() + k.cos_coeffs().iter().chain(k.sin_coeffs()).map(|v| v.norm()).sum::<f64>()
}

/// Linking number of a closed curve with a line, counted through the
/// half-plane bounded by the line on the side of `e1`, where
/// `(e1, e2)` completes the direction to a right-handed frame.
pub fn linking_line(line: &Line3, k: &ClosedCurve) -> Result<i64> {
    let (side, normal) = {
        let (e1, _) = orthonormal_pair(&line.direction);
        (e1, line.direction.cross(&e1))
    };
    let scale = coefficient_scale(k);
    let mut l = 0;
    for x in plane_crossings(k, &line.base, &normal, 1e-11 * scale)? {
        let tau = (x.point - line.base).dot(&side);
        if tau.abs() < 1e-9 * scale {
            return Err(Error::DegenerateSample("the curve meets the line".into()));
        }
        if tau > 0.0 {
            l += x.normal_velocity.signum() as i64;
        }
    }
    Ok(l)
}

fn enclosing_ball(curves: &[&ClosedCurve]) -> (Vec3, f64) {
    let pts: Vec<Vec3> = curves.iter().flat_map(|c| c.samples(c.default_grid()).p).collect();
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in &pts {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let c = 0.5 * (lo + hi);
    let r = pts.iter().map(|p| (p - c).norm()).fold(0.0, f64::max);
    (c, 1.01 * r)
}

fn draw_line(rng: &mut impl Rng, center: &Vec3, rho: f64) -> Line3 {
    let u = random_unit(rng);
    let (e1, e2) = orthonormal_pair(&u);
    let r = rho * rng.random::<f64>().sqrt();
    let phi = TAU * rng.random::<f64>();
    Line3 { base: center + (e1 * phi.cos() + e2 * phi.sin()) * r, direction: u }
}

/// `∫ λ(ℓ, K₁) λ(ℓ, K₂) dℓ` with `dℓ = du db` and unit normalization;
/// pass the same curve twice for `∫ λ² dℓ`.
pub fn line_linking_measure(k1: &ClosedCurve, k2: &ClosedCurve, samples: u64, seed: u64) -> Result<MCEstimate> {
    let (a, b) = (k1.to_space(), k2.to_space());
    let (center, rho) = enclosing_ball(&[&a, &b]);
    let weight = 4.0 * PI * PI * rho * rho;
    let (nb, per) = batching(samples);
    let [e] = run_batches(seed, nb, per, |rng| {
        let line = draw_line(rng, &center, rho);
        let l1 = linking_line(&line, &a).ok()?;
        let l2 = linking_line(&line, &b).ok()?;
        Some([weight * (l1 * l2) as f64])
    });
    Ok(e)
}

fn cos_cos(p: &Vec3, dp: &Vec3, q: &Vec3, dq: &Vec3) -> f64 {
    let d = q - p;
    dp.dot(&d) * dq.dot(&d) / d.norm_squared()
}

/// `∬ cos θ₁ cos θ₂ dp₁ dp₂`, over `K₁ × K₂` or over `K × K` when the curves coincide.
pub fn bp_rhs(k1: &ClosedCurve, k2: &ClosedCurve) -> Converged {
    let (a, b) = (k1.to_space(), k2.to_space());
    let m = a.modes().max(b.modes());
    if k1 == k2 {
        converge(pow2_at_least(8 * m + 64), 8192, 1e-12, |n| torus_integral(&[&a], n, cos_cos, |j| j.d1.norm_squared()))
    } else {
        converge(pow2_at_least(8 * m + 64), 8192, 1e-12, |n| pair_torus(&a, &b, n, cos_cos))
    }
}

/// Normalization of the line measure fitted on one instance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LineCalibration {
    pub constant: f64,
    pub std_error: f64,
}

/// Calibrate on the coaxial unit circles at heights 0 and 1.
pub fn calibrate_line_measure(samples: u64, seed: u64) -> Result<LineCalibration> {
    let a = ClosedCurve::circle_in(Vec3::zeros(), 1.0, Vec3::x(), Vec3::y())?;
    let b = ClosedCurve::circle_in(Vec3::z(), 1.0, Vec3::x(), Vec3::y())?;
    let lhs = line_linking_measure(&a, &b, samples, seed)?;
    let rhs = bp_rhs(&a, &b).value;
    Ok(LineCalibration { constant: rhs / lhs.mean, std_error: (rhs / lhs.mean).abs() * lhs.std_error / lhs.mean.abs() })
}

/// Both sides of the line identity after calibration.
#[derive(Debug, Clone, Serialize)]
pub struct BpCheck {
    pub lhs: f64,
    pub lhs_std_error: f64,
    pub rhs: f64,
    pub residual: f64,
    pub raw: MCEstimate,
}

impl BpCheck {
    pub fn z_score(&self) -> f64 {
        self.residual.abs() / self.lhs_std_error.max(1e-300)
    }
}

/// Check the identity on a pair of curves, or on a single curve when `k2` is `None`.
pub fn bp_lines_check(
    k1: &ClosedCurve,
    k2: Option<&ClosedCurve>,
    calibration: &LineCalibration,
    samples: u64,
    seed: u64,
) -> Result<BpCheck> {
    let k2 = k2.unwrap_or(k1);
    if k1 != k2 && k1.distance_to(k2) < 1e-9 * k1.diameter() {
        return Err(Error::Geometry("the curves intersect".into()));
    }
    let raw = line_linking_measure(k1, k2, samples, seed)?;
    let rhs = bp_rhs(k1, k2).value;
    let lhs = calibration.constant * raw.mean;
    let lhs_std_error = (calibration.constant * raw.std_error).hypot(raw.mean * calibration.std_error);
    Ok(BpCheck { lhs, lhs_std_error, rhs, residual: lhs - rhs, raw })
}

/// `∫ #(ℓ ∩ K) dℓ` over lines of the plane with `dℓ = dr dθ`,
/// `θ ∈ [0, π)`; the exact value is `2L`.
pub fn crofton_length(curves: &[&ClosedCurve], samples: u64, seed: u64) -> Result<MCEstimate> {
    if curves.iter().any(|c| !c.is_planar()) {
        return Err(Error::Geometry("Crofton lengths need planar curves".into()));
    }
    let (center, rho) = enclosing_ball(curves);
    let (nb, per) = batching(samples);
    let weight = PI * 2.0 * rho;
    let [e] = run_batches(seed, nb, per, |rng| {
        let theta = PI * rng.random::<f64>();
        let u = Vec3::new(theta.cos(), theta.sin(), 0.0);
        let r = center.dot(&u) + rho * (2.0 * rng.random::<f64>() - 1.0);
        let mut count = 0;
        for k in curves {
            let g = Trig::plane(k, &(u * r), &u);
            count += g.roots(1e-11 * coefficient_scale(k)).ok()?.len();
        }
        Some([weight * count as f64])
    });
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_circle_line_measure_with_unit_normalization() {
        let c = ClosedCurve::circle(0.0, 0.0, 1.0).unwrap();
        assert!((bp_rhs(&c, &c).value - 2.0 * PI * PI).abs() < 1e-9);
        let lhs = line_linking_measure(&c, &c, 200_000, 1).unwrap();
        assert!(lhs.z_score(2.0 * PI * PI) < 3.0, "{} ± {}", lhs.mean, lhs.std_error);
    }

    #[test]
    fn line_linking_flips_with_direction() {
        let c = ClosedCurve::circle(0.0, 0.0, 1.0).unwrap();
        let up = Line3 { base: Vec3::new(0.2, 0.1, 0.0), direction: Vec3::z() };
        let down = Line3 { direction: -Vec3::z(), ..up };
        let l = linking_line(&up, &c).unwrap();
        assert_eq!(l.abs(), 1);
        assert_eq!(linking_line(&down, &c).unwrap(), -l);
        let outside = Line3 { base: Vec3::new(2.0, 0.0, 0.0), ..up };
        assert_eq!(linking_line(&outside, &c).unwrap(), 0);
    }

    #[test]
    fn crofton_lengths() {
        let c = ClosedCurve::circle(0.0, 0.0, 1.0).unwrap();
        let e = crofton_length(&[&c], 50_000, 2).unwrap();
        assert!(e.affine(0.5, 0.0).z_score(TAU) < 3.0);
        let el = ClosedCurve::ellipse(1.0, 0.0, 2.0, 0.5).unwrap();
        let e = crofton_length(&[&el], 50_000, 3).unwrap();
        assert!(e.affine(0.5, 0.0).z_score(el.arclength()) < 3.0);
        let d = ClosedCurve::circle(5.0, 0.0, 1.0).unwrap();
        let both = crofton_length(&[&c, &d], 50_000, 4).unwrap();
        assert!(both.affine(0.5, 0.0).z_score(2.0 * TAU) < 3.0);
    }
}
