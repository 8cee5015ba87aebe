//! Circles in space with the measure `dγ = r⁻⁴ dr dc dn`, their linking
//! with curves, and Monte Carlo estimators built on them.
//!
//! The sampler draws circles that meet a curve: a point `K(t)` is chosen,
//! then a normal `n`, a radius `r` and a centre uniform in the disk of
//! radius `r` around `K(t)` orthogonal to `n`.  The density of the
//! resulting circle sums over every point where the curve pierces its
//! disk, so the importance weight is
//! `r⁻⁴ · 4π · πr² / (p(r) Σ_x q(t_x) / |K'(t_x)·n|)`.

use super::crossings::plane_crossings;
use super::{batching, run_batches, MCEstimate};
use crate::curve::{ClosedCurve, Vec3};
use crate::cutoff::system_diameter;
use crate::error::{Error, Result};
use crate::renorm::{extrapolate, ladder, DivergenceModel, RenormResult};
use rand::Rng;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// An oriented circle: the normal orients it counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Circle3 {
    pub center: Vec3,
    pub radius: f64,
    pub normal: Vec3,
}

impl Circle3 {
    pub fn new(center: Vec3, radius: f64, normal: Vec3) -> Result<Self> {
        let len = normal.norm();
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Geometry(format!("circle radius must be positive, got {radius}")));
        }
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::Geometry("circle normal must be nonzero".into()));
        }
        Ok(Circle3 { center, radius, normal: normal / len })
    }

    /// Orthonormal `(e1, e2)` with `e1 × e2 = normal`.
    pub fn basis(&self) -> (Vec3, Vec3) {
        orthonormal_pair(&self.normal)
    }

    pub fn curve(&self) -> Result<ClosedCurve> {
        let (e1, e2) = self.basis();
        ClosedCurve::new(3, self.center, vec![e1 * self.radius], vec![e2 * self.radius])
    }

    pub fn reversed(&self) -> Self {
        Circle3 { normal: -self.normal, ..*self }
    }
}

pub(crate) fn orthonormal_pair(n: &Vec3) -> (Vec3, Vec3) {
    let a = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = a.cross(n).normalize();
    (e1, n.cross(&e1))
}

pub(crate) fn random_unit(rng: &mut impl Rng) -> Vec3 {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi = TAU * rng.random::<f64>();
    let s = (1.0 - z * z).sqrt();
    Vec3::new(s * phi.cos(), s * phi.sin(), z)
}

/// Crossings of a curve through the disk bounded by a circle.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DiskCrossings {
    /// Linking number `λ(γ, K)`.
    pub linking: i64,
    /// `#(K ∩ [γ])`.
    pub hits: usize,
    /// `Σ 1/|K'(t)·n|` over the hits.
    pub inverse_normal_speed: f64,
}

pub fn disk_crossings(gamma: &Circle3, k: &ClosedCurve) -> Result<DiskCrossings> {
    let scale = k.a0().norm() + k.cos_coeffs().iter().chain(k.sin_coeffs()).map(|v| v.norm()).sum::<f64>();
    let mut out = DiskCrossings::default();
    for x in plane_crossings(k, &gamma.center, &gamma.normal, 1e-11 * scale)? {
        let rho = (x.point - gamma.center).norm();
        if (rho - gamma.radius).abs() < 1e-9 * gamma.radius {
            return Err(Error::DegenerateSample("the curve passes through the circle".into()));
        }
        if rho < gamma.radius {
            out.hits += 1;
            out.linking += x.normal_velocity.signum() as i64;
            out.inverse_normal_speed += 1.0 / x.normal_velocity.abs();
        }
    }
    Ok(out)
}

/// `(λ(γ, K), #(K ∩ [γ]))`.
pub fn linking_circle(gamma: &Circle3, k: &ClosedCurve) -> Result<(i64, usize)> {
    let d = disk_crossings(gamma, k)?;
    Ok((d.linking, d.hits))
}

/// Distribution of the radius of sampled circles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RadiusLaw {
    /// Density `∝ r⁻²` on `[min, max]`.
    InverseSquare { min: f64, max: f64 },
    /// Density `∝ r⁻¹` on `[min, max]`.
    LogUniform { min: f64, max: f64 },
    /// A single radius; the weight then carries `dc dn` only.
    Fixed(f64),
}

impl RadiusLaw {
    fn check(&self) -> Result<()> {
        let ok = match *self {
            RadiusLaw::InverseSquare { min, max } | RadiusLaw::LogUniform { min, max } => min > 0.0 && max > min && max.is_finite(),
            RadiusLaw::Fixed(r) => r > 0.0 && r.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid radius window {self:?}")))
        }
    }

    fn draw(&self, u: f64) -> f64 {
        match *self {
            RadiusLaw::InverseSquare { min, max } => 1.0 / (1.0 / min - u * (1.0 / min - 1.0 / max)),
            RadiusLaw::LogUniform { min, max } => min * (max / min).powf(u),
            RadiusLaw::Fixed(r) => r,
        }
    }

    /// `r⁻⁴ / p(r)`, or 1 for a fixed radius.
    fn measure_ratio(&self, r: f64) -> f64 {
        match *self {
            RadiusLaw::InverseSquare { min, max } => (1.0 / min - 1.0 / max) / (r * r),
            RadiusLaw::LogUniform { min, max } => (max / min).ln() / (r * r * r),
            RadiusLaw::Fixed(_) => 1.0,
        }
    }

    pub fn window(&self) -> (f64, f64) {
        match *self {
            RadiusLaw::InverseSquare { min, max } | RadiusLaw::LogUniform { min, max } => (min, max),
            RadiusLaw::Fixed(r) => (r, r),
        }
    }
}

/// A weighted circle together with its crossings with every curve.
#[derive(Debug, Clone)]
pub struct CircleSample {
    pub circle: Circle3,
    pub weight: f64,
    pub crossings: Vec<DiskCrossings>,
}

impl CircleSample {
    pub fn hits(&self) -> usize {
        self.crossings.iter().map(|c| c.hits).sum()
    }

    pub fn linking(&self) -> i64 {
        self.crossings.iter().map(|c| c.linking).sum()
    }
}

/// Importance sampler for circles meeting a system of space curves.
#[derive(Debug, Clone)]
pub struct CircleSampler {
    curves: Vec<ClosedCurve>,
    prob: Vec<f64>,
    law: RadiusLaw,
}

impl CircleSampler {
    pub fn new(curves: &[&ClosedCurve], law: RadiusLaw) -> Result<Self> {
        law.check()?;
        if curves.is_empty() {
            return Err(Error::Config("no curves to sample circles around".into()));
        }
        let curves: Vec<ClosedCurve> = curves.iter().map(|c| c.to_space()).collect();
        let lengths: Vec<f64> = curves.iter().map(|c| c.arclength()).collect();
        let total: f64 = lengths.iter().sum();
        Ok(CircleSampler { prob: lengths.iter().map(|l| l / total).collect(), curves, law })
    }

    pub fn law(&self) -> RadiusLaw {
        self.law
    }

    pub fn curves(&self) -> &[ClosedCurve] {
        &self.curves
    }

    /// One weighted circle, or `None` for a degenerate draw.
    pub fn draw(&self, rng: &mut impl Rng) -> Option<CircleSample> {
        let u: f64 = rng.random();
        let mut j = 0;
        let mut acc = self.prob[0];
        while u > acc && j + 1 < self.prob.len() {
            j += 1;
            acc += self.prob[j];
        }
        let t = TAU * rng.random::<f64>();
        let n = random_unit(rng);
        let r = self.law.draw(rng.random());
        let (e1, e2) = orthonormal_pair(&n);
        let rho = r * rng.random::<f64>().sqrt();
        let phi = TAU * rng.random::<f64>();
        let c = self.curves[j].point(t) + (e1 * phi.cos() + e2 * phi.sin()) * rho;
        let circle = Circle3 { center: c, radius: r, normal: n };
        let crossings: Vec<DiskCrossings> =
            self.curves.iter().map(|k| disk_crossings(&circle, k)).collect::<Result<_>>().ok()?;
        let density: f64 = crossings.iter().zip(&self.prob).map(|(x, p)| p / TAU * x.inverse_normal_speed).sum();
        if !(density > 0.0) {
            return None;
        }
        let weight = self.law.measure_ratio(r) * 4.0 * PI * PI * r * r / density;
        Some(CircleSample { circle, weight, crossings })
    }
}

/// Up to `count` weighted circles; degenerate draws are skipped.
pub fn sample_circles(sampler: &CircleSampler, count: usize, seed: u64) -> Vec<(Circle3, f64)> {
    let mut rng = crate::rng::stream(seed, 0);
    (0..count).filter_map(|_| sampler.draw(&mut rng)).map(|s| (s.circle, s.weight)).collect()
}

/// Default radius window relative to the diameter of the curve system.
pub const WINDOW_MIN: f64 = 1e-3;
pub const WINDOW_MAX: f64 = 1e3;

fn max_plane_hits(curves: &[&ClosedCurve]) -> f64 {
    curves.iter().map(|c| 2.0 * c.modes() as f64).sum()
}

fn system_ball(curves: &[&ClosedCurve]) -> f64 {
    let (c0, _) = curves[0].bounding_ball();
    curves.iter().map(|c| c.samples(c.default_grid()).p.iter().map(|p| (p - c0).norm()).fold(0.0, f64::max)).fold(0.0, f64::max)
}

/// Bound on `∫_{r > R} |λ₁λ₂| dγ`: a circle of radius `R` linking curves
/// inside a ball of radius `ρ` has its rim within `ρ` of the ball.
fn rim_tail(lambda_product_max: f64, rho: f64, r_max: f64) -> f64 {
    lambda_product_max * 16.0 * PI * PI * rho * rho / (r_max * r_max)
}

/// `∫_{S_ε} #(K ∩ [γ]) dγ` over circles of radius in `(ε, R)`.  The part
/// above `R`, reported as the tail bound, is `2π²L/R`.
pub fn hits_measure(curves: &[&ClosedCurve], eps: f64, r_max: f64, samples: u64, seed: u64) -> Result<MCEstimate> {
    let sampler = CircleSampler::new(curves, RadiusLaw::InverseSquare { min: eps, max: r_max })?;
    let length: f64 = sampler.curves.iter().map(|c| c.arclength()).sum();
    let (nb, per) = batching(samples);
    let [e] = run_batches(seed, nb, per, |rng| sampler.draw(rng).map(|s| [s.weight * s.hits() as f64]));
    Ok(MCEstimate { truncation: Some((eps, r_max)), tail_bound: 2.0 * PI * PI * length / r_max, ..e })
}

/// `E(K) = (3/16π) ∫ (#(K ∩ [γ]) - λ(γ, K)²) dγ`.
///
/// The window `(r_min, R)` is sampled log-uniformly; the hits above `R`
/// contribute exactly `2π²L/R` and are added back, and the `λ²` part
/// above `R` is bounded by the reported tail.
pub fn mc_energy_circles(curves: &[&ClosedCurve], samples: u64, seed: u64) -> Result<MCEstimate> {
    let diam = system_diameter(curves);
    let (r_min, r_max) = (WINDOW_MIN * diam, WINDOW_MAX * diam);
    let sampler = CircleSampler::new(curves, RadiusLaw::LogUniform { min: r_min, max: r_max })?;
    let length: f64 = sampler.curves.iter().map(|c| c.arclength()).sum();
    let (nb, per) = batching(samples);
    let [e] = run_batches(seed, nb, per, |rng| {
        sampler.draw(rng).map(|s| {
            let l = s.linking() as f64;
            [s.weight * (s.hits() as f64 - l * l)]
        })
    });
    let c = 3.0 / (16.0 * PI);
    let lmax = max_plane_hits(curves);
    let tail = rim_tail(lmax * lmax, system_ball(curves), r_max);
    Ok(MCEstimate { truncation: Some((r_min, r_max)), tail_bound: tail, ..e }.affine(c, c * 2.0 * PI * PI * length / r_max))
}

/// Cutoff ladder `3πL/(8ε) - (3/16π) ∫_{S_ε} λ² dγ` before the
/// counterterm is added, estimated from one common sample.
#[derive(Debug, Clone, Serialize)]
pub struct CircleLadder {
    /// `(ε, -(3/16π) ∫_{S_ε} λ² dγ)`.
    pub rungs: Vec<(f64, MCEstimate)>,
    /// Fit with a free `ε⁻¹` term.
    pub fit: RenormResult,
    /// `-3πL/8`.
    pub expected_divergence: f64,
}

pub fn mc_energy_ladder(curves: &[&ClosedCurve], samples: u64, seed: u64) -> Result<CircleLadder> {
    const RUNGS: usize = 6;
    let diam = system_diameter(curves);
    let top = (diam / 16.0).min(0.5 * crate::cutoff::curve_system_reach(curves));
    let eps = ladder(top, 0.5, RUNGS);
    let r_max = WINDOW_MAX * diam;
    let sampler = CircleSampler::new(curves, RadiusLaw::InverseSquare { min: eps[RUNGS - 1], max: r_max })?;
    let length: f64 = sampler.curves.iter().map(|c| c.arclength()).sum();
    let c = -3.0 / (16.0 * PI);
    let (nb, per) = batching(samples);
    let est: [MCEstimate; RUNGS] = run_batches(seed, nb, per, |rng| {
        sampler.draw(rng).map(|s| {
            let l = s.linking() as f64;
            let v = c * s.weight * l * l;
            std::array::from_fn(|k| if s.circle.radius > eps[k] { v } else { 0.0 })
        })
    });
    let lmax = max_plane_hits(curves);
    let tail = rim_tail(lmax * lmax, system_ball(curves), r_max) * c.abs();
    let rungs: Vec<(f64, MCEstimate)> = eps
        .iter()
        .zip(est)
        .map(|(&e, m)| (e, MCEstimate { truncation: Some((e, r_max)), tail_bound: tail, ..m }))
        .collect();
    let pts: Vec<(f64, f64)> = rungs.iter().map(|(e, m)| (*e, m.mean)).collect();
    let fit = extrapolate(&pts, &DivergenceModel::new(&[-1, 1, 2]))?;
    Ok(CircleLadder { rungs, fit, expected_divergence: -3.0 * PI * length / 8.0 })
}

/// `E(K₁, K₂) = -(3/16π) ∫ λ(γ, K₁) λ(γ, K₂) dγ`.
pub fn mc_mutual_circles(k1: &ClosedCurve, k2: &ClosedCurve, samples: u64, seed: u64) -> Result<MCEstimate> {
    let curves = [k1, k2];
    let diam = system_diameter(&curves);
    if k1.distance_to(k2) < 1e-9 * diam {
        return Err(Error::Geometry("the curves intersect".into()));
    }
    let (r_min, r_max) = (WINDOW_MIN * diam, WINDOW_MAX * diam);
    let sampler = CircleSampler::new(&curves, RadiusLaw::LogUniform { min: r_min, max: r_max })?;
    let (nb, per) = batching(samples);
    let [e] = run_batches(seed, nb, per, |rng| {
        sampler.draw(rng).map(|s| [s.weight * (s.crossings[0].linking * s.crossings[1].linking) as f64])
    });
    let c = -3.0 / (16.0 * PI);
    let tail = rim_tail(max_plane_hits(&[k1]) * max_plane_hits(&[k2]), system_ball(&curves), r_max);
    Ok(MCEstimate { truncation: Some((r_min, r_max)), tail_bound: tail, ..e }.affine(c, 0.0))
}

/// `∫ λ(γ, K)² dc dn` over circles of the fixed radius `r`.
pub fn linked_measure_fixed_radius(k: &ClosedCurve, r: f64, samples: u64, seed: u64) -> Result<MCEstimate> {
    let sampler = CircleSampler::new(&[k], RadiusLaw::Fixed(r))?;
    let (nb, per) = batching(samples);
    let [e] = run_batches(seed, nb, per, |rng| {
        sampler.draw(rng).map(|s| {
            let l = s.linking() as f64;
            [s.weight * l * l]
        })
    });
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::{pair_torus, sintau};
    use crate::rng::stream;
    use nalgebra::Rotation3;

    fn unit_circle() -> ClosedCurve {
        ClosedCurve::circle(0.0, 0.0, 1.0).unwrap().to_space()
    }

    #[test]
    fn linking_of_small_circles_around_the_unit_circle() {
        let k = unit_circle();
        let g = Circle3::new(Vec3::x(), 0.5, Vec3::y()).unwrap();
        let (l, h) = linking_circle(&g, &k).unwrap();
        assert_eq!((l.abs(), h), (1, 1));
        let far = Circle3::new(Vec3::new(5.0, 0.0, 0.0), 0.5, Vec3::y()).unwrap();
        assert_eq!(linking_circle(&far, &k).unwrap(), (0, 0));
        let (lr, _) = linking_circle(&g.reversed(), &k).unwrap();
        assert_eq!(lr, -l);
    }

    #[test]
    fn linking_matches_the_gauss_integral() {
        let k = ClosedCurve::trefoil();
        let sampler = CircleSampler::new(&[&k], RadiusLaw::LogUniform { min: 0.2, max: 5.0 }).unwrap();
        let mut rng = stream(5, 0);
        let mut checked = 0;
        while checked < 40 {
            let Some(s) = sampler.draw(&mut rng) else { continue };
            let gamma = s.circle.curve().unwrap();
            if gamma.distance_to(&k) < 0.1 {
                continue;
            }
            let gauss = -pair_torus(&gamma, &k, 2048, sintau) / (4.0 * PI);
            assert!((gauss - s.linking() as f64).abs() < 1e-3, "{gauss} vs {}", s.linking());
            checked += 1;
        }
    }

    fn polyline_crossings(gamma: &Circle3, k: &ClosedCurve, n: usize) -> Vec<i64> {
        let pts: Vec<Vec3> = (0..n).map(|i| k.point(TAU * i as f64 / n as f64)).collect();
        let mut signs = Vec::new();
        for i in 0..n {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            let (ga, gb) = ((a - gamma.center).dot(&gamma.normal), (b - gamma.center).dot(&gamma.normal));
            if (ga < 0.0) != (gb < 0.0) {
                let x = a + (b - a) * (ga / (ga - gb));
                if (x - gamma.center).norm() < gamma.radius {
                    signs.push(if gb > ga { 1 } else { -1 });
                }
            }
        }
        signs
    }

    #[test]
    fn trefoil_disk_with_three_hits_of_mixed_sign() {
        let k = ClosedCurve::trefoil();
        let sampler = CircleSampler::new(&[&k], RadiusLaw::LogUniform { min: 0.5, max: 3.0 }).unwrap();
        let mut rng = stream(17, 0);
        let found = (0..20_000)
            .filter_map(|_| sampler.draw(&mut rng))
            .find(|s| s.hits() == 3 && s.linking().abs() == 1)
            .expect("a circle with three hits");
        let mut signs = polyline_crossings(&found.circle, &k, 20_000);
        signs.sort();
        assert_eq!(signs.len(), 3);
        assert_eq!(signs.iter().sum::<i64>(), found.linking());
        let oriented = if found.linking() == 1 { found.circle } else { found.circle.reversed() };
        assert_eq!(linking_circle(&oriented, &k).unwrap(), (1, 3));
        let mut s2 = polyline_crossings(&oriented, &k, 20_000);
        s2.sort();
        assert_eq!(s2, vec![-1, 1, 1]);
    }

    #[test]
    fn sample_wise_properties() {
        let k = ClosedCurve::trefoil();
        let sampler = CircleSampler::new(&[&k], RadiusLaw::LogUniform { min: 1e-3, max: 50.0 }).unwrap();
        let mut rng = stream(2, 0);
        for _ in 0..1000 {
            let Some(s) = sampler.draw(&mut rng) else { continue };
            assert!(s.weight.is_finite() && s.weight > 0.0);
            assert!(s.hits() >= 1);
            let (lr, hr) = linking_circle(&s.circle.reversed(), &k).unwrap();
            assert_eq!((lr, hr), (-s.linking(), s.hits()));
            if s.hits() <= 1 {
                assert_eq!(s.hits() as i64 - s.linking().pow(2), 0);
            }
        }
        assert!(sample_circles(&sampler, 100, 3).iter().all(|(_, w)| *w > 0.0));
        assert!(CircleSampler::new(&[&k], RadiusLaw::InverseSquare { min: 0.0, max: 1.0 }).is_err());
    }

    #[test]
    fn hits_measure_on_the_unit_circle() {
        let k = unit_circle();
        let eps = 0.1;
        let e = hits_measure(&[&k], eps, 2000.0, 100_000, 4).unwrap();
        let exact = 2.0 * PI * PI * TAU * (1.0 / eps - 1.0 / 2000.0);
        assert!(e.z_score(exact) < 3.0, "{} ± {} vs {exact}", e.mean, e.std_error);
    }

    #[test]
    fn energy_of_the_unit_circle() {
        let k = unit_circle();
        let e = mc_energy_circles(&[&k], 200_000, 8).unwrap();
        assert!(e.z_score(PI * PI / 2.0) < 3.0, "{} ± {}", e.mean, e.std_error);
        assert!(e.std_error < 0.05 * PI * PI / 2.0);
        assert!(e.discard_rate < 0.01);
    }

    #[test]
    fn standard_error_shrinks_with_samples() {
        let k = unit_circle();
        let a = mc_energy_circles(&[&k], 40_000, 1).unwrap();
        let b = mc_energy_circles(&[&k], 80_000, 1).unwrap();
        let ratio = a.std_error / b.std_error;
        assert!(ratio > 1.0 && ratio < 2.0, "{ratio}");
    }

    #[test]
    fn rigid_motion_leaves_the_estimate_within_error() {
        let k = ClosedCurve::ellipse(0.0, 0.0, 1.5, 1.0).unwrap().to_space();
        let r = *Rotation3::from_euler_angles(0.4, 1.0, -0.3).matrix();
        let moved = k.affine(&r, Vec3::new(3.0, -1.0, 2.0)).unwrap();
        let a = mc_energy_circles(&[&k], 100_000, 6).unwrap();
        let b = mc_energy_circles(&[&moved], 100_000, 6).unwrap();
        assert!((a.mean - b.mean).abs() < 3.0 * (a.std_error.hypot(b.std_error)));
    }

    #[test]
    fn far_circles_have_small_mutual_energy() {
        let a = unit_circle();
        let b = ClosedCurve::circle_in(Vec3::new(8.0, 0.0, 0.0), 1.0, Vec3::y(), Vec3::z()).unwrap();
        let direct = crate::space::mutual_energy_space(&a, &b).unwrap().value;
        let m = mc_mutual_circles(&a, &b, 100_000, 3).unwrap();
        assert!((m.mean - direct).abs() < 3.0 * m.std_error + 1e-4, "{} ± {} vs {direct}", m.mean, m.std_error);
    }
}
