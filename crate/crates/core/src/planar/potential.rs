//! The renormalized r⁻⁴ potential of a planar domain.
//!
//! `V(w) = -½ Σ ∮ det(p - w, dp) / |p - w|⁴` over all boundary curves,
//! each oriented with the domain on its left.  The integrand is analytic
//! and periodic, so the trapezoid rule converges geometrically at a rate
//! set by the distance from `w` to the boundary; the node count is chosen
//! from that distance.

use crate::curve::Vec3;
use crate::domain::PlanarDomain;
use crate::error::{Error, Result};
use crate::quad::pow2_at_least;
use crate::renorm::{extrapolate, ladder, DivergenceModel, RenormResult};
use serde::Serialize;
use std::f64::consts::TAU;
use std::sync::OnceLock;

const MIN_LEVEL: u32 = 7;
const MAX_LEVEL: u32 = 17;
const NODES_PER_WIDTH: f64 = 32.0;

/// Cached boundary samples for repeated potential evaluations.
pub struct PotentialEvaluator<'a> {
    domain: &'a PlanarDomain,
    max_speed: f64,
    levels: Vec<OnceLock<Vec<(Vec3, Vec3)>>>,
}

impl<'a> PotentialEvaluator<'a> {
    pub fn new(domain: &'a PlanarDomain) -> Self {
        let max_speed = domain
            .boundaries()
            .iter()
            .map(|b| {
                let s = b.samples(b.default_grid());
                s.d1.iter().map(|d| d.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        PotentialEvaluator { domain, max_speed, levels: (MIN_LEVEL..=MAX_LEVEL).map(|_| OnceLock::new()).collect() }
    }

    pub fn domain(&self) -> &PlanarDomain {
        self.domain
    }

    fn level_for(&self, dist: f64) -> usize {
        let want = (NODES_PER_WIDTH * self.max_speed / dist.max(1e-300)).min(1e12) as usize;
        let n = pow2_at_least(want.max(1 << MIN_LEVEL)).min(1 << MAX_LEVEL);
        (n.trailing_zeros() - MIN_LEVEL) as usize
    }

    fn nodes(&self, level: usize) -> &[(Vec3, Vec3)] {
        self.levels[level].get_or_init(|| {
            let n = 1usize << (level as u32 + MIN_LEVEL);
            let mut out = Vec::with_capacity(n * self.domain.boundaries().len());
            for b in self.domain.boundaries() {
                for j in 0..n {
                    out.push(b.point_d1(TAU * j as f64 / n as f64));
                }
            }
            out
        })
    }

    /// Potential at `w`, given a lower bound `dist` for its distance to the boundary.
    pub fn eval_with_distance(&self, w: &Vec3, dist: f64) -> f64 {
        let level = self.level_for(dist);
        let n = 1usize << (level as u32 + MIN_LEVEL);
        let h = TAU / n as f64;
        let mut acc = 0.0;
        for (p, dp) in self.nodes(level) {
            let (x, y) = (p.x - w.x, p.y - w.y);
            let r2 = x * x + y * y;
            acc += (x * dp.y - y * dp.x) / (r2 * r2);
        }
        -0.5 * acc * h
    }

    /// Potential at an interior point.
    pub fn eval(&self, w: &Vec3) -> Result<f64> {
        let (_, _, d, inside) = self.domain.nearest_boundary(w);
        if !inside {
            return Err(Error::OutsideDomain(format!("({}, {})", w.x, w.y)));
        }
        if d < 1e-12 * self.domain.diameter() {
            return Err(Error::NearDiagonal(d));
        }
        Ok(self.eval_with_distance(w, d))
    }

    /// True when the node count requested for `dist` hit the cap.
    pub fn saturated(&self, dist: f64) -> bool {
        self.level_for(dist) == (MAX_LEVEL - MIN_LEVEL) as usize
    }
}

/// `V(w, Ω)` for an interior point `w`.
pub fn potential(w: &Vec3, domain: &PlanarDomain) -> Result<f64> {
    PotentialEvaluator::new(domain).eval(w)
}

/// Samples of the potential along an inward normal and the fitted
/// expansion `c₂ δ⁻² + c₁ δ⁻¹ + c₀ + …`.
#[derive(Debug, Clone, Serialize)]
pub struct PotentialProfile {
    pub boundary: usize,
    pub parameter: f64,
    pub curvature: f64,
    pub samples: Vec<(f64, f64)>,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
    pub fit: RenormResult,
}

/// Fit the boundary expansion of `V` at the point `t` of boundary `boundary`.
pub fn potential_asymptotics(domain: &PlanarDomain, boundary: usize, t: f64) -> Result<PotentialProfile> {
    let all = domain.boundaries();
    let b = all.get(boundary).ok_or_else(|| Error::Config(format!("no boundary with index {boundary}")))?;
    let (p, d) = b.point_d1(t);
    let n = Vec3::new(-d.y, d.x, 0.0) / d.norm();
    let kappa = b.curvature(t);
    let eval = PotentialEvaluator::new(domain);
    let top = 0.1 * domain.reach();
    let mut samples = Vec::new();
    for delta in ladder(top, 0.5, 8) {
        let w = p + n * delta;
        let (_, _, dist, inside) = domain.nearest_boundary(&w);
        if !inside {
            return Err(Error::OutsideDomain(format!("normal ladder leaves the domain at δ = {delta}")));
        }
        samples.push((delta, eval.eval_with_distance(&w, dist)));
    }
    let fit = extrapolate(&samples, &DivergenceModel::new(&[-2, -1, 1]))?;
    Ok(PotentialProfile {
        boundary,
        parameter: t,
        curvature: kappa,
        samples,
        c2: fit.coefficient(-2).unwrap_or(0.0),
        c1: fit.coefficient(-1).unwrap_or(0.0),
        c0: fit.value,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::ClosedCurve;
    use std::f64::consts::PI;

    /// `V(w) = -½ ∫ R(φ)⁻² dφ` for a domain star-shaped about `w`, where
    /// `R(φ)` is the exit distance of the ray at angle φ; here for the
    /// ellipse `x²/a² + y²/b² < 1`, where `R` solves a quadratic.
    fn ellipse_polar_oracle(a: f64, b: f64, w: Vec3) -> f64 {
        let n = 4000;
        let mut s = 0.0;
        for k in 0..n {
            let phi = TAU * k as f64 / n as f64;
            let (ux, uy) = (phi.cos(), phi.sin());
            let qa = ux * ux / (a * a) + uy * uy / (b * b);
            let qb = 2.0 * (w.x * ux / (a * a) + w.y * uy / (b * b));
            let qc = w.x * w.x / (a * a) + w.y * w.y / (b * b) - 1.0;
            let r = (-qb + (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa);
            s += 1.0 / (r * r);
        }
        -0.5 * s * TAU / n as f64
    }

    #[test]
    fn disk_centre_and_offcentre() {
        let d = PlanarDomain::disk(0.0, 0.0, 1.0).unwrap();
        let e = PotentialEvaluator::new(&d);
        assert!((e.eval(&Vec3::zeros()).unwrap() + PI).abs() < 1e-12);
        for rho in [0.3, 0.9, 0.999] {
            let v = e.eval(&Vec3::new(rho, 0.0, 0.0)).unwrap();
            let exact = -PI / (1.0 - rho * rho).powi(2);
            assert!((v - exact).abs() < 1e-9 * exact.abs(), "{rho}: {v} {exact}");
        }
    }

    #[test]
    fn ellipse_matches_polar_cutoff_oracle() {
        let d = PlanarDomain::simple(ClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0).unwrap()).unwrap();
        for w in [Vec3::new(0.3, 0.2, 0.0), Vec3::new(-1.5, 0.1, 0.0)] {
            let v = potential(&w, &d).unwrap();
            let o = ellipse_polar_oracle(2.0, 1.0, w);
            assert!((v - o).abs() < 1e-6 * o.abs(), "{v} {o}");
        }
    }

    #[test]
    fn outside_points_are_rejected() {
        let d = PlanarDomain::disk(0.0, 0.0, 1.0).unwrap();
        assert!(potential(&Vec3::new(2.0, 0.0, 0.0), &d).is_err());
    }

    #[test]
    fn potential_is_negative_in_an_annulus() {
        let d = PlanarDomain::annulus(1.0, 3.0).unwrap();
        for r in [1.1, 2.0, 2.9] {
            assert!(potential(&Vec3::new(0.0, r, 0.0), &d).unwrap() < 0.0);
        }
    }

    #[test]
    fn boundary_expansion_of_the_disk() {
        let d = PlanarDomain::disk(0.0, 0.0, 1.0).unwrap();
        let p = potential_asymptotics(&d, 0, 0.3).unwrap();
        assert!((p.c2 / (-PI / 4.0) - 1.0).abs() < 0.02, "{}", p.c2);
        assert!((p.c1 / (-PI / 4.0) - 1.0).abs() < 0.05, "{}", p.c1);
    }

    #[test]
    fn boundary_expansion_tracks_curvature() {
        let d = PlanarDomain::simple(ClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0).unwrap()).unwrap();
        let p = potential_asymptotics(&d, 0, 0.0).unwrap();
        assert!((p.curvature - 2.0).abs() < 1e-12);
        assert!((p.c1 / p.c2 - 2.0).abs() < 0.04, "{} {}", p.c1, p.c2);
        let big = PlanarDomain::disk(0.0, 0.0, 2.0).unwrap();
        let q = potential_asymptotics(&big, 0, 1.0).unwrap();
        assert!((q.c2 / (-PI / 4.0) - 1.0).abs() < 0.02);
    }
}
