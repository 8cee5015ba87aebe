//! Mutual energy of two disjoint planar domains.

use super::Estimate;
use crate::curve::{ClosedCurve, Vec3};
use crate::cutoff::{converge, coscos, dots, pair_torus, sinsin};
use crate::domain::{winding_number, AreaRule, Blend, PlanarDomain};
use crate::error::{Error, Result};
use crate::quad::pow2_at_least;
use crate::quad::OrderedSum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Integrand of the double contour integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContourForm {
    /// `-½ ∬ cos θ₁ cos θ₂ dp₁ dp₂ / |p₂ - p₁|²`
    Rere,
    /// `-½ ∬ sin θ₁ sin θ₂ dp₁ dp₂ / |p₂ - p₁|²`
    Imim,
    /// `-¼ ∬ dp₁·dp₂ / |p₂ - p₁|²`
    Dots,
}

fn separation_check(k1: &ClosedCurve, k2: &ClosedCurve) -> Result<f64> {
    let d = k1.distance_to(k2);
    if d < 1e-9 * k1.diameter().max(k2.diameter()) {
        return Err(Error::Geometry("the curves touch".into()));
    }
    Ok(d)
}

/// Double contour integral over `K₁ × K₂`; the angles are measured from
/// each tangent to `p₂ - p₁`.
pub fn mutual_energy_contour(k1: &ClosedCurve, k2: &ClosedCurve, form: ContourForm) -> Result<Estimate> {
    let sep = separation_check(k1, k2)?;
    let scale = k1.diameter().max(k2.diameter());
    let start = pow2_at_least((4 * k1.modes().max(k2.modes()) + 60).max((64.0 * scale / sep) as usize)).min(1 << 12);
    let (factor, c) = match form {
        ContourForm::Rere => (-0.5, converge(start, 1 << 13, 1e-13, |n| pair_torus(k1, k2, n, coscos))),
        ContourForm::Imim => (-0.5, converge(start, 1 << 13, 1e-13, |n| pair_torus(k1, k2, n, sinsin))),
        ContourForm::Dots => (-0.25, converge(start, 1 << 13, 1e-13, |n| pair_torus(k1, k2, n, dots))),
    };
    Ok(Estimate { value: factor * c.value, error: factor.abs() * c.error, n: c.n })
}

fn area_rule(d: &PlanarDomain, level: usize) -> AreaRule {
    let m = d.boundaries().iter().map(|b| b.modes()).max().unwrap_or(1);
    let ns = pow2_at_least(8 * m + 24) << level;
    if let Some(r) = AreaRule::star(d, ns, 12 << level) {
        return r;
    }
    let reach = d.reach();
    let blend = Blend { t_in: 0.25 * reach, t_out: 0.75 * reach };
    AreaRule::blended(d, blend, ns, (blend.t_out - blend.t_in) / (8 << level) as f64)
}

fn disjoint_domains(d1: &PlanarDomain, d2: &PlanarDomain) -> Result<()> {
    for a in d1.boundaries() {
        for b in d2.boundaries() {
            separation_check(a, b)?;
        }
    }
    let probe = |from: &PlanarDomain, into: &PlanarDomain| {
        from.components().iter().any(|c| {
            let p: Vec3 = c.outer.point(0.0);
            into.components().iter().any(|k| {
                winding_number(&k.outer, &p) != 0 && !k.holes.iter().any(|h| winding_number(h, &p) != 0)
            })
        })
    };
    if probe(d1, d2) || probe(d2, d1) {
        return Err(Error::Geometry("the domains overlap".into()));
    }
    Ok(())
}

/// `∬_{Ω₁×Ω₂} da_w da_z / |z - w|⁴` by tensor-product area quadrature.
pub fn mutual_energy_area(d1: &PlanarDomain, d2: &PlanarDomain) -> Result<Estimate> {
    disjoint_domains(d1, d2)?;
    let eval = |level: usize| {
        let (a, b) = (area_rule(d1, level), area_rule(d2, level));
        a.points
            .par_iter()
            .zip(&a.weights)
            .map(|(w, wa)| {
                wa * b
                    .points
                    .iter()
                    .zip(&b.weights)
                    .map(|(z, wb)| {
                        let r2 = (z - w).norm_squared();
                        wb / (r2 * r2)
                    })
                    .sum::<f64>()
            })
            .ordered_sum()
    };
    let mut prev = eval(0);
    let mut level = 0;
    let mut err = f64::INFINITY;
    while level < 3 {
        level += 1;
        let cur = eval(level);
        err = (cur - prev).abs();
        prev = cur;
        if err < 1e-10 * cur.abs() {
            break;
        }
    }
    Ok(Estimate { value: prev, error: err, n: level })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;

    fn circles(d: f64) -> (ClosedCurve, ClosedCurve) {
        (ClosedCurve::circle(0.0, 0.0, 1.0).unwrap(), ClosedCurve::circle(d, 0.0, 1.0).unwrap())
    }

    #[test]
    fn three_contour_forms_agree() {
        let (a, b) = circles(3.0);
        let r = mutual_energy_contour(&a, &b, ContourForm::Rere).unwrap().value;
        let i = mutual_energy_contour(&a, &b, ContourForm::Imim).unwrap().value;
        let d = mutual_energy_contour(&a, &b, ContourForm::Dots).unwrap().value;
        assert!((r - i).abs() < 1e-10 && (r - d).abs() < 1e-10, "{r} {i} {d}");
        assert!(r > 0.0);
    }

    #[test]
    fn contour_forms_are_symmetric_and_odd_under_reversal() {
        let (a, b) = circles(2.5);
        for form in [ContourForm::Rere, ContourForm::Imim, ContourForm::Dots] {
            let v = mutual_energy_contour(&a, &b, form).unwrap().value;
            let s = mutual_energy_contour(&b, &a, form).unwrap().value;
            let r = mutual_energy_contour(&a, &b.reversed(), form).unwrap().value;
            assert!((v - s).abs() < 1e-12 * v.abs());
            assert!((v + r).abs() < 1e-12 * v.abs());
        }
    }

    #[test]
    fn area_and_contour_agree() {
        let d1 = PlanarDomain::disk(0.0, 0.0, 1.0).unwrap();
        let d2 = PlanarDomain::disk(3.0, 0.0, 1.0).unwrap();
        let area = mutual_energy_area(&d1, &d2).unwrap().value;
        let (a, b) = circles(3.0);
        let contour = mutual_energy_contour(&a, &b, ContourForm::Dots).unwrap().value;
        assert!((area - contour).abs() < 1e-5 * contour, "{area} {contour}");
    }

    #[test]
    fn far_disks_obey_the_integrand_bound_and_rigid_invariance() {
        let d1 = PlanarDomain::disk(0.0, 0.0, 1.0).unwrap();
        let d2 = PlanarDomain::disk(10.0, 0.0, 1.0).unwrap();
        let v = mutual_energy_area(&d1, &d2).unwrap().value;
        assert!(v > 0.0 && v <= std::f64::consts::PI.powi(2) / 8f64.powi(4));
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let m = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
        let shift = Vec3::new(0.7, -1.1, 0.0);
        let moved = |d: &PlanarDomain| d.map_boundaries(|b| b.affine(&m, shift)).unwrap();
        let w = mutual_energy_area(&moved(&d1), &moved(&d2)).unwrap().value;
        assert!((v - w).abs() < 1e-12 * v);
    }

    #[test]
    fn overlapping_domains_are_rejected() {
        let d1 = PlanarDomain::disk(0.0, 0.0, 1.0).unwrap();
        let d2 = PlanarDomain::disk(0.5, 0.0, 1.0).unwrap();
        assert!(mutual_energy_area(&d1, &d2).is_err());
    }
}
