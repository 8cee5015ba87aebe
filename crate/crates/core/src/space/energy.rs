//! Routes to `E(K)` for space curves and the mutual energy `E(K₁, K₂)`.

use super::EnergyReport;
use crate::curve::ClosedCurve;
use crate::cutoff::{
    converge, coscos, curve_system_reach, cutoff_ladder, dots, near_pair_integral, pair_torus, sinsin,
    sinsin_diagonal, system_diameter, torus_integral, Converged, CutoffForm, PairKernel,
};
use crate::error::{Error, Result};
use crate::quad::pow2_at_least;
use crate::renorm::{extrapolate, ladder, DivergenceModel, RenormResult};
use serde::Serialize;
use std::f64::consts::{PI, TAU};

fn lift(curves: &[&ClosedCurve]) -> Vec<ClosedCurve> {
    curves.iter().map(|c| c.to_space()).collect()
}

/// Embeddedness diagnostics; touching components are an error.
fn embedding_warnings(curves: &[&ClosedCurve]) -> Result<Vec<String>> {
    let diam = system_diameter(curves);
    let mut w = Vec::new();
    for (i, c) in curves.iter().enumerate() {
        let gap = c.min_self_distance();
        if gap < 1e-3 * diam {
            w.push(format!("component {i} nearly self-intersects (gap {gap:e})"));
        }
    }
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let d = curves[i].distance_to(curves[j]);
            if d < 1e-9 * diam {
                return Err(Error::Geometry(format!("components {i} and {j} intersect")));
            }
            if d < 1e-3 * diam {
                w.push(format!("components {i} and {j} nearly touch (gap {d:e})"));
            }
        }
    }
    Ok(w)
}

/// `E(K) = -½ ∬ cos τ sin θ_p sin θ_q dp dq / |q - p|²` over all ordered
/// pairs of components, with diagonal fill `-κ²|K'|²/4`.
pub fn space_energy(curves: &[&ClosedCurve]) -> Result<EnergyReport> {
    let owned = lift(curves);
    let refs: Vec<&ClosedCurve> = owned.iter().collect();
    let warnings = embedding_warnings(&refs)?;
    let m = refs.iter().map(|c| c.modes()).max().unwrap_or(1);
    let c = converge(pow2_at_least(4 * m + 60).max(64), 4096, 1e-12, |n| {
        torus_integral(&refs, n, sinsin, sinsin_diagonal)
    });
    let diagonal_fill = refs
        .iter()
        .flat_map(|k| (0..c.n).map(move |i| sinsin_diagonal(&k.jet(TAU * i as f64 / c.n as f64)).abs()))
        .fold(0.0, f64::max);
    Ok(EnergyReport {
        route: "direct".into(),
        value: -0.5 * c.value,
        error: 0.5 * c.error,
        n: c.n,
        renorm: None,
        diagonal_fill,
        warnings,
    })
}

fn route_name(form: CutoffForm) -> &'static str {
    match form {
        CutoffForm::Dots => "dots",
        CutoffForm::Coscos => "coscos",
    }
}

/// Cutoff route `lim L/ε - ½∬_{>ε} cos θ cos θ …` or `lim L/(2ε) - ¼∬_{>ε} dp·dq …`.
pub fn space_energy_cutoff(curves: &[&ClosedCurve], form: CutoffForm) -> Result<EnergyReport> {
    let owned = lift(curves);
    let refs: Vec<&ClosedCurve> = owned.iter().collect();
    let warnings = embedding_warnings(&refs)?;
    let length: f64 = refs.iter().map(|c| c.arclength()).sum();
    let counter = form.counterterm(length);
    let samples: Vec<(f64, f64)> = cutoff_ladder(&refs, form).into_iter().map(|(e, v)| (e, v + counter / e)).collect();
    let fit = extrapolate(&samples, &DivergenceModel::new(&[1, 2, 3]))?;
    Ok(EnergyReport {
        route: route_name(form).into(),
        value: fit.value,
        error: fit.error_estimate,
        n: fit.ladder.len(),
        renorm: Some(fit),
        diagonal_fill: 0.0,
        warnings,
    })
}

/// Raw cutoff integrals fitted with a free `ε⁻¹` term; the counterterm
/// coefficient is minus the fitted `ε⁻¹` coefficient.
pub fn space_energy_cutoff_diagnostic(curves: &[&ClosedCurve], form: CutoffForm) -> Result<RenormResult> {
    let owned = lift(curves);
    let refs: Vec<&ClosedCurve> = owned.iter().collect();
    extrapolate(&cutoff_ladder(&refs, form), &DivergenceModel::new(&[-1, 1, 2, 3]))
}

fn near_pair_converged(k1: &ClosedCurve, k2: &ClosedCurve, kernel: impl PairKernel) -> Converged {
    let m = k1.modes().max(k2.modes());
    converge(pow2_at_least(8 * m + 64).max(128), 4096, 1e-11, |n| near_pair_integral(k1, k2, n, &kernel))
}

fn parallel_ladder(k: &ClosedCurve) -> Result<(Vec<(f64, f64)>, f64, f64)> {
    let k = k.to_space();
    let reach = curve_system_reach(&[&k]);
    let top = (k.diameter() / 16.0).min(0.5 * reach);
    let mut samples = Vec::new();
    for delta in ladder(top, 0.5, 6) {
        let (off, _) = k.parallel_curve3(delta)?;
        let e = -0.25 * near_pair_converged(&k, &off, dots).value;
        samples.push((delta, e));
    }
    Ok((samples, k.arclength(), k.total_curvature()))
}

/// `E(K) = lim (πL/(4δ) + E(K, K_δ)) - (π/8) ∮ κ`, with `K_δ` the offset
/// along the principal normal.
pub fn space_energy_parallel(k: &ClosedCurve) -> Result<EnergyReport> {
    let (samples, length, total_kappa) = parallel_ladder(k)?;
    let shifted: Vec<(f64, f64)> = samples.iter().map(|&(d, v)| (d, v + PI * length / (4.0 * d))).collect();
    let fit = extrapolate(&shifted, &DivergenceModel::new(&[1, 2, 3]))?;
    Ok(EnergyReport {
        route: "parallel".into(),
        value: fit.value - PI / 8.0 * total_kappa,
        error: fit.error_estimate,
        n: fit.ladder.len(),
        renorm: Some(fit),
        diagonal_fill: 0.0,
        warnings: Vec::new(),
    })
}

/// Raw `E(K, K_δ)` fitted with a free `δ⁻¹` term.
pub fn space_energy_parallel_diagnostic(k: &ClosedCurve) -> Result<RenormResult> {
    let (samples, _, _) = parallel_ladder(k)?;
    extrapolate(&samples, &DivergenceModel::new(&[-1, 1, 2, 3]))
}

/// Both boundary forms of the mutual energy.
#[derive(Debug, Clone, Serialize)]
pub struct MutualReport {
    /// `-¼ ∬ dp·dq / |q - p|²`.
    pub value: f64,
    /// `-½ ∬ cos θ₁ cos θ₂ dp dq / |q - p|²`.
    pub coscos: f64,
    pub error: f64,
    pub n: usize,
    pub separation: f64,
    pub warnings: Vec<String>,
}

fn pair_converged(k1: &ClosedCurve, k2: &ClosedCurve, sep: f64, kernel: impl PairKernel) -> Converged {
    let scale = k1.diameter().max(k2.diameter());
    if sep < 0.05 * scale {
        return near_pair_converged(k1, k2, kernel);
    }
    let m = k1.modes().max(k2.modes());
    let start = pow2_at_least((4 * m + 60).max((64.0 * scale / sep) as usize)).min(2048);
    converge(start, 8192, 1e-13, |n| pair_torus(k1, k2, n, &kernel))
}

/// `E(K₁, K₂)` for disjoint curves.
pub fn mutual_energy_space(k1: &ClosedCurve, k2: &ClosedCurve) -> Result<MutualReport> {
    let (a, b) = (k1.to_space(), k2.to_space());
    let sep = a.distance_to(&b);
    let scale = a.diameter().max(b.diameter());
    if sep < 1e-9 * scale {
        return Err(Error::Geometry("the curves intersect".into()));
    }
    let mut warnings = Vec::new();
    if sep < 1e-3 * scale {
        warnings.push(format!("near contact (separation {sep:e})"));
    }
    let d = pair_converged(&a, &b, sep, dots);
    let c = pair_converged(&a, &b, sep, coscos);
    Ok(MutualReport {
        value: -0.25 * d.value,
        coscos: -0.5 * c.value,
        error: 0.25 * d.error + (0.25 * d.value - 0.5 * c.value).abs(),
        n: d.n,
        separation: sep,
        warnings,
    })
}

/// The four terms of `E(K₁ ∪ K₂) = E(K₁) + E(K₂) + 2E(K₁, K₂)`.
#[derive(Debug, Clone, Serialize)]
pub struct Additivity {
    pub union: f64,
    pub e1: f64,
    pub e2: f64,
    pub mutual: f64,
    pub residual: f64,
}

pub fn additivity_check(k1: &ClosedCurve, k2: &ClosedCurve) -> Result<Additivity> {
    let union = space_energy(&[k1, k2])?.value;
    let e1 = space_energy(&[k1])?.value;
    let e2 = space_energy(&[k2])?.value;
    let mutual = mutual_energy_space(k1, k2)?.value;
    Ok(Additivity { union, e1, e2, mutual, residual: union - e1 - e2 - 2.0 * mutual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Vec3;
    use nalgebra::{Matrix3, Rotation3};

    fn hopf() -> (ClosedCurve, ClosedCurve) {
        let a = ClosedCurve::circle_in(Vec3::zeros(), 1.0, Vec3::x(), Vec3::y()).unwrap();
        let b = ClosedCurve::circle_in(Vec3::x(), 1.0, Vec3::x(), Vec3::z()).unwrap();
        (a, b)
    }

    #[test]
    fn circle_in_space() {
        let c = ClosedCurve::circle(0.0, 0.0, 1.0).unwrap().to_space();
        let e = space_energy(&[&c]).unwrap();
        assert!((e.value - PI * PI / 2.0).abs() < 1e-12);
        assert!((e.diagonal_fill - 0.25).abs() < 1e-12);
    }

    #[test]
    fn diagonal_fill_is_the_chord_limit() {
        let k = ClosedCurve::trefoil();
        let s = 0.7;
        let fill = sinsin_diagonal(&k.jet(s));
        for h in [1e-3, 1e-4] {
            let (p, dp) = k.point_d1(s);
            let (q, dq) = k.point_d1(s + h);
            let v = sinsin(&p, &dp, &q, &dq);
            assert!((v - fill).abs() < 50.0 * h * fill.abs(), "{h}: {v} {fill}");
        }
    }

    #[test]
    fn trefoil_is_invariant_under_rigid_motions_and_scaling() {
        let k = ClosedCurve::trefoil();
        let e = space_energy(&[&k]).unwrap().value;
        let r = *Rotation3::from_euler_angles(0.3, -1.1, 2.0).matrix();
        let moved = k.affine(&r, Vec3::new(1.0, 2.0, -3.0)).unwrap();
        assert!((space_energy(&[&moved]).unwrap().value - e).abs() < 1e-10);
        for s in [0.5, 2.0, 10.0] {
            let scaled = k.affine(&(Matrix3::identity() * s), Vec3::zeros()).unwrap();
            assert!((space_energy(&[&scaled]).unwrap().value - e).abs() < 1e-10);
        }
        let rev = k.reversed();
        assert!((space_energy(&[&rev]).unwrap().value - e).abs() < 1e-10);
    }

    #[test]
    fn planar_reduction() {
        let c = ClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0).unwrap();
        let planar = crate::planar::curve_energy(&[&c]).unwrap().value;
        let space = space_energy(&[&c.to_space()]).unwrap().value;
        assert!((planar - space).abs() < 1e-10);
    }

    #[test]
    fn cutoff_routes_on_the_circle() {
        let c = ClosedCurve::circle(0.0, 0.0, 1.0).unwrap().to_space();
        for form in [CutoffForm::Dots, CutoffForm::Coscos] {
            let e = space_energy_cutoff(&[&c], form).unwrap();
            assert!((e.value - PI * PI / 2.0).abs() < 1e-6, "{form:?} {}", e.value);
        }
    }

    #[test]
    fn parallel_route_on_the_circle() {
        let c = ClosedCurve::circle(0.0, 0.0, 1.0).unwrap().to_space();
        let e = space_energy_parallel(&c).unwrap();
        assert!((e.value - PI * PI / 2.0).abs() < 1e-5, "{}", e.value);
        let d = space_energy_parallel_diagnostic(&c).unwrap();
        let l = TAU;
        assert!((d.coefficient(-1).unwrap() + PI * l / 4.0).abs() < 1e-3 * l);
    }

    #[test]
    fn mutual_forms_agree_on_coaxial_circles() {
        let a = ClosedCurve::circle_in(Vec3::zeros(), 1.0, Vec3::x(), Vec3::y()).unwrap();
        let b = ClosedCurve::circle_in(Vec3::new(0.0, 0.0, 2.0), 1.0, Vec3::x(), Vec3::y()).unwrap();
        let m = mutual_energy_space(&a, &b).unwrap();
        assert!((m.value - m.coscos).abs() < 1e-8, "{} {}", m.value, m.coscos);
        let r = mutual_energy_space(&a, &b.reversed()).unwrap();
        assert!((r.value + m.value).abs() < 1e-12);
    }

    #[test]
    fn far_curves_obey_the_integrand_bound() {
        let a = ClosedCurve::circle_in(Vec3::zeros(), 1.0, Vec3::x(), Vec3::y()).unwrap();
        let b = ClosedCurve::circle_in(Vec3::new(10.0, 3.0, 1.0), 1.0, Vec3::y(), Vec3::z()).unwrap();
        let m = mutual_energy_space(&a, &b).unwrap();
        let dmin = m.separation;
        assert!(m.value.abs() <= TAU * TAU / (4.0 * dmin * dmin));
    }

    #[test]
    fn additivity_on_distant_and_hopf_pairs() {
        let a = ClosedCurve::circle_in(Vec3::zeros(), 1.0, Vec3::x(), Vec3::y()).unwrap();
        let far = ClosedCurve::circle_in(Vec3::new(5.0, 0.0, 0.0), 1.0, Vec3::y(), Vec3::z()).unwrap();
        assert!(additivity_check(&a, &far).unwrap().residual.abs() < 1e-8);
        let (h1, h2) = hopf();
        let r = additivity_check(&h1, &h2).unwrap();
        assert!(r.residual.abs() < 1e-8, "{r:?}");
        let rr = additivity_check(&h1, &h2.reversed()).unwrap();
        assert!(rr.residual.abs() < 1e-8);
        assert!((rr.mutual + r.mutual).abs() < 1e-10);
    }
}
