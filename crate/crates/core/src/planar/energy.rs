//! Renormalized energies `E(Ω)` and `E(K)`.

use super::potential::PotentialEvaluator;
use super::{max_modes, Estimate};
use crate::curve::ClosedCurve;
pub use crate::cutoff::CutoffForm;
use crate::cutoff::{converge, cutoff_ladder, sinsin, sinsin_diagonal, torus_integral};
use crate::domain::{interior_grid, Blend, Collar, PlanarDomain};
use crate::error::{Error, Result};
use crate::quad::{pow2_at_least, uniform_panels, GaussLegendre};
use crate::renorm::{extrapolate, ladder, DivergenceModel, RenormResult};
use crate::quad::OrderedSum;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Integrals of `V` over `Ω_δ` on a ladder of offsets, without counterterm.
struct DomainLadder {
    samples: Vec<(f64, f64)>,
    perimeter: f64,
}

fn domain_ladder(domain: &PlanarDomain) -> Result<DomainLadder> {
    let reach = domain.reach();
    let blend = Blend { t_in: 0.15 * reach, t_out: 0.6 * reach };
    let delta_max = (domain.diameter() / 16.0).min(blend.t_in);
    let deltas = ladder(delta_max, 0.5, 6);

    let mut edges: Vec<f64> = deltas.iter().rev().copied().collect();
    while *edges.last().unwrap() < blend.t_in * (1.0 - 1e-12) {
        let next = (2.0 * edges.last().unwrap()).min(blend.t_in);
        edges.push(if blend.t_in - next < 0.25 * next { blend.t_in } else { next });
    }
    let outer = uniform_panels(blend.t_in, blend.t_out, (blend.t_out - blend.t_in) / 4.0);

    let eval = PotentialEvaluator::new(domain);
    let g = GaussLegendre::g16();
    let mut inner_panels = vec![0.0; edges.len() - 1];
    let mut blend_part = 0.0;
    for b in domain.boundaries() {
        let ns = pow2_at_least(8 * b.modes() + 64).max(128);
        let col = Collar::new(b, ns);
        let row = |i: usize, a: f64, c: f64, weight: &dyn Fn(f64) -> f64| -> f64 {
            g.mapped(a, c)
                .map(|(t, w)| {
                    let x = col.point(i, t);
                    w * weight(t) * col.jacobian(i, t) * eval.eval_with_distance(&x, t)
                })
                .sum::<f64>()
        };
        for (k, slot) in inner_panels.iter_mut().enumerate() {
            let (a, c) = (edges[k], edges[k + 1]);
            *slot += (0..ns).into_par_iter().map(|i| row(i, a, c, &|_| 1.0)).ordered_sum();
        }
        for &(a, c) in &outer {
            blend_part += (0..ns).into_par_iter().map(|i| row(i, a, c, &|t| blend.chi(t))).ordered_sum();
        }
    }
    let grid = interior_grid(domain, blend, (blend.t_out - blend.t_in) / 24.0);
    let interior = grid.integrate(|x| eval.eval_with_distance(x, blend.t_in));

    let mut samples = Vec::new();
    for &delta in &deltas {
        let collar: f64 = edges
            .windows(2)
            .zip(&inner_panels)
            .filter(|(e, _)| e[0] >= delta * (1.0 - 1e-12))
            .map(|(_, v)| v)
            .sum();
        samples.push((delta, collar + blend_part + interior));
    }
    Ok(DomainLadder { samples, perimeter: domain.perimeter() })
}

/// `E(Ω) = lim_{δ→0} ∫_{Ω_δ} V + πL/(4δ)`.
pub fn domain_energy(domain: &PlanarDomain) -> Result<RenormResult> {
    let l = domain_ladder(domain)?;
    let shifted: Vec<(f64, f64)> =
        l.samples.iter().map(|&(d, v)| (d, v + PI * l.perimeter / (4.0 * d))).collect();
    extrapolate(&shifted, &DivergenceModel::new(&[1, 2, 3]))
}

/// Fit of the raw integrals `∫_{Ω_δ} V` with a free `δ⁻¹` term; the
/// counterterm coefficient is minus the fitted coefficient of `δ⁻¹`.
pub fn domain_energy_diagnostic(domain: &PlanarDomain) -> Result<RenormResult> {
    let l = domain_ladder(domain)?;
    extrapolate(&l.samples, &DivergenceModel::new(&[-1, 1, 2]))
}

fn check_disjoint(curves: &[&ClosedCurve]) -> Result<()> {
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let d = curves[i].distance_to(curves[j]);
            if d < 1e-9 * curves[i].diameter() {
                return Err(Error::Geometry(format!("components {i} and {j} intersect")));
            }
        }
    }
    Ok(())
}

/// `E(K) = -½ ∬ sin θ_p sin θ_q dp dq / |q - p|²` over all ordered pairs
/// of components.
pub fn curve_energy(curves: &[&ClosedCurve]) -> Result<Estimate> {
    check_disjoint(curves)?;
    let start = pow2_at_least(4 * max_modes(curves) + 60).max(64);
    let c = converge(start, 4096, 1e-12, |n| torus_integral(curves, n, sinsin, sinsin_diagonal));
    Ok(Estimate { value: -0.5 * c.value, error: 0.5 * c.error, n: c.n })
}

/// `E(K)` of the boundary of a domain with its induced orientation.
pub fn boundary_energy(domain: &PlanarDomain) -> Result<Estimate> {
    curve_energy(&domain.boundaries())
}

/// Outcome of a cutoff route: both conventions and the curvature term linking them.
#[derive(Debug, Clone, Serialize)]
pub struct CutoffEnergy {
    pub form: CutoffForm,
    pub e_domain: f64,
    pub e_curve: f64,
    /// `(π/8) ∮ κ ds`.
    pub curvature_term: f64,
    pub fit: RenormResult,
}

/// Cutoff route: `lim L/(2ε) - ¼∬_{|q-p|>ε} dp·dq/|q-p|²` (dots) or
/// `lim L/ε - ½∬_{|q-p|>ε} cos θ_p cos θ_q dp dq/|q-p|²` (coscos).
pub fn curve_energy_cutoff(curves: &[&ClosedCurve], form: CutoffForm) -> Result<CutoffEnergy> {
    check_disjoint(curves)?;
    let length: f64 = curves.iter().map(|c| c.arclength()).sum();
    let counter = form.counterterm(length);
    let samples: Vec<(f64, f64)> =
        cutoff_ladder(curves, form).into_iter().map(|(e, v)| (e, v + counter / e)).collect();
    let fit = extrapolate(&samples, &DivergenceModel::new(&[1, 2, 3]))?;
    let curvature_term = PI / 8.0 * curves.iter().map(|c| c.total_curvature()).sum::<f64>();
    Ok(CutoffEnergy { form, e_domain: fit.value + curvature_term, e_curve: fit.value, curvature_term, fit })
}

/// Fit of the raw cutoff integral with a free `ε⁻¹` term.
pub fn curve_energy_cutoff_diagnostic(curves: &[&ClosedCurve], form: CutoffForm) -> Result<RenormResult> {
    extrapolate(&cutoff_ladder(curves, form), &DivergenceModel::new(&[-1, 1, 2, 3]))
}

#[cfg(test)]
mod tests {
    use super::*;

    const E_DISK: f64 = 0.75 * PI * PI;
    const E_CIRCLE: f64 = 0.5 * PI * PI;

    #[test]
    fn unit_disk_domain_energy() {
        let d = PlanarDomain::disk(0.0, 0.0, 1.0).unwrap();
        let r = domain_energy(&d).unwrap();
        assert!((r.value - E_DISK).abs() < 1e-5, "{} {:?}", r.value, r.ladder);
    }

    #[test]
    fn disk_ladder_matches_closed_form_at_each_offset() {
        let d = PlanarDomain::disk(0.0, 0.0, 1.0).unwrap();
        let l = domain_ladder(&d).unwrap();
        for &(delta, v) in &l.samples {
            let exact = PI * PI - PI * PI / (delta * (2.0 - delta));
            assert!((v - exact).abs() < 1e-7 * exact.abs(), "{delta}: {v} {exact}");
        }
    }

    #[test]
    fn domain_energy_is_scale_invariant() {
        let d = PlanarDomain::disk(1.0, -2.0, 3.0).unwrap();
        assert!((domain_energy(&d).unwrap().value - E_DISK).abs() < 1e-5);
    }

    #[test]
    fn counterterm_is_recovered_by_the_diagnostic_fit() {
        let d = PlanarDomain::simple(ClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0).unwrap()).unwrap();
        let r = domain_energy_diagnostic(&d).unwrap();
        let c = -r.coefficient(-1).unwrap();
        assert!((c / (PI * d.perimeter() / 4.0) - 1.0).abs() < 1e-3, "{c}");
    }

    #[test]
    fn circle_curve_energy() {
        for r in [1.0, 0.2, 7.0] {
            let c = ClosedCurve::circle(0.3, 0.1, r).unwrap();
            assert!((curve_energy(&[&c]).unwrap().value - E_CIRCLE).abs() < 1e-12);
        }
    }

    #[test]
    fn relation_on_disk_and_annulus() {
        let disk = PlanarDomain::disk(0.0, 0.0, 1.0).unwrap();
        let diff = domain_energy(&disk).unwrap().value - boundary_energy(&disk).unwrap().value;
        assert!((diff - PI * PI / 4.0).abs() < 1e-5);
        let ann = PlanarDomain::annulus(1.0, 4.0).unwrap();
        let diff = domain_energy(&ann).unwrap().value - boundary_energy(&ann).unwrap().value;
        assert!(diff.abs() < 1e-4, "{diff}");
    }

    #[test]
    fn cutoff_routes_on_the_circle() {
        let c = ClosedCurve::circle(0.0, 0.0, 1.0).unwrap();
        let d = curve_energy_cutoff(&[&c], CutoffForm::Dots).unwrap();
        assert!((d.e_curve - E_CIRCLE).abs() < 1e-6, "{}", d.e_curve);
        let k = curve_energy_cutoff(&[&c], CutoffForm::Coscos).unwrap();
        assert!((k.e_domain - E_DISK).abs() < 1e-6, "{}", k.e_domain);
        assert!((k.curvature_term - PI * PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn cutoff_routes_on_the_ellipse_agree_with_the_direct_route() {
        let c = ClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0).unwrap();
        let direct = curve_energy(&[&c]).unwrap().value;
        for form in [CutoffForm::Dots, CutoffForm::Coscos] {
            let r = curve_energy_cutoff(&[&c], form).unwrap();
            assert!((r.e_curve - direct).abs() < 1e-5, "{form:?} {} {direct}", r.e_curve);
        }
        let diag = curve_energy_cutoff_diagnostic(&[&c], CutoffForm::Dots).unwrap();
        let l = c.arclength();
        assert!((diag.coefficient(-1).unwrap() + 0.5 * l).abs() < 1e-3 * l);
    }
}
