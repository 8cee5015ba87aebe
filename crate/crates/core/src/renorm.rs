//! Cutoff ladders and least-squares extrapolation of renormalized limits.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Powers of the cutoff in the fitted expansion, plus optionally pinned
/// coefficients that are subtracted before fitting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivergenceModel {
    pub terms: Vec<i32>,
    pub pinned: Vec<(i32, f64)>,
}

impl DivergenceModel {
    /// Free constant plus the given nonzero powers.
    pub fn new(powers: &[i32]) -> Self {
        let mut terms = vec![0];
        terms.extend(powers.iter().copied().filter(|&p| p != 0));
        DivergenceModel { terms, pinned: Vec::new() }
    }

    pub fn pin(mut self, power: i32, coefficient: f64) -> Self {
        self.pinned.push((power, coefficient));
        self
    }
}

/// Outcome of an extrapolation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RenormResult {
    pub value: f64,
    pub fit_residual: f64,
    pub ladder: Vec<(f64, f64)>,
    pub error_estimate: f64,
    /// Fitted coefficient for every free power, in model order.
    pub coefficients: Vec<(i32, f64)>,
    pub condition: f64,
}

impl RenormResult {
    pub fn coefficient(&self, power: i32) -> Option<f64> {
        self.coefficients.iter().find(|(p, _)| *p == power).map(|(_, c)| *c)
    }
}

/// Geometric ladder `largest, largest·ratio, ...` with `rungs` entries.
pub fn ladder(largest: f64, ratio: f64, rungs: usize) -> Vec<f64> {
    (0..rungs).map(|i| largest * ratio.powi(i as i32)).collect()
}

/// Default ladder for a curve or domain of the given diameter.
pub fn default_ladder(diameter: f64) -> Vec<f64> {
    ladder(diameter / 16.0, 0.5, 6)
}

/// Fit `value ≈ Σ c_e ε^e` and return the constant term.
pub fn extrapolate(samples: &[(f64, f64)], model: &DivergenceModel) -> Result<RenormResult> {
    if samples.len() < 4 {
        return Err(Error::Extrapolation(format!("{} samples; at least 4 are needed", samples.len())));
    }
    if !model.terms.contains(&0) {
        return Err(Error::Config("the constant term must be free".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    if sorted.iter().any(|(e, v)| !(*e > 0.0) || !v.is_finite()) {
        return Err(Error::Extrapolation("cutoffs must be positive and values finite".into()));
    }
    for w in sorted.windows(2) {
        if w[0].0 <= w[1].0 {
            return Err(Error::Extrapolation("cutoff ladder must be strictly decreasing".into()));
        }
    }
    let span = sorted[0].0 / sorted[sorted.len() - 1].0;
    if span < 8.0 - 1e-9 {
        return Err(Error::Extrapolation(format!("cutoffs span a factor {span:.3}, at least 8 is needed")));
    }
    if sorted.len() < model.terms.len() {
        return Err(Error::Extrapolation(format!(
            "{} samples cannot determine {} coefficients",
            sorted.len(),
            model.terms.len()
        )));
    }
    let (coeffs, cond, resid) = solve(&sorted, model)?;
    let value = coeffs[model.terms.iter().position(|&p| p == 0).unwrap()];
    let error_estimate = if sorted.len() > model.terms.len() {
        let (c2, _, _) = solve(&sorted[..sorted.len() - 1], model)?;
        (c2[model.terms.iter().position(|&p| p == 0).unwrap()] - value).abs()
    } else {
        f64::INFINITY
    };
    Ok(RenormResult {
        value,
        fit_residual: resid,
        ladder: sorted,
        error_estimate,
        coefficients: model.terms.iter().copied().zip(coeffs).collect(),
        condition: cond,
    })
}

fn solve(samples: &[(f64, f64)], model: &DivergenceModel) -> Result<(Vec<f64>, f64, f64)> {
    let n = samples.len();
    let m = model.terms.len();
    let mut a = DMatrix::zeros(n, m);
    let mut y = DVector::zeros(n);
    for (i, &(e, v)) in samples.iter().enumerate() {
        let pinned: f64 = model.pinned.iter().map(|&(p, c)| c * e.powi(p)).sum();
        y[i] = v - pinned;
        for (j, &p) in model.terms.iter().enumerate() {
            a[(i, j)] = e.powi(p);
        }
    }
    let scales: Vec<f64> = (0..m).map(|j| a.column(j).amax().max(1e-300)).collect();
    for j in 0..m {
        let s = scales[j];
        a.column_mut(j).iter_mut().for_each(|x| *x /= s);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = smax / smin.max(1e-300);
    if cond > 1e12 {
        return Err(Error::Extrapolation(format!("ill-conditioned fit, condition number {cond:e}")));
    }
    let x = svd
        .solve(&y, 1e-14)
        .map_err(|e| Error::Extrapolation(format!("least squares failed: {e}")))?;
    let fitted = &a * &x;
    let ymax = y.amax().max(1e-300);
    let resid = (0..n).map(|i| (fitted[i] - y[i]).abs()).fold(0.0, f64::max) / ymax;
    let coeffs = (0..m).map(|j| x[j] / scales[j]).collect();
    Ok((coeffs, cond, resid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn linear_model_recovers_constant() {
        let s: Vec<_> = ladder(0.4, 0.5, 6).into_iter().map(|e| (e, 5.0 + e)).collect();
        let r = extrapolate(&s, &DivergenceModel::new(&[1])).unwrap();
        assert!((r.value - 5.0).abs() < 1e-13);
        assert!(r.fit_residual < 1e-13);
    }

    #[test]
    fn inverse_power_is_fitted() {
        let s: Vec<_> = ladder(0.4, 0.5, 6).into_iter().map(|e| (e, 1.0 / e + 7.0)).collect();
        let r = extrapolate(&s, &DivergenceModel::new(&[-1])).unwrap();
        assert!((r.value - 7.0).abs() < 1e-11);
        assert!((r.coefficient(-1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pinned_counterterm_is_subtracted() {
        let s: Vec<_> = ladder(0.4, 0.5, 6).into_iter().map(|e| (e, 3.0 / e - 2.0 + 0.5 * e)).collect();
        let r = extrapolate(&s, &DivergenceModel::new(&[1]).pin(-1, 3.0)).unwrap();
        assert!((r.value + 2.0).abs() < 1e-12);
    }

    #[test]
    fn disk_centre_potential_ladder() {
        use std::f64::consts::PI;
        // cutoff potential at the centre of the unit disk: π(1/ε² - 1) - π/ε²
        let s: Vec<_> = ladder(0.2, 0.5, 6).into_iter().map(|e| (e, PI * (1.0 / (e * e) - 1.0) - PI / (e * e))).collect();
        let r = extrapolate(&s, &DivergenceModel::new(&[1])).unwrap();
        assert!((r.value + PI).abs() < 1e-8);
    }

    #[test]
    fn short_or_narrow_ladders_are_rejected() {
        let s: Vec<_> = ladder(0.4, 0.5, 3).into_iter().map(|e| (e, e)).collect();
        assert!(extrapolate(&s, &DivergenceModel::new(&[1])).is_err());
        let s: Vec<_> = ladder(0.4, 0.8, 6).into_iter().map(|e| (e, e)).collect();
        assert!(extrapolate(&s, &DivergenceModel::new(&[1])).is_err());
    }

    proptest! {
        #[test]
        fn exact_model_data_is_recovered(c0 in -10.0f64..10.0, c1 in -5.0f64..5.0, cm1 in -3.0f64..3.0, c2 in -2.0f64..2.0) {
            let s: Vec<_> = ladder(0.25, 0.5, 7).into_iter().map(|e| (e, cm1 / e + c0 + c1 * e + c2 * e * e)).collect();
            let r = extrapolate(&s, &DivergenceModel::new(&[-1, 1, 2])).unwrap();
            prop_assert!((r.value - c0).abs() < 1e-9 * (1.0 + c0.abs() + cm1.abs()));
        }
    }
}
