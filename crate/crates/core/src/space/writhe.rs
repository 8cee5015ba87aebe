//! Writhe as a double integral of `sin τ sin θ_p sin θ_q / |q - p|²`, and
//! as an average of signed crossing counts over projection directions.
//!
//! With this sign convention the writhe of a right-handed trefoil is
//! negative; both routes below use it.

use super::EnergyReport;
use crate::curve::{ClosedCurve, Vec3};
use crate::cutoff::{converge, pair_torus, sintau, torus_integral};
use crate::error::{Error, Result};
use crate::quad::pow2_at_least;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

/// `Wr(K) = (1/4π) ∬ sin τ sin θ_p sin θ_q dp dq / |q - p|²`.
///
/// The periodic trapezoid rule loses spectral accuracy on the diagonal,
/// where the integrand has a `|s - t|` kink, so three grids are combined
/// by Richardson extrapolation in `h²` and `h⁴`.
pub fn writhe(k: &ClosedCurve) -> Result<EnergyReport> {
    let k = k.to_space();
    let n = pow2_at_least(8 * k.modes() + 64).max(128);
    let i: Vec<f64> = [n, 2 * n, 4 * n]
        .iter()
        .map(|&m| torus_integral(&[&k], m, sintau, |_| 0.0) / (4.0 * PI))
        .collect();
    let r1 = (4.0 * i[1] - i[0]) / 3.0;
    let r2 = (4.0 * i[2] - i[1]) / 3.0;
    let value = (16.0 * r2 - r1) / 15.0;
    Ok(EnergyReport {
        route: "torus".into(),
        value,
        error: (value - r2).abs(),
        n: 4 * n,
        renorm: None,
        diagonal_fill: 0.0,
        warnings: Vec::new(),
    })
}

/// Gauss linking integral of two disjoint closed curves.
pub fn linking_number(k1: &ClosedCurve, k2: &ClosedCurve) -> Result<f64> {
    let (a, b) = (k1.to_space(), k2.to_space());
    if a.distance_to(&b) < 1e-9 * a.diameter().max(b.diameter()) {
        return Err(Error::Geometry("the curves intersect".into()));
    }
    let start = pow2_at_least(8 * a.modes().max(b.modes()) + 64);
    let c = converge(start, 8192, 1e-10, |n| pair_torus(&a, &b, n, sintau));
    Ok(-c.value / (4.0 * PI))
}

/// Fibonacci points on the upper unit hemisphere.
pub fn hemisphere_directions(n: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

fn plane_basis(v: &Vec3) -> (Vec3, Vec3) {
    let a = if v.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = v.cross(&a).normalize();
    (e1, v.cross(&e1))
}

/// Signed crossing sum of the polygon `pts` seen from direction `v`.
fn crossing_sum(pts: &[Vec3], v: &Vec3, cell: f64) -> f64 {
    let n = pts.len();
    let (e1, e2) = plane_basis(v);
    let q: Vec<(f64, f64)> = pts.iter().map(|p| (p.dot(&e1), p.dot(&e2))).collect();
    let key = |x: f64, y: f64| ((x / cell).floor() as i64, (y / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for i in 0..n {
        let (a, b) = (q[i], q[(i + 1) % n]);
        let (x0, y0) = key(a.0.min(b.0), a.1.min(b.1));
        let (x1, y1) = key(a.0.max(b.0), a.1.max(b.1));
        for cx in x0..=x1 {
            for cy in y0..=y1 {
                grid.entry((cx, cy)).or_default().push(i);
            }
        }
    }
    let mut total = 0.0;
    for (&cellkey, segs) in &grid {
        for (ai, &i) in segs.iter().enumerate() {
            for &j in &segs[ai + 1..] {
                let (i, j) = (i.min(j), i.max(j));
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a0, a1) = (q[i], q[(i + 1) % n]);
                let (b0, b1) = (q[j], q[(j + 1) % n]);
                let da = (a1.0 - a0.0, a1.1 - a0.1);
                let db = (b1.0 - b0.0, b1.1 - b0.1);
                let den = da.0 * db.1 - da.1 * db.0;
                if den == 0.0 {
                    continue;
                }
                let w = (b0.0 - a0.0, b0.1 - a0.1);
                let s = (w.0 * db.1 - w.1 * db.0) / den;
                let t = (w.0 * da.1 - w.1 * da.0) / den;
                if !(0.0..1.0).contains(&s) || !(0.0..1.0).contains(&t) {
                    continue;
                }
                let x = a0.0 + s * da.0;
                let y = a0.1 + s * da.1;
                if key(x, y) != cellkey {
                    continue;
                }
                let ta = pts[(i + 1) % n] - pts[i];
                let tb = pts[(j + 1) % n] - pts[j];
                let ha = (pts[i] + ta * s).dot(v);
                let hb = (pts[j] + tb * t).dot(v);
                let (over, under) = if ha > hb { (ta, tb) } else { (tb, ta) };
                total += over.cross(&under).dot(v).signum();
            }
        }
    }
    total
}

/// Minus the mean signed crossing count of `segments`-gon projections over
/// `directions` quasi-uniform directions, with standard crossing signs.
pub fn projection_writhe(k: &ClosedCurve, directions: usize, segments: usize) -> Result<EnergyReport> {
    if directions == 0 || segments < 8 {
        return Err(Error::Config("at least one direction and eight segments are needed".into()));
    }
    let k = k.to_space();
    let pts: Vec<Vec3> = (0..segments).map(|i| k.point(TAU * i as f64 / segments as f64)).collect();
    let cell = 2.0 * k.arclength() / segments as f64;
    let sums: Vec<f64> = hemisphere_directions(directions).par_iter().map(|v| crossing_sum(&pts, v, cell)).collect();
    let nd = sums.len() as f64;
    let mean = sums.iter().sum::<f64>() / nd;
    let var = sums.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (nd - 1.0).max(1.0);
    Ok(EnergyReport {
        route: "projection".into(),
        value: -mean,
        error: (var / nd).sqrt(),
        n: directions,
        renorm: None,
        diagonal_fill: 0.0,
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;

    #[test]
    fn linked_circles() {
        let a = ClosedCurve::circle_in(Vec3::zeros(), 1.0, Vec3::x(), Vec3::y()).unwrap();
        let b = ClosedCurve::circle_in(Vec3::x(), 1.0, Vec3::x(), Vec3::z()).unwrap();
        let lk = linking_number(&a, &b).unwrap();
        assert!((lk.abs() - 1.0).abs() < 1e-8, "{lk}");
        assert!((linking_number(&a, &b.reversed()).unwrap() + lk).abs() < 1e-8);
        let far = ClosedCurve::circle_in(Vec3::new(3.0, 0.0, 0.0), 1.0, Vec3::x(), Vec3::z()).unwrap();
        assert!(linking_number(&a, &far).unwrap().abs() < 1e-8);
    }

    #[test]
    fn planar_curves_have_zero_writhe() {
        let c = ClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0).unwrap();
        assert!(writhe(&c).unwrap().value.abs() < 1e-10);
    }

    #[test]
    fn trefoil_routes_agree_and_mirror_flips_the_sign() {
        let k = ClosedCurve::trefoil();
        let w = writhe(&k).unwrap();
        let p = projection_writhe(&k, 2000, 2048).unwrap();
        assert!((w.value - p.value).abs() < 0.05, "{} vs {}", w.value, p.value);
        assert!(w.value.abs() > 3.0);
        let mirror = k.affine(&Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0)), Vec3::zeros()).unwrap();
        assert!((writhe(&mirror).unwrap().value + w.value).abs() < 1e-8);
        let scaled = k.affine(&(Matrix3::identity() * 3.0), Vec3::zeros()).unwrap();
        assert!((writhe(&scaled).unwrap().value - w.value).abs() < 1e-8);
    }

    #[test]
    fn richardson_sequence_is_converged() {
        let w = writhe(&ClosedCurve::trefoil()).unwrap();
        assert!(w.error < 1e-6, "{}", w.error);
    }
}
