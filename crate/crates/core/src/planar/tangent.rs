//! Energies written through angles between tangent circles.
//!
//! For points `p ≠ q` of oriented curves, the circle through `p` and `q`
//! tangent to the first curve at `q` (with matching orientation) has unit
//! tangent `T_c(p) = -T_q + 2 (T_q·e) e` at `p`, where `e` is the unit
//! chord direction.  The angle `θ` from `T_c(p)` to the tangent of the
//! curve at `p` carries the energy.

use super::Estimate;
use crate::curve::{ClosedCurve, Vec3};
use crate::domain::PlanarDomain;
use crate::error::{Error, Result};
use crate::quad::pow2_at_least;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Constant fixed by the disk, where the angle vanishes identically.
pub const CALIBRATED_CONSTANT: f64 = 0.75 * PI * PI;
/// Constant as printed for the single-domain form.
pub const PRINTED_CONSTANT: f64 = 0.5 * PI * PI;

fn unit_tangents(c: &ClosedCurve, n: usize) -> (Vec<Vec3>, Vec<Vec3>, Vec<f64>) {
    let s = c.samples(n);
    let speed: Vec<f64> = s.d1.iter().map(|d| d.norm()).collect();
    let t = s.d1.iter().zip(&speed).map(|(d, v)| d / *v).collect();
    (s.p, t, speed)
}

/// Unit tangent at `p` of the circle through `p` and `q` with tangent `tq` at `q`.
pub fn circle_tangent_at(p: &Vec3, q: &Vec3, tq: &Vec3) -> Vec3 {
    let e = (q - p).normalize();
    -tq + e * (2.0 * tq.dot(&e))
}

fn signed_angle(from: &Vec3, to: &Vec3) -> f64 {
    (from.x * to.y - from.y * to.x).atan2(from.dot(to))
}

#[derive(Debug, Clone, Serialize)]
pub struct TangentCircleEnergy {
    /// `CALIBRATED_CONSTANT + ¼ ∬ θ sin θ dp dq / |q - p|²`.
    pub value: f64,
    /// The same integral with the printed constant.
    pub value_printed_constant: f64,
    pub integral: Estimate,
    pub max_abs_theta: f64,
}

/// Unwrapped angle table `θ[i][j]` with `θ[i][i] = 0`, continued along rows.
pub fn theta_table(c: &ClosedCurve, n: usize) -> Result<Vec<Vec<f64>>> {
    let (p, t, _) = unit_tangents(c, n);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; n];
            let mut prev = 0.0;
            for m in 1..n {
                let j = (i + m) % n;
                let raw = signed_angle(&circle_tangent_at(&p[i], &p[j], &t[j]), &t[i]);
                let lifted = raw + TAU * ((prev - raw) / TAU).round();
                if (lifted - prev).abs() > 0.5 * PI {
                    return Err(Error::Resolution(format!("angle jumps by {:.3} between adjacent nodes", lifted - prev)));
                }
                row[j] = lifted;
                prev = lifted;
            }
            Ok(row)
        })
        .collect()
}

fn tangent_integral(c: &ClosedCurve, n: usize) -> Result<(f64, f64)> {
    let th = theta_table(c, n)?;
    let (p, _, speed) = unit_tangents(c, n);
    let h = TAU / n as f64;
    let mut max_theta: f64 = 0.0;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let x = th[i][j];
            max_theta = max_theta.max(x.abs());
            s += x * x.sin() / (p[j] - p[i]).norm_squared() * speed[i] * speed[j];
        }
    }
    Ok((0.25 * s * h * h, max_theta))
}

/// Single-domain tangent-circle form of `E(Ω)`.
pub fn tangent_circle_energy(domain: &PlanarDomain) -> Result<TangentCircleEnergy> {
    if !domain.is_simply_connected() {
        return Err(Error::Geometry("the tangent-circle form needs a simply connected domain".into()));
    }
    let c = &domain.components()[0].outer;
    let mut n = pow2_at_least(8 * c.modes() + 56);
    let (mut prev, mut mt) = tangent_integral(c, n)?;
    let mut err = f64::INFINITY;
    while n < 1024 {
        n *= 2;
        let (cur, m) = tangent_integral(c, n)?;
        err = (cur - prev).abs();
        prev = cur;
        mt = m;
        if err < 1e-11 * (1.0 + cur.abs()) {
            break;
        }
    }
    Ok(TangentCircleEnergy {
        value: CALIBRATED_CONSTANT + prev,
        value_printed_constant: PRINTED_CONSTANT + prev,
        integral: Estimate { value: prev, error: err, n },
        max_abs_theta: mt,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PairThetaEnergy {
    /// `⅛ ∬ θ_s θ_t ds dt - π²/2`.
    pub value: f64,
    /// `π²/2 - ⅛ ∬ θ_s θ_t ds dt`, the printed arrangement.
    pub value_printed_sign: f64,
    /// `¼ ∬ Θ sin Θ dp₁ dp₂ / |p₂ - p₁|²` with `Θ` lifted on the cut torus.
    pub cut_form: f64,
    pub integral: Estimate,
}

/// `e^{iθ(s,t)}` on an `n × n` grid, rows indexed by the first curve.
fn phase_grid(k1: &ClosedCurve, k2: &ClosedCurve, n: usize) -> (Vec<Complex64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let (p1, t1, v1) = unit_tangents(k1, n);
    let (p2, t2, v2) = unit_tangents(k2, n);
    let mut z = vec![Complex64::new(0.0, 0.0); n * n];
    let mut r2 = vec![0.0; n * n];
    z.par_chunks_mut(n).zip(r2.par_chunks_mut(n)).enumerate().for_each(|(i, (zr, rr))| {
        for j in 0..n {
            let tc = circle_tangent_at(&p2[j], &p1[i], &t1[i]);
            let a = Complex64::new(tc.x, tc.y) * Complex64::new(t2[j].x, -t2[j].y);
            zr[j] = a / a.norm();
            rr[j] = (p2[j] - p1[i]).norm_squared();
        }
    });
    (z, r2, v1, v2)
}

fn spectral_derivative_rows(data: &mut [Complex64], n: usize, planner: &mut FftPlanner<f64>) {
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    data.par_chunks_mut(n).for_each(|row| {
        fwd.process(row);
        for (k, c) in row.iter_mut().enumerate() {
            let freq = if k < n / 2 {
                k as f64
            } else if k == n / 2 {
                0.0
            } else {
                k as f64 - n as f64
            };
            *c *= Complex64::new(0.0, freq / n as f64);
        }
        inv.process(row);
    });
}

fn transpose(data: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = data[i * n + j];
        }
    }
    out
}

fn pair_integral(k1: &ClosedCurve, k2: &ClosedCurve, n: usize) -> f64 {
    let (z, _, _, _) = phase_grid(k1, k2, n);
    let mut planner = FftPlanner::new();
    let mut zt = z.clone();
    spectral_derivative_rows(&mut zt, n, &mut planner);
    let mut zs = transpose(&z, n);
    spectral_derivative_rows(&mut zs, n, &mut planner);
    let zs = transpose(&zs, n);
    let h = TAU / n as f64;
    (0..n * n).map(|k| (z[k].conj() * zs[k]).im * (z[k].conj() * zt[k]).im).sum::<f64>() * h * h
}

fn cut_form(k1: &ClosedCurve, k2: &ClosedCurve, n: usize) -> Result<f64> {
    let (z, r2, v1, v2) = phase_grid(k1, k2, n);
    let arg: Vec<f64> = z.iter().map(|c| c.arg()).collect();
    let lift = |prev: f64, raw: f64| -> Result<f64> {
        let x = raw + TAU * ((prev - raw) / TAU).round();
        if (x - prev).abs() > 0.5 * PI {
            return Err(Error::Resolution(format!("angle jumps by {:.3} between adjacent nodes", x - prev)));
        }
        Ok(x)
    };
    let mut col0 = vec![arg[0]; n];
    for i in 1..n {
        col0[i] = lift(col0[i - 1], arg[i * n])?;
    }
    let h = TAU / n as f64;
    let mut s = 0.0;
    for i in 0..n {
        let mut prev = col0[i];
        for j in 0..n {
            let x = if j == 0 { prev } else { lift(prev, arg[i * n + j])? };
            prev = x;
            s += x * x.sin() / r2[i * n + j] * v1[i] * v2[j];
        }
    }
    Ok(0.25 * s * h * h)
}

/// Pair form of the mutual energy of two disjoint simply connected domains.
pub fn pair_theta_energy(d1: &PlanarDomain, d2: &PlanarDomain) -> Result<PairThetaEnergy> {
    if !d1.is_simply_connected() || !d2.is_simply_connected() {
        return Err(Error::Geometry("the pair form needs simply connected domains".into()));
    }
    let (k1, k2) = (&d1.components()[0].outer, &d2.components()[0].outer);
    let sep = k1.distance_to(k2);
    if sep < 1e-9 * k1.diameter().max(k2.diameter()) {
        return Err(Error::Geometry("the domains touch".into()));
    }
    let scale = k1.diameter().max(k2.diameter());
    let mut n = pow2_at_least((8 * k1.modes().max(k2.modes()) + 56).max((16.0 * scale / sep) as usize)).min(1024);
    let mut prev = pair_integral(k1, k2, n);
    let mut err = f64::INFINITY;
    while n < 1024 {
        n *= 2;
        let cur = pair_integral(k1, k2, n);
        err = (cur - prev).abs();
        prev = cur;
        if err < 1e-11 * (1.0 + cur.abs()) {
            break;
        }
    }
    Ok(PairThetaEnergy {
        value: prev / 8.0 - 0.5 * PI * PI,
        value_printed_sign: 0.5 * PI * PI - prev / 8.0,
        cut_form: cut_form(k1, k2, n)?,
        integral: Estimate { value: prev, error: err, n },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::energy::{boundary_energy, domain_energy};
    use crate::planar::mutual::mutual_energy_area;

    #[test]
    fn disk_angle_vanishes() {
        let d = PlanarDomain::disk(0.0, 0.0, 2.0).unwrap();
        let e = tangent_circle_energy(&d).unwrap();
        assert!(e.max_abs_theta < 1e-12);
        assert!((e.value - 0.75 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn ellipse_matches_domain_energy() {
        let d = PlanarDomain::simple(ClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0).unwrap()).unwrap();
        let e = tangent_circle_energy(&d).unwrap();
        let direct = boundary_energy(&d).unwrap().value + PI * PI / 4.0;
        assert!((e.value - direct).abs() < 1e-8, "{} {direct}", e.value);
        let v = domain_energy(&d).unwrap().value;
        assert!((e.value - v).abs() < 1e-3, "{} {v}", e.value);
    }

    #[test]
    fn angle_vanishes_at_the_diagonal() {
        let c = ClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0).unwrap();
        let th = |dt: f64| {
            let (p, tp) = c.point_d1(0.4);
            let (q, tq) = c.point_d1(0.4 + dt);
            signed_angle(&circle_tangent_at(&p, &q, &tq.normalize()), &tp.normalize()).abs()
        };
        let (a, b) = (th(1e-2), th(5e-3));
        assert!(a > 0.0 && b < 0.6 * a, "{a} {b}");
    }

    #[test]
    fn pair_form_matches_the_area_integral() {
        let d1 = PlanarDomain::disk(0.0, 0.0, 1.0).unwrap();
        let d2 = PlanarDomain::disk(4.0, 0.0, 1.0).unwrap();
        let e = pair_theta_energy(&d1, &d2).unwrap();
        let area = mutual_energy_area(&d1, &d2).unwrap().value;
        assert!((e.value - area).abs() < 1e-3 * (1.0 + area), "{} {area}", e.value);
        assert!((e.cut_form - area).abs() < 1e-3 * (1.0 + area), "{} {area}", e.cut_form);
        assert!((e.value_printed_sign + e.value).abs() < 1e-12);
        let swapped = pair_theta_energy(&d2, &d1).unwrap();
        assert!((swapped.value - e.value).abs() < 1e-9);
    }

    #[test]
    fn pair_form_decays_with_separation() {
        let d1 = PlanarDomain::disk(0.0, 0.0, 1.0).unwrap();
        let d2 = PlanarDomain::disk(30.0, 0.0, 1.0).unwrap();
        assert!(pair_theta_energy(&d1, &d2).unwrap().value.abs() < 1e-3);
    }
}
