//! Closed curves as truncated Fourier series of period 2π.
//!
//! Every curve is stored with vector-valued coefficients in three
//! coordinates; planar curves keep a zero third coordinate and carry
//! `dimension == 2`, which switches chord angles to the signed
//! convention.

use crate::error::{Error, Result};
use crate::quad::{bisect, GaussLegendre};
use nalgebra::{Matrix3, Vector3};
use crate::quad::OrderedSum;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

pub type Vec3 = Vector3<f64>;

/// Position and first three parametric derivatives at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    pub p: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
    pub d3: Vec3,
}

/// Unit-speed data at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub point: Vec3,
    pub tangent: Vec3,
    /// Signed in the plane, nonnegative in space.
    pub curvature: f64,
    /// Principal normal, present in space where the curvature is positive.
    pub normal: Option<Vec3>,
}

/// Angles attached to a chord `q - p` between two points of one curve.
#[derive(Debug, Clone, Copy)]
pub struct ChordData {
    pub p: Vec3,
    pub q: Vec3,
    pub r: f64,
    pub theta_p: f64,
    pub theta_q: f64,
    pub cos_tau: f64,
    pub sin_tau: f64,
    /// Set when a tangent is parallel to the chord, so the dihedral angle is undefined.
    pub dihedral_degenerate: bool,
}

/// Uniform samples of a curve with derivatives.
#[derive(Debug, Clone)]
pub struct CurveSamples {
    pub t: Vec<f64>,
    pub p: Vec<Vec3>,
    pub d1: Vec<Vec3>,
    pub d2: Vec<Vec3>,
}

impl CurveSamples {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn step(&self) -> f64 {
        TAU / self.t.len() as f64
    }
}

/// A smooth closed curve `K(t) = a0 + Σ a_k cos kt + b_k sin kt`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    dimension: usize,
    a0: Vec3,
    a: Vec<Vec3>,
    b: Vec<Vec3>,
}

impl ClosedCurve {
    /// Build a curve from vector coefficients and check regularity on a dense grid.
    pub fn new(dimension: usize, a0: Vec3, a: Vec<Vec3>, b: Vec<Vec3>) -> Result<Self> {
        if dimension != 2 && dimension != 3 {
            return Err(Error::Schema(format!("dimension must be 2 or 3, got {dimension}")));
        }
        if a.len() != b.len() {
            return Err(Error::Schema(format!(
                "cosine and sine coefficient lists differ in length ({} vs {})",
                a.len(),
                b.len()
            )));
        }
        if a.is_empty() {
            return Err(Error::DegenerateCurve("a closed curve needs at least one mode".into()));
        }
        let all = std::iter::once(&a0).chain(a.iter()).chain(b.iter());
        for v in all {
            if !v.iter().all(|x| x.is_finite()) {
                return Err(Error::Schema("non-finite coefficient".into()));
            }
        }
        let (mut a0, mut a, mut b) = (a0, a, b);
        if dimension == 2 {
            a0.z = 0.0;
            a.iter_mut().for_each(|v| v.z = 0.0);
            b.iter_mut().for_each(|v| v.z = 0.0);
        }
        let c = ClosedCurve { dimension, a0, a, b };
        c.check_regular()?;
        Ok(c)
    }

    fn check_regular(&self) -> Result<()> {
        let n = 16 * self.modes() + 64;
        let mut vmax: f64 = 0.0;
        let mut vmin = f64::INFINITY;
        let mut tmin = 0.0;
        for i in 0..n {
            let t = TAU * i as f64 / n as f64;
            let v = self.jet(t).d1.norm();
            vmax = vmax.max(v);
            if v < vmin {
                vmin = v;
                tmin = t;
            }
        }
        if !(vmax > 0.0) || vmin < 1e-9 * vmax {
            return Err(Error::DegenerateCurve(format!(
                "|K'(t)| = {vmin:e} near t = {tmin:.6} (max speed {vmax:e})"
            )));
        }
        Ok(())
    }

    /// Circle of radius `radius` around `center` in the plane spanned by
    /// the orthonormal pair `(e1, e2)`, traversed from `e1` towards `e2`.
    pub fn circle_in(center: Vec3, radius: f64, e1: Vec3, e2: Vec3) -> Result<Self> {
        let dim = if center.z == 0.0 && e1.z == 0.0 && e2.z == 0.0 { 2 } else { 3 };
        Self::new(dim, center, vec![e1 * radius], vec![e2 * radius])
    }

    /// Positively oriented planar circle.
    pub fn circle(cx: f64, cy: f64, radius: f64) -> Result<Self> {
        Self::circle_in(Vec3::new(cx, cy, 0.0), radius, Vec3::x(), Vec3::y())
    }

    /// Planar ellipse `(cx + a cos t, cy + b sin t)`.
    pub fn ellipse(cx: f64, cy: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(2, Vec3::new(cx, cy, 0.0), vec![Vec3::new(a, 0.0, 0.0)], vec![Vec3::new(0.0, b, 0.0)])
    }

    /// The (2,3) torus-knot trefoil `(sin t + 2 sin 2t, cos t - 2 cos 2t, -sin 3t)`.
    pub fn trefoil() -> Self {
        let z = Vec3::zeros();
        let a = vec![Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, -2.0, 0.0), z];
        let b = vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 0.0, -1.0)];
        Self::new(3, z, a, b).expect("trefoil coefficients are regular")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_planar(&self) -> bool {
        self.dimension == 2
    }

    pub fn modes(&self) -> usize {
        self.a.len()
    }

    pub fn a0(&self) -> Vec3 {
        self.a0
    }

    pub fn cos_coeffs(&self) -> &[Vec3] {
        &self.a
    }

    pub fn sin_coeffs(&self) -> &[Vec3] {
        &self.b
    }

    /// The same curve regarded as a space curve.
    pub fn to_space(&self) -> Self {
        ClosedCurve { dimension: 3, ..self.clone() }
    }

    /// Regard a space curve lying in `z = 0` as planar.
    pub fn to_plane(&self) -> Result<Self> {
        let scale = self.coefficient_scale();
        let off = std::iter::once(&self.a0).chain(&self.a).chain(&self.b).map(|v| v.z.abs()).fold(0.0, f64::max);
        if off > 1e-12 * scale {
            return Err(Error::Geometry(format!("curve leaves the plane z = 0 by {off:e}")));
        }
        ClosedCurve::new(2, self.a0, self.a.clone(), self.b.clone())
    }

    fn coefficient_scale(&self) -> f64 {
        self.a.iter().chain(&self.b).map(|v| v.norm()).fold(0.0, f64::max).max(1e-300)
    }

    /// Reverse the orientation: `t -> -t`.
    pub fn reversed(&self) -> Self {
        ClosedCurve { dimension: self.dimension, a0: self.a0, a: self.a.clone(), b: self.b.iter().map(|v| -v).collect() }
    }

    /// Apply `x -> m x + shift` to every point; exact on coefficients.
    pub fn affine(&self, m: &Matrix3<f64>, shift: Vec3) -> Result<Self> {
        let a0 = m * self.a0 + shift;
        let a = self.a.iter().map(|v| m * v).collect();
        let b = self.b.iter().map(|v| m * v).collect();
        let planar_ok = self.dimension == 2 && a0.z == 0.0 && m[(2, 0)] == 0.0 && m[(2, 1)] == 0.0;
        let dim = if planar_ok { 2 } else { 3 };
        ClosedCurve::new(dim, a0, a, b)
    }

    /// Truncate or zero-pad to `modes`.
    pub fn with_modes(&self, modes: usize) -> Result<Self> {
        let mut a = self.a.clone();
        let mut b = self.b.clone();
        a.resize(modes, Vec3::zeros());
        b.resize(modes, Vec3::zeros());
        ClosedCurve::new(self.dimension, self.a0, a, b)
    }

    /// Point, derivatives up to third order.
    pub fn jet(&self, t: f64) -> Jet {
        let (s1, c1) = t.sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut p = self.a0;
        let mut d1 = Vec3::zeros();
        let mut d2 = Vec3::zeros();
        let mut d3 = Vec3::zeros();
        for (k0, (ak, bk)) in self.a.iter().zip(&self.b).enumerate() {
            let k = (k0 + 1) as f64;
            let cc = ak * c + bk * s;
            let ss = bk * c - ak * s;
            p += cc;
            d1 += ss * k;
            d2 -= cc * (k * k);
            d3 -= ss * (k * k * k);
            let nc = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = nc;
        }
        Jet { p, d1, d2, d3 }
    }

    pub fn point(&self, t: f64) -> Vec3 {
        let (s1, c1) = t.sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut p = self.a0;
        for (ak, bk) in self.a.iter().zip(&self.b) {
            p += ak * c + bk * s;
            let nc = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = nc;
        }
        p
    }

    /// Point and first derivative.
    pub fn point_d1(&self, t: f64) -> (Vec3, Vec3) {
        let (s1, c1) = t.sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut p = self.a0;
        let mut d1 = Vec3::zeros();
        for (k0, (ak, bk)) in self.a.iter().zip(&self.b).enumerate() {
            let k = (k0 + 1) as f64;
            p += ak * c + bk * s;
            d1 += (bk * c - ak * s) * k;
            let nc = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = nc;
        }
        (p, d1)
    }

    /// `n` uniform samples `t_j = 2πj/n`.
    pub fn samples(&self, n: usize) -> CurveSamples {
        let t: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
        let jets: Vec<Jet> = t.par_iter().map(|&t| self.jet(t)).collect();
        CurveSamples {
            p: jets.iter().map(|j| j.p).collect(),
            d1: jets.iter().map(|j| j.d1).collect(),
            d2: jets.iter().map(|j| j.d2).collect(),
            t,
        }
    }

    /// Grid size that resolves the band limit of this curve comfortably.
    pub fn default_grid(&self) -> usize {
        crate::quad::pow2_at_least(16 * self.modes() + 128)
    }

    /// Unit tangent, curvature and (in space) principal normal at `t`.
    pub fn eval_frame(&self, t: f64) -> Result<Frame> {
        let j = self.jet(t);
        let speed = j.d1.norm();
        if speed < 1e-12 * self.coefficient_scale() {
            return Err(Error::DegenerateCurve(format!("|K'({t})| = {speed:e}")));
        }
        let tangent = j.d1 / speed;
        let cr = j.d1.cross(&j.d2);
        if self.is_planar() {
            Ok(Frame { point: j.p, tangent, curvature: cr.z / speed.powi(3), normal: None })
        } else {
            let kappa = cr.norm() / speed.powi(3);
            let perp = j.d2 - tangent * j.d2.dot(&tangent);
            let normal = if kappa > 1e-12 { Some(perp / perp.norm()) } else { None };
            Ok(Frame { point: j.p, tangent, curvature: kappa, normal })
        }
    }

    /// Curvature at `t` (signed in the plane).
    pub fn curvature(&self, t: f64) -> f64 {
        let j = self.jet(t);
        let cr = j.d1.cross(&j.d2);
        let s3 = j.d1.norm().powi(3);
        if self.is_planar() {
            cr.z / s3
        } else {
            cr.norm() / s3
        }
    }

    /// Length by the periodic trapezoid rule on `n` nodes.
    pub fn arclength_n(&self, n: usize) -> f64 {
        let h = TAU / n as f64;
        (0..n).into_par_iter().map(|j| self.point_d1(h * j as f64).1.norm()).ordered_sum() * h
    }

    pub fn arclength(&self) -> f64 {
        self.arclength_n(self.default_grid())
    }

    /// `∮ κ ds`, signed for planar curves.
    pub fn total_curvature(&self) -> f64 {
        let n = self.default_grid();
        let h = TAU / n as f64;
        (0..n)
            .map(|j| {
                let jt = self.jet(h * j as f64);
                let cr = jt.d1.cross(&jt.d2);
                let s2 = jt.d1.norm_squared();
                if self.is_planar() {
                    cr.z / s2
                } else {
                    cr.norm() / s2
                }
            })
            .sum::<f64>()
            * h
    }

    /// Signed enclosed area of a planar curve (positive when counter-clockwise).
    pub fn signed_area(&self) -> f64 {
        let n = self.default_grid();
        let h = TAU / n as f64;
        0.5 * (0..n)
            .map(|j| {
                let (p, d) = self.point_d1(h * j as f64);
                p.x * d.y - p.y * d.x
            })
            .sum::<f64>()
            * h
    }

    /// Largest pairwise distance between samples.
    pub fn diameter(&self) -> f64 {
        let s = self.samples(crate::quad::pow2_at_least(8 * self.modes() + 128).min(1024));
        let pts = &s.p;
        (0..pts.len())
            .into_par_iter()
            .map(|i| pts[i + 1..].iter().map(|q| (q - pts[i]).norm()).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max)
    }

    /// Centre of the axis-aligned bounding box and its half-diagonal.
    pub fn bounding_ball(&self) -> (Vec3, f64) {
        let s = self.samples(self.default_grid());
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for p in &s.p {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let c = 0.5 * (lo + hi);
        let r = s.p.iter().map(|p| (p - c).norm()).fold(0.0, f64::max);
        (c, r)
    }

    /// Extreme values of the curvature on a dense grid: `(min, max)`.
    pub fn curvature_range(&self) -> (f64, f64) {
        let n = self.default_grid();
        (0..n)
            .map(|j| self.curvature(TAU * j as f64 / n as f64))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), k| (lo.min(k), hi.max(k)))
    }

    /// Smallest distance between two points of the curve at a doubly
    /// critical chord (a local minimum of `|K(s) - K(t)|` away from the
    /// diagonal).  Infinite for curves without such chords, e.g. convex ones.
    pub fn min_self_distance(&self) -> f64 {
        let n = crate::quad::pow2_at_least(8 * self.modes() + 256).min(2048);
        let pts = self.samples(n).p;
        let d2 = |i: usize, j: usize| (pts[i % n] - pts[j % n]).norm_squared();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut best = f64::INFINITY;
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let v = d2(i, j);
                    if v >= best {
                        continue;
                    }
                    let mut is_min = true;
                    'nb: for di in [n - 1, 0, 1] {
                        for dj in [n - 1, 0, 1] {
                            if di == 0 && dj == 0 {
                                continue;
                            }
                            if d2(i + di, j + dj) < v {
                                is_min = false;
                                break 'nb;
                            }
                        }
                    }
                    if is_min {
                        best = v;
                    }
                }
                best
            })
            .reduce(|| f64::INFINITY, f64::min)
            .sqrt()
    }

    /// Distance between two curves, from dense samples.
    pub fn distance_to(&self, other: &ClosedCurve) -> f64 {
        let n = crate::quad::pow2_at_least(8 * self.modes().max(other.modes()) + 512).min(2048);
        let a = self.samples(n).p;
        let b = other.samples(n).p;
        a.par_iter()
            .map(|p| b.iter().map(|q| (q - p).norm_squared()).fold(f64::INFINITY, f64::min))
            .reduce(|| f64::INFINITY, f64::min)
            .sqrt()
    }

    /// Parameter of the point of the curve closest to `x`, with the distance.
    pub fn closest_point(&self, x: &Vec3, coarse: &CurveSamples) -> (f64, f64) {
        let mut best = 0;
        let mut bd = f64::INFINITY;
        for (i, p) in coarse.p.iter().enumerate() {
            let d = (p - x).norm_squared();
            if d < bd {
                bd = d;
                best = i;
            }
        }
        let h = coarse.step();
        let mut t = coarse.t[best];
        for _ in 0..30 {
            let j = self.jet(t);
            let r = j.p - x;
            let g = r.dot(&j.d1);
            let gp = j.d1.norm_squared() + r.dot(&j.d2);
            if gp <= 0.0 {
                break;
            }
            let step = (g / gp).clamp(-h, h);
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        (t, (self.point(t) - x).norm())
    }

    /// Chord angles for the chord from `K(s)` to `K(t)`.
    pub fn chord_data(&self, s: f64, t: f64) -> Result<ChordData> {
        let (p, dp) = self.point_d1(s);
        let (q, dq) = self.point_d1(t);
        chord_from_tangents(p, dp, q, dq, self.is_planar())
    }

    /// Fit `modes` Fourier modes to `n > 2 modes` uniform samples `K(2πj/n)`.
    pub fn fit(dimension: usize, samples: &[Vec3], modes: usize) -> Result<Self> {
        let (a0, a, b) = dft_coefficients(samples, modes)?;
        ClosedCurve::new(dimension, a0, a, b)
    }

    /// Sample `f` and refit with a growing number of modes until the
    /// residual at the staggered nodes falls below `tol` (absolute).
    pub fn fit_adaptive<F>(dimension: usize, f: F, tol: f64, start: usize, cap: usize) -> Result<(Self, f64)>
    where
        F: Fn(f64) -> Vec3 + Sync,
    {
        let mut m = start.max(4);
        loop {
            let n = 4 * m;
            let pts: Vec<Vec3> = (0..n).into_par_iter().map(|j| f(TAU * j as f64 / n as f64)).collect();
            let (a0, a, b) = dft_coefficients(&pts, m)?;
            let trial = ClosedCurve { dimension, a0, a, b };
            let res = (0..n)
                .into_par_iter()
                .map(|j| {
                    let t = TAU * (j as f64 + 0.5) / n as f64;
                    (trial.point(t) - f(t)).norm()
                })
                .reduce(|| 0.0, f64::max);
            if res <= tol {
                let trimmed = trim_modes(trial, tol * 1e-3);
                let c = ClosedCurve::new(dimension, trimmed.a0, trimmed.a, trimmed.b)?;
                return Ok((c, res));
            }
            if m >= cap {
                return Err(Error::Resolution(format!(
                    "Fourier refit residual {res:e} still above {tol:e} at the mode cap {cap}"
                )));
            }
            m = (2 * m).min(cap);
        }
    }

    /// Offset along the principal normal: `K(t) + δ n(t)`.
    pub fn parallel_curve3(&self, delta: f64) -> Result<(Self, f64)> {
        let n = self.default_grid();
        let mut kmin = f64::INFINITY;
        let mut tmin = 0.0;
        let mut kmax: f64 = 0.0;
        for j in 0..n {
            let t = TAU * j as f64 / n as f64;
            let jt = self.jet(t);
            let k = jt.d1.cross(&jt.d2).norm() / jt.d1.norm().powi(3);
            if k < kmin {
                kmin = k;
                tmin = t;
            }
            kmax = kmax.max(k);
        }
        let diam = self.diameter();
        if kmin < 1e-6 / diam {
            return Err(Error::VanishingCurvature { t: tmin, kappa: kmin });
        }
        let bound = (1.0 / kmax).min(0.5 * self.min_self_distance());
        if delta >= bound || delta <= 0.0 {
            return Err(Error::OffsetTooLarge { delta, bound });
        }
        let space = self.to_space();
        let f = |t: f64| {
            let j = space.jet(t);
            let tan = j.d1 / j.d1.norm();
            let perp = j.d2 - tan * j.d2.dot(&tan);
            j.p + perp * (delta / perp.norm())
        };
        let (c, res) = ClosedCurve::fit_adaptive(3, f, 1e-9 * diam, self.modes().max(8), 1024)?;
        Ok((c, res))
    }
}

/// Chord angles from raw points and (not necessarily unit) tangents.
pub fn chord_from_tangents(p: Vec3, dp: Vec3, q: Vec3, dq: Vec3, planar: bool) -> Result<ChordData> {
    let d = q - p;
    let r = d.norm();
    let scale = p.norm().max(q.norm()).max(1.0);
    if r < 1e-13 * scale {
        return Err(Error::NearDiagonal(r));
    }
    let tp = dp / dp.norm();
    let tq = dq / dq.norm();
    let np = tp.cross(&d);
    let nq = tq.cross(&d);
    let (npn, nqn) = (np.norm(), nq.norm());
    let degenerate = npn < 1e-14 * r || nqn < 1e-14 * r;
    let (cos_tau, sin_tau) = if degenerate {
        (0.0, 0.0)
    } else {
        (np.dot(&nq) / (npn * nqn), np.cross(&nq).dot(&d) / (npn * nqn * r))
    };
    let (theta_p, theta_q) = if planar {
        (angle2(&tp, &d), angle2(&tq, &d))
    } else {
        (npn.atan2(tp.dot(&d)), nqn.atan2(tq.dot(&d)))
    };
    Ok(ChordData { p, q, r, theta_p, theta_q, cos_tau, sin_tau, dihedral_degenerate: degenerate })
}

/// Oriented angle from `u` to `v` in the xy-plane, in (-π, π].
pub fn angle2(u: &Vec3, v: &Vec3) -> f64 {
    let a = (u.x * v.y - u.y * v.x).atan2(u.x * v.x + u.y * v.y);
    if a <= -PI {
        a + TAU
    } else {
        a
    }
}

fn dft_coefficients(samples: &[Vec3], modes: usize) -> Result<(Vec3, Vec<Vec3>, Vec<Vec3>)> {
    let n = samples.len();
    if n <= 2 * modes {
        return Err(Error::Config(format!("{n} samples cannot determine {modes} modes")));
    }
    use rustfft::{num_complex::Complex, FftPlanner};
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let mut a = vec![Vec3::zeros(); modes];
    let mut b = vec![Vec3::zeros(); modes];
    let mut a0 = Vec3::zeros();
    for c in 0..3 {
        let mut buf: Vec<Complex<f64>> = samples.iter().map(|p| Complex::new(p[c], 0.0)).collect();
        fft.process(&mut buf);
        a0[c] = buf[0].re / n as f64;
        for k in 1..=modes {
            a[k - 1][c] = 2.0 * buf[k].re / n as f64;
            b[k - 1][c] = -2.0 * buf[k].im / n as f64;
        }
    }
    Ok((a0, a, b))
}

fn trim_modes(mut c: ClosedCurve, tol: f64) -> ClosedCurve {
    while c.a.len() > 1 {
        let k = c.a.len() - 1;
        if c.a[k].norm() + c.b[k].norm() > tol {
            break;
        }
        c.a.pop();
        c.b.pop();
    }
    c
}

/// Adaptive Simpson quadrature, used by tests as an independent oracle.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Gauss-Legendre integral of a function of the curve parameter over a full period.
pub fn periodic_gauss(f: impl Fn(f64) -> f64, panels: usize) -> f64 {
    let g = GaussLegendre::g16();
    let h = TAU / panels as f64;
    (0..panels).map(|i| g.integrate(i as f64 * h, (i + 1) as f64 * h, &f)).sum()
}

/// Bisection root of `g` on a sign-changing bracket, to `1e-12` in the parameter.
pub fn refine_root(lo: f64, hi: f64, g: impl FnMut(f64) -> f64) -> f64 {
    bisect(lo, hi, g, 1e-12)
}
