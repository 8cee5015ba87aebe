//! The infinitesimal cross ratio `ω = dw ∧ dz / (w - z)²` on pairs of
//! distinct points of the plane, evaluated on explicit tangent vectors.

use crate::error::{Error, Result};
use nalgebra::Matrix4;
use num_complex::Complex64;

/// A tangent vector `(δw, δz)` to `ℂ × ℂ`.
pub type Tangent = (Complex64, Complex64);

/// Base point `(w, z)` with two tangent vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentPairFrame {
    pub w: Complex64,
    pub z: Complex64,
    pub v1: Tangent,
    pub v2: Tangent,
}

fn check(w: Complex64, z: Complex64) -> Result<()> {
    if (w - z).norm() <= 1e-300 || !(w - z).norm().is_finite() {
        return Err(Error::Geometry("the points of a cross-ratio frame must be distinct".into()));
    }
    Ok(())
}

/// `ω(v1, v2) = (δw₁ δz₂ - δw₂ δz₁) / (w - z)²`.
pub fn omega(w: Complex64, z: Complex64, v1: Tangent, v2: Tangent) -> Result<Complex64> {
    check(w, z)?;
    Ok((v1.0 * v2.1 - v2.0 * v1.1) / ((w - z) * (w - z)))
}

pub fn eval_omega_cr(frame: &TangentPairFrame) -> Result<Complex64> {
    omega(frame.w, frame.z, frame.v1, frame.v2)
}

/// `(α ∧ α)(v₁, v₂, v₃, v₄)` for a 2-form `α`.
pub fn wedge_square(alpha: impl Fn(Tangent, Tangent) -> f64, v: [Tangent; 4]) -> f64 {
    2.0 * (alpha(v[0], v[1]) * alpha(v[2], v[3]) - alpha(v[0], v[2]) * alpha(v[1], v[3])
        + alpha(v[0], v[3]) * alpha(v[1], v[2]))
}

/// `(da_w ∧ da_z)(v₁, ..., v₄)`: the determinant of the real coordinates.
pub fn area_product(v: [Tangent; 4]) -> f64 {
    Matrix4::from_fn(|i, j| {
        let (a, b) = v[j];
        [a.re, a.im, b.re, b.im][i]
    })
    .determinant()
}

/// `(Re ω ∧ Re ω, Im ω ∧ Im ω, 2 da_w da_z / |z - w|⁴)` on four tangent vectors.
pub fn squares(w: Complex64, z: Complex64, v: [Tangent; 4]) -> Result<(f64, f64, f64)> {
    check(w, z)?;
    let re = wedge_square(|a, b| omega(w, z, a, b).map(|c| c.re).unwrap_or(f64::NAN), v);
    let im = wedge_square(|a, b| omega(w, z, a, b).map(|c| c.im).unwrap_or(f64::NAN), v);
    Ok((re, im, 2.0 * area_product(v) / (z - w).norm_sqr().powi(2)))
}

/// Push a frame forward by a holomorphic map given with its derivative.
pub fn push_forward(frame: &TangentPairFrame, h: impl Fn(Complex64) -> Complex64, dh: impl Fn(Complex64) -> Complex64) -> TangentPairFrame {
    let (a, b) = (dh(frame.w), dh(frame.z));
    TangentPairFrame {
        w: h(frame.w),
        z: h(frame.z),
        v1: (a * frame.v1.0, b * frame.v1.1),
        v2: (a * frame.v2.0, b * frame.v2.1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_example() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let f = TangentPairFrame { w: zero, z: one, v1: (one, zero), v2: (zero, one) };
        assert!((eval_omega_cr(&f).unwrap() - one).norm() < 1e-15);
        let bad = TangentPairFrame { z: zero, ..f };
        assert!(eval_omega_cr(&bad).is_err());
    }

    #[test]
    fn squares_on_the_coordinate_frame() {
        let (o, i, z0) = (c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0));
        let basis = [(o, z0), (i, z0), (z0, o), (z0, i)];
        let (w, z) = (c(0.3, -1.0), c(2.0, 0.5));
        let (re, im, rhs) = squares(w, z, basis).unwrap();
        assert!((re - rhs).abs() < 1e-14 * rhs && (im - rhs).abs() < 1e-14 * rhs);
        assert!((area_product(basis) - 1.0).abs() < 1e-15);
    }

    fn tangent() -> impl Strategy<Value = Tangent> {
        (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, x, y)| (c(a, b), c(x, y)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn squares_identity(w in (-3.0..3.0f64, -3.0..3.0f64), z in (-3.0..3.0f64, -3.0..3.0f64),
                            v in [tangent(), tangent(), tangent(), tangent()]) {
            let (w, z) = (c(w.0, w.1), c(z.0, z.1));
            prop_assume!((w - z).norm() > 0.05);
            let (re, im, rhs) = squares(w, z, v).unwrap();
            let scale = 2.0 * 4.0f64.powi(4) / (z - w).norm_sqr().powi(2);
            prop_assert!((re - rhs).abs() < 1e-12 * scale);
            prop_assert!((im - rhs).abs() < 1e-12 * scale);
        }

        #[test]
        fn diagonal_moebius_invariance(w in (-3.0..3.0f64, -3.0..3.0f64), z in (-3.0..3.0f64, -3.0..3.0f64),
                                       v1 in tangent(), v2 in tangent()) {
            let (w, z) = (c(w.0, w.1), c(z.0, z.1));
            prop_assume!((w - z).norm() > 0.05 && w.norm() > 0.05 && z.norm() > 0.05);
            let f = TangentPairFrame { w, z, v1, v2 };
            let g = push_forward(&f, |x| x.inv(), |x| -(x * x).inv());
            let a = eval_omega_cr(&f).unwrap();
            let b = eval_omega_cr(&g).unwrap();
            prop_assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()) * 400.0);
            let m = push_forward(&f, |x| (c(2.0, 1.0) * x + c(0.5, 0.0)) / (c(0.3, -0.2) * x + c(1.0, 1.0)),
                |x| (c(2.0, 1.0) * c(1.0, 1.0) - c(0.5, 0.0) * c(0.3, -0.2)) / ((c(0.3, -0.2) * x + c(1.0, 1.0)).powi(2)));
            let e = eval_omega_cr(&m).unwrap();
            prop_assert!((a - e).norm() < 1e-10 * (1.0 + a.norm()));
        }

        #[test]
        fn antisymmetry(w in (-3.0..3.0f64, -3.0..3.0f64), v1 in tangent(), v2 in tangent()) {
            let (w, z) = (c(w.0, w.1), c(w.0 + 1.0, w.1 - 0.5));
            let a = omega(w, z, v1, v2).unwrap();
            let b = omega(w, z, v2, v1).unwrap();
            prop_assert!((a + b).norm() < 1e-14 * (1.0 + a.norm()));
            prop_assert!(omega(w, z, v1, v1).unwrap().norm() < 1e-14 * (1.0 + a.norm()));
        }
    }
}
