//! Bundled example curves and domains.

use crate::curve::{ClosedCurve, Vec3};
use crate::domain::PlanarDomain;
use crate::error::Result;
use crate::io::Document;
use crate::moebius::MoebiusMap;
use rand::Rng;

/// Unit disk.
pub fn disk() -> PlanarDomain {
    PlanarDomain::disk(0.0, 0.0, 1.0).expect("unit disk")
}

/// Annulus with radii 0.5 and 1.
pub fn annulus() -> PlanarDomain {
    PlanarDomain::annulus(0.5, 1.0).expect("annulus")
}

/// Ellipse with semi-axes 3 and 1.5 with two circular holes of radius 0.45.
pub fn two_hole() -> PlanarDomain {
    let outer = ClosedCurve::ellipse(0.0, 0.0, 3.0, 1.5).expect("ellipse");
    let holes = vec![
        ClosedCurve::circle(-1.2, 0.0, 0.45).expect("hole"),
        ClosedCurve::circle(1.2, 0.0, 0.45).expect("hole"),
    ];
    PlanarDomain::with_holes(outer, holes).expect("two-hole domain")
}

pub fn ellipse() -> ClosedCurve {
    ClosedCurve::ellipse(0.0, 0.0, 2.0, 1.0).expect("ellipse")
}

/// A convex planar curve with a three-fold wobble.
pub fn rounded_triangle() -> ClosedCurve {
    let a = vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.1, 0.0, 0.0)];
    let b = vec![Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, -0.1, 0.0)];
    ClosedCurve::new(2, Vec3::zeros(), a, b).expect("rounded triangle")
}

pub fn trefoil() -> ClosedCurve {
    ClosedCurve::trefoil()
}

/// Unit circle in the `xy`-plane, embedded in space.
pub fn unit_circle_space() -> ClosedCurve {
    ClosedCurve::circle_in(Vec3::zeros(), 1.0, Vec3::x(), Vec3::y()).expect("circle")
}

/// Two coaxial unit circles at heights 0 and 1.
pub fn coaxial_circles() -> (ClosedCurve, ClosedCurve) {
    let b = ClosedCurve::circle_in(Vec3::z(), 1.0, Vec3::x(), Vec3::y()).expect("circle");
    (unit_circle_space(), b)
}

/// A once-linked pair of round circles with no mirror symmetry exchanging them.
pub fn hopf_pair() -> (ClosedCurve, ClosedCurve) {
    let e2 = Vec3::new(0.0, 0.4, 1.0).normalize();
    let b = ClosedCurve::circle_in(Vec3::new(0.5, 0.2, 0.0), 1.3, Vec3::x(), e2).expect("circle");
    (unit_circle_space(), b)
}

/// Unit circle `A` in the `xy`-plane and the circle of radius `rho` in the
/// `xz`-plane centred at `(√(1+ρ²), 0, 0)`, which meets every sphere
/// through `A` orthogonally; both are then inverted in the unit sphere
/// about `(5, 0, 0)`.  As `rho → ∞` the second circle tends to the axis
/// of `A`.
pub fn conjugate_pair(rho: f64) -> Result<(ClosedCurve, ClosedCurve)> {
    let a = unit_circle_space();
    let b = ClosedCurve::circle_in(Vec3::new((1.0 + rho * rho).sqrt(), 0.0, 0.0), rho, Vec3::x(), Vec3::z())?;
    let inv = MoebiusMap::inversion(Vec3::new(5.0, 0.0, 0.0), 1.0)?;
    Ok((inv.apply(&a)?, inv.apply(&b)?))
}

/// Random smooth star-shaped curve `r(t) = 1 + Σ (c_k cos kt + s_k sin kt)`
/// with modes `2..=modes`, refitted to Fourier form.  The perturbation is
/// scaled so the curve stays convex-ish and regular.
pub fn random_star(rng: &mut impl Rng, modes: usize, amplitude: f64) -> Result<ClosedCurve> {
    let coeffs: Vec<(f64, f64)> = (2..=modes)
        .map(|k| {
            let s = amplitude / (k * k) as f64;
            (s * (2.0 * rng.random::<f64>() - 1.0), s * (2.0 * rng.random::<f64>() - 1.0))
        })
        .collect();
    let radius = |t: f64| {
        1.0 + coeffs.iter().enumerate().map(|(i, (c, s))| {
            let k = (i + 2) as f64;
            c * (k * t).cos() + s * (k * t).sin()
        }).sum::<f64>()
    };
    let n = 16 * (modes + 2);
    let pts: Vec<Vec3> = (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            let r = radius(t);
            Vec3::new(r * t.cos(), r * t.sin(), 0.0)
        })
        .collect();
    ClosedCurve::fit(2, &pts, modes + 1)
}

/// Every bundled example with its file name.
pub fn all() -> Vec<(&'static str, Document)> {
    let (c1, c2) = coaxial_circles();
    let (h1, h2) = hopf_pair();
    let (j1, j2) = conjugate_pair(4.0).expect("conjugate pair");
    vec![
        ("disk", Document::Domain(disk())),
        ("annulus", Document::Domain(annulus())),
        ("two_hole", Document::Domain(two_hole())),
        ("ellipse", Document::Curve(ellipse())),
        ("rounded_triangle", Document::Curve(rounded_triangle())),
        ("trefoil", Document::Curve(trefoil())),
        ("unit_circle_space", Document::Curve(unit_circle_space())),
        ("coaxial_circles", Document::Curves(vec![c1, c2])),
        ("hopf_pair", Document::Curves(vec![h1, h2])),
        ("conjugate_pair", Document::Curves(vec![j1, j2])),
    ]
}
