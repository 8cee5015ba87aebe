//! Möbius transformations of the plane and of space, their action on
//! curves and domains, and a harness that measures how far a functional
//! moves under random admissible maps.

use crate::curve::{ClosedCurve, Vec3};
use crate::domain::PlanarDomain;
use crate::error::{Error, Result};
use crate::ig::circles::random_unit;
use crate::rng::stream;
use nalgebra::{Matrix3, Rotation3, Unit};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

/// One invertible building block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Primitive {
    /// `x ↦ c + R² (x - c)/|x - c|²`.
    Inversion { center: Vec3, radius: f64 },
    /// `x ↦ scale · rotation · x + translation`, with `rotation` orthogonal.
    Similarity { rotation: Matrix3<f64>, scale: f64, translation: Vec3 },
    /// Mirror in the plane through `point` with unit `normal`.
    Reflection { point: Vec3, normal: Vec3 },
}

impl Primitive {
    fn apply(&self, x: &Vec3) -> Option<Vec3> {
        match *self {
            Primitive::Inversion { center, radius } => {
                let d = x - center;
                let r2 = d.norm_squared();
                (r2 > 0.0).then(|| center + d * (radius * radius / r2))
            }
            Primitive::Similarity { rotation, scale, translation } => Some(rotation * x * scale + translation),
            Primitive::Reflection { point, normal } => Some(x - normal * (2.0 * (x - point).dot(&normal))),
        }
    }

    fn inverse_apply(&self, x: &Vec3) -> Option<Vec3> {
        match *self {
            Primitive::Similarity { rotation, scale, translation } => Some(rotation.transpose() * (x - translation) / scale),
            _ => self.apply(x),
        }
    }

    fn jacobian(&self, x: &Vec3) -> Matrix3<f64> {
        match *self {
            Primitive::Inversion { center, radius } => {
                let d = x - center;
                let r2 = d.norm_squared();
                let u = d / r2.sqrt();
                (Matrix3::identity() - u * u.transpose() * 2.0) * (radius * radius / r2)
            }
            Primitive::Similarity { rotation, scale, .. } => rotation * scale,
            Primitive::Reflection { normal, .. } => Matrix3::identity() - normal * normal.transpose() * 2.0,
        }
    }

    fn preserves_orientation(&self) -> bool {
        match self {
            Primitive::Similarity { rotation, .. } => rotation.determinant() > 0.0,
            _ => false,
        }
    }

    fn preserves_plane(&self) -> bool {
        match *self {
            Primitive::Inversion { center, .. } => center.z == 0.0,
            Primitive::Similarity { rotation, translation, .. } => {
                translation.z == 0.0 && (rotation * Vec3::z()).cross(&Vec3::z()).norm() < 1e-14
            }
            Primitive::Reflection { point, normal } => point.z == 0.0 && normal.z == 0.0,
        }
    }
}

/// A composition of primitives, applied first to last.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct MoebiusMap {
    pub steps: Vec<Primitive>,
}

impl MoebiusMap {
    pub fn identity() -> Self {
        MoebiusMap::default()
    }

    pub fn inversion(center: Vec3, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Config(format!("inversion radius must be positive, got {radius}")));
        }
        Ok(MoebiusMap { steps: vec![Primitive::Inversion { center, radius }] })
    }

    pub fn similarity(rotation: Matrix3<f64>, scale: f64, translation: Vec3) -> Result<Self> {
        if !(scale > 0.0) || (rotation.transpose() * rotation - Matrix3::identity()).norm() > 1e-10 {
            return Err(Error::Config("similarity needs an orthogonal matrix and a positive scale".into()));
        }
        Ok(MoebiusMap { steps: vec![Primitive::Similarity { rotation, scale, translation }] })
    }

    pub fn reflection(point: Vec3, normal: Vec3) -> Result<Self> {
        let n = normal.norm();
        if !(n > 0.0) {
            return Err(Error::Config("reflection normal must be nonzero".into()));
        }
        Ok(MoebiusMap { steps: vec![Primitive::Reflection { point, normal: normal / n }] })
    }

    /// `other ∘ self`.
    pub fn then(mut self, other: &MoebiusMap) -> Self {
        self.steps.extend(other.steps.iter().copied());
        self
    }

    pub fn apply_point(&self, x: &Vec3) -> Result<Vec3> {
        self.steps.iter().try_fold(*x, |p, s| s.apply(&p).ok_or_else(|| Error::Singular(format!("{x:?} is sent to infinity"))))
    }

    /// Derivative of the map at `x`.
    pub fn jacobian(&self, x: &Vec3) -> Result<Matrix3<f64>> {
        let mut p = *x;
        let mut j = Matrix3::identity();
        for s in &self.steps {
            j = s.jacobian(&p) * j;
            p = s.apply(&p).ok_or_else(|| Error::Singular(format!("{x:?} is sent to infinity")))?;
        }
        Ok(j)
    }

    pub fn preserves_orientation(&self) -> bool {
        self.steps.iter().filter(|s| !s.preserves_orientation()).count() % 2 == 0
    }

    pub fn preserves_plane(&self) -> bool {
        self.steps.iter().all(Primitive::preserves_plane)
    }

    /// Points sent to infinity; `None` stands for the point at infinity itself.
    pub fn singular_points(&self) -> Vec<Option<Vec3>> {
        let mut out = Vec::new();
        for (k, s) in self.steps.iter().enumerate() {
            if let Primitive::Inversion { center, .. } = s {
                let mut p = Some(*center);
                for prev in self.steps[..k].iter().rev() {
                    p = p.and_then(|x| prev.inverse_apply(&x));
                }
                out.push(p);
            }
        }
        out
    }

    /// Image of a closed curve, refitted until the residual is below `1e-9` of its diameter.
    pub fn apply(&self, k: &ClosedCurve) -> Result<ClosedCurve> {
        if self.steps.is_empty() {
            return Ok(k.clone());
        }
        let coarse = k.samples(k.default_grid());
        let diam = k.diameter();
        for x in self.singular_points().into_iter().flatten() {
            let (_, d) = k.closest_point(&x, &coarse);
            if d < 1e-6 * diam {
                return Err(Error::Singular(format!("the map sends a point of the curve near {x:?} to infinity")));
            }
        }
        let images: Vec<Vec3> = coarse.p.iter().map(|p| self.apply_point(p)).collect::<Result<_>>()?;
        let image_diam = images
            .iter()
            .map(|p| images.iter().map(|q| (q - p).norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let dim = if k.is_planar() && self.preserves_plane() { 2 } else { 3 };
        let f = |t: f64| self.apply_point(&k.point(t)).unwrap_or_else(|_| Vec3::repeat(f64::NAN));
        let (c, _) = ClosedCurve::fit_adaptive(dim, f, 1e-9 * image_diam, k.modes().max(8), 4096)?;
        Ok(c)
    }

    /// Image of a planar domain; only maps keeping the domain compact are accepted.
    pub fn apply_domain(&self, d: &PlanarDomain) -> Result<PlanarDomain> {
        if !self.preserves_plane() {
            return Err(Error::Config("the map does not preserve the plane".into()));
        }
        for s in self.singular_points() {
            match s {
                None => return Err(Error::Singular("the map sends infinity to a finite point".into())),
                Some(x) if d.contains(&x) => {
                    return Err(Error::Singular("the image of a compact domain would be unbounded".into()))
                }
                _ => {}
            }
        }
        let images = d.boundaries().into_iter().map(|b| self.apply(b)).collect::<Result<Vec<_>>>()?;
        PlanarDomain::from_boundaries(images)
    }
}

/// Distance from `x` to the circle with centre `o`, radius `rho` and unit normal `b`.
fn distance_to_circle(x: &Vec3, o: &Vec3, rho: f64, b: &Vec3) -> f64 {
    let v = x - o;
    let h = v.dot(b);
    let w = (v - b * h).norm();
    (h * h + (w - rho).powi(2)).sqrt()
}

/// Smallest distance from `x` to the curve and to its osculating circles
/// on a dense grid.
pub fn curvature_tube_distance(k: &ClosedCurve, x: &Vec3) -> f64 {
    let n = k.default_grid();
    let diam = k.diameter();
    (0..n)
        .map(|i| {
            let j = k.jet(TAU * i as f64 / n as f64);
            let speed = j.d1.norm();
            let t = j.d1 / speed;
            let cr = j.d1.cross(&j.d2);
            let kappa = cr.norm() / speed.powi(3);
            let near = (x - j.p).norm();
            if kappa * diam < 1e-9 {
                let v = x - j.p;
                return (v - t * v.dot(&t)).norm().min(near);
            }
            let b = cr / cr.norm();
            let normal = b.cross(&t);
            distance_to_circle(x, &(j.p + normal / kappa), 1.0 / kappa, &b).min(near)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Whether `x` lies at least `margin` away from the curvature tube of `k`.
pub fn is_safe_center(k: &ClosedCurve, x: &Vec3, margin: f64) -> bool {
    curvature_tube_distance(k, x) > margin
}

fn draw_center(curves: &[&ClosedCurve], rng: &mut impl Rng, planar: bool, margin: f64, budget: usize) -> Result<Vec3> {
    let pts: Vec<Vec3> = curves.iter().flat_map(|c| c.samples(256).p).collect();
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in &pts {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let diam = (hi - lo).norm();
    let (lo, hi) = (lo - Vec3::repeat(0.5 * diam), hi + Vec3::repeat(0.5 * diam));
    for _ in 0..budget {
        let mut x = Vec3::from_fn(|i, _| lo[i] + (hi[i] - lo[i]) * rng.random::<f64>());
        if planar {
            x.z = 0.0;
        }
        if curves.iter().all(|c| is_safe_center(c, &x, margin * diam)) {
            return Ok(x);
        }
    }
    Err(Error::Geometry(format!("no admissible inversion centre found in {budget} draws")))
}

/// An inversion centre outside the curvature tube and a radius equal to
/// the diameter of the curve.
pub fn safe_inversion_center(k: &ClosedCurve, seed: u64) -> Result<(Vec3, f64)> {
    let mut rng = stream(seed, 0);
    let c = draw_center(&[k], &mut rng, k.is_planar(), 0.1, 10_000)?;
    Ok((c, k.diameter()))
}

fn random_rotation(rng: &mut impl Rng, planar: bool) -> Matrix3<f64> {
    let axis = if planar { Vec3::z() } else { random_unit(rng) };
    *Rotation3::from_axis_angle(&Unit::new_normalize(axis), TAU * rng.random::<f64>()).matrix()
}

/// Functionals exercised by the invariance harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    /// `E(K)` of planar curves.
    PlanarK,
    /// `E(Ω)` of a planar domain.
    PlanarE,
    /// `E(K)` of space curves.
    SpaceE,
    Writhe,
    /// `E(K₁, K₂)`.
    Mutual,
}

impl std::str::FromStr for Functional {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "planar-K" | "planar-k" => Ok(Functional::PlanarK),
            "planar-E" | "planar-e" => Ok(Functional::PlanarE),
            "space-E" | "space-e" => Ok(Functional::SpaceE),
            "writhe" => Ok(Functional::Writhe),
            "mutual" => Ok(Functional::Mutual),
            _ => Err(Error::Config(format!("unknown functional '{s}'"))),
        }
    }
}

/// Input of an invariance run.
#[derive(Debug, Clone)]
pub enum Subject {
    Curves(Vec<ClosedCurve>),
    Domain(PlanarDomain),
}

/// Functional value on one image.
#[derive(Debug, Clone, Serialize)]
pub struct Trial {
    pub map: MoebiusMap,
    pub value: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub functional: Functional,
    pub base_value: f64,
    pub trials: Vec<Trial>,
    pub max_deviation: f64,
    /// Maps drawn but rejected as inadmissible.
    pub redraws: usize,
}

fn evaluate(f: Functional, s: &Subject) -> Result<f64> {
    match (f, s) {
        (Functional::PlanarE, Subject::Domain(d)) => Ok(crate::planar::domain_energy(d)?.value),
        (Functional::PlanarK, Subject::Domain(d)) => Ok(crate::planar::boundary_energy(d)?.value),
        (Functional::PlanarK, Subject::Curves(c)) => {
            let refs: Vec<&ClosedCurve> = c.iter().collect();
            Ok(crate::planar::curve_energy(&refs)?.value)
        }
        (Functional::SpaceE, Subject::Curves(c)) => {
            let refs: Vec<&ClosedCurve> = c.iter().collect();
            Ok(crate::space::space_energy(&refs)?.value)
        }
        (Functional::Writhe, Subject::Curves(c)) if c.len() == 1 => Ok(crate::space::writhe(&c[0])?.value),
        (Functional::Mutual, Subject::Curves(c)) if c.len() == 2 => Ok(crate::space::mutual_energy_space(&c[0], &c[1])?.value),
        _ => Err(Error::Config(format!("{f:?} does not apply to this input"))),
    }
}

fn image(map: &MoebiusMap, s: &Subject) -> Result<Subject> {
    Ok(match s {
        Subject::Curves(c) => Subject::Curves(c.iter().map(|k| map.apply(k)).collect::<Result<_>>()?),
        Subject::Domain(d) => Subject::Domain(map.apply_domain(d)?),
    })
}

/// A random admissible map for the subject: an inversion centred outside
/// the curvature tube (outside the domain for `E(Ω)`), followed by a
/// random similarity and, when orientation must be kept, a reflection.
pub fn random_admissible_map(f: Functional, s: &Subject, rng: &mut ChaCha8Rng) -> Result<MoebiusMap> {
    let (curves, planar): (Vec<&ClosedCurve>, bool) = match s {
        Subject::Curves(c) => (c.iter().collect(), f == Functional::PlanarK && c.iter().all(|k| k.is_planar())),
        Subject::Domain(d) => (d.boundaries(), true),
    };
    let diam = crate::cutoff::system_diameter(&curves);
    let center = loop {
        let c = draw_center(&curves, rng, planar, 0.25, 10_000)?;
        match s {
            Subject::Domain(d) if d.contains(&c) => continue,
            _ => break c,
        }
    };
    let radius = diam * (0.5 + 1.5 * rng.random::<f64>());
    let mut map = MoebiusMap::inversion(center, radius)?;
    let scale = 0.5 + 1.5 * rng.random::<f64>();
    let mut shift = Vec3::from_fn(|_, _| diam * (2.0 * rng.random::<f64>() - 1.0));
    if planar {
        shift.z = 0.0;
    }
    map = map.then(&MoebiusMap::similarity(random_rotation(rng, planar), scale, shift)?);
    if f == Functional::Writhe {
        let normal = if planar { Vec3::new(1.0, 0.0, 0.0) } else { random_unit(rng) };
        map = map.then(&MoebiusMap::reflection(center, normal)?);
    }
    Ok(map)
}

/// Evaluate `f` on `trials` random admissible images of `s`.
pub fn invariance_suite(f: Functional, s: &Subject, trials: usize, seed: u64) -> Result<InvarianceReport> {
    let base_value = evaluate(f, s)?;
    let results: Vec<(Option<Trial>, usize)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            let mut redraws = 0;
            for _ in 0..16 {
                let Ok(map) = random_admissible_map(f, s, &mut rng) else {
                    redraws += 1;
                    continue;
                };
                match image(&map, s).and_then(|img| evaluate(f, &img)) {
                    Ok(value) => return (Some(Trial { deviation: (value - base_value).abs(), map, value }), redraws),
                    Err(_) => redraws += 1,
                }
            }
            (None, redraws)
        })
        .collect();
    let redraws = results.iter().map(|r| r.1).sum();
    let trials: Vec<Trial> = results.into_iter().filter_map(|r| r.0).collect();
    let max_deviation = trials.iter().map(|t| t.deviation).fold(0.0, f64::max);
    Ok(InvarianceReport { functional: f, base_value, trials, max_deviation, redraws })
}
