//! Compact planar domains bounded by finitely many smooth closed curves.

use crate::curve::{ClosedCurve, CurveSamples, Vec3};
use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::quad::OrderedSum;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// One connected component: an outer boundary and the holes inside it.
#[derive(Debug, Clone)]
pub struct DomainComponent {
    pub outer: ClosedCurve,
    pub holes: Vec<ClosedCurve>,
}

/// A compact planar domain.  Outer boundaries are stored counter-clockwise
/// and holes clockwise, so the domain always lies to the left of each
/// boundary curve.
#[derive(Debug, Clone)]
pub struct PlanarDomain {
    components: Vec<DomainComponent>,
    coarse: Vec<CurveSamples>,
}

impl PlanarDomain {
    /// Build a domain; orientations are normalized and nesting is verified.
    pub fn new(components: Vec<DomainComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Geometry("a domain needs at least one component".into()));
        }
        let mut comps = Vec::with_capacity(components.len());
        for c in components {
            let outer = orient(c.outer, true)?;
            let holes = c.holes.into_iter().map(|h| orient(h, false)).collect::<Result<Vec<_>>>()?;
            comps.push(DomainComponent { outer, holes });
        }
        let coarse = comps
            .iter()
            .flat_map(|c| std::iter::once(&c.outer).chain(c.holes.iter()))
            .map(|b| b.samples(crate::quad::pow2_at_least(8 * b.modes() + 256).min(1024)))
            .collect();
        let d = PlanarDomain { components: comps, coarse };
        d.validate()?;
        Ok(d)
    }

    /// Simply connected domain bounded by `outer`.
    pub fn simple(outer: ClosedCurve) -> Result<Self> {
        Self::new(vec![DomainComponent { outer, holes: Vec::new() }])
    }

    pub fn with_holes(outer: ClosedCurve, holes: Vec<ClosedCurve>) -> Result<Self> {
        Self::new(vec![DomainComponent { outer, holes }])
    }

    pub fn disk(cx: f64, cy: f64, r: f64) -> Result<Self> {
        Self::simple(ClosedCurve::circle(cx, cy, r)?)
    }

    pub fn annulus(r_in: f64, r_out: f64) -> Result<Self> {
        Self::with_holes(ClosedCurve::circle(0.0, 0.0, r_out)?, vec![ClosedCurve::circle(0.0, 0.0, r_in)?])
    }

    fn validate(&self) -> Result<()> {
        let all = self.boundaries();
        for b in &all {
            if !b.is_planar() {
                return Err(Error::Schema("domain boundaries must be planar curves".into()));
            }
            let sd = b.min_self_distance();
            if sd < 1e-3 * b.diameter() {
                return Err(Error::Geometry(format!("boundary nearly self-intersects (gap {sd:e})")));
            }
        }
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                let d = all[i].distance_to(all[j]);
                if d < 1e-9 * all[i].diameter() {
                    return Err(Error::Geometry(format!("boundaries {i} and {j} touch")));
                }
                for (a, b) in [(i, j), (j, i)] {
                    let inside: Vec<bool> = (0..32)
                        .map(|k| winding_number(all[a], &all[b].point(TAU * k as f64 / 32.0)) != 0)
                        .collect();
                    if inside.iter().any(|&x| x) && inside.iter().any(|&x| !x) {
                        return Err(Error::Geometry(format!("boundaries {a} and {b} cross")));
                    }
                }
            }
        }
        for (ci, c) in self.components.iter().enumerate() {
            for h in &c.holes {
                if winding_number(&c.outer, &h.point(0.0)) == 0 {
                    return Err(Error::Geometry(format!("a hole of component {ci} lies outside its outer boundary")));
                }
            }
            for (cj, other) in self.components.iter().enumerate() {
                if ci == cj {
                    continue;
                }
                let p = other.outer.point(0.0);
                let inside_outer = winding_number(&c.outer, &p) != 0;
                let inside_hole = c.holes.iter().any(|h| winding_number(h, &p) != 0);
                if inside_outer && !inside_hole {
                    return Err(Error::Geometry(format!("components {ci} and {cj} overlap")));
                }
            }
        }
        Ok(())
    }

    pub fn components(&self) -> &[DomainComponent] {
        &self.components
    }

    /// All boundary curves, each oriented with the domain on its left.
    pub fn boundaries(&self) -> Vec<&ClosedCurve> {
        self.components.iter().flat_map(|c| std::iter::once(&c.outer).chain(c.holes.iter())).collect()
    }

    pub fn hole_count(&self) -> usize {
        self.components.iter().map(|c| c.holes.len()).sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.components.len() as i64 - self.hole_count() as i64
    }

    pub fn is_simply_connected(&self) -> bool {
        self.components.len() == 1 && self.components[0].holes.is_empty()
    }

    /// Total boundary length.
    pub fn perimeter(&self) -> f64 {
        self.boundaries().iter().map(|b| b.arclength()).sum()
    }

    pub fn area(&self) -> f64 {
        self.boundaries().iter().map(|b| b.signed_area()).sum()
    }

    /// `∮ κ ds` over the boundary with the induced orientation; `2πχ`.
    pub fn total_curvature(&self) -> f64 {
        self.boundaries().iter().map(|b| b.total_curvature()).sum()
    }

    pub fn diameter(&self) -> f64 {
        self.components.iter().map(|c| c.outer.diameter()).fold(0.0, f64::max).max(self.component_spread())
    }

    fn component_spread(&self) -> f64 {
        let mut m: f64 = 0.0;
        for a in &self.components {
            for b in &self.components {
                let pa = a.outer.bounding_ball();
                let pb = b.outer.bounding_ball();
                m = m.max((pa.0 - pb.0).norm() + pa.1 + pb.1);
            }
        }
        m
    }

    /// Axis-aligned bounding box `(lo, hi)` of the outer boundaries.
    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for (c, s) in self.components.iter().zip(self.outer_samples()) {
            let _ = c;
            for p in &s.p {
                lo = lo.inf(p);
                hi = hi.sup(p);
            }
        }
        (lo, hi)
    }

    fn outer_samples(&self) -> Vec<&CurveSamples> {
        let mut out = Vec::new();
        let mut k = 0;
        for c in &self.components {
            out.push(&self.coarse[k]);
            k += 1 + c.holes.len();
        }
        out
    }

    /// Distance from the boundary to the nearest focal or self-approach
    /// point: normal coordinates of width below this value are injective.
    pub fn reach(&self) -> f64 {
        let all = self.boundaries();
        let mut r = f64::INFINITY;
        for b in &all {
            let (lo, hi) = b.curvature_range();
            let kmax = lo.abs().max(hi.abs());
            r = r.min(1.0 / kmax).min(0.5 * b.min_self_distance());
        }
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                r = r.min(0.5 * all[i].distance_to(all[j]));
            }
        }
        r
    }

    /// Nearest boundary: `(boundary index, parameter, distance, inside)`.
    pub fn nearest_boundary(&self, x: &Vec3) -> (usize, f64, f64, bool) {
        let all = self.boundaries();
        let mut best = (0, 0.0, f64::INFINITY);
        for (i, (b, s)) in all.iter().zip(&self.coarse).enumerate() {
            let (t, d) = b.closest_point(x, s);
            if d < best.2 {
                best = (i, t, d);
            }
        }
        let (i, t, d) = best;
        let (p, dp) = all[i].point_d1(t);
        let n = Vec3::new(-dp.y, dp.x, 0.0);
        let inside = (x - p).dot(&n) > 0.0;
        (i, t, d, inside)
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        self.nearest_boundary(x).3
    }

    /// Signed distance, positive inside.
    pub fn signed_distance(&self, x: &Vec3) -> f64 {
        let (_, _, d, inside) = self.nearest_boundary(x);
        if inside {
            d
        } else {
            -d
        }
    }

    /// Inner parallel boundaries at distance `delta`.
    pub fn parallel_curve2(&self, delta: f64) -> Result<Vec<ClosedCurve>> {
        let bound = self.reach();
        if delta <= 0.0 || delta >= bound {
            return Err(Error::OffsetTooLarge { delta, bound });
        }
        let diam = self.diameter();
        self.boundaries()
            .into_iter()
            .map(|b| {
                let f = |t: f64| {
                    let (p, d) = b.point_d1(t);
                    let n = Vec3::new(-d.y, d.x, 0.0) / d.norm();
                    p + n * delta
                };
                ClosedCurve::fit_adaptive(2, f, 1e-9 * diam, b.modes().max(8), 1024).map(|(c, _)| c)
            })
            .collect()
    }

    /// Apply a point map to every boundary and rebuild the domain from
    /// the nesting of the image curves.  The map must keep the domain bounded.
    pub fn map_boundaries(&self, mut f: impl FnMut(&ClosedCurve) -> Result<ClosedCurve>) -> Result<Self> {
        let imgs: Vec<ClosedCurve> = self.boundaries().into_iter().map(&mut f).collect::<Result<_>>()?;
        Self::from_boundaries(imgs)
    }

    /// Assemble a domain from an unordered list of disjoint Jordan curves:
    /// curves at even nesting depth are outer boundaries.
    pub fn from_boundaries(curves: Vec<ClosedCurve>) -> Result<Self> {
        let n = curves.len();
        let probe: Vec<Vec3> = curves.iter().map(|c| c.point(0.0)).collect();
        let contains = |i: usize, j: usize| i != j && winding_number(&curves[i], &probe[j]) != 0;
        let depth: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| contains(i, j)).count()).collect();
        let mut comps = Vec::new();
        for i in 0..n {
            if depth[i] % 2 == 0 {
                let holes = (0..n)
                    .filter(|&j| depth[j] == depth[i] + 1 && contains(i, j))
                    .map(|j| curves[j].clone())
                    .collect();
                comps.push(DomainComponent { outer: curves[i].clone(), holes });
            }
        }
        Self::new(comps)
    }
}

fn orient(c: ClosedCurve, ccw: bool) -> Result<ClosedCurve> {
    if !c.is_planar() {
        return Err(Error::Schema("domain boundaries must have dimension 2".into()));
    }
    if (c.signed_area() > 0.0) == ccw {
        Ok(c)
    } else {
        Ok(c.reversed())
    }
}

/// Winding number of a planar curve around `x`, from dense samples.
pub fn winding_number(c: &ClosedCurve, x: &Vec3) -> i64 {
    let n = crate::quad::pow2_at_least(16 * c.modes() + 512);
    let mut total = 0.0;
    let mut prev = c.point(0.0) - x;
    for j in 1..=n {
        let cur = c.point(TAU * j as f64 / n as f64) - x;
        total += (prev.x * cur.y - prev.y * cur.x).atan2(prev.x * cur.x + prev.y * cur.y);
        prev = cur;
    }
    (total / TAU).round() as i64
}

/// Smooth partition-of-unity profile: 1 below `t_in`, 0 above `t_out`.
#[derive(Debug, Clone, Copy)]
pub struct Blend {
    pub t_in: f64,
    pub t_out: f64,
}

impl Blend {
    pub fn chi(&self, t: f64) -> f64 {
        if t <= self.t_in {
            return 1.0;
        }
        if t >= self.t_out {
            return 0.0;
        }
        let u = (t - self.t_in) / (self.t_out - self.t_in);
        let f = |x: f64| if x <= 0.0 { 0.0 } else { (-1.0 / x).exp() };
        f(1.0 - u) / (f(1.0 - u) + f(u))
    }
}

/// Normal-coordinate data of one boundary curve at trapezoid nodes in `s`.
#[derive(Debug, Clone)]
pub struct Collar {
    pub base: Vec<Vec3>,
    pub normal: Vec<Vec3>,
    pub kappa: Vec<f64>,
    /// `|K'(s)| Δs`.
    pub ds: Vec<f64>,
}

impl Collar {
    pub fn new(c: &ClosedCurve, ns: usize) -> Self {
        let s = c.samples(ns);
        let h = s.step();
        let mut out = Collar { base: s.p.clone(), normal: Vec::new(), kappa: Vec::new(), ds: Vec::new() };
        for i in 0..ns {
            let d1 = s.d1[i];
            let sp = d1.norm();
            out.normal.push(Vec3::new(-d1.y, d1.x, 0.0) / sp);
            out.kappa.push((d1.x * s.d2[i].y - d1.y * s.d2[i].x) / sp.powi(3));
            out.ds.push(sp * h);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn point(&self, i: usize, t: f64) -> Vec3 {
        self.base[i] + self.normal[i] * t
    }

    /// Area weight `(1 - κ t)|K'| Δs` per unit `dt`.
    pub fn jacobian(&self, i: usize, t: f64) -> f64 {
        (1.0 - self.kappa[i] * t) * self.ds[i]
    }
}

/// Quadrature nodes for integrals over a domain.
#[derive(Debug, Clone, Default)]
pub struct AreaRule {
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl AreaRule {
    pub fn integrate(&self, f: impl Fn(&Vec3) -> f64 + Sync) -> f64 {
        self.points.par_iter().zip(&self.weights).map(|(p, w)| w * f(p)).ordered_sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Star-shaped map `c + ρ (K(s) - c)` with Gauss-Legendre in `ρ`.
    /// Returns `None` when the domain is not star-shaped about its centroid.
    pub fn star(domain: &PlanarDomain, ns: usize, nr: usize) -> Option<Self> {
        if !domain.is_simply_connected() {
            return None;
        }
        let k = &domain.components()[0].outer;
        let s = k.samples(ns);
        let area = k.signed_area();
        let mut c = Vec3::zeros();
        for i in 0..ns {
            let (p, d) = (s.p[i], s.d1[i]);
            let w = (p.x * d.y - p.y * d.x) / 3.0 * s.step() / area;
            c += Vec3::new(p.x, p.y, 0.0) * w;
        }
        let g = GaussLegendre::new(nr);
        let mut rule = AreaRule::default();
        for i in 0..ns {
            let r = s.p[i] - c;
            let jac = r.x * s.d1[i].y - r.y * s.d1[i].x;
            if jac <= 0.0 {
                return None;
            }
            for (rho, w) in g.mapped(0.0, 1.0) {
                rule.points.push(c + r * rho);
                rule.weights.push(w * rho * jac * s.step());
            }
        }
        Some(rule)
    }

    /// General rule: Gauss-Legendre in normal coordinates on a collar of
    /// width `blend.t_out` (weighted by the blend) plus a Cartesian grid on
    /// the rest (weighted by its complement).
    pub fn blended(domain: &PlanarDomain, blend: Blend, ns: usize, h: f64) -> Self {
        let mut rule = AreaRule::default();
        let g = GaussLegendre::new(24);
        for b in domain.boundaries() {
            let col = Collar::new(b, ns);
            for i in 0..col.len() {
                for (t, w) in g.mapped(0.0, blend.t_in) {
                    rule.points.push(col.point(i, t));
                    rule.weights.push(w * col.jacobian(i, t));
                }
                for (t, w) in g.mapped(blend.t_in, blend.t_out) {
                    rule.points.push(col.point(i, t));
                    rule.weights.push(w * col.jacobian(i, t) * blend.chi(t));
                }
            }
        }
        let grid = interior_grid(domain, blend, h);
        rule.points.extend(grid.points);
        rule.weights.extend(grid.weights);
        rule
    }
}

/// Cartesian nodes carrying the weight `h² (1 - χ(d))` of the blended rule.
pub fn interior_grid(domain: &PlanarDomain, blend: Blend, h: f64) -> AreaRule {
    let (lo, hi) = domain.bounding_box();
    let nx = ((hi.x - lo.x) / h).ceil() as usize + 2;
    let ny = ((hi.y - lo.y) / h).ceil() as usize + 2;
    let x0 = 0.5 * (lo.x + hi.x) - 0.5 * h * nx as f64;
    let y0 = 0.5 * (lo.y + hi.y) - 0.5 * h * ny as f64;
    let nodes: Vec<(Vec3, f64)> = (0..nx * ny)
        .into_par_iter()
        .filter_map(|k| {
            let x = Vec3::new(x0 + h * (k % nx) as f64, y0 + h * (k / nx) as f64, 0.0);
            let (_, _, d, inside) = domain.nearest_boundary(&x);
            if !inside || d <= blend.t_in {
                return None;
            }
            let w = 1.0 - blend.chi(d);
            (w > 0.0).then_some((x, w * h * h))
        })
        .collect();
    AreaRule { points: nodes.iter().map(|n| n.0).collect(), weights: nodes.iter().map(|n| n.1).collect() }
}
