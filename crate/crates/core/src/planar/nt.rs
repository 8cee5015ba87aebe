//! `E(K) = π²χ(Ω)/2 + ∫_{NT(Ω)} da_w da_z / |z - w|⁴`, where `NT(Ω)` is the
//! set of pairs such that every circle through `w` and `z` meets `K`.
//!
//! Circles through `w` and `z` have centres `m + λ n` on the bisector,
//! with `m = (w + z)/2` and `n ⟂ z - w`.  A boundary point `x` lies inside
//! the circle iff `A(x) - 2λ B(x) < 0`, with `A = |x - m|² - |z - w|²/4`
//! and `B = n·(x - m)`.  So for each boundary curve, the set of `λ` whose
//! circle misses it is a union of at most two intervals (curve entirely
//! outside, or entirely inside); the pair lies in `NT` iff the
//! intersection over all curves is empty.  `λ = ±∞` is the line.

use crate::curve::Vec3;
use crate::domain::PlanarDomain;
use crate::error::Result;
use crate::ig::{batching, run_batches, MCEstimate};
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Even-odd point location against dense boundary polygons.
pub struct DensePolygons {
    rings: Vec<Vec<(f64, f64)>>,
    lo: Vec3,
    hi: Vec3,
}

impl DensePolygons {
    pub fn new(domain: &PlanarDomain, n: usize) -> Self {
        let rings = domain.boundaries().iter().map(|b| b.samples(n).p.iter().map(|p| (p.x, p.y)).collect()).collect();
        let (lo, hi) = domain.bounding_box();
        DensePolygons { rings, lo, hi }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let mut inside = false;
        for ring in &self.rings {
            let n = ring.len();
            let mut j = n - 1;
            for i in 0..n {
                let (xi, yi) = ring[i];
                let (xj, yj) = ring[j];
                if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                    inside = !inside;
                }
                j = i;
            }
        }
        inside
    }

    /// Uniform point by rejection from the bounding box.
    pub fn sample(&self, rng: &mut impl Rng) -> Vec3 {
        loop {
            let x = self.lo.x + (self.hi.x - self.lo.x) * rng.random::<f64>();
            let y = self.lo.y + (self.hi.y - self.lo.y) * rng.random::<f64>();
            if self.contains(x, y) {
                return Vec3::new(x, y, 0.0);
            }
        }
    }

    pub fn rings(&self) -> &[Vec<(f64, f64)>] {
        &self.rings
    }
}

type Interval = (f64, f64);

fn intersect(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let mut out = Vec::new();
    for &(a0, a1) in a {
        for &(b0, b1) in b {
            let (lo, hi) = (a0.max(b0), a1.min(b1));
            if lo < hi {
                out.push((lo, hi));
            }
        }
    }
    out
}

/// Whether every circle (and the line) through `w` and `z` meets one of the rings.
pub fn in_nt(rings: &[Vec<(f64, f64)>], w: &Vec3, z: &Vec3) -> bool {
    let (mx, my) = (0.5 * (w.x + z.x), 0.5 * (w.y + z.y));
    let (dx, dy) = (z.x - w.x, z.y - w.y);
    let half2 = 0.25 * (dx * dx + dy * dy);
    let len = (4.0 * half2).sqrt();
    let (nx, ny) = (-dy / len, dx / len);
    let mut admissible = vec![(f64::NEG_INFINITY, f64::INFINITY)];
    for ring in rings {
        let (mut lo_out, mut hi_out) = (f64::NEG_INFINITY, f64::INFINITY);
        let (mut lo_in, mut hi_in) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut blocked = false;
        for &(x, y) in ring {
            let (ex, ey) = (x - mx, y - my);
            let a = ex * ex + ey * ey - half2;
            let b = nx * ex + ny * ey;
            if b == 0.0 {
                if a <= 0.0 {
                    lo_out = f64::INFINITY;
                } else {
                    lo_in = f64::INFINITY;
                }
                blocked |= a == 0.0;
                continue;
            }
            let c = a / (2.0 * b);
            if b > 0.0 {
                hi_out = hi_out.min(c);
                lo_in = lo_in.max(c);
            } else {
                lo_out = lo_out.max(c);
                hi_in = hi_in.min(c);
            }
        }
        if blocked {
            return true;
        }
        let mut union = Vec::new();
        if lo_out < hi_out {
            union.push((lo_out, hi_out));
        }
        if lo_in < hi_in {
            union.push((lo_in, hi_in));
        }
        admissible = intersect(&admissible, &union);
        if admissible.is_empty() {
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, Serialize)]
pub struct NtEstimate {
    /// `E(K)`.
    pub value: f64,
    pub std_error: f64,
    /// Fraction of sampled pairs that fell in `NT(Ω)`.
    pub nt_fraction: f64,
    pub integral: MCEstimate,
}

/// Monte Carlo evaluation over `Ω × Ω` with `samples` pairs.
pub fn nt_energy(domain: &PlanarDomain, samples: u64, seed: u64) -> Result<NtEstimate> {
    let m = domain.boundaries().iter().map(|b| b.modes()).max().unwrap_or(1);
    let poly = DensePolygons::new(domain, crate::quad::pow2_at_least(64 * m + 1024).min(8192));
    let area = domain.area();
    let (nb, per) = batching(samples);
    let [integral, frac] = run_batches(seed, nb, per, |rng| {
        let w = poly.sample(rng);
        let z = poly.sample(rng);
        if in_nt(poly.rings(), &w, &z) {
            let r2 = (z - w).norm_squared();
            Some([area * area / (r2 * r2), 1.0])
        } else {
            Some([0.0, 0.0])
        }
    });
    let chi = domain.euler_characteristic() as f64;
    Ok(NtEstimate {
        value: PI * PI * chi / 2.0 + integral.mean,
        std_error: integral.std_error,
        nt_fraction: frac.mean,
        integral,
    })
}
