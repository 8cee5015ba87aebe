//! Small quadrature toolkit: Gauss-Legendre rules, graded panels and
//! bracketed root refinement.

use rayon::prelude::*;
use std::sync::OnceLock;

/// Parallel sum whose rounding does not depend on how work was split:
/// terms are collected in index order and added sequentially.
pub trait OrderedSum: IndexedParallelIterator<Item = f64> {
    fn ordered_sum(self) -> f64 {
        let terms: Vec<f64> = self.collect();
        terms.iter().sum()
    }
}

impl<I: IndexedParallelIterator<Item = f64>> OrderedSum for I {}

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared 16-point rule.
    pub fn g16() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(16))
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * x);
        }
        acc * h
    }

    /// Mapped nodes and weights on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (c + h * x, w * h))
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Split `[a, b]` into panels that start at width `h_left` / `h_right`
/// at the respective ends and double towards the middle.
pub fn graded_panels(a: f64, b: f64, h_left: f64, h_right: f64, max_width: f64) -> Vec<(f64, f64)> {
    let len = b - a;
    if len <= 0.0 {
        return Vec::new();
    }
    let mid = a + 0.5 * len;
    let mut left = Vec::new();
    let mut x = a;
    let mut h = h_left.min(0.5 * len).max(len * 1e-14);
    while x < mid {
        let nx = (x + h).min(mid);
        left.push((x, nx));
        x = nx;
        h = (2.0 * h).min(max_width);
    }
    let mut right = Vec::new();
    let mut x = b;
    let mut h = h_right.min(0.5 * len).max(len * 1e-14);
    while x > mid {
        let nx = (x - h).max(mid);
        right.push((nx, x));
        x = nx;
        h = (2.0 * h).min(max_width);
    }
    right.reverse();
    left.extend(right);
    left
}

/// Uniform panels of at most `max_width`.
pub fn uniform_panels(a: f64, b: f64, max_width: f64) -> Vec<(f64, f64)> {
    let n = ((b - a) / max_width).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    (0..n).map(|i| (a + i as f64 * h, a + (i + 1) as f64 * h)).collect()
}

/// Bisection on a bracket with `f(lo)` and `f(hi)` of opposite sign.
pub fn bisect(mut lo: f64, mut hi: f64, mut f: impl FnMut(f64) -> f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest power of two that is at least `n`.
pub fn pow2_at_least(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        let g = GaussLegendre::new(8);
        let v = g.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let s: f64 = g.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn graded_panels_cover_the_interval() {
        let p = graded_panels(0.0, 1.0, 1e-4, 1e-3, 0.1);
        assert_eq!(p.first().unwrap().0, 0.0);
        assert_eq!(p.last().unwrap().1, 1.0);
        for w in p.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
        assert!(p[0].1 - p[0].0 <= 1e-4 + 1e-18);
    }

    #[test]
    fn bisection_finds_sqrt_two() {
        let r = bisect(0.0, 2.0, |x| x * x - 2.0, 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }
}
