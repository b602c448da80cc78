//! Spherical curves gamma: I -> S^2 carried with two derivatives.

use std::fmt;
use std::sync::Arc;

use crate::interval::Interval;

pub type Vec3 = [f64; 3];

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn det3(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

type FrameFn = dyn Fn(f64) -> [Vec3; 3] + Send + Sync;

/// `theta -> (gamma, gamma', gamma'')` with `|gamma| = 1`.
#[derive(Clone)]
pub struct SpaceCurve {
    name: String,
    domain: Interval,
    frame: Arc<FrameFn>,
}

impl fmt::Debug for SpaceCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpaceCurve({} on [{}, {}])", self.name, self.domain.lo, self.domain.hi)
    }
}

impl SpaceCurve {
    /// Wrap an already-normalized curve.
    pub fn new(name: &str, domain: Interval, frame: impl Fn(f64) -> [Vec3; 3] + Send + Sync + 'static) -> Self {
        SpaceCurve { name: name.to_string(), domain, frame: Arc::new(frame) }
    }

    /// `(cos t, sin t, 1)/sqrt 2`: a small circle at height `1/sqrt 2`.
    pub fn helix_circle(domain: Interval) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        SpaceCurve::new("helix-circle", domain, move |t| {
            let (sn, cs) = t.sin_cos();
            [[s * cs, s * sn, s], [-s * sn, s * cs, 0.0], [-s * cs, -s * sn, 0.0]]
        })
    }

    /// The equator `(cos t, sin t, 0)`, a great circle.
    pub fn planar(domain: Interval) -> Self {
        SpaceCurve::new("planar", domain, |t| {
            let (sn, cs) = t.sin_cos();
            [[cs, sn, 0.0], [-sn, cs, 0.0], [-cs, -sn, 0.0]]
        })
    }

    /// Normalize `p / |p|` analytically, given `p, p', p''`.
    pub fn from_unnormalized(
        name: &str,
        domain: Interval,
        p: impl Fn(f64) -> [Vec3; 3] + Send + Sync + 'static,
    ) -> Self {
        SpaceCurve::new(name, domain, move |t| {
            let [p0, p1, p2] = p(t);
            let s2 = dot(&p0, &p0);
            let s = s2.sqrt();
            let pp = dot(&p0, &p1);
            let u = 1.0 / s;
            let u1 = -pp / (s2 * s);
            let u2 = -(dot(&p1, &p1) + dot(&p0, &p2)) / (s2 * s) + 3.0 * pp * pp / (s2 * s2 * s);
            let mut g = [[0.0; 3]; 3];
            for k in 0..3 {
                g[0][k] = u * p0[k];
                g[1][k] = u1 * p0[k] + u * p1[k];
                g[2][k] = u2 * p0[k] + 2.0 * u1 * p1[k] + u * p2[k];
            }
            g
        })
    }

    /// Componentwise polynomials (coefficients in increasing degree), normalized.
    pub fn from_polynomials(name: &str, domain: Interval, coeffs: [Vec<f64>; 3]) -> Self {
        SpaceCurve::from_unnormalized(name, domain, move |t| {
            let mut out = [[0.0; 3]; 3];
            for (k, c) in coeffs.iter().enumerate() {
                let (v, d1, d2) = poly_jet(c, t);
                out[0][k] = v;
                out[1][k] = d1;
                out[2][k] = d2;
            }
            out
        })
    }

    pub fn eval(&self, t: f64) -> [Vec3; 3] {
        (self.frame)(t)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn with_domain(&self, domain: Interval) -> Self {
        SpaceCurve { domain, ..self.clone() }
    }

    /// Largest `||gamma| - 1|` over a grid.
    pub fn norm_defect(&self, grid_n: usize) -> f64 {
        self.domain.grid(grid_n).into_iter().map(|t| (norm(&self.eval(t)[0]) - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn poly_jet(c: &[f64], t: f64) -> (f64, f64, f64) {
    let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for &a in c.iter().rev() {
        d2 = d2 * t + 2.0 * d1;
        d1 = d1 * t + v;
        v = v * t + a;
    }
    (v, d1, d2)
}

/// Minimum over the grid of `|det[gamma, gamma', gamma'']|`. Positive means
/// the curve escapes every great circle at grid resolution.
pub fn escaping_check(gamma: &SpaceCurve, grid_n: usize) -> f64 {
    gamma
        .domain
        .grid(grid_n.max(2))
        .into_iter()
        .map(|t| {
            let [g, g1, g2] = gamma.eval(t);
            det3(&g, &g1, &g2).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_jet_matches_closed_form() {
        // 1 + 2t + 3t^2 + t^3 at t = 2
        let (v, d1, d2) = poly_jet(&[1.0, 2.0, 3.0, 1.0], 2.0);
        assert_eq!((v, d1, d2), (25.0, 26.0, 18.0));
    }

    #[test]
    fn normalization_derivatives_match_finite_differences() {
        let g = SpaceCurve::from_polynomials("p", Interval::new(-1.0, 1.0).unwrap(), [vec![1.0], vec![0.0, 1.0], vec![0.0, 0.0, 0.5, 1.0]]);
        let h = 1e-5;
        for &t in &[-0.7, 0.1, 0.6] {
            let [a, a1, a2] = g.eval(t);
            let [p, _, _] = g.eval(t + h);
            let [m, _, _] = g.eval(t - h);
            for k in 0..3 {
                assert!(((p[k] - m[k]) / (2.0 * h) - a1[k]).abs() < 1e-8);
                assert!(((p[k] - 2.0 * a[k] + m[k]) / (h * h) - a2[k]).abs() < 1e-4);
            }
        }
        assert!(g.norm_defect(200) < 1e-12);
    }
}
