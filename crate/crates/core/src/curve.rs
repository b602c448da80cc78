//! C^2 curves on a compact interval, the C^2 metric, the cinematic defect,
//! the tangency parameter and the concrete family constructors.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::space_curve::{dot, norm, SpaceCurve, Vec3};

/// Value and first two derivatives at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn new(v: f64, d1: f64, d2: f64) -> Self {
        Jet { v, d1, d2 }
    }

    /// `|a-b| + |a'-b'| + |a''-b''|`
    #[inline]
    pub fn c2_gap(&self, o: &Jet) -> f64 {
        (self.v - o.v).abs() + (self.d1 - o.d1).abs() + (self.d2 - o.d2).abs()
    }

    /// `|a-b| + |a'-b'|`
    #[inline]
    pub fn c1_gap(&self, o: &Jet) -> f64 {
        (self.v - o.v).abs() + (self.d1 - o.d1).abs()
    }
}

/// Partial derivatives of a defining function `Phi(x, y)` in `x`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhiJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d11: f64,
    pub d12: f64,
    pub d22: f64,
}

/// `Phi: (x1, x2, y1, y2) -> R`, whose level sets `Phi(., y) = r` are graphs `x2 = f(x1)`.
pub trait DefiningFunction: Send + Sync {
    fn name(&self) -> &str;
    fn eval(&self, x: [f64; 2], y: [f64; 2]) -> PhiJet;
}

/// `Phi = x2 - y2 - (x1 - y1)^2`.
pub struct ParabolaDefining;

impl DefiningFunction for ParabolaDefining {
    fn name(&self) -> &str {
        "parabola"
    }
    fn eval(&self, x: [f64; 2], y: [f64; 2]) -> PhiJet {
        let u = x[0] - y[0];
        PhiJet { value: x[1] - y[1] - u * u, d1: -2.0 * u, d2: 1.0, d11: -2.0, d12: 0.0, d22: 0.0 }
    }
}

/// `Phi = |x - (y1, y2 - 1)| - 1`. Level `r` is the upper arc of the circle of
/// radius `1 + r` centred at `(y1, y2 - 1)`, passing near `(y1, y2 + r)`.
pub struct CircleDefining;

impl DefiningFunction for CircleDefining {
    fn name(&self) -> &str {
        "circle"
    }
    fn eval(&self, x: [f64; 2], y: [f64; 2]) -> PhiJet {
        let u = x[0] - y[0];
        let w = x[1] + 1.0 - y[1];
        let rho = (u * u + w * w).sqrt();
        let r3 = rho * rho * rho;
        PhiJet { value: rho - 1.0, d1: u / rho, d2: w / rho, d11: w * w / r3, d12: -u * w / r3, d22: u * u / r3 }
    }
}

pub fn defining_function_by_name(name: &str) -> Option<Arc<dyn DefiningFunction>> {
    match name {
        "circle" => Some(Arc::new(CircleDefining)),
        "parabola" => Some(Arc::new(ParabolaDefining)),
        _ => None,
    }
}

/// Newton's method for `Phi((x1, x2), y) = r` in `x2`, seeded at `x2 = r`.
pub fn solve_level(phi: &dyn DefiningFunction, y: [f64; 2], r: f64, x1: f64, tol: f64) -> Result<(f64, PhiJet)> {
    let mut x2 = r;
    let mut last = f64::INFINITY;
    for _ in 0..50 {
        let j = phi.eval([x1, x2], y);
        let res = j.value - r;
        last = res.abs();
        if last <= tol {
            return Ok((x2, j));
        }
        if !(j.d2.is_finite() && j.d2 != 0.0 && res.is_finite()) {
            break;
        }
        x2 -= res / j.d2;
    }
    Err(Error::NewtonDiverged { x1, residual: last })
}

fn implicit_jet(x2: f64, j: &PhiJet) -> Jet {
    let (p1, p2) = (j.d1, j.d2);
    let f1 = -p1 / p2;
    // implicit differentiation of Phi(x1, f(x1)) = r, twice
    let f2 = -(j.d11 * p2 * p2 - 2.0 * j.d12 * p1 * p2 + j.d22 * p1 * p1) / (p2 * p2 * p2);
    Jet::new(x2, f1, f2)
}

type JetFn = dyn Fn(f64) -> Jet + Send + Sync;

#[derive(Clone)]
pub enum Shape {
    /// Upper arc `b + sqrt(r^2 - (theta - a)^2)`.
    Circle { a: f64, b: f64, r: f64 },
    /// `gamma(theta) . z`
    Projection { gamma: SpaceCurve, z: Vec3 },
    /// Level set `Phi(., y) = r`.
    Implicit { phi: Arc<dyn DefiningFunction>, y: [f64; 2], r: f64, tol: f64 },
    Custom(Arc<JetFn>),
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Circle { a, b, r } => write!(f, "Circle(a={a}, b={b}, r={r})"),
            Shape::Projection { gamma, z } => write!(f, "Projection({}, z={z:?})", gamma.name()),
            Shape::Implicit { phi, y, r, .. } => write!(f, "Implicit({}, y={y:?}, r={r})", phi.name()),
            Shape::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A C^2 function on `domain`, evaluated analytically with both derivatives.
#[derive(Clone, Debug)]
pub struct C2Curve {
    shape: Shape,
    offset: f64,
    domain: Interval,
    label: String,
    smoothness: f64,
}

impl C2Curve {
    fn build(shape: Shape, domain: Interval, label: String) -> Self {
        let mut c = C2Curve { shape, offset: 0.0, domain, label, smoothness: 0.0 };
        c.smoothness = c.estimate_smoothness(513);
        c
    }

    /// Upper circular arc. Only requires the arc to be a graph over `domain`.
    pub fn circle(a: f64, b: f64, r: f64, domain: Interval) -> Result<Self> {
        let reach = (domain.lo - a).abs().max((domain.hi - a).abs());
        if !(r > 0.0) || reach >= r {
            return Err(Error::OutOfDomain {
                label: format!("circle(a={a}, b={b}, r={r})"),
                theta: if (domain.lo - a).abs() > (domain.hi - a).abs() { domain.lo } else { domain.hi },
            });
        }
        Ok(C2Curve::build(Shape::Circle { a, b, r }, domain, format!("circle(a={a:.6}, b={b:.6}, r={r:.6})")))
    }

    pub fn projection(gamma: &SpaceCurve, z: Vec3) -> Self {
        let label = format!("proj({:.6}, {:.6}, {:.6})", z[0], z[1], z[2]);
        C2Curve::build(Shape::Projection { gamma: gamma.clone(), z }, gamma.domain(), label)
    }

    /// Level curve of `phi`; Newton convergence is checked on a grid.
    pub fn implicit(phi: Arc<dyn DefiningFunction>, y: [f64; 2], r: f64, domain: Interval, tol: f64) -> Result<Self> {
        for x1 in domain.grid(65) {
            solve_level(phi.as_ref(), y, r, x1, tol)?;
        }
        let label = format!("{}(y=({:.6}, {:.6}), r={:.6})", phi.name(), y[0], y[1], r);
        Ok(C2Curve::build(Shape::Implicit { phi, y, r, tol }, domain, label))
    }

    pub fn custom(label: &str, domain: Interval, f: impl Fn(f64) -> Jet + Send + Sync + 'static) -> Self {
        C2Curve::build(Shape::Custom(Arc::new(f)), domain, label.to_string())
    }

    /// Same curve moved up by `dy`.
    pub fn shifted(&self, dy: f64) -> Self {
        let mut c = self.clone();
        c.offset += dy;
        c
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Bound on `|f'| + |f''| + |f'''|`, which is a Lipschitz constant for the
    /// jet; also bounds the first-order Taylor remainder constant.
    pub fn smoothness(&self) -> f64 {
        self.smoothness
    }

    pub fn jet(&self, t: f64) -> Jet {
        let mut j = match &self.shape {
            Shape::Circle { a, b, r } => {
                let u = t - a;
                let s = (r * r - u * u).sqrt();
                Jet::new(b + s, -u / s, -r * r / (s * s * s))
            }
            Shape::Projection { gamma, z } => {
                let [g, g1, g2] = gamma.eval(t);
                Jet::new(dot(&g, z), dot(&g1, z), dot(&g2, z))
            }
            Shape::Implicit { phi, y, r, tol } => match solve_level(phi.as_ref(), *y, *r, t, *tol) {
                Ok((x2, pj)) => implicit_jet(x2, &pj),
                Err(_) => Jet::new(f64::NAN, f64::NAN, f64::NAN),
            },
            Shape::Custom(f) => f(t),
        };
        j.v += self.offset;
        j
    }

    pub fn value(&self, t: f64) -> f64 {
        self.jet(t).v
    }

    pub fn sample(&self, grid_n: usize) -> Samples {
        let jets = self.domain.grid(grid_n).into_iter().map(|t| self.jet(t)).collect();
        Samples { domain: self.domain, jets }
    }

    fn estimate_smoothness(&self, n: usize) -> f64 {
        let s = self.sample(n);
        let h = self.domain.spacing(n);
        let mut best: f64 = 0.0;
        for w in s.jets.windows(2) {
            let d3 = (w[1].d2 - w[0].d2).abs() / h;
            best = best.max(w[0].d1.abs().max(w[1].d1.abs()) + w[0].d2.abs().max(w[1].d2.abs()) + d3);
        }
        1.25 * best + 1e-12
    }
}

/// A curve's jets on the `n`-point grid of its domain.
#[derive(Clone, Debug)]
pub struct Samples {
    pub domain: Interval,
    pub jets: Vec<Jet>,
}

impl Samples {
    pub fn n(&self) -> usize {
        self.jets.len()
    }

    pub fn theta(&self, i: usize) -> f64 {
        let n = self.n();
        if i + 1 == n {
            self.domain.hi
        } else {
            self.domain.lo + i as f64 * self.domain.spacing(n)
        }
    }

    /// Grid indices whose points lie in `sub`.
    pub fn index_range(&self, sub: &Interval) -> std::ops::Range<usize> {
        let n = self.n();
        let h = self.domain.spacing(n);
        let mut lo = ((sub.lo - self.domain.lo) / h).ceil().max(0.0) as usize;
        let mut hi = (((sub.hi - self.domain.lo) / h).floor().max(-1.0) + 1.0) as usize;
        hi = hi.min(n);
        while lo > 0 && sub.contains(self.theta(lo - 1)) {
            lo -= 1;
        }
        while lo < hi && !sub.contains(self.theta(lo)) {
            lo += 1;
        }
        while hi < n && sub.contains(self.theta(hi)) {
            hi += 1;
        }
        while hi > lo && !sub.contains(self.theta(hi - 1)) {
            hi -= 1;
        }
        lo..hi
    }
}

/// Raw grid extremes of `|f-g|+|f'-g'|+|f''-g''|` over all grid points.
pub fn c2_extremes(a: &Samples, b: &Samples) -> (f64, f64) {
    a.jets.iter().zip(&b.jets).fold((f64::INFINITY, 0.0f64), |(lo, hi), (x, y)| {
        let s = x.c2_gap(y);
        (lo.min(s), hi.max(s))
    })
}

/// Tangency parameter from cached samples: minimum of `|h| + |h'|` at the
/// grid points lying in the central half of the domain.
pub fn tangency_from_samples(a: &Samples, b: &Samples) -> f64 {
    let r = a.index_range(&a.domain.half());
    a.jets[r.clone()].iter().zip(&b.jets[r]).map(|(x, y)| x.c1_gap(y)).fold(f64::INFINITY, f64::min)
}

fn same_domain(f: &C2Curve, g: &C2Curve) -> Result<()> {
    let (a, b) = (f.domain, g.domain);
    if a != b {
        return Err(Error::DomainMismatch(a.lo, a.hi, b.lo, b.hi));
    }
    Ok(())
}

fn check_grid(grid_n: usize) -> Result<()> {
    if grid_n < 2 {
        return Err(Error::Precondition(format!("grid_n must be at least 2, got {grid_n}")));
    }
    Ok(())
}

/// Grid approximation of `||f - g||_{C^2}`.
pub fn c2_distance(f: &C2Curve, g: &C2Curve, grid_n: usize) -> Result<f64> {
    same_domain(f, g)?;
    check_grid(grid_n)?;
    Ok(c2_extremes(&f.sample(grid_n), &g.sample(grid_n)).1)
}

/// Upper bound for the true supremum: grid maximum plus a Lipschitz slack.
pub fn c2_distance_upper(f: &C2Curve, g: &C2Curve, grid_n: usize) -> Result<f64> {
    let h = f.domain.spacing(grid_n.max(2));
    Ok(c2_distance(f, g, grid_n)? + 0.5 * h * (f.smoothness + g.smoothness))
}

/// `Delta(f, g)`: minimum of `|f-g| + |f'-g'|` over the grid points in `J/2`.
pub fn tangency_param(f: &C2Curve, g: &C2Curve, grid_n: usize) -> Result<f64> {
    same_domain(f, g)?;
    check_grid(grid_n)?;
    Ok(tangency_from_samples(&f.sample(grid_n), &g.sample(grid_n)))
}

/// Lower bound for the true infimum of `|f-g| + |f'-g'|` on `J/2`.
pub fn tangency_param_lower(f: &C2Curve, g: &C2Curve, grid_n: usize) -> Result<f64> {
    let h = f.domain.spacing(grid_n.max(2));
    Ok((tangency_param(f, g, grid_n)? - 0.5 * h * (f.smoothness + g.smoothness)).max(0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyKind {
    Circle,
    Projection(String),
    Implicit(String),
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyStats {
    /// Min over pairs of (grid min)/(grid max) of the C^2 gap.
    pub defect: f64,
    /// `1 / defect`
    pub cinematic_k: f64,
    pub diameter: f64,
    pub min_separation: f64,
}

#[derive(Clone, Debug)]
pub struct CurveFamily {
    pub curves: Vec<C2Curve>,
    pub domain: Interval,
    pub kind: FamilyKind,
    pub stats: Option<FamilyStats>,
}

impl CurveFamily {
    pub fn new(curves: Vec<C2Curve>, kind: FamilyKind) -> Result<Self> {
        let domain = curves.first().ok_or_else(|| Error::Precondition("empty family".into()))?.domain;
        for c in &curves {
            same_domain(&curves[0], c)?;
        }
        Ok(CurveFamily { curves, domain, kind, stats: None })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn sample_all(&self, grid_n: usize) -> Vec<Samples> {
        self.curves.par_iter().map(|c| c.sample(grid_n)).collect()
    }

    /// Pair scan producing the defect, diameter and separation.
    pub fn analyze(&self, grid_n: usize) -> Result<FamilyStats> {
        check_grid(grid_n)?;
        if self.len() < 2 {
            return Err(Error::Precondition("cinematic analysis needs at least two curves".into()));
        }
        let s = self.sample_all(grid_n);
        let n = self.len();
        let per_i: Vec<Result<(f64, f64, f64)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = (f64::INFINITY, 0.0f64, f64::INFINITY);
                for j in i + 1..n {
                    let (lo, hi) = c2_extremes(&s[i], &s[j]);
                    if hi == 0.0 {
                        return Err(Error::DuplicateCurve(i, j));
                    }
                    acc = (acc.0.min(lo / hi), acc.1.max(hi), acc.2.min(hi));
                }
                Ok(acc)
            })
            .collect();
        let mut defect = f64::INFINITY;
        let mut diameter: f64 = 0.0;
        let mut min_separation = f64::INFINITY;
        for r in per_i {
            let (d, hi, lo) = r?;
            defect = defect.min(d);
            diameter = diameter.max(hi);
            min_separation = min_separation.min(lo);
        }
        Ok(FamilyStats { defect, cinematic_k: 1.0 / defect, diameter, min_separation })
    }

    pub fn with_stats(mut self, grid_n: usize) -> Result<Self> {
        self.stats = Some(self.analyze(grid_n)?);
        Ok(self)
    }

    /// Drop curves closer than `delta` (in C^2 distance) to an earlier one.
    pub fn dedup(&self, delta: f64, grid_n: usize) -> (CurveFamily, usize) {
        let s = self.sample_all(grid_n);
        let mut keep: Vec<usize> = Vec::new();
        for i in 0..self.len() {
            if keep.iter().all(|&k| c2_extremes(&s[k], &s[i]).1 >= delta) {
                keep.push(i);
            }
        }
        let dropped = self.len() - keep.len();
        let curves = keep.into_iter().map(|i| self.curves[i].clone()).collect();
        (CurveFamily { curves, domain: self.domain, kind: self.kind.clone(), stats: None }, dropped)
    }
}

/// Min over distinct pairs of (min gap)/(max gap). The family is cinematic
/// with constant `K` iff this is at least `1/K`.
pub fn cinematic_defect(fam: &CurveFamily, grid_n: usize) -> Result<f64> {
    Ok(fam.analyze(grid_n)?.defect)
}

/// Circles `b_i + sqrt(r_i^2 - (theta - a_i)^2)` with radii in `[1, 2]` and
/// centres within 0.1 of the origin, on a window inside `[-1/2, 1/2]`.
pub fn circle_family(centers: &[[f64; 2]], radii: &[f64], j: Interval) -> Result<CurveFamily> {
    if centers.len() != radii.len() {
        return Err(Error::Precondition(format!("{} centres but {} radii", centers.len(), radii.len())));
    }
    if !Interval::unit_centered().contains_interval(&j) {
        return Err(Error::Precondition(format!("window [{}, {}] leaves [-1/2, 1/2]", j.lo, j.hi)));
    }
    let mut curves = Vec::with_capacity(radii.len());
    for (c, &r) in centers.iter().zip(radii) {
        if !(1.0..=2.0).contains(&r) {
            return Err(Error::Precondition(format!("radius {r} outside [1, 2]")));
        }
        if (c[0] * c[0] + c[1] * c[1]).sqrt() > 0.1 {
            return Err(Error::Precondition(format!("centre {c:?} farther than 0.1 from the origin")));
        }
        curves.push(C2Curve::circle(c[0], c[1], r, j)?);
    }
    CurveFamily::new(curves, FamilyKind::Circle)
}

/// Curves `theta -> gamma(theta) . z` for `z` in the unit ball.
pub fn projection_family(gamma: &SpaceCurve, zs: &[Vec3]) -> Result<CurveFamily> {
    let mut curves = Vec::with_capacity(zs.len());
    for z in zs {
        if norm(z) > 1.0 + 1e-12 {
            return Err(Error::Precondition(format!("point {z:?} outside the unit ball")));
        }
        curves.push(C2Curve::projection(gamma, *z));
    }
    CurveFamily::new(curves, FamilyKind::Projection(gamma.name().to_string()))
}

/// Diagnostics from building an implicit family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImplicitReport {
    pub min_dphi2: f64,
    pub max_dphi2: f64,
    /// Min of `|det d_y (Phi_1, Phi_11 / |grad Phi|)|` along the curves.
    pub min_det: f64,
    pub det_warning: bool,
}

pub const DET_THRESHOLD: f64 = 1e-6;

fn det_map(phi: &dyn DefiningFunction, x: [f64; 2], y: [f64; 2]) -> [f64; 2] {
    let j = phi.eval(x, y);
    [j.d1, j.d11 / (j.d1 * j.d1 + j.d2 * j.d2).sqrt()]
}

/// The y-Jacobian determinant, by central differences in `y`.
fn y_jacobian_det(phi: &dyn DefiningFunction, x: [f64; 2], y: [f64; 2]) -> f64 {
    let h = 1e-5;
    let col = |k: usize| {
        let mut yp = y;
        let mut ym = y;
        yp[k] += h;
        ym[k] -= h;
        let (p, m) = (det_map(phi, x, yp), det_map(phi, x, ym));
        [(p[0] - m[0]) / (2.0 * h), (p[1] - m[1]) / (2.0 * h)]
    };
    let (c0, c1) = (col(0), col(1));
    c0[0] * c1[1] - c0[1] * c1[0]
}

/// One curve `f_{y,r}` per parameter pair, from the level sets of `phi`.
pub fn family_from_defining_function(
    phi: Arc<dyn DefiningFunction>,
    ys: &[[f64; 2]],
    rs: &[f64],
    i: Interval,
    newton_tol: f64,
) -> Result<(CurveFamily, ImplicitReport)> {
    if ys.len() != rs.len() {
        return Err(Error::Precondition(format!("{} parameters y but {} levels r", ys.len(), rs.len())));
    }
    let built: Vec<Result<(C2Curve, (f64, f64, f64))>> = ys
        .par_iter()
        .zip(rs.par_iter())
        .map(|(&y, &r)| {
            let c = C2Curve::implicit(phi.clone(), y, r, i, newton_tol)?;
            let mut acc = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
            for x1 in i.grid(33) {
                let x2 = c.value(x1);
                let j = phi.eval([x1, x2], y);
                acc.0 = acc.0.min(j.d2);
                acc.1 = acc.1.max(j.d2);
                acc.2 = acc.2.min(y_jacobian_det(phi.as_ref(), [x1, x2], y).abs());
            }
            Ok((c, acc))
        })
        .collect();
    let mut curves = Vec::with_capacity(built.len());
    let mut rep = ImplicitReport { min_dphi2: f64::INFINITY, max_dphi2: f64::NEG_INFINITY, min_det: f64::INFINITY, det_warning: false };
    for b in built {
        let (c, (lo, hi, det)) = b?;
        rep.min_dphi2 = rep.min_dphi2.min(lo);
        rep.max_dphi2 = rep.max_dphi2.max(hi);
        rep.min_det = rep.min_det.min(det);
        curves.push(c);
    }
    if rep.min_dphi2 < 0.5 || rep.max_dphi2 > 2.0 {
        return Err(Error::Precondition(format!(
            "d Phi / d x2 ranges over [{}, {}], outside [1/2, 2]",
            rep.min_dphi2, rep.max_dphi2
        )));
    }
    rep.det_warning = rep.min_det < DET_THRESHOLD;
    Ok((CurveFamily::new(curves, FamilyKind::Implicit(phi.name().to_string()))?, rep))
}

/// Dichotomy test: on every window of length `len` (stepped by
/// half a window) each of `h, h', h''` is either uniformly small
/// (`max < kappa * d`) or uniformly large (`min >= kappa * d / 2`), where
/// `d = ||f - g||_{C^2}`.
pub fn dichotomy_holds(a: &Samples, b: &Samples, kappa: f64, len: f64) -> bool {
    let n = a.n();
    let d = c2_extremes(a, b).1;
    let h = a.domain.spacing(n);
    let w = ((len / h).floor() as usize).clamp(1, n - 1) + 1;
    let step = (w / 2).max(1);
    let mut start = 0;
    loop {
        let end = (start + w).min(n);
        for k in 0..3 {
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for idx in start..end {
                let (x, y) = (&a.jets[idx], &b.jets[idx]);
                let v = match k {
                    0 => x.v - y.v,
                    1 => x.d1 - y.d1,
                    _ => x.d2 - y.d2,
                }
                .abs();
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if !(hi < kappa * d || lo >= 0.5 * kappa * d) {
                return false;
            }
        }
        if end == n {
            return true;
        }
        start += step;
    }
}

/// Largest window length (to a relative precision of `2^-20`) for which the
/// dichotomy holds, found by bisection. Defaults the existential length knob.
pub fn dichotomy_length(a: &Samples, b: &Samples, kappa: f64) -> f64 {
    let full = a.domain.len();
    if dichotomy_holds(a, b, kappa, full) {
        return full;
    }
    let (mut lo, mut hi) = (0.0, full);
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        if dichotomy_holds(a, b, kappa, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j() -> Interval {
        Interval::unit_centered()
    }

    #[test]
    fn circle_apex_jets() {
        let c1 = C2Curve::circle(0.0, 0.0, 1.0, j()).unwrap().jet(0.0);
        assert_eq!(c1, Jet::new(1.0, 0.0, -1.0));
        let c2 = C2Curve::circle(0.0, 0.0, 2.0, j()).unwrap().jet(0.0);
        assert_eq!(c2, Jet::new(2.0, 0.0, -0.5));
    }

    #[test]
    fn circle_rejects_short_radius() {
        assert!(C2Curve::circle(0.0, 0.0, 0.4, j()).is_err());
    }

    #[test]
    fn index_range_covers_half() {
        let c = C2Curve::circle(0.0, 0.0, 1.0, j()).unwrap();
        let s = c.sample(4097);
        let r = s.index_range(&j().half());
        assert_eq!(s.theta(r.start), -0.25);
        assert_eq!(s.theta(r.end - 1), 0.25);
    }

    #[test]
    fn parabola_level_set() {
        let (fam, _) = family_from_defining_function(Arc::new(ParabolaDefining), &[[0.0, 0.0]], &[0.0], j(), 1e-12).unwrap();
        for t in [-0.4, 0.0, 0.3] {
            let jt = fam.curves[0].jet(t);
            assert!((jt.v - t * t).abs() < 1e-12);
            assert!((jt.d1 - 2.0 * t).abs() < 1e-12);
            assert!((jt.d2 - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_differences_respect_smoothness() {
        let c = C2Curve::circle(0.02, -0.03, 1.3, j()).unwrap();
        let h = 1e-4;
        for t in j().scaled(0.9).grid(50) {
            let jt = c.jet(t);
            assert!(((c.value(t + h) - jt.v) / h - jt.d1).abs() <= c.smoothness() * h);
        }
    }
}
