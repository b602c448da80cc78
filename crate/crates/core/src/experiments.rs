//! Scaling experiments: each builds fixtures from a seed, measures a quantity
//! against its conjectured bound across a sweep and fits a log-log exponent.

use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;

use crate::curve::{circle_family, CurveFamily};
use crate::error::{Error, Result};
use crate::fractal::{
    build_quasi_product, cantor_delta_set, cantor_points_3d, dyadic_exponent, frostman_check_points, Carrier,
    DeltaSet, PointCloud3, QuasiProduct,
};
use crate::incidence::{counting_field, lp_integral, RasterSpec};
use crate::interval::Interval;
use crate::lenses::{enumerate_lenses, extend_to_pseudocircles, max_nonoverlapping, perturb, Strategy, ROOT_TOL};
use crate::rectangles::{harvest_tangency_rects, multiplicity, HarvestConfig, TANGENCY_LAMBDA};
use crate::rng;
use crate::space_curve::{dot, escaping_check, SpaceCurve};

/// Frostman constant claimed for the centre-radius clouds.
pub const FROSTMAN_C: f64 = 8.0;
/// Radius of the disc holding circle centres.
pub const CENTER_SPREAD: f64 = 0.05;
/// Fine scale of the Kaufman point cloud relative to the theta grid.
pub const KAUFMAN_REFINE: u32 = 4;
/// Coarsest box-counting scale exponent in the Kaufman experiment.
pub const KAUFMAN_COARSE: u32 = 6;

// salts separating the random streams of one experiment
const SALT_CIRCLES: u64 = 1;
const SALT_BASE: u64 = 2;
const SALT_FIBER: u64 = 3;
const SALT_RADII: u64 = 4;
const SALT_PERTURB: u64 = 5;
const SALT_CLOUD: u64 = 6;

#[derive(Clone, Debug, PartialEq)]
pub enum GammaChoice {
    HelixCircle,
    Planar,
    /// Polynomial components read from a file.
    Custom(PathBuf),
}

impl GammaChoice {
    pub fn build(&self, domain: Interval) -> Result<SpaceCurve> {
        match self {
            GammaChoice::HelixCircle => Ok(SpaceCurve::helix_circle(domain)),
            GammaChoice::Planar => Ok(SpaceCurve::planar(domain)),
            GammaChoice::Custom(p) => crate::io::read_space_curve(p, domain),
        }
    }
}

impl std::fmt::Display for GammaChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GammaChoice::HelixCircle => write!(f, "helix-circle"),
            GammaChoice::Planar => write!(f, "planar"),
            GammaChoice::Custom(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Dyadic scales, coarse to fine.
    pub deltas: Vec<f64>,
    /// Family size, or the largest size of a size sweep.
    pub n: Option<usize>,
    pub alpha: f64,
    pub zeta: f64,
    pub s: f64,
    pub gamma: GammaChoice,
    /// Run the Kaufman experiment even when gamma fails the escaping check.
    pub allow_degenerate: bool,
    /// Point carrier for the Kaufman cloud.
    pub carrier: Carrier,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            deltas: dyadic_range(5, 10),
            n: None,
            alpha: 1.0,
            zeta: 1.0,
            s: 0.5,
            gamma: GammaChoice::HelixCircle,
            allow_degenerate: false,
            carrier: Carrier::Ball,
            out: None,
        }
    }
}

/// `[2^-lo, ..., 2^-hi]`.
pub fn dyadic_range(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|k| (2f64).powi(-(k as i32))).collect()
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.deltas.is_empty() {
            return Err(Error::Precondition("empty delta sweep".into()));
        }
        for &d in &self.deltas {
            dyadic_exponent(d)?;
        }
        if !(0.0 < self.s && self.s < self.zeta && self.zeta <= 1.0) {
            return Err(Error::Precondition(format!("need 0 < s < zeta <= 1, got s={}, zeta={}", self.s, self.zeta)));
        }
        if !(0.0 < self.alpha && self.alpha <= self.zeta) {
            return Err(Error::Precondition(format!("need 0 < alpha <= zeta, got alpha={}, zeta={}", self.alpha, self.zeta)));
        }
        Ok(())
    }

    fn finest(&self) -> f64 {
        self.deltas.iter().copied().fold(1.0, f64::min)
    }

    pub fn describe(&self) -> String {
        let ks: Vec<String> = self.deltas.iter().map(|d| format!("{}", -d.log2())).collect();
        format!(
            "deltas=2^-[{}] n={} alpha={} zeta={} s={} gamma={} carrier={:?}",
            ks.join(","),
            self.n.map_or("auto".to_string(), |n| n.to_string()),
            self.alpha,
            self.zeta,
            self.s,
            self.gamma,
            self.carrier
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub params: Vec<(String, f64)>,
    pub measured: f64,
    pub bound: f64,
}

impl SweepRow {
    fn new(params: &[(&str, f64)], measured: f64, bound: f64) -> Self {
        SweepRow { params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(), measured, bound }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|p| p.1)
    }

    pub fn ratio(&self) -> f64 {
        self.measured / self.bound
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub experiment: String,
    pub rows: Vec<SweepRow>,
    pub fitted_exponent: f64,
    pub fit_residual: f64,
    /// Experiment-specific scalars (fitted constants, fractions, checks).
    pub summary: Vec<(String, f64)>,
}

impl SweepResult {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == key).map(|p| p.1)
    }
}

/// Least squares of `log y` on `log x`: `(slope, intercept, max |log residual|)`.
pub fn fit_exponent(rows: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if rows.len() < 3 {
        return Err(Error::Precondition(format!("need at least 3 rows to fit, got {}", rows.len())));
    }
    if let Some(&(x, y)) = rows.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::BadData(format!("nonpositive row ({x}, {y})")));
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate(sxx));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = pts.iter().map(|p| (p.1 - intercept - slope * p.0).abs()).fold(0.0, f64::max);
    Ok((slope, intercept, residual))
}

/// Raster window: `[0,1]^2` translated to `[-1/2, 1/2] x [1, 2]`.
fn window(delta: f64) -> Result<RasterSpec> {
    RasterSpec::new(Interval::unit_centered(), Interval { lo: 1.0, hi: 2.0 }, delta / 4.0)
}

/// Circles over `[-1/2, 1/2]` with radii `1 + (c + 1/2) delta` for `c` in a
/// `(delta, zeta)` Cantor set (or `n` evenly spaced radii) and random centres;
/// also returns the centre-radius cloud.
pub fn frostman_circles(delta: f64, zeta: f64, n: Option<usize>, seed: u64) -> Result<(CurveFamily, PointCloud3)> {
    let radii: Vec<f64> = match n {
        Some(n) => {
            if n == 0 || n as f64 > 1.0 / delta {
                return Err(Error::Precondition(format!("{n} delta-separated radii do not fit in [1, 2] at delta={delta}")));
            }
            (0..n).map(|i| 1.0 + (i as f64 + 0.5) / n as f64).collect()
        }
        None => cantor_delta_set(delta, zeta, rng::derive(seed, SALT_RADII))?
            .cells
            .iter()
            .map(|&c| 1.0 + (c as f64 + 0.5) * delta)
            .collect(),
    };
    let mut r = rng::seeded(rng::derive(seed, SALT_CIRCLES));
    let centers: Vec<[f64; 2]> = radii.iter().map(|_| rng::in_disc(&mut r, CENTER_SPREAD)).collect();
    let points = centers.iter().zip(&radii).map(|(c, &rad)| [c[0], c[1], rad - 1.5]).collect();
    let cloud = PointCloud3 { points, delta, zeta, c: FROSTMAN_C };
    Ok((circle_family(&centers, &radii, Interval::unit_centered())?, cloud))
}

fn check_frostman(cloud: &PointCloud3) -> Result<()> {
    let chk = frostman_check_points(cloud);
    if !chk.passed {
        return Err(Error::Precondition(format!(
            "centre-radius set fails the Frostman bound: {} points in the ball of radius {} at {:?} (ratio {} > {})",
            chk.worst_count, chk.worst_radius, chk.worst_center, chk.ratio, cloud.c
        )));
    }
    Ok(())
}

/// `int_E (sum_f 1_{f^delta})^{3/2}` on the standard window.
fn integral_32(fam: &CurveFamily, delta: f64, e: &QuasiProduct) -> Result<f64> {
    let field = counting_field(fam, delta, &window(delta)?)?;
    lp_integral(&field, e, 1.5)
}

fn full_square(delta: f64) -> Result<QuasiProduct> {
    let full = DeltaSet::full(delta)?;
    build_quasi_product(&full, |_| full.clone())
}

fn finish(experiment: &str, rows: Vec<SweepRow>, fit: &[(f64, f64)], summary: Vec<(String, f64)>) -> Result<SweepResult> {
    let (fitted_exponent, _, fit_residual) = fit_exponent(fit)?;
    Ok(SweepResult { experiment: experiment.into(), rows, fitted_exponent, fit_residual, summary })
}

/// `||sum 1_{c^delta}||_{3/2}` over the window against `(delta n)^{2/3}` for
/// circles with delta-separated radii; the exponent is fitted in `delta`.
pub fn exp_wolff_circles(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let rows = cfg
        .deltas
        .iter()
        .map(|&delta| {
            let (fam, cloud) = frostman_circles(delta, 1.0, cfg.n, cfg.seed)?;
            check_frostman(&cloud)?;
            let n = fam.len() as f64;
            let norm = integral_32(&fam, delta, &full_square(delta)?)?.powf(2.0 / 3.0);
            Ok(SweepRow::new(&[("delta", delta), ("n", n)], norm, (delta * n).powf(2.0 / 3.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    let fit: Vec<(f64, f64)> = rows.iter().map(|r| (r.params[0].1, r.ratio())).collect();
    finish("wolff", rows, &fit, Vec::new())
}

/// The same measurement for `1/delta` concentric circles with radii
/// `1 + i delta^2`: radius separation fails and so does the bound.
pub fn exp_wolff_concentric(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let rows = cfg
        .deltas
        .iter()
        .map(|&delta| {
            let n = cfg.n.unwrap_or((1.0 / delta).round() as usize);
            let radii: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 + i as f64 * delta * delta).collect();
            let fam = circle_family(&vec![[0.0, 0.0]; n], &radii, Interval::unit_centered())?;
            let norm = integral_32(&fam, delta, &full_square(delta)?)?.powf(2.0 / 3.0);
            Ok(SweepRow::new(&[("delta", delta), ("n", n as f64)], norm, (delta * n as f64).powf(2.0 / 3.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    let fit: Vec<(f64, f64)> = rows.iter().map(|r| (r.params[0].1, r.ratio())).collect();
    finish("wolff-concentric", rows, &fit, Vec::new())
}

/// Cantor quasi-product with base and fibers `(delta, alpha)` Cantor sets.
pub fn cantor_quasi_product(delta: f64, alpha: f64, seed: u64) -> Result<QuasiProduct> {
    let base = cantor_delta_set(delta, alpha, rng::derive(seed, SALT_BASE))?;
    let fiber_seed = rng::derive(seed, SALT_FIBER);
    let mut fibers = Vec::with_capacity(base.len());
    for &a in &base.cells {
        fibers.push((a, cantor_delta_set(delta, alpha, rng::derive(fiber_seed, a))?));
    }
    let map: HashMap<u64, DeltaSet> = fibers.into_iter().collect();
    build_quasi_product(&base, |a| map[&a].clone())
}

/// `int_E (sum 1)^{3/2} / (delta^{2 - alpha/2 - zeta/2} #F)` for a Cantor
/// quasi-product `E(alpha)` and circles with `(delta, zeta)` Cantor radii.
pub fn exp_quasi_product(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let (alpha, zeta) = (cfg.alpha, cfg.zeta);
    let rows = cfg
        .deltas
        .iter()
        .map(|&delta| {
            let (fam, cloud) = frostman_circles(delta, zeta, cfg.n, cfg.seed)?;
            check_frostman(&cloud)?;
            let e = cantor_quasi_product(delta, alpha, cfg.seed)?;
            let n = fam.len() as f64;
            let integral = integral_32(&fam, delta, &e)?;
            let bound = delta.powf(2.0 - alpha / 2.0 - zeta / 2.0) * n;
            Ok(SweepRow::new(&[("delta", delta), ("n", n), ("area_e", e.area())], integral, bound))
        })
        .collect::<Result<Vec<_>>>()?;
    let fit: Vec<(f64, f64)> = rows.iter().map(|r| (r.params[0].1, r.ratio())).collect();
    finish("quasi", rows, &fit, vec![("alpha".into(), alpha), ("zeta".into(), zeta)])
}

/// `n` circles with radii uniform in `[1, 2]` and centres in the 0.1-disc.
pub fn random_circles(n: usize, seed: u64) -> Result<CurveFamily> {
    let mut r = rng::seeded(seed);
    let mut centers = Vec::with_capacity(n);
    let mut radii = Vec::with_capacity(n);
    for _ in 0..n {
        centers.push(rng::in_disc(&mut r, 0.1));
        radii.push(r.gen_range(1.0..=2.0));
    }
    circle_family(&centers, &radii, Interval::unit_centered())
}

/// `n` vertical translates of one circle, spaced so no two graphs meet.
pub fn disjoint_translates(n: usize) -> Result<CurveFamily> {
    let centers: Vec<[f64; 2]> = (0..n).map(|i| [0.0, -0.1 + 0.2 * (i as f64 + 0.5) / n as f64]).collect();
    circle_family(&centers, &vec![1.5; n], Interval::unit_centered())
}

/// Family sizes `16, 32, ...` up to `n_max`.
pub fn size_sweep(n_max: usize) -> Vec<usize> {
    std::iter::successors(Some(16usize), |&n| Some(n * 2)).take_while(|&n| n <= n_max.max(16)).collect()
}

/// Independent families averaged per size in the lens sweep.
pub const LENS_REPLICATES: usize = 4;

/// Lens statistics of one family after perturbation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LensCount {
    pub lenses: usize,
    pub nonoverlapping: usize,
    pub max_per_pair: usize,
}

pub fn count_lenses(fam: &CurveFamily, delta: f64, seed: u64) -> Result<LensCount> {
    let p = perturb(fam, delta, TANGENCY_LAMBDA, seed)?;
    let loops = extend_to_pseudocircles(&p.family, 1.0);
    let lenses = enumerate_lenses(&loops, ROOT_TOL)?;
    let mut per_pair: HashMap<(usize, usize), usize> = HashMap::new();
    for l in &lenses {
        *per_pair.entry(l.pair).or_default() += 1;
    }
    let keep = max_nonoverlapping(&lenses, Strategy::GreedyBySpan)?;
    Ok(LensCount { lenses: lenses.len(), nonoverlapping: keep.len(), max_per_pair: per_pair.values().copied().max().unwrap_or(0) })
}

/// Non-overlapping lens counts of random circle families over a size sweep,
/// fitted against `n`. Pass `translates` for the lens-free control.
pub fn exp_lens_scaling(cfg: &ExperimentConfig, translates: bool) -> Result<SweepResult> {
    let delta = cfg.finest();
    dyadic_exponent(delta)?;
    let sizes = size_sweep(cfg.n.unwrap_or(512));
    if sizes.len() < 3 {
        return Err(Error::Precondition(format!("size sweep 16..{} has fewer than 3 points; need n >= 64", cfg.n.unwrap_or(512))));
    }
    let mut rows = Vec::new();
    let mut max_per_pair = 0;
    for (k, n) in sizes.into_iter().enumerate() {
        let (mut lenses, mut kept) = (0, 0);
        for rep in 0..LENS_REPLICATES {
            let fam = if translates {
                disjoint_translates(n)?
            } else {
                random_circles(n, rng::derive(cfg.seed, (k * LENS_REPLICATES + rep) as u64))?
            };
            let c = count_lenses(&fam, delta, rng::derive(cfg.seed, SALT_PERTURB))?;
            max_per_pair = max_per_pair.max(c.max_per_pair);
            lenses += c.lenses;
            kept += c.nonoverlapping;
        }
        let nf = n as f64;
        let reps = LENS_REPLICATES as f64;
        rows.push(SweepRow::new(&[("n", nf), ("lenses", lenses as f64 / reps)], kept as f64 / reps, nf.powf(1.5) * nf.ln()));
    }
    let fit: Vec<(f64, f64)> = rows.iter().filter(|r| r.measured > 0.0).map(|r| (r.params[0].1, r.measured)).collect();
    let summary = vec![("max_lenses_per_pair".into(), max_per_pair as f64)];
    if fit.len() < 3 && rows.iter().all(|r| r.measured == 0.0) {
        // constant zero count
        return Ok(SweepResult { experiment: "lens".into(), rows, fitted_exponent: 0.0, fit_residual: 0.0, summary });
    }
    finish("lens", rows, &fit, summary)
}

/// A bipartite circle family: `W` with radii in `[1.1, 1.15]` and centres a
/// little above the origin, `B` with radii in `[1.25, 1.3]` and centres a
/// little below, so that many `W`-`B` pairs sit near internal tangency at the
/// top of the arcs. Returns the family and the index groups.
pub fn bipartite_circles(nw: usize, nb: usize, seed: u64) -> Result<(CurveFamily, Vec<usize>, Vec<usize>)> {
    let mut r = rng::seeded(seed);
    let mut centers = Vec::new();
    let mut radii = Vec::new();
    for k in 0..nw + nb {
        let a = r.gen_range(-0.03..=0.03);
        if k < nw {
            centers.push([a, r.gen_range(0.03..=0.06)]);
            radii.push(r.gen_range(1.1..=1.15));
        } else {
            centers.push([a, r.gen_range(-0.06..=-0.03)]);
            radii.push(r.gen_range(1.25..=1.3));
        }
    }
    let fam = circle_family(&centers, &radii, Interval::unit_centered())?;
    Ok((fam, (0..nw).collect(), (nw..nw + nb).collect()))
}

/// Smallest C^2 distance between a curve of `w` and one of `b`.
pub fn cross_separation(fam: &CurveFamily, w: &[usize], b: &[usize], grid_n: usize) -> f64 {
    let s = fam.sample_all(grid_n);
    w.par_iter()
        .map(|&i| b.iter().map(|&j| crate::curve::c2_extremes(&s[i], &s[j]).1).fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min)
}

/// Separation used by the bipartite experiment. The generated families sit
/// about 0.2 apart in C^2; the separation is re-checked on every family.
pub const BIPARTITE_T: f64 = 0.1;

/// Rectangles tangent to at least `mu` curves of `w` and `nu` of `b`.
pub fn rich_rectangles(
    fam: &CurveFamily,
    w: &[usize],
    b: &[usize],
    delta: f64,
    t: f64,
    mu: usize,
    nu: usize,
) -> Result<Vec<(crate::rectangles::CurvRect, usize, usize)>> {
    let cfg = HarvestConfig::default();
    let rects = harvest_tangency_rects(fam, delta, t, &cfg)?;
    Ok(rects
        .par_iter()
        .filter_map(|h| {
            let mw = multiplicity(&h.rect, &fam.curves, w, TANGENCY_LAMBDA);
            let mb = multiplicity(&h.rect, &fam.curves, b, TANGENCY_LAMBDA);
            (mw >= mu && mb >= nu).then_some((h.rect, mw, mb))
        })
        .collect())
}

/// Counts of `(1,1)`-rich tangency rectangles between two `t`-separated
/// random circle families against `(#W + #B)^{3/2} log(#W + #B)`.
pub fn exp_bipartite_tangency(cfg: &ExperimentConfig, mu: usize, nu: usize) -> Result<SweepResult> {
    let delta = cfg.finest();
    dyadic_exponent(delta)?;
    if mu == 0 || nu == 0 {
        return Err(Error::Precondition("multiplicities must be positive".into()));
    }
    let t = BIPARTITE_T;
    let mut rows = Vec::new();
    for (k, n) in size_sweep(cfg.n.unwrap_or(256)).into_iter().enumerate() {
        let (fam, w, b) = bipartite_circles(n, n, rng::derive(cfg.seed, k as u64))?;
        let sep = cross_separation(&fam, &w, &b, 1025);
        if sep < t {
            return Err(Error::Precondition(format!("W and B only {sep}-separated, need {t}")));
        }
        let rich = rich_rectangles(&fam, &w, &b, delta, t, mu, nu)?;
        let m = n as f64 / mu as f64 + n as f64 / nu as f64;
        rows.push(SweepRow::new(&[("n", n as f64), ("delta", delta), ("t", t)], rich.len() as f64, m.powf(1.5) * m.ln()));
    }
    let constant = rows.iter().map(|r| r.ratio()).fold(0.0, f64::max);
    let fit: Vec<(f64, f64)> = rows.iter().filter(|r| r.measured > 0.0).map(|r| (r.params[0].1, r.measured)).collect();
    let summary = vec![("fitted_constant".into(), constant)];
    if fit.len() < 3 {
        return Ok(SweepResult { experiment: "bipartite".into(), rows, fitted_exponent: 0.0, fit_residual: 0.0, summary });
    }
    finish("bipartite", rows, &fit, summary)
}

/// Box-counting dimension of a finite set of reals after affine
/// normalization to `[0, 1]`, fitted over the given scales. A set of zero
/// extent has dimension 0.
pub fn box_count_dimension(values: &[f64], scales: &[f64]) -> Result<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() || hi - lo <= 1e-12 {
        return Ok(0.0);
    }
    let mut xs: Vec<f64> = values.iter().map(|v| (v - lo) / (hi - lo)).collect();
    xs.sort_by(f64::total_cmp);
    let rows: Vec<(f64, f64)> = scales
        .iter()
        .map(|&r| {
            let mut count = 0usize;
            let mut last = u64::MAX;
            for &x in &xs {
                let b = ((x / r).floor() as u64).min((1.0 / r).ceil() as u64 - 1);
                if b != last {
                    count += 1;
                    last = b;
                }
            }
            (1.0 / r, count as f64)
        })
        .collect();
    Ok(fit_exponent(&rows)?.0)
}

/// For `theta` on a `delta`-grid of `[0, 1]`, the box-counting dimension of
/// `gamma(theta) . Z` for a Cantor cloud `Z` at scale `delta 2^-4`. Rows hold
/// `d(theta)` against `s`; the fitted exponent is the box-counting dimension
/// of the exceptional set `{d < s}`.
pub fn exp_kaufman(cfg: &ExperimentConfig) -> Result<SweepResult> {
    // alpha plays no part here
    ExperimentConfig { alpha: cfg.zeta, ..cfg.clone() }.validate()?;
    let delta = cfg.finest();
    let k = dyadic_exponent(delta)?;
    let fine = k + KAUFMAN_REFINE;
    if fine <= KAUFMAN_COARSE + 2 {
        return Err(Error::Precondition(format!("theta grid 2^-{k} too coarse for box counting")));
    }
    let domain = Interval::unit();
    let gamma = cfg.gamma.build(domain)?;
    let esc = escaping_check(&gamma, 4097);
    if esc <= 1e-9 && !cfg.allow_degenerate {
        return Err(Error::Degenerate(esc));
    }
    let z = cantor_points_3d((2f64).powi(-(fine as i32)), cfg.zeta, rng::derive(cfg.seed, SALT_CLOUD), cfg.carrier)?;
    let scales = dyadic_range(KAUFMAN_COARSE, fine);
    let n_theta = (1.0 / delta).round() as usize + 1;
    let thetas = domain.grid(n_theta);
    let dims: Vec<f64> = thetas
        .par_iter()
        .map(|&th| {
            let v = gamma.eval(th)[0];
            let proj: Vec<f64> = z.points.iter().map(|p| dot(&v, p)).collect();
            box_count_dimension(&proj, &scales)
        })
        .collect::<Result<Vec<_>>>()?;
    let exceptional: Vec<f64> = thetas.iter().zip(&dims).filter(|(_, &d)| d < cfg.s).map(|(&t, _)| t).collect();
    let fraction = exceptional.len() as f64 / thetas.len() as f64;
    let exc_dim = if exceptional.len() < 2 {
        0.0
    } else {
        // a full grid is an interval; anything sparser is counted at the theta grid scales
        box_count_dimension(&exceptional, &dyadic_range(2, k))?.clamp(0.0, 1.0)
    };
    let (dmin, dmax) = dims.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &d| (a.min(d), b.max(d)));
    let rows = thetas.iter().zip(&dims).map(|(&t, &d)| SweepRow::new(&[("theta", t)], d, cfg.s)).collect();
    Ok(SweepResult {
        experiment: "kaufman".into(),
        rows,
        fitted_exponent: exc_dim,
        fit_residual: 0.0,
        summary: vec![
            ("exceptional_fraction".into(), fraction),
            ("exceptional_dimension".into(), exc_dim),
            ("min_dimension".into(), dmin),
            ("max_dimension".into(), dmax),
            ("escaping".into(), esc),
            ("points".into(), z.len() as f64),
            ("s".into(), cfg.s),
            ("zeta".into(), cfg.zeta),
        ],
    })
}

/// Build identifier baked in at compile time.
pub fn build_id() -> &'static str {
    option_env!("CINEMATIC_BUILD_ID").unwrap_or(env!("CARGO_PKG_VERSION"))
}

/// CSV with `#` metadata lines, one header row and one row per sweep point.
pub fn write_csv(res: &SweepResult, cfg: &ExperimentConfig, w: &mut impl Write) -> Result<()> {
    writeln!(w, "# experiment={}", res.experiment)?;
    writeln!(w, "# config={}", cfg.describe())?;
    writeln!(w, "# seed={}", cfg.seed)?;
    writeln!(w, "# build={}", build_id())?;
    writeln!(w, "# fitted_exponent={}", res.fitted_exponent)?;
    writeln!(w, "# fit_residual={}", res.fit_residual)?;
    for (k, v) in &res.summary {
        writeln!(w, "# {k}={v}")?;
    }
    let Some(first) = res.rows.first() else {
        writeln!(w, "measured,bound,ratio")?;
        return Ok(());
    };
    let names: Vec<&str> = first.params.iter().map(|p| p.0.as_str()).collect();
    writeln!(w, "{},measured,bound,ratio", names.join(","))?;
    for r in &res.rows {
        let vals: Vec<String> = r.params.iter().map(|p| p.1.to_string()).collect();
        writeln!(w, "{},{},{},{}", vals.join(","), r.measured, r.bound, r.ratio())?;
    }
    Ok(())
}
