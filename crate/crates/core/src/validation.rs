//! The acceptance suite: ten checks, each returning a pass/fail report with
//! the measured numbers. Shared by the `validate` subcommand and the
//! `acceptance` test target.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use crate::curve::{
    c2_distance, c2_extremes, cinematic_defect, family_from_defining_function, tangency_param, C2Curve, CircleDefining,
    CurveFamily, DefiningFunction, FamilyKind, Jet,
};
use crate::error::{Error, Result};
use crate::experiments::{exp_kaufman, exp_lens_scaling, exp_quasi_product, exp_wolff_circles, ExperimentConfig, GammaChoice};
use crate::fractal::Carrier;
use crate::incidence::{sublevel_intervals, zeros_of_difference};
use crate::interval::Interval;
use crate::lenses::{certify_proper, perturb, ROOT_TOL};
use crate::rectangles::{comparable, greedy_incomparable, CurvRect};
use crate::rng;
use crate::space_curve::SpaceCurve;

/// Grid used for pair scans in the suite.
pub const GRID: usize = 4096;

/// Upper constant in `|E_delta| <= C delta / sqrt((Delta + delta) t)`,
/// calibrated on seeds 1-6 (worst 8.92) and frozen with a 25% margin.
pub const SUBLEVEL_C_FIT: f64 = 11.0;
/// Lower constant for the half-depth instances; same seeds, worst 0.72.
pub const SUBLEVEL_LOWER_FIT: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {:>2}. {} ({:.1}s): {}", self.id, self.title, self.seconds, self.detail)
    }
}

pub const TITLES: [&str; 10] = [
    "pseudo-metric suite",
    "two-zero law",
    "sublevel geometry",
    "Wolff scaling",
    "quasi-product scaling",
    "lens growth",
    "perturbation totality",
    "rectangle combinatorics",
    "Kaufman experiment",
    "defining-function checker",
];

/// Run one criterion (1-based).
pub fn run(id: usize, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let out = match id {
        1 => pseudo_metric(seed),
        2 => two_zero(seed),
        3 => sublevel(seed),
        4 => wolff(seed),
        5 => quasi(seed),
        6 => lens_growth(seed),
        7 => perturbation(seed),
        8 => rectangles(seed),
        9 => kaufman(seed),
        10 => defining_function(seed),
        _ => Err(Error::Precondition(format!("no criterion {id}"))),
    };
    let (passed, detail) = out.unwrap_or_else(|e| (false, format!("error: {e}")));
    let title = TITLES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown");
    CriterionReport { id, title, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    (1..=10).map(|i| run(i, seed)).collect()
}

type Verdict = Result<(bool, String)>;

pub fn random_circle(r: &mut impl Rng, j: Interval) -> C2Curve {
    let c = rng::in_disc(r, 0.1);
    C2Curve::circle(c[0], c[1], r.gen_range(1.0..=2.0), j).expect("radius at least 1 covers [-1/2, 1/2]")
}

pub fn random_projection(r: &mut impl Rng, gamma: &SpaceCurve) -> C2Curve {
    C2Curve::projection(gamma, rng::in_ball3(r, 1.0))
}

/// Level curve of the circle defining function with `y` in the 0.1-square and `r` in `[-0.1, 0.1]`.
pub fn random_implicit(r: &mut impl Rng, j: Interval) -> Result<C2Curve> {
    let y = [r.gen_range(-0.1..=0.1), r.gen_range(-0.1..=0.1)];
    C2Curve::implicit(Arc::new(CircleDefining), y, r.gen_range(-0.1..=0.1), j, 1e-12)
}

fn pseudo_metric(seed: u64) -> Verdict {
    let j = Interval::unit_centered();
    let gamma = SpaceCurve::helix_circle(j);
    let check = |kind: u64| -> Result<(usize, usize, usize, f64)> {
        let per: Vec<Result<(bool, bool, bool, f64)>> = (0..1000u64)
            .into_par_iter()
            .map(|k| {
                let mut r = rng::seeded(rng::derive(rng::derive(seed, kind), k));
                let [f, g, h] = if kind == 0 {
                    [random_circle(&mut r, j), random_circle(&mut r, j), random_circle(&mut r, j)]
                } else {
                    [random_projection(&mut r, &gamma), random_projection(&mut r, &gamma), random_projection(&mut r, &gamma)]
                };
                let fg = tangency_param(&f, &g, GRID)?;
                let gf = tangency_param(&g, &f, GRID)?;
                let gh = tangency_param(&g, &h, GRID)?;
                let fh = tangency_param(&f, &h, GRID)?;
                let d = c2_distance(&f, &g, GRID)?;
                Ok(((fg - gf).abs() <= 1e-12, fh <= fg + gh + 1e-12, fg <= d, fh - fg - gh))
            })
            .collect();
        let mut bad = (0, 0, 0, f64::NEG_INFINITY);
        for p in per {
            let (sym, tri, dom, excess) = p?;
            bad.0 += usize::from(!sym);
            bad.1 += usize::from(!tri);
            bad.2 += usize::from(!dom);
            bad.3 = bad.3.max(excess);
        }
        Ok(bad)
    };
    let c = check(0)?;
    let p = check(1)?;
    let passed = c.0 + c.1 + c.2 + p.0 + p.1 + p.2 == 0;
    Ok((
        passed,
        format!(
            "circles: {} asymmetric, {} triangle violations (worst excess {:.3e}), {} above d; projections: {} / {} ({:.3e}) / {}",
            c.0, c.1, c.3, c.2, p.0, p.1, p.3, p.2
        ),
    ))
}

fn two_zero(seed: u64) -> Verdict {
    let j = Interval::unit_centered();
    let gamma = SpaceCurve::helix_circle(j);
    let mut detail = Vec::new();
    let mut total = 0;
    for (kind, name) in ["circle", "projection", "implicit"].iter().enumerate() {
        let per: Vec<Result<usize>> = (0..10_000u64)
            .into_par_iter()
            .map(|k| {
                let mut r = rng::seeded(rng::derive(rng::derive(seed, 100 + kind as u64), k));
                let (f, g) = match kind {
                    0 => (random_circle(&mut r, j), random_circle(&mut r, j)),
                    1 => (random_projection(&mut r, &gamma), random_projection(&mut r, &gamma)),
                    _ => (random_implicit(&mut r, j)?, random_implicit(&mut r, j)?),
                };
                match zeros_of_difference(&f, &g, ROOT_TOL) {
                    Ok(z) => Ok(usize::from(z.len() > 2)),
                    Err(Error::CinematicViolation { .. }) => Ok(1),
                    Err(e) => Err(e),
                }
            })
            .collect();
        let v = per.into_iter().sum::<Result<usize>>()?;
        total += v;
        detail.push(format!("{name}: {v}"));
    }
    Ok((total == 0, format!("violations over 10^4 pairs each: {}", detail.join(", "))))
}

/// A pair of circles near internal tangency: `g` is `f` with radius reduced by
/// `rho`, moved so the arcs touch near `theta0` with vertical gap `sigma`.
pub fn tangent_pair(theta0: f64, rho: f64, sigma: f64, j: Interval) -> Result<(C2Curve, C2Curve)> {
    let (b, r) = (0.0, 1.5);
    let f = C2Curve::circle(0.0, b, r, j)?;
    // outward unit normal of f at theta0
    let y0 = (r * r - theta0 * theta0).sqrt();
    let (nx, ny) = (theta0 / r, y0 / r);
    let rg = r - rho;
    let (ag, bg) = (theta0 - (rg + sigma) * nx, b + y0 - (rg + sigma) * ny);
    let g = C2Curve::circle(ag, bg, rg, j)?;
    Ok((f, g))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SublevelStats {
    /// Largest measure ratio over all pairs.
    pub upper: f64,
    /// Smallest containing-interval ratio over the half-depth instances.
    pub lower: f64,
    pub half_depth: usize,
    pub pairs: usize,
    pub min_ratio_delta_t: f64,
    pub max_ratio_delta_t: f64,
}

/// Pairs spanning `Delta/t` from about `delta/t` to 1, and the ratios of
/// `|E_delta|` to `delta / sqrt((Delta + delta) t)`.
pub fn sublevel_stats(seed: u64, pairs: usize, delta: f64) -> Result<SublevelStats> {
    let j = Interval::unit_centered();
    let per: Vec<Result<Option<(f64, Option<f64>, f64)>>> = (0..pairs as u64)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::seeded(rng::derive(rng::derive(seed, 300), k));
            let theta0 = r.gen_range(-0.1..=0.1);
            let rho: f64 = r.gen_range(0.05..=0.3);
            // log-uniform gap between delta and 4 rho, either sign
            let mag = (delta.ln() + r.gen::<f64>() * ((4.0 * rho).ln() - delta.ln())).exp();
            let sigma = if r.gen_bool(0.5) { mag } else { -mag };
            let (f, g) = tangent_pair(theta0, rho, sigma, j)?;
            let (sf, sg) = (f.sample(GRID), g.sample(GRID));
            let (lo, t) = c2_extremes(&sf, &sg);
            let big = crate::curve::tangency_from_samples(&sf, &sg);
            let e = match sublevel_intervals(&f, &g, delta, t, t / lo) {
                Ok(e) => e,
                Err(Error::Precondition(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let scale = delta / ((big + delta) * t).sqrt();
            let upper = e.measure() / scale;
            // half-depth instance: some point of J/4 with |h| <= delta/2
            let quarter = j.quarter();
            let lower = quarter
                .grid(GRID / 4 + 1)
                .into_iter()
                .map(|x| (x, (f.value(x) - g.value(x)).abs()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .filter(|&(_, v)| v <= delta / 2.0)
                .and_then(|(x, _)| e.intervals.iter().find(|i| i.contains(x)).map(|i| i.len() / scale));
            Ok(Some((upper, lower, big / t)))
        })
        .collect();
    let mut s = SublevelStats {
        upper: 0.0,
        lower: f64::INFINITY,
        half_depth: 0,
        pairs: 0,
        min_ratio_delta_t: f64::INFINITY,
        max_ratio_delta_t: 0.0,
    };
    for p in per {
        let Some((u, l, q)) = p? else { continue };
        s.pairs += 1;
        s.upper = s.upper.max(u);
        s.min_ratio_delta_t = s.min_ratio_delta_t.min(q);
        s.max_ratio_delta_t = s.max_ratio_delta_t.max(q);
        if let Some(l) = l {
            s.half_depth += 1;
            s.lower = s.lower.min(l);
        }
    }
    Ok(s)
}

fn sublevel(seed: u64) -> Verdict {
    let delta = (2f64).powi(-14);
    let s = sublevel_stats(seed, 1000, delta)?;
    let passed = s.pairs == 1000 && s.upper <= SUBLEVEL_C_FIT && s.half_depth > 0 && s.lower >= SUBLEVEL_LOWER_FIT;
    Ok((
        passed,
        format!(
            "{} pairs, Delta/t in [{:.2e}, {:.2e}]: max upper ratio {:.3} (C_fit {}), min lower ratio {:.3} over {} half-depth pairs (c_fit {})",
            s.pairs, s.min_ratio_delta_t, s.max_ratio_delta_t, s.upper, SUBLEVEL_C_FIT, s.lower, s.half_depth, SUBLEVEL_LOWER_FIT
        ),
    ))
}

fn wolff(seed: u64) -> Verdict {
    let cfg = ExperimentConfig { seed, ..Default::default() };
    let r = exp_wolff_circles(&cfg)?;
    Ok((
        r.fitted_exponent.abs() <= 0.15,
        format!("fitted exponent {:.4} (|.| <= 0.15), residual {:.4}", r.fitted_exponent, r.fit_residual),
    ))
}

fn quasi(seed: u64) -> Verdict {
    let cfg = ExperimentConfig { seed, alpha: 0.5, zeta: 0.8, ..Default::default() };
    let r = exp_quasi_product(&cfg)?;
    Ok((
        r.fitted_exponent.abs() <= 0.2,
        format!("fitted exponent {:.4} (|.| <= 0.2), residual {:.4}", r.fitted_exponent, r.fit_residual),
    ))
}

fn lens_growth(seed: u64) -> Verdict {
    let cfg = ExperimentConfig { seed, n: Some(512), ..Default::default() };
    let r = exp_lens_scaling(&cfg, false)?;
    let per_pair = r.get("max_lenses_per_pair").unwrap_or(f64::INFINITY);
    Ok((
        r.fitted_exponent <= 1.65 && per_pair <= 1.0,
        format!("fitted exponent {:.4} (<= 1.65), max lenses per pair {per_pair}", r.fitted_exponent),
    ))
}

/// Circle pairs touching within `lambda delta`, tangency point in `J/2`.
pub fn near_tangent_pair(r: &mut impl Rng, delta: f64, lambda: f64, j: Interval) -> Result<CurveFamily> {
    let theta0 = r.gen_range(-0.25..=0.25);
    let rho = r.gen_range(0.05..=0.3);
    let sigma = match r.gen_range(0..4) {
        0 => 0.0,
        _ => r.gen_range(-lambda * delta..=lambda * delta),
    };
    let (f, g) = tangent_pair(theta0, rho, sigma, j)?;
    CurveFamily::new(vec![f, g], FamilyKind::Circle)
}

fn perturbation(seed: u64) -> Verdict {
    let (delta, lambda) = ((2f64).powi(-10), 5.0);
    let j = Interval::unit_centered();
    let per: Vec<Result<(bool, f64)>> = (0..10_000u64)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::seeded(rng::derive(rng::derive(seed, 700), k));
            let fam = near_tangent_pair(&mut r, delta, lambda, j)?;
            let before = cinematic_defect(&fam, GRID)?;
            let p = match perturb(&fam, delta, lambda, rng::derive(seed, k)) {
                Ok(p) => p,
                Err(Error::Unperturbable { .. }) => return Ok((false, 1.0)),
                Err(e) => return Err(e),
            };
            let clean = certify_proper(&p.family, ROOT_TOL).is_clean();
            let after = cinematic_defect(&p.family, GRID)?;
            Ok((clean, after / before))
        })
        .collect();
    let (mut failed, mut worst) = (0, f64::INFINITY);
    for p in per {
        let (clean, q) = p?;
        failed += usize::from(!clean);
        worst = worst.min(q);
    }
    Ok((
        failed == 0 && worst >= 0.5,
        format!("{failed} of 10^4 pairs not proper after perturbation; worst defect ratio after/before {worst:.4} (>= 0.5)"),
    ))
}

/// Lines `f0 + c + s (theta - p)` over `J`, with `f0(theta) = theta^2 / 2`.
fn line_over_base(c: f64, s: f64, p: f64, j: Interval) -> C2Curve {
    C2Curve::custom("line", j, move |x| Jet::new(0.5 * x * x + c + s * (x - p), x + s, 1.0))
}

/// `lambda^{5/2} / 10^5` pairwise 100-incomparable `(delta, 1)`-rectangles
/// inside one `(lambda delta, 1)`-rectangle over the base curve: positions
/// `10 L` apart, offsets `100 delta` apart and slopes `200 delta / L` apart,
/// where `L = sqrt(delta)`. Returns the rectangles and their anchors.
pub fn lambda_cluster(lambda: f64, delta: f64) -> Result<(Vec<CurvRect>, Vec<C2Curve>)> {
    let j = Interval::unit_centered();
    let len = delta.sqrt();
    let (np, no) = ((lambda.sqrt() / 10.0).round() as usize, (lambda / 100.0).round() as usize);
    let slope_step = 200.0 * delta / len * 1.001;
    let mut rects = Vec::new();
    let mut curves = Vec::new();
    for ip in 0..np {
        let p = (ip as f64 + 0.5 - np as f64 / 2.0) * 10.0 * len;
        for io in 0..no {
            let c = (io as f64 + 0.5 - no as f64 / 2.0) * 100.0 * delta;
            for is in 0..no {
                let s = (is as f64 + 0.5 - no as f64 / 2.0) * slope_step;
                curves.push(line_over_base(c, s, p, j));
                rects.push(crate::rectangles::make_rect(&curves[curves.len() - 1], curves.len() - 1, p, delta, 1.0)?);
            }
        }
    }
    Ok((rects, curves))
}

/// Whether `keep` is a maximal pairwise incomparable subset of `rects`.
pub fn is_maximal_incomparable(rects: &[CurvRect], curves: &[C2Curve], lambda: f64, keep: &[usize]) -> Result<bool> {
    for (a, &i) in keep.iter().enumerate() {
        for &k in &keep[a + 1..] {
            if comparable(&rects[i], &rects[k], curves, lambda)? {
                return Ok(false);
            }
        }
    }
    for i in 0..rects.len() {
        if keep.contains(&i) {
            continue;
        }
        let mut covered = false;
        for &k in keep {
            covered |= comparable(&rects[i], &rects[k], curves, lambda)?;
        }
        if !covered {
            return Ok(false);
        }
    }
    Ok(true)
}

fn rectangles(seed: u64) -> Verdict {
    let delta = (2f64).powi(-20);
    let base = line_over_base(0.0, 0.0, 0.0, Interval::unit_centered());
    let mut fits = Vec::new();
    let mut ok = true;
    for lambda in [100.0, 400.0, 1600.0] {
        let (rects, curves) = lambda_cluster(lambda, delta)?;
        // all inside the (lambda delta, 1)-rectangle over the base curve
        let big = Interval::centered(0.0, (lambda * delta).sqrt());
        let inside = rects.iter().all(|r| {
            big.contains_interval(&r.interval)
                && crate::rectangles::sup_gap(&curves[r.anchor], &base, &r.interval) + delta <= lambda * delta
        });
        let keep = greedy_incomparable(&rects, &curves, 100.0, None)?;
        ok &= inside && keep.len() == rects.len();
        fits.push(rects.len() as f64 / lambda.powf(2.5));
    }
    let (lo, hi) = fits.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    let stable = hi <= 1.2 * lo && lo >= hi / 1.2;
    // exhaustive maximality on small random inputs
    let mut maximal = 0;
    let trials = 40usize;
    for k in 0..trials {
        let mut r = rng::seeded(rng::derive(rng::derive(seed, 800), k as u64));
        let j = Interval::unit_centered();
        let ncurves = r.gen_range(2..=8);
        let curves: Vec<C2Curve> = (0..ncurves)
            .map(|_| line_over_base(r.gen_range(-0.002..=0.002), r.gen_range(-0.05..=0.05), 0.0, j))
            .collect();
        let (d, t) = ((2f64).powi(-12), 0.5);
        let len = CurvRect::length(d, t);
        let m = r.gen_range(10..=50);
        let rects: Vec<CurvRect> = (0..m)
            .map(|_| {
                let a = r.gen_range(0..ncurves);
                let lo = r.gen_range(-0.1..=0.1);
                CurvRect { anchor: a, interval: Interval { lo, hi: lo + len }, delta: d, t }
            })
            .collect();
        let lambda = if k % 2 == 0 { 5.0 } else { 100.0 };
        let w: Vec<f64> = (0..m).map(|_| r.gen::<f64>()).collect();
        let keep = greedy_incomparable(&rects, &curves, lambda, Some(&w))?;
        maximal += usize::from(is_maximal_incomparable(&rects, &curves, lambda, &keep)?);
    }
    Ok((
        ok && stable && maximal == trials,
        format!(
            "count / lambda^(5/2) at lambda = 100, 400, 1600: {:.3e}, {:.3e}, {:.3e} (spread {:.1}%); greedy maximal on {maximal}/{trials} random inputs",
            fits[0],
            fits[1],
            fits[2],
            100.0 * (hi / lo - 1.0)
        ),
    ))
}

fn kaufman(seed: u64) -> Verdict {
    let cfg = ExperimentConfig { seed, zeta: 0.8, s: 0.5, alpha: 0.8, deltas: vec![(2f64).powi(-10)], ..Default::default() };
    let generic = exp_kaufman(&cfg)?;
    let control = exp_kaufman(&ExperimentConfig {
        gamma: GammaChoice::Planar,
        allow_degenerate: true,
        carrier: Carrier::Segment,
        ..cfg.clone()
    })?;
    let fg = generic.get("exceptional_fraction").unwrap_or(1.0);
    let fc = control.get("exceptional_fraction").unwrap_or(0.0);
    Ok((
        fg <= 0.05 && fc == 1.0,
        format!("exceptional fraction {:.4} (<= 0.05); planar z-axis control {:.4} (= 1)", fg, fc),
    ))
}

/// Circle defining function over a 5x5x5 grid of `(y1, y2, r)`: max jet error
/// against the analytic circles, and the fitted separation constant
/// `min |f - f'| + |f' - f''| + ... / |(y, r) - (y', r')|` over pairs and grid points.
pub fn defining_function_stats(grid_pts: usize) -> Result<(f64, f64, bool)> {
    let i = Interval::unit_centered();
    let vals = [-0.1, -0.05, 0.0, 0.05, 0.1];
    let mut ys = Vec::new();
    let mut rs = Vec::new();
    for &y1 in &vals {
        for &y2 in &vals {
            for &r in &vals {
                ys.push([y1, y2]);
                rs.push(r);
            }
        }
    }
    let phi: Arc<dyn DefiningFunction> = Arc::new(CircleDefining);
    let (fam, rep) = family_from_defining_function(phi, &ys, &rs, i, 1e-13)?;
    let xs = i.grid(grid_pts);
    let mut err: f64 = 0.0;
    let jets: Vec<Vec<Jet>> = fam.curves.iter().map(|c| xs.iter().map(|&x| c.jet(x)).collect()).collect();
    for (k, c) in jets.iter().enumerate() {
        let circ = C2Curve::circle(ys[k][0], ys[k][1] - 1.0, 1.0 + rs[k], i)?;
        for (x, jt) in xs.iter().zip(c) {
            let a = circ.jet(*x);
            err = err.max((a.v - jt.v).abs()).max((a.d1 - jt.d1).abs()).max((a.d2 - jt.d2).abs());
        }
    }
    let n = jets.len();
    let eps = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut best = f64::INFINITY;
            for b in a + 1..n {
                let dp = ((ys[a][0] - ys[b][0]).powi(2) + (ys[a][1] - ys[b][1]).powi(2) + (rs[a] - rs[b]).powi(2)).sqrt();
                for (p, q) in jets[a].iter().zip(&jets[b]) {
                    best = best.min(p.c2_gap(q) / dp);
                }
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok((err, eps, rep.det_warning))
}

fn defining_function(_seed: u64) -> Verdict {
    let (err, eps, warn) = defining_function_stats(513)?;
    Ok((
        err <= 1e-8 && eps > 0.0 && !warn,
        format!("max jet error vs analytic circles {err:.2e} (<= 1e-8); fitted separation epsilon {eps:.4} (> 0); determinant warning {warn}"),
    ))
}
