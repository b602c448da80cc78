//! (delta, t)-rectangles `f^delta(I)` with `|I| = sqrt(delta/t)`: tangency,
//! comparability, dilation, greedy incomparable selection and harvesting.

use rayon::prelude::*;

use crate::curve::{c2_extremes, tangency_from_samples, C2Curve, CurveFamily};
use crate::error::{Error, Result};
use crate::incidence::sublevel_unchecked;
use crate::interval::Interval;

/// Default tangency factor.
pub const TANGENCY_LAMBDA: f64 = 5.0;
/// Comparability factor used to deduplicate harvested rectangles.
pub const DEDUP_LAMBDA: f64 = 100.0;
/// Points used for sup-norm checks over a rectangle's interval.
pub const SUP_GRID: usize = 65;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvRect {
    /// Index of the anchor curve in its family.
    pub anchor: usize,
    pub interval: Interval,
    pub delta: f64,
    pub t: f64,
}

impl CurvRect {
    pub fn length(delta: f64, t: f64) -> f64 {
        (delta / t).sqrt()
    }

    /// Same centre, interval scaled by `c`, thickness kept: a `(delta, t/c^2)`-rectangle.
    pub fn shrink(&self, c: f64) -> CurvRect {
        CurvRect { interval: self.interval.scaled(c), t: self.t / (c * c), ..*self }
    }
}

/// `f^delta(I)` with `I` centred at `theta0`.
pub fn make_rect(f: &C2Curve, anchor: usize, theta0: f64, delta: f64, t: f64) -> Result<CurvRect> {
    if !(delta > 0.0 && delta <= t) {
        return Err(Error::Precondition(format!("need 0 < delta <= t, got delta={delta}, t={t}")));
    }
    let len = CurvRect::length(delta, t);
    let lo = theta0 - 0.5 * len;
    let interval = Interval { lo, hi: lo + len };
    if !f.domain().contains_interval(&interval) {
        return Err(Error::Precondition(format!(
            "interval [{}, {}] leaves the domain of `{}`",
            interval.lo,
            interval.hi,
            f.label()
        )));
    }
    Ok(CurvRect { anchor, interval, delta, t })
}

/// Grid sup of `|f - g|` over `i`.
pub fn sup_gap(f: &C2Curve, g: &C2Curve, i: &Interval) -> f64 {
    i.grid(SUP_GRID).into_iter().map(|x| (f.value(x) - g.value(x)).abs()).fold(0.0, f64::max)
}

/// `R subset g^{lambda delta}`, i.e. `sup_I |f - g| <= (lambda - 1) delta`.
pub fn is_tangent(r: &CurvRect, anchor: &C2Curve, g: &C2Curve, lambda: f64) -> bool {
    sup_gap(anchor, g, &r.interval) <= (lambda - 1.0) * r.delta
}

/// Witness test for lambda-comparability: the hull of the two intervals is
/// no longer than `sqrt(lambda delta / t)` and the anchors stay within
/// `(lambda - 1) delta` of each other over it.
pub fn comparable(r: &CurvRect, s: &CurvRect, curves: &[C2Curve], lambda: f64) -> Result<bool> {
    if r.delta != s.delta || r.t != s.t {
        return Err(Error::Precondition(format!(
            "comparing a ({}, {})-rectangle with a ({}, {})-rectangle",
            r.delta, r.t, s.delta, s.t
        )));
    }
    Ok(comparable_unchecked(r, s, curves, lambda))
}

fn comparable_unchecked(r: &CurvRect, s: &CurvRect, curves: &[C2Curve], lambda: f64) -> bool {
    let hull = r.interval.hull(&s.interval);
    if hull.len() > (lambda * r.delta / r.t).sqrt() * (1.0 + 1e-12) {
        return false;
    }
    if r.anchor == s.anchor {
        return true;
    }
    let (f, g) = (&curves[r.anchor], &curves[s.anchor]);
    let bound = (lambda - 1.0) * r.delta;
    // cheap rejection at the midpoint before the full sweep
    if (f.value(hull.mid()) - g.value(hull.mid())).abs() > bound {
        return false;
    }
    sup_gap(f, g, &hull) <= bound
}

/// `f^{width}(interval)`: the region `lambda R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dilated {
    pub anchor: usize,
    pub interval: Interval,
    pub width: f64,
}

/// `lambda R = f^{lambda delta}(lambda I cap J)`.
pub fn dilate(r: &CurvRect, lambda: f64, domain: &Interval) -> Result<Dilated> {
    if !(lambda >= 1.0) {
        return Err(Error::Precondition(format!("dilation factor {lambda} below 1")));
    }
    let interval = r.interval.scaled(lambda).intersect(domain).unwrap_or(r.interval);
    Ok(Dilated { anchor: r.anchor, interval, width: lambda * r.delta })
}

impl Dilated {
    /// Whether the `(delta, t)`-rectangle `r` lies inside this region.
    pub fn contains(&self, r: &CurvRect, curves: &[C2Curve]) -> bool {
        self.interval.contains_interval(&r.interval)
            && sup_gap(&curves[self.anchor], &curves[r.anchor], &r.interval) + r.delta <= self.width * (1.0 + 1e-12)
    }
}

/// Greedy selection of a maximal pairwise lambda-incomparable subfamily.
/// Candidates are visited by descending `weight`, then anchor id, then left
/// endpoint; each is kept iff it is incomparable to everything kept so far.
/// Returns indices into `rects`.
pub fn greedy_incomparable(rects: &[CurvRect], curves: &[C2Curve], lambda: f64, weights: Option<&[f64]>) -> Result<Vec<usize>> {
    if let Some(first) = rects.first() {
        if rects.iter().any(|r| r.delta != first.delta || r.t != first.t) {
            return Err(Error::Precondition("greedy selection needs uniform (delta, t)".into()));
        }
    }
    let mut order: Vec<usize> = (0..rects.len()).collect();
    let w = |i: usize| weights.map_or(0.0, |w| w[i]);
    order.sort_by(|&a, &b| {
        w(b).total_cmp(&w(a))
            .then(rects[a].anchor.cmp(&rects[b].anchor))
            .then(rects[a].interval.lo.total_cmp(&rects[b].interval.lo))
    });
    let reach = rects.first().map_or(0.0, |r| (lambda * r.delta / r.t).sqrt());
    // kept rectangles sorted by left endpoint, for windowed lookup
    let mut kept: Vec<(f64, usize)> = Vec::new();
    let mut out = Vec::new();
    for i in order {
        let r = &rects[i];
        let start = kept.partition_point(|&(lo, _)| lo < r.interval.lo - reach);
        let clash = kept[start..]
            .iter()
            .take_while(|&&(lo, _)| lo <= r.interval.lo + reach)
            .any(|&(_, k)| comparable_unchecked(r, &rects[k], curves, lambda));
        if !clash {
            let pos = kept.partition_point(|&(lo, _)| lo < r.interval.lo);
            kept.insert(pos, (r.interval.lo, i));
            out.push(i);
        }
    }
    Ok(out)
}

/// Knobs for harvesting tangency rectangles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarvestConfig {
    /// Keep pairs with `(Delta + 10 delta) ||f - g|| <= c_tangent delta t`.
    pub c_tangent: f64,
    /// Pairs with `t <= ||f - g|| <= sep_ratio t`.
    pub sep_ratio: f64,
    pub dedup_lambda: f64,
    pub grid_n: usize,
}

impl Default for HarvestConfig {
    fn default() -> Self {
        HarvestConfig { c_tangent: 40.0, sep_ratio: 6.0, dedup_lambda: DEDUP_LAMBDA, grid_n: 2049 }
    }
}

/// A harvested rectangle with the `E_delta` measure it covers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Harvested {
    pub rect: CurvRect,
    pub partner: usize,
    pub covered: f64,
}

/// Cover `E_delta(f, g)` by consecutive rectangles anchored on `f`, clipped into `J`.
fn cover_sublevel(f: &C2Curve, fi: usize, g: &C2Curve, gi: usize, delta: f64, t: f64) -> Vec<Harvested> {
    let e = sublevel_unchecked(f, g, delta);
    let Some(hull) = e.hull() else { return Vec::new() };
    let len = CurvRect::length(delta, t);
    let dom = f.domain();
    let n = ((hull.len() / len).ceil() as usize).max(1);
    let start = hull.mid() - 0.5 * n as f64 * len;
    (0..n)
        .filter_map(|k| {
            let lo = (start + k as f64 * len).clamp(dom.lo, dom.hi - len);
            let interval = Interval { lo, hi: lo + len };
            let covered: f64 = e.intervals.iter().filter_map(|i| i.intersect(&interval)).map(|i| i.len()).sum();
            (covered > 0.0).then_some(Harvested {
                rect: CurvRect { anchor: fi, interval, delta, t },
                partner: gi,
                covered,
            })
        })
        .collect()
}

/// Rectangles at the tangencies of pairs at distance about `t`, reduced to
/// a pairwise incomparable set.
pub fn harvest_tangency_rects(fam: &CurveFamily, delta: f64, t: f64, cfg: &HarvestConfig) -> Result<Vec<Harvested>> {
    if !(delta > 0.0 && delta <= t) {
        return Err(Error::Precondition(format!("need 0 < delta <= t, got delta={delta}, t={t}")));
    }
    let s = fam.sample_all(cfg.grid_n);
    let n = fam.len();
    let cands: Vec<Harvested> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut out = Vec::new();
            for j in i + 1..n {
                let d = c2_extremes(&s[i], &s[j]).1;
                if d < t || d > cfg.sep_ratio * t {
                    continue;
                }
                let big_delta = tangency_from_samples(&s[i], &s[j]);
                if (big_delta + 10.0 * delta) * d > cfg.c_tangent * delta * t {
                    continue;
                }
                out.extend(cover_sublevel(&fam.curves[i], i, &fam.curves[j], j, delta, t));
            }
            out
        })
        .collect();
    let rects: Vec<CurvRect> = cands.iter().map(|h| h.rect).collect();
    let weights: Vec<f64> = cands.iter().map(|h| h.covered).collect();
    let keep = greedy_incomparable(&rects, &fam.curves, cfg.dedup_lambda, Some(&weights))?;
    Ok(keep.into_iter().map(|k| cands[k]).collect())
}

/// Number of curves in `group` that `r` is tangent to.
pub fn multiplicity(r: &CurvRect, curves: &[C2Curve], group: &[usize], lambda: f64) -> usize {
    let a = &curves[r.anchor];
    group.iter().filter(|&&g| is_tangent(r, a, &curves[g], lambda)).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_length() {
        let f = C2Curve::circle(0.0, 0.0, 1.0, Interval::unit_centered()).unwrap();
        let r = make_rect(&f, 0, 0.0, 1.0 / 1024.0, 0.25).unwrap();
        assert_eq!(r.interval.len(), 1.0 / 16.0);
        // delta = t asks for a unit interval, longer than this domain
        let g = C2Curve::circle(0.0, 0.0, 1.0, Interval::new(-0.4, 0.4).unwrap()).unwrap();
        assert!(make_rect(&g, 0, 0.0, 0.5, 0.5).is_err());
        assert_eq!(make_rect(&f, 0, 0.0, 0.5, 0.5).unwrap().interval.len(), 1.0);
    }

    #[test]
    fn shrink_keeps_shape() {
        let r = CurvRect { anchor: 0, interval: Interval::centered(0.1, 0.2), delta: 0.01, t: 0.25 };
        let s = r.shrink(0.5);
        assert!((s.interval.len() - CurvRect::length(s.delta, s.t)).abs() < 1e-15);
        assert!((s.interval.mid() - 0.1).abs() < 1e-15);
    }
}
