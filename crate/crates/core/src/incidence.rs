//! Vertical neighbourhoods on a raster, counting fields and their L^p
//! integrals, and the zero/sublevel structure of `f - g`.

use rayon::prelude::*;

use crate::curve::{C2Curve, CurveFamily, Jet, Samples};
use crate::error::{Error, Result};
use crate::fractal::QuasiProduct;
use crate::interval::Interval;

/// Geometry of a raster: square cells of side `cell` tiling the window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RasterSpec {
    pub theta_range: Interval,
    pub y_range: Interval,
    pub cell: f64,
}

impl RasterSpec {
    pub fn new(theta_range: Interval, y_range: Interval, cell: f64) -> Result<Self> {
        let s = RasterSpec { theta_range, y_range, cell };
        for len in [theta_range.len(), y_range.len()] {
            let m = len / cell;
            if !(cell > 0.0) || (m - m.round()).abs() > 1e-9 * m.max(1.0) {
                return Err(Error::Misaligned(format!("window length {len} is not a multiple of cell {cell}")));
            }
        }
        Ok(s)
    }

    pub fn nx(&self) -> usize {
        (self.theta_range.len() / self.cell).round() as usize
    }

    pub fn ny(&self) -> usize {
        (self.y_range.len() / self.cell).round() as usize
    }

    pub fn theta_center(&self, i: usize) -> f64 {
        self.theta_range.lo + (i as f64 + 0.5) * self.cell
    }

    pub fn y_center(&self, j: usize) -> f64 {
        self.y_range.lo + (j as f64 + 0.5) * self.cell
    }

    /// Rows `j` with `|v - y_center(j)| <= delta`.
    pub fn rows_within(&self, v: f64, delta: f64) -> std::ops::Range<usize> {
        let ny = self.ny() as i64;
        let lo_f = ((v - delta - self.y_range.lo) / self.cell - 0.5).ceil() as i64;
        let hi_f = ((v + delta - self.y_range.lo) / self.cell - 0.5).floor() as i64;
        let mut lo = lo_f.clamp(0, ny) as usize;
        let mut hi = (hi_f + 1).clamp(0, ny) as usize;
        // settle rounding at the boundary rows against the exact predicate
        while lo > 0 && (v - self.y_center(lo - 1)).abs() <= delta {
            lo -= 1;
        }
        while lo < hi && (v - self.y_center(lo)).abs() > delta {
            lo += 1;
        }
        while (hi as i64) < ny && (v - self.y_center(hi)).abs() <= delta {
            hi += 1;
        }
        while hi > lo && (v - self.y_center(hi - 1)).abs() > delta {
            hi -= 1;
        }
        lo..hi
    }
}

/// Per-column runs of cells: `(column, rows)`.
pub type CellSet = Vec<(usize, std::ops::Range<usize>)>;

fn check_neighborhood(f: &C2Curve, delta: f64, spec: &RasterSpec) -> Result<()> {
    if spec.cell > delta / 4.0 * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!("cell {} exceeds delta/4 = {}", spec.cell, delta / 4.0)));
    }
    let d = f.domain();
    if !d.contains(spec.theta_center(0)) || !d.contains(spec.theta_center(spec.nx() - 1)) {
        return Err(Error::OutOfDomain { label: f.label().to_string(), theta: spec.theta_range.lo });
    }
    Ok(())
}

/// Cells whose centre is within vertical distance `delta` of the graph.
pub fn rasterize_neighborhood(f: &C2Curve, delta: f64, spec: &RasterSpec) -> Result<CellSet> {
    check_neighborhood(f, delta, spec)?;
    Ok((0..spec.nx())
        .filter_map(|i| {
            let r = spec.rows_within(f.value(spec.theta_center(i)), delta);
            (!r.is_empty()).then_some((i, r))
        })
        .collect())
}

pub fn cell_set_area(cells: &CellSet, spec: &RasterSpec) -> f64 {
    cells.iter().map(|(_, r)| r.len()).sum::<usize>() as f64 * spec.cell * spec.cell
}

/// Column-major grid of counts.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub spec: RasterSpec,
    pub nx: usize,
    pub ny: usize,
    pub counts: Vec<u32>,
}

impl Raster {
    pub fn zeros(spec: RasterSpec) -> Self {
        let (nx, ny) = (spec.nx(), spec.ny());
        Raster { spec, nx, ny, counts: vec![0; nx * ny] }
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.ny + j]
    }

    pub fn add_cells(&mut self, cells: &CellSet) {
        for (i, r) in cells {
            for j in r.clone() {
                self.counts[i * self.ny + j] += 1;
            }
        }
    }

    pub fn max(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    pub fn support_area(&self) -> f64 {
        self.counts.iter().filter(|&&c| c > 0).count() as f64 * self.spec.cell * self.spec.cell
    }
}

/// `sum_f 1_{f^delta}` sampled at cell centres.
pub fn counting_field(fam: &CurveFamily, delta: f64, spec: &RasterSpec) -> Result<Raster> {
    for f in &fam.curves {
        check_neighborhood(f, delta, spec)?;
    }
    let mut out = Raster::zeros(*spec);
    let ny = out.ny;
    out.counts.par_chunks_mut(ny).enumerate().for_each(|(i, col)| {
        let th = spec.theta_center(i);
        for f in &fam.curves {
            for j in spec.rows_within(f.value(th), delta) {
                col[j] += 1;
            }
        }
    });
    Ok(out)
}

/// `sum over cells with centre in E of count^p * cell^2`. `E` lives in
/// `[0,1]^2` and is placed with its origin at the raster's lower-left corner.
pub fn lp_integral(field: &Raster, e: &QuasiProduct, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Precondition(format!("exponent p = {p} below 1")));
    }
    let cell = field.spec.cell;
    let ratio = e.delta() / cell;
    if ratio < 1.0 - 1e-12 || (ratio - ratio.round()).abs() > 0.5 {
        return Err(Error::Misaligned(format!("product delta {} vs cell {cell}", e.delta())));
    }
    let m = ratio.round() as usize;
    if (ratio - m as f64).abs() > 1e-9 {
        return Err(Error::Misaligned(format!("product delta {} is not a multiple of cell {cell}", e.delta())));
    }
    let total: f64 = e
        .fibers
        .par_iter()
        .map(|(&a, b)| {
            let mut s = 0.0;
            let i0 = a as usize * m;
            for &bc in &b.cells {
                let j0 = bc as usize * m;
                for i in i0..(i0 + m).min(field.nx) {
                    for j in j0..(j0 + m).min(field.ny) {
                        let c = field.get(i, j);
                        if c > 0 {
                            s += (c as f64).powf(p);
                        }
                    }
                }
            }
            s
        })
        .sum();
    Ok(total * cell * cell)
}

/// Area of `f^delta cap g^delta` on the raster.
pub fn overlap_area(f: &C2Curve, g: &C2Curve, delta: f64, spec: &RasterSpec) -> Result<f64> {
    let a = rasterize_neighborhood(f, delta, spec)?;
    let b = rasterize_neighborhood(g, delta, spec)?;
    let mut cells = 0usize;
    let (mut p, mut q) = (0, 0);
    while p < a.len() && q < b.len() {
        match a[p].0.cmp(&b[q].0) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                let lo = a[p].1.start.max(b[q].1.start);
                let hi = a[p].1.end.min(b[q].1.end);
                cells += hi.saturating_sub(lo);
                p += 1;
                q += 1;
            }
        }
    }
    Ok(cells as f64 * spec.cell * spec.cell)
}

/// A zero of `f - g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub theta: f64,
    pub transversal: bool,
}

pub const ROOT_GRID: usize = 4096;

fn diff(f: &C2Curve, g: &C2Curve, t: f64) -> Jet {
    let (a, b) = (f.jet(t), g.jet(t));
    Jet::new(a.v - b.v, a.d1 - b.d1, a.d2 - b.d2)
}

fn bisect(mut lo: f64, mut hi: f64, tol: f64, eval: impl Fn(f64) -> f64) -> f64 {
    let mut flo = eval(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = eval(mid);
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

/// Breakpoints `lo = p_0 < ... < p_m = hi` between which `h` is monotone
/// (at grid resolution), from `h'` sampled on `grid`.
fn monotone_pieces(f: &C2Curve, g: &C2Curve, grid: &[f64], d1: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let (lo, hi) = (grid[0], grid[n - 1]);
    let tol = 1e-15 * (hi - lo).max(1.0);
    let mut pts = vec![lo];
    for k in 0..n - 1 {
        if d1[k] == 0.0 && k > 0 {
            pts.push(grid[k]);
        } else if d1[k] * d1[k + 1] < 0.0 {
            pts.push(bisect(grid[k], grid[k + 1], tol, |t| diff(f, g, t).d1));
        }
    }
    pts.push(hi);
    pts.dedup();
    pts
}

fn pieces_on(f: &C2Curve, g: &C2Curve, span: Interval, n: usize) -> Vec<f64> {
    let grid = span.grid(n);
    let d1: Vec<f64> = grid.iter().map(|&t| diff(f, g, t).d1).collect();
    monotone_pieces(f, g, &grid, &d1)
}

/// Zeros of `h = f - g` on the shared domain, located to within `tol`.
/// Sign changes on monotone pieces give one root each; a critical point with
/// `|h| <= tol` is a tangential root.
pub fn zeros_of_difference(f: &C2Curve, g: &C2Curve, tol: f64) -> Result<Vec<Root>> {
    let dom = f.domain();
    if dom != g.domain() {
        return Err(Error::DomainMismatch(dom.lo, dom.hi, g.domain().lo, g.domain().hi));
    }
    zeros_with_samples(f, g, &f.sample(ROOT_GRID), &g.sample(ROOT_GRID), tol)
}

/// [`zeros_of_difference`] reusing jets already sampled on a common grid.
pub fn zeros_with_samples(f: &C2Curve, g: &C2Curve, sf: &Samples, sg: &Samples, tol: f64) -> Result<Vec<Root>> {
    let n = sf.n();
    if n != sg.n() || n < 2 {
        return Err(Error::Precondition("samples must share a grid of at least two points".into()));
    }
    let grid: Vec<f64> = (0..n).map(|i| sf.theta(i)).collect();
    let d1: Vec<f64> = sf.jets.iter().zip(&sg.jets).map(|(a, b)| a.d1 - b.d1).collect();
    let pts = monotone_pieces(f, g, &grid, &d1);
    let h: Vec<f64> = pts.iter().map(|&t| diff(f, g, t).v).collect();
    let zero = |k: usize| h[k].abs() <= tol;
    let mut roots: Vec<Root> = Vec::new();
    for k in 0..pts.len() {
        if zero(k) {
            let d1 = diff(f, g, pts[k]).d1;
            roots.push(Root { theta: pts[k], transversal: d1.abs() > tol });
        }
        if k + 1 < pts.len() && !zero(k) && !zero(k + 1) && h[k] * h[k + 1] < 0.0 {
            let t = bisect(pts[k], pts[k + 1], tol, |t| diff(f, g, t).v);
            let d1 = diff(f, g, t).d1;
            roots.push(Root { theta: t, transversal: d1.abs() > tol });
        }
    }
    roots.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    roots.dedup_by(|a, b| (a.theta - b.theta).abs() <= tol);
    if roots.len() > 2 {
        return Err(Error::CinematicViolation { roots: roots.iter().map(|r| r.theta).collect() });
    }
    Ok(roots)
}

/// `E_delta = { theta in J/4 : |f - g| <= delta }` as at most two intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct SublevelSet {
    pub intervals: Vec<Interval>,
    pub delta: f64,
}

impl SublevelSet {
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|i| i.len()).sum()
    }

    pub fn hull(&self) -> Option<Interval> {
        let first = self.intervals.first()?;
        Some(self.intervals.iter().fold(*first, |a, b| a.hull(b)))
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Sublevel set of `|f - g|` on `J/4`. Requires `delta <= ||f-g|| / (6K)`
/// where `K` is the family's cinematic constant and `||f-g||` is `c2`.
pub fn sublevel_intervals(f: &C2Curve, g: &C2Curve, delta: f64, c2: f64, cinematic_k: f64) -> Result<SublevelSet> {
    if !(delta > 0.0) || delta > c2 / (6.0 * cinematic_k) {
        return Err(Error::Precondition(format!(
            "delta = {delta:e} exceeds the 6K threshold ||f-g||/(6K) = {:e}",
            c2 / (6.0 * cinematic_k)
        )));
    }
    Ok(sublevel_unchecked(f, g, delta))
}

/// Same as [`sublevel_intervals`] without the scale precondition.
pub fn sublevel_unchecked(f: &C2Curve, g: &C2Curve, delta: f64) -> SublevelSet {
    let span = f.domain().quarter();
    let pts = pieces_on(f, g, span, ROOT_GRID);
    let tol = 1e-15 * span.len();
    let mut pieces: Vec<Interval> = Vec::new();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ha, hb) = (diff(f, g, a).v, diff(f, g, b).v);
        let inside = |v: f64| v.abs() <= delta;
        // h is monotone on [a, b], so { |h| <= delta } is an interval there
        let lo = if inside(ha) {
            Some(a)
        } else if (ha < -delta && hb >= -delta) || (ha > delta && hb <= delta) {
            let level = if ha < 0.0 { -delta } else { delta };
            Some(bisect(a, b, tol, |t| diff(f, g, t).v - level))
        } else {
            None
        };
        let Some(lo) = lo else { continue };
        let hi = if inside(hb) {
            b
        } else {
            let level = if hb > 0.0 { delta } else { -delta };
            bisect(lo, b, tol, |t| diff(f, g, t).v - level)
        };
        // single touching points have measure zero and are dropped
        if hi > lo {
            pieces.push(Interval { lo, hi });
        }
    }
    let mut merged: Vec<Interval> = Vec::new();
    for p in pieces {
        match merged.last_mut() {
            Some(last) if p.lo <= last.hi + 2.0 * tol => last.hi = last.hi.max(p.hi),
            _ => merged.push(p),
        }
    }
    SublevelSet { intervals: merged, delta }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_within_matches_predicate() {
        let spec = RasterSpec::new(Interval::unit(), Interval::unit(), 1.0 / 256.0).unwrap();
        for v in [0.5, 0.123456, 0.0, 1.0, -0.1] {
            let r = spec.rows_within(v, 1.0 / 64.0);
            for j in 0..spec.ny() {
                assert_eq!(r.contains(&j), (v - spec.y_center(j)).abs() <= 1.0 / 64.0);
            }
        }
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(1.0, 2.0, 1e-14, |x| x * x - 2.0);
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-13);
    }
}
