//! Closing curve graphs into pseudo-circles, certifying proper crossings,
//! perturbing away tangencies, and counting non-overlapping strip lenses.

use rand::Rng;
use rayon::prelude::*;

use crate::curve::{C2Curve, CurveFamily, Samples};
use crate::error::{Error, Result};
use crate::incidence::{zeros_with_samples, Root, ROOT_GRID};
use crate::interval::Interval;
use crate::rng;

/// Default tolerance for root location and transversality.
pub const ROOT_TOL: f64 = 1e-12;

/// Axis-parallel segment from `a` to `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Segment {
    fn xs(&self) -> (f64, f64) {
        (self.a[0].min(self.b[0]), self.a[0].max(self.b[0]))
    }
    fn ys(&self) -> (f64, f64) {
        (self.a[1].min(self.b[1]), self.a[1].max(self.b[1]))
    }
    fn vertical(&self) -> bool {
        self.a[0] == self.b[0]
    }

    /// Whether two axis-parallel segments share a point.
    pub fn meets(&self, o: &Segment) -> bool {
        let (ax, bx) = (self.xs(), o.xs());
        let (ay, by) = (self.ys(), o.ys());
        ax.0 <= bx.1 && bx.0 <= ax.1 && ay.0 <= by.1 && by.0 <= ay.1
    }
}

/// A graph over `J = [alpha, beta]` closed into a loop: flat extensions to
/// `alpha - j u` and `beta + j u`, verticals down to `-M - j u`, and a bottom.
#[derive(Clone, Debug)]
pub struct PseudoCircle {
    pub source: usize,
    pub graph: C2Curve,
    /// Stagger level `j >= 1`: rank of `f(alpha)` among the family.
    pub frame_index: usize,
    /// Left flat, left vertical, bottom, right vertical, right flat.
    pub frame: [Segment; 5],
}

impl PseudoCircle {
    /// Closed polyline: graph sampled at `n` points, then the frame.
    pub fn polyline(&self, n: usize) -> Vec<[f64; 2]> {
        let mut pts: Vec<[f64; 2]> = self.graph.domain().grid(n).into_iter().map(|t| [t, self.graph.value(t)]).collect();
        let [lf, lv, bottom, rv, rf] = self.frame;
        pts.extend([rf.a, rv.a, bottom.a, lv.a, lf.a]);
        pts
    }
}

fn endpoint_jitter_needed(vals: &[f64]) -> bool {
    let mut v = vals.to_vec();
    v.sort_by(f64::total_cmp);
    v.windows(2).any(|w| w[0] == w[1])
}

/// Extend each graph into a closed loop, frames staggered by `unit`.
pub fn extend_to_pseudocircles(fam: &CurveFamily, unit: f64) -> Vec<PseudoCircle> {
    let j = fam.domain;
    let mut curves = fam.curves.clone();
    let ends = |cs: &[C2Curve]| -> (Vec<f64>, Vec<f64>) { (cs.iter().map(|c| c.value(j.lo)).collect(), cs.iter().map(|c| c.value(j.hi)).collect()) };
    let (mut left, mut right) = ends(&curves);
    if endpoint_jitter_needed(&left) || endpoint_jitter_needed(&right) {
        let mut r = rng::seeded(0x5eed);
        for c in curves.iter_mut() {
            *c = c.shifted(r.gen_range(-1e-12..1e-12));
        }
        (left, right) = ends(&curves);
    }
    let m = curves
        .iter()
        .flat_map(|c| j.grid(257).into_iter().map(move |t| c.value(t).abs()))
        .fold(0.0, f64::max);
    let mut order: Vec<usize> = (0..curves.len()).collect();
    order.sort_by(|&a, &b| left[a].total_cmp(&left[b]));
    let mut out: Vec<Option<PseudoCircle>> = vec![None; curves.len()];
    for (rank, &i) in order.iter().enumerate() {
        let s = (rank + 1) as f64 * unit;
        let (xl, xr, yb) = (j.lo - s, j.hi + s, -m - s);
        let frame = [
            Segment { a: [j.lo, left[i]], b: [xl, left[i]] },
            Segment { a: [xl, left[i]], b: [xl, yb] },
            Segment { a: [xl, yb], b: [xr, yb] },
            Segment { a: [xr, yb], b: [xr, right[i]] },
            Segment { a: [xr, right[i]], b: [j.hi, right[i]] },
        ];
        out[i] = Some(PseudoCircle { source: i, graph: curves[i].clone(), frame_index: rank + 1, frame });
    }
    out.into_iter().map(|p| p.expect("every curve ranked")).collect()
}

/// Number of points where the straight parts of two loops meet.
pub fn frame_crossings(a: &PseudoCircle, b: &PseudoCircle) -> usize {
    let mut n = 0;
    for s in &a.frame {
        for t in &b.frame {
            if s.vertical() != t.vertical() && s.meets(t) {
                n += 1;
            }
        }
    }
    n
}

/// Total intersections of two loops: strip roots plus frame crossings.
pub fn loop_intersections(a: &PseudoCircle, b: &PseudoCircle, tol: f64) -> Result<usize> {
    let sa = a.graph.sample(ROOT_GRID);
    let sb = b.graph.sample(ROOT_GRID);
    Ok(zeros_with_samples(&a.graph, &b.graph, &sa, &sb, tol)?.len() + frame_crossings(a, b))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProperReport {
    pub pairs_checked: usize,
    /// Pairs with a root where `|h'| <= tol`.
    pub improper: Vec<(usize, usize)>,
    /// Pairs whose difference has more than two zeros.
    pub violations: Vec<(usize, usize)>,
    /// Pairs sharing a value at an endpoint of `J`.
    pub endpoint_ties: Vec<(usize, usize)>,
}

impl ProperReport {
    pub fn is_clean(&self) -> bool {
        self.improper.is_empty() && self.violations.is_empty() && self.endpoint_ties.is_empty()
    }

    /// Pairs that must be perturbed before lens counting.
    pub fn needs_perturbation(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.improper.iter().chain(&self.violations).chain(&self.endpoint_ties).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

fn pair_roots(fam: &CurveFamily, s: &[Samples], i: usize, j: usize, tol: f64) -> Result<Vec<Root>> {
    zeros_with_samples(&fam.curves[i], &fam.curves[j], &s[i], &s[j], tol)
}

/// Check every pair for transversal crossings and distinct endpoint values.
pub fn certify_proper(fam: &CurveFamily, tol: f64) -> ProperReport {
    let s = fam.sample_all(ROOT_GRID);
    let n = fam.len();
    let per: Vec<ProperReport> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rep = ProperReport::default();
            for j in i + 1..n {
                rep.pairs_checked += 1;
                let (fi, fj) = (&s[i].jets, &s[j].jets);
                if fi[0].v == fj[0].v || fi[fi.len() - 1].v == fj[fj.len() - 1].v {
                    rep.endpoint_ties.push((i, j));
                }
                match pair_roots(fam, &s, i, j, tol) {
                    Ok(roots) => {
                        if roots.iter().any(|r| !r.transversal) {
                            rep.improper.push((i, j));
                        }
                    }
                    Err(_) => rep.violations.push((i, j)),
                }
            }
            rep
        })
        .collect();
    let mut out = ProperReport::default();
    for r in per {
        out.pairs_checked += r.pairs_checked;
        out.improper.extend(r.improper);
        out.violations.extend(r.violations);
        out.endpoint_ties.extend(r.endpoint_ties);
    }
    out
}

#[derive(Clone, Debug)]
pub struct Perturbed {
    pub family: CurveFamily,
    /// `eta` per curve: the curve moved by `eta * lambda * delta`.
    pub eta: Vec<i8>,
    /// Total infinitesimal jitter per curve.
    pub jitter: Vec<f64>,
    pub rounds: usize,
}

/// Shift near-tangent curves by `eta lambda delta` (`eta` in {-1, 0, 1}) so
/// their differences change sign, then add a seeded jitter of size at most
/// `1e-6 delta` until every crossing is transversal and endpoint values are distinct.
pub fn perturb(fam: &CurveFamily, delta: f64, lambda: f64, seed: u64) -> Result<Perturbed> {
    let n = fam.len();
    let s = fam.sample_all(ROOT_GRID);
    let mut eta = vec![0i8; n];
    // pairs with no sign change that come within lambda*delta of touching
    let touching: Vec<(usize, usize, bool)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let s = &s;
            (i + 1..n).filter_map(move |j| {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for (a, b) in s[i].jets.iter().zip(&s[j].jets) {
                    let h = a.v - b.v;
                    lo = lo.min(h);
                    hi = hi.max(h);
                }
                if lo >= 0.0 && lo < lambda * delta {
                    Some((i, j, true))
                } else if hi <= 0.0 && -hi < lambda * delta {
                    Some((i, j, false))
                } else {
                    None
                }
            })
        })
        .collect();
    for (i, j, i_above) in touching {
        if eta[i] == 0 && eta[j] == 0 {
            eta[i] = if i_above { -1 } else { 1 };
        }
    }
    let shifted: Vec<C2Curve> =
        fam.curves.iter().zip(&eta).map(|(c, &e)| if e == 0 { c.clone() } else { c.shifted(e as f64 * lambda * delta) }).collect();
    let mut r = rng::seeded(seed);
    let mut jitter = vec![0.0; n];
    let amp = 1e-6 * delta;
    for round in 1..=3 {
        let curves: Vec<C2Curve> = shifted
            .iter()
            .zip(jitter.iter_mut())
            .map(|(c, jt)| {
                *jt = r.gen_range(-amp..=amp);
                c.shifted(*jt)
            })
            .collect();
        let cand = CurveFamily { curves, domain: fam.domain, kind: fam.kind.clone(), stats: None };
        let rep = certify_proper(&cand, ROOT_TOL);
        if rep.improper.is_empty() && rep.endpoint_ties.is_empty() {
            return Ok(Perturbed { family: cand, eta, jitter, rounds: round });
        }
        if round == 3 {
            return Err(Error::Unperturbable { rounds: 3, pairs: rep.improper.len() + rep.endpoint_ties.len() });
        }
    }
    unreachable!("loop returns by the third round")
}

/// The closed region bounded by two crossing graphs over `[theta1, theta2]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lens {
    pub pair: (usize, usize),
    pub roots: (f64, f64),
}

impl Lens {
    pub fn span(&self) -> f64 {
        self.roots.1 - self.roots.0
    }

    pub fn interval(&self) -> Interval {
        Interval { lo: self.roots.0, hi: self.roots.1 }
    }

    fn has(&self, c: usize) -> bool {
        self.pair.0 == c || self.pair.1 == c
    }
}

/// One lens per pair of loops whose graphs cross exactly twice in the strip.
pub fn enumerate_lenses(circles: &[PseudoCircle], tol: f64) -> Result<Vec<Lens>> {
    let s: Vec<Samples> = circles.par_iter().map(|c| c.graph.sample(ROOT_GRID)).collect();
    let n = circles.len();
    let per: Vec<Result<Vec<Lens>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in i + 1..n {
                let roots = zeros_with_samples(&circles[i].graph, &circles[j].graph, &s[i], &s[j], tol)?;
                if roots.len() == 2 {
                    let (a, b) = (circles[i].source, circles[j].source);
                    out.push(Lens { pair: (a.min(b), a.max(b)), roots: (roots[0].theta, roots[1].theta) });
                }
            }
            Ok(out)
        })
        .collect();
    let mut lenses = Vec::new();
    for p in per {
        lenses.extend(p?);
    }
    Ok(lenses)
}

/// Whether two lenses share an arc of positive length.
pub fn overlap(l1: &Lens, l2: &Lens) -> bool {
    let shares = [l1.pair.0, l1.pair.1].iter().any(|&c| l2.has(c));
    shares && l1.roots.0.max(l2.roots.0) < l1.roots.1.min(l2.roots.1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Increasing span, ties by pair ids.
    GreedyBySpan,
    /// Optimal search; only for at most 20 lenses.
    Exhaustive,
}

/// A pairwise non-overlapping sublist (indices into `lenses`).
pub fn max_nonoverlapping(lenses: &[Lens], strategy: Strategy) -> Result<Vec<usize>> {
    match strategy {
        Strategy::GreedyBySpan => Ok(greedy_by_span(lenses)),
        Strategy::Exhaustive => {
            if lenses.len() > 20 {
                return Err(Error::Precondition(format!("exhaustive search limited to 20 lenses, got {}", lenses.len())));
            }
            Ok(exhaustive(lenses))
        }
    }
}

fn greedy_by_span(lenses: &[Lens]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..lenses.len()).collect();
    order.sort_by(|&a, &b| lenses[a].span().total_cmp(&lenses[b].span()).then(lenses[a].pair.cmp(&lenses[b].pair)));
    // per curve, the claimed arcs sorted by left end; they never overlap
    let mut used: std::collections::HashMap<usize, Vec<(f64, f64)>> = std::collections::HashMap::new();
    let free = |arcs: Option<&Vec<(f64, f64)>>, lo: f64, hi: f64| {
        let Some(arcs) = arcs else { return true };
        let k = arcs.partition_point(|&(a, _)| a < hi);
        // only the last arc starting before `hi` can reach past `lo`
        k == 0 || arcs[k - 1].1 <= lo
    };
    let mut out = Vec::new();
    for i in order {
        let l = &lenses[i];
        let (lo, hi) = l.roots;
        if free(used.get(&l.pair.0), lo, hi) && free(used.get(&l.pair.1), lo, hi) {
            for c in [l.pair.0, l.pair.1] {
                let v = used.entry(c).or_default();
                let k = v.partition_point(|&(a, _)| a < lo);
                v.insert(k, (lo, hi));
            }
            out.push(i);
        }
    }
    out
}

fn exhaustive(lenses: &[Lens]) -> Vec<usize> {
    let n = lenses.len();
    let mut conflict = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && overlap(&lenses[i], &lenses[j]) {
                conflict[i] |= 1 << j;
            }
        }
    }
    fn search(k: usize, n: usize, allowed: u32, chosen: u32, conflict: &[u32], best: &mut u32) {
        if chosen.count_ones() + (allowed >> k).count_ones() <= best.count_ones() {
            return;
        }
        if k == n {
            *best = chosen;
            return;
        }
        if allowed & (1 << k) != 0 {
            search(k + 1, n, allowed & !conflict[k], chosen | (1 << k), conflict, best);
        }
        search(k + 1, n, allowed & !(1 << k), chosen, conflict, best);
    }
    let mut best = 0u32;
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    search(0, n, all, 0, &conflict, &mut best);
    (0..n).filter(|&i| best & (1 << i) != 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lens(a: usize, b: usize, lo: f64, hi: f64) -> Lens {
        Lens { pair: (a, b), roots: (lo, hi) }
    }

    #[test]
    fn overlap_rules() {
        let l = lens(0, 1, -0.2, 0.1);
        assert!(overlap(&l, &l));
        assert!(!overlap(&l, &lens(2, 3, -0.2, 0.1)));
        assert!(overlap(&l, &lens(1, 2, -0.1, 0.0)));
        assert!(!overlap(&l, &lens(1, 2, 0.1, 0.3)));
    }

    #[test]
    fn exhaustive_beats_or_ties_greedy() {
        let ls = vec![lens(0, 1, 0.0, 0.5), lens(0, 2, 0.0, 0.2), lens(0, 3, 0.3, 0.6), lens(1, 2, 0.1, 0.4)];
        let g = max_nonoverlapping(&ls, Strategy::GreedyBySpan).unwrap();
        let e = max_nonoverlapping(&ls, Strategy::Exhaustive).unwrap();
        assert!(e.len() >= g.len());
        for (x, &i) in e.iter().enumerate() {
            for &j in &e[x + 1..] {
                assert!(!overlap(&ls[i], &ls[j]));
            }
        }
    }
}
