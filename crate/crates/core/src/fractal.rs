//! Dyadic (delta, alpha; C)-sets, quasi-products and Frostman point clouds.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rng;
use crate::space_curve::Vec3;

/// `k` with `delta = 2^-k`, or an error.
pub fn dyadic_exponent(delta: f64) -> Result<u32> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::NotDyadic(delta));
    }
    let k = (-delta.log2()).round();
    if k > 62.0 || (2f64).powi(-(k as i32)) != delta {
        return Err(Error::NotDyadic(delta));
    }
    Ok(k as u32)
}

/// A union of cells `[i delta, (i+1) delta)` in `[0, 1]`, `delta = 2^-k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaSet {
    pub delta: f64,
    pub k: u32,
    /// Sorted, distinct cell indices in `[0, 2^k)`.
    pub cells: Vec<u64>,
    pub alpha: f64,
    pub c: f64,
}

impl DeltaSet {
    pub fn new(delta: f64, mut cells: Vec<u64>, alpha: f64, c: f64) -> Result<Self> {
        let k = dyadic_exponent(delta)?;
        cells.sort_unstable();
        cells.dedup();
        if let Some(&last) = cells.last() {
            if last >= 1u64 << k {
                return Err(Error::BadData(format!("cell {last} outside [0, 2^{k})")));
            }
        }
        Ok(DeltaSet { delta, k, cells, alpha, c })
    }

    /// All of `[0, 1]`.
    pub fn full(delta: f64) -> Result<Self> {
        let k = dyadic_exponent(delta)?;
        DeltaSet::new(delta, (0..1u64 << k).collect(), 1.0, 1.0)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.cells.len() as f64 * self.delta
    }

    pub fn contains_cell(&self, i: u64) -> bool {
        self.cells.binary_search(&i).is_ok()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= 0.0 && x < 1.0 && self.contains_cell((x / self.delta).floor() as u64)
    }

    pub fn with_params(mut self, alpha: f64, c: f64) -> Self {
        self.alpha = alpha;
        self.c = c;
        self
    }
}

/// Dyadic Cantor-type set: at each halving keep both children when
/// `floor(alpha * level)` increases, otherwise one child picked by `seed`.
/// The result has `2^floor(alpha k)` cells.
pub fn cantor_delta_set(delta: f64, alpha: f64, seed: u64) -> Result<DeltaSet> {
    let k = dyadic_exponent(delta)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Precondition(format!("alpha = {alpha} outside (0, 1]")));
    }
    let mut r = rng::seeded(seed);
    let mut cells = vec![0u64];
    for level in 1..=k {
        let both = (alpha * level as f64).floor() > (alpha * (level - 1) as f64).floor();
        cells = cells
            .into_iter()
            .flat_map(|c| {
                if both {
                    vec![2 * c, 2 * c + 1]
                } else {
                    vec![2 * c + r.gen_range(0..2u64)]
                }
            })
            .collect();
    }
    DeltaSet::new(delta, cells, alpha, 4.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SetValidation {
    pub passed: bool,
    pub worst: Interval,
    /// `|E cap I| / (delta^(1-alpha) |I|^alpha)` at the worst interval, i.e.
    /// the smallest constant that would pass.
    pub ratio: f64,
}

/// Check `|E cap I| <= C delta^(1-alpha) |I|^alpha` over all dyadic `I` with `|I| >= delta`.
pub fn validate_delta_set(e: &DeltaSet) -> SetValidation {
    let mut worst = SetValidation { passed: true, worst: Interval::unit(), ratio: 0.0 };
    for m in 0..=e.k {
        let shift = e.k - m;
        let len = (2f64).powi(-(m as i32));
        let bound = e.delta.powf(1.0 - e.alpha) * len.powf(e.alpha);
        let mut i = 0;
        while i < e.cells.len() {
            let parent = e.cells[i] >> shift;
            let mut j = i;
            while j < e.cells.len() && e.cells[j] >> shift == parent {
                j += 1;
            }
            let ratio = (j - i) as f64 * e.delta / bound;
            if ratio > worst.ratio {
                worst.ratio = ratio;
                worst.worst = Interval { lo: parent as f64 * len, hi: (parent + 1) as f64 * len };
            }
            i = j;
        }
    }
    worst.passed = worst.ratio <= e.c * (1.0 + 1e-12);
    worst
}

/// `E = union over a in A of {a} x B_a`, stored cellwise.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiProduct {
    pub a: DeltaSet,
    pub fibers: BTreeMap<u64, DeltaSet>,
}

impl QuasiProduct {
    pub fn delta(&self) -> f64 {
        self.a.delta
    }

    pub fn area(&self) -> f64 {
        self.fibers.values().map(|b| self.a.delta * b.measure()).sum()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        if !(0.0..1.0).contains(&x) {
            return false;
        }
        let i = (x / self.a.delta).floor() as u64;
        self.fibers.get(&i).is_some_and(|b| b.contains(y))
    }

    pub fn cell_count(&self) -> usize {
        self.fibers.values().map(|b| b.len()).sum()
    }

    /// Largest `|E cap Q| / (delta^(2-alpha-beta) |Q1|^alpha |Q2|^beta)` over
    /// axis-parallel dyadic rectangles `Q`, using `alpha` of `A` and `beta`
    /// of the fibers.
    pub fn worst_rectangle_ratio(&self, beta: f64) -> f64 {
        let (k, alpha, delta) = (self.a.k, self.a.alpha, self.a.delta);
        let pts: Vec<(u64, u64)> = self.fibers.iter().flat_map(|(&a, b)| b.cells.iter().map(move |&c| (a, c))).collect();
        let mut worst: f64 = 0.0;
        for m1 in 0..=k {
            for m2 in 0..=k {
                let mut counts: HashMap<(u64, u64), u64> = HashMap::new();
                for &(x, y) in &pts {
                    *counts.entry((x >> (k - m1), y >> (k - m2))).or_default() += 1;
                }
                let l1 = (2f64).powi(-(m1 as i32));
                let l2 = (2f64).powi(-(m2 as i32));
                let bound = delta.powf(2.0 - alpha - beta) * l1.powf(alpha) * l2.powf(beta);
                let top = counts.values().copied().max().unwrap_or(0);
                worst = worst.max(top as f64 * delta * delta / bound);
            }
        }
        worst
    }
}

pub fn build_quasi_product(a: &DeltaSet, fiber_gen: impl Fn(u64) -> DeltaSet) -> Result<QuasiProduct> {
    let mut fibers = BTreeMap::new();
    for &cell in &a.cells {
        let b = fiber_gen(cell);
        if b.delta != a.delta {
            return Err(Error::FiberMismatch { base: a.delta, fiber: b.delta });
        }
        fibers.insert(cell, b);
    }
    Ok(QuasiProduct { a: a.clone(), fibers })
}

/// A delta-separated point set in the unit ball with claimed Frostman data.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud3 {
    pub points: Vec<Vec3>,
    pub delta: f64,
    pub zeta: f64,
    pub c: f64,
}

type Key = (i64, i64, i64);

fn cell_key(p: &Vec3, s: f64) -> Key {
    ((p[0] / s).floor() as i64, (p[1] / s).floor() as i64, (p[2] / s).floor() as i64)
}

fn dist2(a: &Vec3, b: &Vec3) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

impl PointCloud3 {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest pairwise distance (infinite for fewer than two points).
    pub fn min_separation(&self) -> f64 {
        let s = self.delta;
        let mut grid: HashMap<Key, Vec<usize>> = HashMap::new();
        for (i, p) in self.points.iter().enumerate() {
            grid.entry(cell_key(p, s)).or_default().push(i);
        }
        let mut best = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let (a, b, c) = cell_key(p, s);
            for da in -1..=1 {
                for db in -1..=1 {
                    for dc in -1..=1 {
                        if let Some(v) = grid.get(&(a + da, b + db, c + dc)) {
                            for &j in v {
                                if j != i {
                                    best = best.min(dist2(p, &self.points[j]).sqrt());
                                }
                            }
                        }
                    }
                }
            }
        }
        if best.is_infinite() && self.points.len() > 1 {
            // every pair is at least one cell apart
            return s;
        }
        best
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrostmanCheck {
    pub passed: bool,
    pub worst_center: Vec3,
    pub worst_radius: f64,
    pub worst_count: usize,
    /// `count / (R/delta)^zeta` at the worst ball: the smallest passing constant.
    pub ratio: f64,
}

/// For every dyadic scale `s = 2^j delta <= 1`, cover space by open balls of
/// radius `R = 2s` centred on the lattice `s Z^3` and check
/// `#(Z cap B) <= C (R / delta)^zeta` on every occupied ball.
pub fn frostman_check_points(z: &PointCloud3) -> FrostmanCheck {
    let mut out = FrostmanCheck { passed: true, worst_center: [0.0; 3], worst_radius: 0.0, worst_count: 0, ratio: 0.0 };
    let mut j = 0;
    loop {
        let s = z.delta * (2f64).powi(j);
        if s > 1.0 {
            break;
        }
        let r = 2.0 * s;
        let mut counts: HashMap<Key, usize> = HashMap::new();
        for p in &z.points {
            let base = ((p[0] / s).round() as i64, (p[1] / s).round() as i64, (p[2] / s).round() as i64);
            for a in -2..=2 {
                for b in -2..=2 {
                    for c in -2..=2 {
                        let key = (base.0 + a, base.1 + b, base.2 + c);
                        let centre = [key.0 as f64 * s, key.1 as f64 * s, key.2 as f64 * s];
                        if dist2(p, &centre) < r * r {
                            *counts.entry(key).or_default() += 1;
                        }
                    }
                }
            }
        }
        let norm = (r / z.delta).powf(z.zeta);
        for (key, &n) in &counts {
            let ratio = n as f64 / norm;
            if ratio > out.ratio {
                out.ratio = ratio;
                out.worst_count = n;
                out.worst_radius = r;
                out.worst_center = [key.0 as f64 * s, key.1 as f64 * s, key.2 as f64 * s];
            }
        }
        j += 1;
    }
    out.passed = out.ratio <= z.c * (1.0 + 1e-12);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Thinned {
    /// The kept points; `c` is inflated to `p C ln(1/delta)`.
    pub cloud: PointCloud3,
    /// Whether more than `p/100` of the input survived.
    pub retained_enough: bool,
}

/// Keep each point independently with probability `p`.
pub fn random_thin(z: &PointCloud3, p: f64, seed: u64) -> Result<Thinned> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Precondition(format!("keep probability {p} outside (0, 1]")));
    }
    let mut r = rng::seeded(seed);
    let points: Vec<Vec3> = if p == 1.0 {
        z.points.clone()
    } else {
        z.points.iter().filter(|_| r.gen::<f64>() < p).copied().collect()
    };
    let retained_enough = points.len() as f64 > 0.01 * p * z.points.len() as f64;
    let c = if p == 1.0 { z.c } else { p * z.c * (1.0 / z.delta).ln() };
    Ok(Thinned { cloud: PointCloud3 { points, delta: z.delta, zeta: z.zeta, c }, retained_enough })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Carrier {
    /// Cantor dust in the cube `[-1/2, 1/2]^3`.
    Ball,
    /// Points on the z-axis.
    Segment,
    /// Points along a unit-speed helix.
    Curve,
}

/// Unit-speed helix used by [`Carrier::Curve`].
pub fn carrier_curve(t: f64) -> Vec3 {
    let (s, c) = (2.0 * t).sin_cos();
    [0.4 * c, 0.4 * s, 0.6 * t - 0.3]
}

/// Roughly `delta^-zeta` delta-separated points with a Frostman bound.
pub fn cantor_points_3d(delta: f64, zeta: f64, seed: u64, carrier: Carrier) -> Result<PointCloud3> {
    let k = dyadic_exponent(delta)?;
    if !(zeta > 0.0 && zeta <= 1.0) {
        return Err(Error::Precondition(format!("zeta = {zeta} outside (0, 1]")));
    }
    let points = match carrier {
        Carrier::Segment => cantor_delta_set(delta, zeta, seed)?
            .cells
            .iter()
            .map(|&i| [0.0, 0.0, -0.5 + (i as f64 + 0.5) * delta])
            .collect(),
        Carrier::Curve => cantor_delta_set(delta, zeta, seed)?
            .cells
            .iter()
            // slightly stretched so chords stay at least delta long
            .map(|&i| carrier_curve((i as f64 + 0.5) * delta * 1.02))
            .collect(),
        Carrier::Ball => {
            let mut r = rng::seeded(seed);
            let mut cubes: Vec<[u64; 3]> = vec![[0, 0, 0]];
            for level in 1..=k {
                let both = (zeta * level as f64).floor() > (zeta * (level - 1) as f64).floor();
                let mut next = Vec::with_capacity(cubes.len() * 2);
                for c in cubes {
                    let mut order: Vec<u64> = (0..8).collect();
                    order.shuffle(&mut r);
                    let first = order[0];
                    let picks = if both { vec![first, 7 - first] } else { vec![first] };
                    for ch in picks {
                        next.push([2 * c[0] + (ch & 1), 2 * c[1] + ((ch >> 1) & 1), 2 * c[2] + ((ch >> 2) & 1)]);
                    }
                }
                cubes = next;
            }
            cubes
                .into_iter()
                .map(|c| [
                    -0.5 + (c[0] as f64 + 0.5) * delta,
                    -0.5 + (c[1] as f64 + 0.5) * delta,
                    -0.5 + (c[2] as f64 + 0.5) * delta,
                ])
                .collect()
        }
    };
    Ok(PointCloud3 { points, delta, zeta, c: 8.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_detection() {
        assert_eq!(dyadic_exponent(1.0 / 1024.0).unwrap(), 10);
        assert!(dyadic_exponent(0.3).is_err());
        assert!(dyadic_exponent(2.0).is_err());
    }

    #[test]
    fn cantor_count_is_power_of_two() {
        let e = cantor_delta_set(1.0 / 1024.0, 0.5, 3).unwrap();
        assert_eq!(e.len(), 32);
        let e = cantor_delta_set(1.0 / 1024.0, 0.3, 3).unwrap();
        assert_eq!(e.len(), 8);
    }

    #[test]
    fn ball_cantor_is_separated() {
        let z = cantor_points_3d(1.0 / 256.0, 0.8, 1, Carrier::Ball).unwrap();
        assert!(z.min_separation() >= z.delta * (1.0 - 1e-12));
        assert_eq!(z.len(), 1 << 6);
    }
}
