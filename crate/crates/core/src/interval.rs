use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Precondition(format!("interval needs lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    /// The symmetric window `[-1/2, 1/2]` used for circle families.
    pub fn unit_centered() -> Self {
        Interval { lo: -0.5, hi: 0.5 }
    }

    pub fn unit() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn centered(mid: f64, len: f64) -> Self {
        Interval { lo: mid - 0.5 * len, hi: mid + 0.5 * len }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Same midpoint, length scaled by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Interval::centered(self.mid(), self.len() * s)
    }

    pub fn half(&self) -> Self {
        self.scaled(0.5)
    }

    pub fn quarter(&self) -> Self {
        self.scaled(0.25)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, o: &Interval) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn intersect(&self, o: &Interval) -> Option<Interval> {
        let lo = self.lo.max(o.lo);
        let hi = self.hi.min(o.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }

    /// `n` equispaced points including both endpoints.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        assert!(n >= 2, "grid needs at least two points");
        let h = self.len() / (n - 1) as f64;
        (0..n)
            .map(|i| if i + 1 == n { self.hi } else { self.lo + i as f64 * h })
            .collect()
    }

    pub fn spacing(&self, n: usize) -> f64 {
        self.len() / (n - 1) as f64
    }
}

/// Grid size used when an operation has a natural scale `delta`.
pub fn default_grid_n(domain: &Interval, delta: f64) -> usize {
    4096usize.max((8.0 * domain.len() / delta).ceil() as usize)
}
