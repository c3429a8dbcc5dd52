//! Uniform time grids used by the integrators and samplers.

use crate::error::{Error, Result};

/// A uniform grid on `[t0, t1]` with `steps` sub-intervals (`steps + 1` nodes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    t1: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, steps: usize) -> Result<Self> {
        if !t0.is_finite() || !t1.is_finite() {
            return Err(Error::InvalidArgument("non-finite grid endpoints".into()));
        }
        if t1 <= t0 {
            return Err(Error::InvalidArgument(format!(
                "grid requires t1 > t0, got t0 = {t0}, t1 = {t1}"
            )));
        }
        if steps < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid requires steps >= 2, got {steps}"
            )));
        }
        Ok(Self { t0, t1, steps })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    /// Number of sub-intervals.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of nodes, `steps + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Step size `(t1 - t0) / steps`.
    pub fn step(&self) -> f64 {
        (self.t1 - self.t0) / self.steps as f64
    }

    /// The `i`-th node. Computed as `t0 + i*h` so nodes are reproducible.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i <= self.steps);
        if i == self.steps {
            self.t1
        } else {
            self.t0 + self.step() * i as f64
        }
    }

    /// Iterator over all nodes.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |i| self.node(i))
    }

    /// Midpoint of the `i`-th sub-interval.
    pub fn midpoint(&self, i: usize) -> f64 {
        debug_assert!(i < self.steps);
        self.t0 + self.step() * (i as f64 + 0.5)
    }

    /// Same span with twice as many steps.
    pub fn refined(&self) -> Self {
        Self {
            t0: self.t0,
            t1: self.t1,
            steps: self.steps * 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_endpoints_exact() {
        let g = TimeGrid::new(0.0, 10.0, 7).unwrap();
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(7), 10.0);
        assert_eq!(g.len(), 8);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TimeGrid::new(0.0, 0.0, 10).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::new(f64::NAN, 1.0, 10).is_err());
    }

    #[test]
    fn midpoints_interleave_nodes() {
        let g = TimeGrid::new(1.0, 2.0, 4).unwrap();
        for i in 0..g.steps() {
            assert!(g.node(i) < g.midpoint(i) && g.midpoint(i) < g.node(i + 1));
        }
    }
}
