//! Problem instance: one ring-plus-central-mass configuration on a Kepler
//! ellipse.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Ring size cap. Far beyond any published use; bounds the cost of the
/// trigonometric sums.
pub const MAX_RING_SIZE: usize = 1_000_000;

/// One (1+n)-gon problem: `n` unit masses on the unit circle, a central
/// mass `m`, and orbital eccentricity `e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Number of ring bodies, `n >= 2`.
    pub n: usize,
    /// Central mass, `m >= 0` (ring masses are fixed at 1).
    pub m: f64,
    /// Orbital eccentricity, `0 <= e < 1`.
    pub e: f64,
}

impl Scenario {
    pub fn new(n: usize, m: f64, e: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("ring size n = {n} must be >= 2")));
        }
        if n > MAX_RING_SIZE {
            return Err(Error::domain(format!(
                "ring size n = {n} exceeds cap {MAX_RING_SIZE}"
            )));
        }
        if !m.is_finite() || m < 0.0 {
            return Err(Error::domain(format!("central mass m = {m} must be >= 0")));
        }
        if !e.is_finite() || !(0.0..1.0).contains(&e) {
            return Err(Error::domain(format!(
                "eccentricity e = {e} must lie in [0, 1)"
            )));
        }
        Ok(Scenario { n, m, e })
    }

    /// Circular (e = 0) instance.
    pub fn circular(n: usize, m: f64) -> Result<Self> {
        Scenario::new(n, m, 0.0)
    }

    /// Number of reduced modes, `floor(n/2)`.
    pub fn mode_count(&self) -> usize {
        self.n / 2
    }

    /// True when `l` indexes the two-dimensional half mode (even `n`,
    /// `l = n/2`).
    pub fn is_half_mode(&self, l: usize) -> bool {
        self.n % 2 == 0 && l == self.n / 2
    }

    /// Dimension of the reduced coefficient block for mode `l`: 4 in
    /// general, 2 for the half mode.
    pub fn block_dim(&self, l: usize) -> usize {
        if self.is_half_mode(l) {
            2
        } else {
            4
        }
    }

    pub(crate) fn check_mode(&self, l: usize) -> Result<()> {
        if l < 1 || l > self.mode_count() {
            return Err(Error::domain(format!(
                "mode l = {l} out of range 1..={} for n = {}",
                self.mode_count(),
                self.n
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_inputs() {
        assert!(Scenario::new(1, 1.0, 0.0).is_err());
        assert!(Scenario::new(4, -0.1, 0.0).is_err());
        assert!(Scenario::new(4, 1.0, 1.0).is_err());
        assert!(Scenario::new(4, 1.0, -0.2).is_err());
        assert!(Scenario::new(4, f64::NAN, 0.0).is_err());
        assert!(Scenario::new(2_000_000, 1.0, 0.0).is_err());
    }

    #[test]
    fn block_dims() {
        let s = Scenario::new(8, 1.0, 0.3).unwrap();
        assert_eq!(s.mode_count(), 4);
        assert_eq!(s.block_dim(1), 4);
        assert_eq!(s.block_dim(3), 4);
        assert_eq!(s.block_dim(4), 2);
        let s = Scenario::new(7, 1.0, 0.3).unwrap();
        assert_eq!(s.mode_count(), 3);
        assert_eq!(s.block_dim(3), 4);
    }
}
