use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Source variance `Q` and channel-noise variance `N` of one problem instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    q: f64,
    n: f64,
}

impl ProblemParams {
    pub fn new(q: f64, n: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::InvalidParameter(format!("Q must be positive, got {q}")));
        }
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(format!("N must be positive, got {n}")));
        }
        Ok(Self { q, n })
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn n(&self) -> f64 {
        self.n
    }

    /// `E|X0| = √(2Q/π)`, the signal level minimising the two-point power cost.
    #[inline]
    pub fn mean_abs_source(&self) -> f64 {
        (2.0 * self.q / PI).sqrt()
    }

    /// `Q(1 − 2/π)`: the least power any sign-cancelling design can spend.
    #[inline]
    pub fn p2_min(&self) -> f64 {
        self.q * (1.0 - 2.0 / PI)
    }
}

/// Result of evaluating a cost curve at one power level.
///
/// Infeasibility is an ordinary outcome of a sweep, not an error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CostValue {
    Feasible(f64),
    Infeasible,
}

impl CostValue {
    pub fn value(self) -> Option<f64> {
        match self {
            CostValue::Feasible(v) => Some(v),
            CostValue::Infeasible => None,
        }
    }

    pub fn is_feasible(self) -> bool {
        matches!(self, CostValue::Feasible(_))
    }
}
