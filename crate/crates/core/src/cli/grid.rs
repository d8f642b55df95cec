use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Inclusive `start:end:count` grid, `count ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.end
                } else {
                    self.start + (self.end - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, end, count] = parts.as_slice() else {
            return Err(format!("expected start:end:count, got {s:?}"));
        };
        let start: f64 = start.parse().map_err(|e| format!("bad start {start:?}: {e}"))?;
        let end: f64 = end.parse().map_err(|e| format!("bad end {end:?}: {e}"))?;
        let count: usize = count.parse().map_err(|e| format!("bad count {count:?}: {e}"))?;
        if !(start.is_finite() && end.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if count < 2 {
            return Err(format!("grid needs at least 2 points, got {count}"));
        }
        if end <= start {
            return Err(format!("grid end {end} must exceed start {start}"));
        }
        Ok(Self { start, end, count })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.count)
    }
}
