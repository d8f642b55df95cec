//! Witsenhausen's two-point strategy `U1 = a·sign(X0) − X0`.
//!
//! The interim state is forced onto `{−a, +a}` and the receiver estimates it
//! from `Y1 = X1 + Z1` with the conditional mean `a·tanh(a·y/N)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::math::gaussian::std_normal_pdf;
use crate::math::quadrature::{integrate_1d, Domain, QuadratureConfig};
use crate::params::{CostValue, ProblemParams};

/// Discriminants within this relative distance of zero give a double root.
const DOUBLE_ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPointEval {
    pub a: f64,
    pub power: f64,
    pub cost: f64,
}

/// `P₂(a) = Q + a(a − 2√(2Q/π))`
pub fn power_cost(a: f64, p: &ProblemParams) -> f64 {
    p.q() + a * (a - 2.0 * p.mean_abs_source())
}

/// `S₂(a) = a²√(2π/N) φ(a/√N) ∫ φ(y/√N) / cosh(a y/N) dy`
pub fn estimation_cost(a: f64, p: &ProblemParams, cfg: &QuadratureConfig) -> Result<f64> {
    if a == 0.0 {
        return Ok(0.0);
    }
    let n = p.n();
    let sd = n.sqrt();
    let integral = integrate_1d(
        |y| std_normal_pdf(y / sd) * sech(a * y / n),
        Domain::Real { center: 0.0, scale: sd },
        cfg,
    )?;
    Ok(a * a * (2.0 * PI / n).sqrt() * std_normal_pdf(a / sd) * integral)
}

#[inline]
fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// Optimal receiver `E[X1 | Y1 = y1] = a·tanh(a·y1/N)`.
pub fn receiver(y1: f64, a: f64, p: &ProblemParams) -> f64 {
    a * (a * y1 / p.n()).tanh()
}

pub fn evaluate(a: f64, p: &ProblemParams, cfg: &QuadratureConfig) -> Result<TwoPointEval> {
    Ok(TwoPointEval {
        a,
        power: power_cost(a, p),
        cost: estimation_cost(a, p, cfg)?,
    })
}

/// Non-negative signal levels with `P₂(a) = power`, ascending.
///
/// Empty below `Q(1 − 2/π)`.
pub fn roots_for_power(power: f64, p: &ProblemParams) -> Vec<f64> {
    let c = p.mean_abs_source();
    let disc = c * c + (power - p.q());
    if disc < -DOUBLE_ROOT_TOL * p.q() {
        return Vec::new();
    }
    if disc.abs() <= DOUBLE_ROOT_TOL * p.q() {
        return vec![c];
    }
    let r = disc.sqrt();
    let lo = c - r;
    let mut roots = Vec::with_capacity(2);
    if lo.abs() <= DOUBLE_ROOT_TOL * c {
        roots.push(0.0);
    } else if lo > 0.0 {
        roots.push(lo);
    }
    roots.push(c + r);
    roots
}

/// Every root of `P₂(a) = power` with its estimation cost.
pub fn s2_branches(power: f64, p: &ProblemParams, cfg: &QuadratureConfig) -> Result<Vec<TwoPointEval>> {
    roots_for_power(power, p)
        .into_iter()
        .map(|a| {
            Ok(TwoPointEval {
                a,
                power,
                cost: estimation_cost(a, p, cfg)?,
            })
        })
        .collect()
}

/// `S₂(P)`: the best estimation cost over all roots at this power.
pub fn s2_of_p(power: f64, p: &ProblemParams, cfg: &QuadratureConfig) -> Result<CostValue> {
    let best = s2_branches(power, p, cfg)?
        .into_iter()
        .map(|e| e.cost)
        .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |m| m.min(s))));
    Ok(best.map_or(CostValue::Infeasible, CostValue::Feasible))
}
