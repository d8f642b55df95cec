//! The zero-estimation-cost scheme.
//!
//! The encoder sends `U1 = W1 + a·sign(X0) − X0` with `W1 ~ N(0, V1)`, so the
//! interim state `X1 = W1 + a·sign(X0)` is a deterministic function of the two
//! auxiliaries revealed to the decoder. The estimation cost is zero whenever
//! the information constraint `h(Y1) − ½log₂(2πeN) − 1 ≥ 0` holds, and the
//! power budget fixes `V1 = P − P₂(a)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::gaussian::gaussian_entropy_bits;
use crate::math::mixture::{mixture_entropy_bits, GaussianMixture1D};
use crate::math::quadrature::QuadratureConfig;
use crate::params::{CostValue, ProblemParams};
use crate::two_point::{power_cost, roots_for_power};

/// Slack values at or above `-ADMISSIBLE_TOL` bits count as admissible.
pub const ADMISSIBLE_TOL: f64 = 1e-9;
/// Resolution in `a` of admissible-set boundaries.
pub const BOUNDARY_TOL: f64 = 1e-8;
pub const DEFAULT_GRID: usize = 256;
pub const DEFAULT_TOL_P: f64 = 1e-4;
/// `p_star` gives up once the doubled upper bracket exceeds this multiple of `Q`.
pub const MAX_POWER_FACTOR: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZecDesign {
    pub a: f64,
    pub v1: f64,
    pub power: f64,
}

impl ZecDesign {
    /// Design spending exactly `power`, or `None` when `V1` would be negative.
    pub fn at_power(a: f64, power: f64, p: &ProblemParams) -> Option<Self> {
        let v1 = v1_for(a, power, p);
        (a >= 0.0 && v1 >= 0.0).then_some(Self { a, v1, power })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlackPeak {
    pub a: f64,
    pub slack: f64,
}

/// The admissible set at a fixed power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleInterval {
    /// Signal levels with `V1 ≥ 0`; `None` below `Q(1 − 2/π)`.
    pub power_interval: Option<(f64, f64)>,
    /// Sub-intervals where the information constraint also holds.
    pub feasible_subset: Vec<(f64, f64)>,
    pub max_slack: Option<f64>,
    pub argmax_a: Option<f64>,
}

impl AdmissibleInterval {
    pub fn is_empty(&self) -> bool {
        self.feasible_subset.is_empty()
    }

    pub fn contains(&self, a: f64) -> bool {
        self.feasible_subset.iter().any(|&(lo, hi)| a >= lo && a <= hi)
    }
}

/// `V1 = P − (Q + a² − 2a√(2Q/π))`; negative values mean the power is too small.
pub fn v1_for(a: f64, power: f64, p: &ProblemParams) -> f64 {
    power - power_cost(a, p)
}

/// `{a ≥ 0 : V1 ≥ 0}` at this power.
pub fn power_interval(power: f64, p: &ProblemParams) -> Option<(f64, f64)> {
    let roots = roots_for_power(power, p);
    match roots.as_slice() {
        [] => None,
        [lo, hi] => Some((*lo, *hi)),
        [r] if power > p.q() => Some((0.0, *r)),
        [r] => Some((*r, *r)),
        _ => unreachable!("quadratic has at most two roots"),
    }
}

/// Law of `Y1 = W1 + a·S + Z1`: `½N(−a, V1+N) + ½N(a, V1+N)`.
pub fn y1_mixture(a: f64, v1: f64, p: &ProblemParams) -> Result<GaussianMixture1D> {
    GaussianMixture1D::symmetric(a, v1 + p.n())
}

pub(crate) fn h_y1_bits(a: f64, v1: f64, p: &ProblemParams, cfg: &QuadratureConfig) -> Result<f64> {
    if v1 < 0.0 {
        return Err(Error::Domain(format!("V1 = {v1} < 0 at a = {a}")));
    }
    mixture_entropy_bits(&y1_mixture(a, v1, p)?, cfg)
}

/// `h(Y1) − ½log₂(2πeN) − 1` in bits.
pub fn info_slack_zec(a: f64, power: f64, p: &ProblemParams, cfg: &QuadratureConfig) -> Result<f64> {
    let v1 = v1_for(a, power, p);
    Ok(h_y1_bits(a, v1, p, cfg)? - gaussian_entropy_bits(p.n()) - 1.0)
}

/// Slack with `V1` clamped at zero; only meant for points of the power
/// interval, whose endpoints can land an ulp below zero.
pub(crate) fn interval_slack(a: f64, power: f64, p: &ProblemParams, cfg: &QuadratureConfig) -> Result<f64> {
    let v1 = v1_for(a, power, p).max(0.0);
    Ok(h_y1_bits(a, v1, p, cfg)? - gaussian_entropy_bits(p.n()) - 1.0)
}

pub(crate) struct Scan {
    pub subset: Vec<(f64, f64)>,
    pub peak: SlackPeak,
}

/// Grid scan of `slack` over `[lo, hi]`, boundaries bisected to
/// [`BOUNDARY_TOL`], with a local golden-section refinement of the peak.
pub(crate) fn scan_slack<F>(slack: F, (lo, hi): (f64, f64), grid: usize, with_subset: bool) -> Result<Scan>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if hi - lo <= 0.0 {
        let s = slack(lo)?;
        let subset = if s >= -ADMISSIBLE_TOL {
            vec![(lo, lo)]
        } else {
            Vec::new()
        };
        return Ok(Scan {
            subset,
            peak: SlackPeak { a: lo, slack: s },
        });
    }
    let grid = grid.max(2);
    let pts: Vec<f64> = (0..grid)
        .map(|i| {
            if i + 1 == grid {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (grid - 1) as f64
            }
        })
        .collect();
    let vals: Vec<f64> = pts.par_iter().map(|&a| slack(a)).collect::<Result<_>>()?;

    let best = (0..grid)
        .max_by(|&i, &j| vals[i].total_cmp(&vals[j]))
        .expect("grid is non-empty");
    let mut peak = SlackPeak {
        a: pts[best],
        slack: vals[best],
    };
    let (bl, br) = (pts[best.saturating_sub(1)], pts[(best + 1).min(grid - 1)]);
    let refined = golden_max(&slack, bl, br)?;
    if refined.slack > peak.slack {
        peak = refined;
    }

    let ok = |s: f64| s >= -ADMISSIBLE_TOL;
    let mut subset = Vec::new();
    if with_subset {
        let mut start = ok(vals[0]).then_some(pts[0]);
        for i in 0..grid - 1 {
            match (ok(vals[i]), ok(vals[i + 1])) {
                (true, false) => {
                    let edge = bisect_edge(&slack, pts[i], pts[i + 1])?;
                    subset.push((start.take().unwrap_or(pts[i]), edge));
                }
                (false, true) => start = Some(bisect_edge(&slack, pts[i + 1], pts[i])?),
                _ => {}
            }
        }
        if let Some(s) = start {
            subset.push((s, hi));
        }
        // admissible only between grid points, around the refined peak
        if subset.is_empty() && ok(peak.slack) {
            let left = if ok(slack(bl)?) {
                bl
            } else {
                bisect_edge(&slack, peak.a, bl)?
            };
            let right = if ok(slack(br)?) {
                br
            } else {
                bisect_edge(&slack, peak.a, br)?
            };
            subset.push((left, right));
        }
    }
    Ok(Scan { subset, peak })
}

/// Boundary between an admissible `inside` and an inadmissible `outside`.
fn bisect_edge<F>(slack: &F, mut inside: f64, mut outside: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    while (outside - inside).abs() > BOUNDARY_TOL {
        let mid = 0.5 * (inside + outside);
        if slack(mid)? >= -ADMISSIBLE_TOL {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(inside)
}

fn golden_max<F>(f: &F, mut a: f64, mut b: f64) -> Result<SlackPeak>
where
    F: Fn(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > BOUNDARY_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc > fd {
        SlackPeak { a: c, slack: fc }
    } else {
        SlackPeak { a: d, slack: fd }
    })
}

/// Admissible set `𝒜⁰(P)`, scanning `grid` points of the power interval.
pub fn admissible_zec(
    power: f64,
    p: &ProblemParams,
    cfg: &QuadratureConfig,
    grid: usize,
) -> Result<AdmissibleInterval> {
    let Some(interval) = power_interval(power, p) else {
        return Ok(AdmissibleInterval {
            power_interval: None,
            feasible_subset: Vec::new(),
            max_slack: None,
            argmax_a: None,
        });
    };
    let scan = scan_slack(|a| interval_slack(a, power, p, cfg), interval, grid, true)?;
    Ok(AdmissibleInterval {
        power_interval: Some(interval),
        feasible_subset: scan.subset,
        max_slack: Some(scan.peak.slack),
        argmax_a: Some(scan.peak.a),
    })
}

/// Largest information slack over the power interval, without the boundaries.
pub fn max_slack_zec(power: f64, p: &ProblemParams, cfg: &QuadratureConfig, grid: usize) -> Result<Option<SlackPeak>> {
    let Some(interval) = power_interval(power, p) else {
        return Ok(None);
    };
    Ok(Some(
        scan_slack(|a| interval_slack(a, power, p, cfg), interval, grid, false)?.peak,
    ))
}

pub fn is_feasible(power: f64, p: &ProblemParams, cfg: &QuadratureConfig, grid: usize) -> Result<bool> {
    Ok(max_slack_zec(power, p, cfg, grid)?.is_some_and(|pk| pk.slack >= -ADMISSIBLE_TOL))
}

/// `P* = min{P : 𝒜⁰(P) ≠ ∅}` to within `tol_p`.
pub fn p_star(p: &ProblemParams, cfg: &QuadratureConfig, tol_p: f64) -> Result<f64> {
    p_star_with_grid(p, cfg, tol_p, DEFAULT_GRID)
}

pub fn p_star_with_grid(p: &ProblemParams, cfg: &QuadratureConfig, tol_p: f64, grid: usize) -> Result<f64> {
    if tol_p.is_nan() || tol_p <= 0.0 {
        return Err(Error::InvalidParameter(format!("tol_P must be positive, got {tol_p}")));
    }
    let mut lo = p.p2_min();
    if is_feasible(lo, p, cfg, grid)? {
        return Ok(lo);
    }
    let mut hi = p.q();
    while !is_feasible(hi, p, cfg, grid)? {
        lo = hi;
        hi *= 2.0;
        if hi > MAX_POWER_FACTOR * p.q() {
            return Err(Error::NoUpperBound {
                limit: MAX_POWER_FACTOR * p.q(),
                q: p.q(),
                n: p.n(),
            });
        }
    }
    while hi - lo > tol_p {
        let mid = 0.5 * (lo + hi);
        if is_feasible(mid, p, cfg, grid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `S_ZEC(P)`: zero when `𝒜⁰(P)` is non-empty.
pub fn s_zec(power: f64, p: &ProblemParams, cfg: &QuadratureConfig) -> Result<CostValue> {
    Ok(if is_feasible(power, p, cfg, DEFAULT_GRID)? {
        CostValue::Feasible(0.0)
    } else {
        CostValue::Infeasible
    })
}
