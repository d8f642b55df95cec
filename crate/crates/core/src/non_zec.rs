//! The non-zero-estimation-cost scheme.
//!
//! Same encoder as [`crate::zec`], but the sign auxiliary reaches the decoder
//! through a binary crossover channel: `W2 = a·S` with probability `1 − γ` and
//! `−a·S` with probability `γ`. The information constraint becomes
//! `h(Y1) + H₂(γ) − h(Y1 | W1, W2) ≥ 1` and the MMSE of `X1` given
//! `(W1, W2, Y1)` is
//!
//! ```text
//! F(a, γ, P) = a² − (a²/2) ∬ I(w1, y1) dw1 dy1
//! ```
//!
//! with `I = G0·[((1−γ)G1 − γG2)²/((1−γ)G1 + γG2) + (γG1 − (1−γ)G2)²/(γG1 + (1−γ)G2)]`.
//!
//! `G1` and `G2` only depend on `y1 − w1`, so the integral is evaluated in the
//! sheared coordinates `(w1, t = y1 − w1)`, where the integrand factors into a
//! Gaussian in `w1` and a two-component envelope in `t`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::gaussian::{binary_entropy_bits, gaussian_entropy_bits, normal_pdf};
use crate::math::mixture::{mixture_entropy_bits, GaussianMixture1D};
use crate::math::quadrature::{integrate_1d, integrate_2d, Domain, QuadratureConfig};
use crate::params::{CostValue, ProblemParams};
use crate::zec::{h_y1_bits, power_interval, v1_for, ADMISSIBLE_TOL};

/// Largest quadrature excursion of `F` outside `[0, a²]` that is clamped silently.
const CLAMP_WARN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonZecDesign {
    pub a: f64,
    pub gamma: f64,
    pub v1: f64,
    pub power: f64,
}

impl NonZecDesign {
    pub fn at_power(a: f64, gamma: f64, power: f64, p: &ProblemParams) -> Result<Self> {
        if !(0.0..=0.5).contains(&gamma) {
            return Err(Error::InvalidParameter(format!("γ = {gamma} outside [0, 0.5]")));
        }
        let v1 = v1_for(a, power, p);
        if a < 0.0 || v1 < 0.0 {
            return Err(Error::Domain(format!("a = {a} needs more than P = {power}")));
        }
        Ok(Self { a, gamma, v1, power })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostSurfaceSample {
    pub a: f64,
    pub gamma: f64,
    pub power: f64,
    pub f_value: f64,
    pub info_slack: f64,
    pub admissible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub gamma_points: usize,
    pub a_points: usize,
    pub refine_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            gamma_points: 26,
            a_points: 128,
            refine_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonZecOptimum {
    pub value: f64,
    pub design: NonZecDesign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NonZecOutcome {
    Feasible(NonZecOptimum),
    Infeasible,
}

impl NonZecOutcome {
    pub fn cost(&self) -> CostValue {
        match self {
            NonZecOutcome::Feasible(o) => CostValue::Feasible(o.value),
            NonZecOutcome::Infeasible => CostValue::Infeasible,
        }
    }

    pub fn optimum(&self) -> Option<&NonZecOptimum> {
        match self {
            NonZecOutcome::Feasible(o) => Some(o),
            NonZecOutcome::Infeasible => None,
        }
    }
}

/// `h(Y1 | W1, W2)` in bits: entropy of `(1−γ)N(a, N) + γN(−a, N)`.
pub fn cond_entropy_y_given_w(a: f64, gamma: f64, p: &ProblemParams, cfg: &QuadratureConfig) -> Result<f64> {
    if gamma == 0.0 || gamma == 1.0 {
        return Ok(gaussian_entropy_bits(p.n()));
    }
    mixture_entropy_bits(&GaussianMixture1D::crossover(a, gamma, p.n())?, cfg)
}

/// `h(Y1) + H₂(γ) − h(Y1 | W1, W2) − 1` in bits.
pub fn info_slack_nonzec(a: f64, gamma: f64, power: f64, p: &ProblemParams, cfg: &QuadratureConfig) -> Result<f64> {
    let v1 = v1_for(a, power, p);
    slack_at_v1(a, gamma, v1, p, cfg)
}

fn slack_at_v1(a: f64, gamma: f64, v1: f64, p: &ProblemParams, cfg: &QuadratureConfig) -> Result<f64> {
    let h_y1 = h_y1_bits(a, v1, p, cfg)?;
    Ok(h_y1 + binary_entropy_bits(gamma) - cond_entropy_y_given_w(a, gamma, p, cfg)? - 1.0)
}

/// Bracketed sum of `I` as a function of `t = y1 − w1`, without the `G0` factor.
///
/// Each bracket `[(1−γ)G1 − γG2]² / ((1−γ)G1 + γG2)` is written as
/// `D·tanh²(½·log-odds)`; at `γ ∈ {0, 1}` the log-odds are infinite and the
/// surviving pure term is recovered exactly.
fn crossover_term(t: f64, a: f64, gamma: f64, n: f64) -> f64 {
    let g1 = normal_pdf(t, a, n);
    let g2 = normal_pdf(t, -a, n);
    let d1 = (1.0 - gamma) * g1 + gamma * g2;
    let d2 = gamma * g1 + (1.0 - gamma) * g2;
    let llr = 2.0 * a * t / n;
    let prior = (1.0 - gamma).ln() - gamma.ln();
    let m1 = (0.5 * (llr + prior)).tanh();
    let m2 = (0.5 * (llr - prior)).tanh();
    d1 * m1 * m1 + d2 * m2 * m2
}

/// `I(w1, y1)`. With `v1 = 0` the `G0` factor is the unit mass at `w1 = 0`
/// and the value is the section `I(0, y1 − w1)` without it.
pub fn mmse_integrand(w1: f64, y1: f64, a: f64, gamma: f64, v1: f64, p: &ProblemParams) -> f64 {
    let g0 = if v1 == 0.0 { 1.0 } else { normal_pdf(w1, 0.0, v1) };
    g0 * crossover_term(y1 - w1, a, gamma, p.n())
}

/// `∬ I(w1, y1) dw1 dy1`, between 0 and 2.
///
/// `I` depends on `y1` only through `t = y1 − w1`, so integrating out `w1`
/// removes `G0` exactly and leaves a 1-D integral in `t` for every `V1`.
pub fn mmse_integral(a: f64, gamma: f64, v1: f64, p: &ProblemParams, cfg: &QuadratureConfig) -> Result<f64> {
    if v1 < 0.0 {
        return Err(Error::Domain(format!("V1 = {v1} < 0")));
    }
    let n = p.n();
    let half = a + crate::math::quadrature::REAL_LINE_SIGMAS * n.sqrt();
    integrate_1d(
        |t| crossover_term(t, a, gamma, n),
        Domain::Interval { lo: -half, hi: half },
        cfg,
    )
}

/// The same integral by tensor Gauss–Hermite over `(w1, t)`.
///
/// The `t` hint carries a central component so that nodes reach the dip of
/// the bracket between `±a`.
pub fn mmse_integral_2d(a: f64, gamma: f64, v1: f64, p: &ProblemParams, cfg: &QuadratureConfig) -> Result<f64> {
    if v1 <= 0.0 {
        return mmse_integral(a, gamma, v1, p, cfg);
    }
    let n = p.n();
    let hint_w = GaussianMixture1D::single(0.0, v1)?;
    let hint_t = if a > 0.0 {
        GaussianMixture1D::new([(0.4, -a, n), (0.2, 0.0, n), (0.4, a, n)])?
    } else {
        GaussianMixture1D::single(0.0, n)?
    };
    integrate_2d(|w, t| mmse_integrand(w, w + t, a, gamma, v1, p), &hint_w, &hint_t, cfg)
}

/// `F` at an explicit `V1`.
pub fn cost_f_v1(a: f64, gamma: f64, v1: f64, p: &ProblemParams, cfg: &QuadratureConfig) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("γ = {gamma} outside [0, 1]")));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    let a2 = a * a;
    let f = a2 - 0.5 * a2 * mmse_integral(a, gamma, v1, p, cfg)?;
    if f < -CLAMP_WARN || f > a2 + CLAMP_WARN {
        log::warn!("F(a = {a}, γ = {gamma}, V1 = {v1}) = {f} outside [0, {a2}]; clamping");
    }
    Ok(f.clamp(0.0, a2))
}

/// `F(a, γ, P) = a² − (a²/2)∬I`, the MMSE of the design spending power `P`.
pub fn cost_f(a: f64, gamma: f64, power: f64, p: &ProblemParams, cfg: &QuadratureConfig) -> Result<f64> {
    cost_f_v1(a, gamma, v1_for(a, power, p), p, cfg)
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if hi <= lo || points < 2 {
        return vec![lo];
    }
    (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (points - 1) as f64
            }
        })
        .collect()
}

/// `S_Non-ZEC(P) = min { F(a, γ, P) : a ∈ 𝒜^γ(P), γ ∈ [0, ½] }`.
///
/// Coarse `(γ, a)` grid followed by a compass search from the best admissible
/// cell, down to `search.refine_tol` in both coordinates.
pub fn s_nonzec(power: f64, p: &ProblemParams, cfg: &QuadratureConfig, search: &SearchConfig) -> Result<NonZecOutcome> {
    let Some((a_lo, a_hi)) = power_interval(power, p) else {
        return Ok(NonZecOutcome::Infeasible);
    };
    let a_grid = grid(a_lo, a_hi, search.a_points);
    let g_grid = grid(0.0, 0.5, search.gamma_points);

    // h(Y1) depends on a only; h(Y1|W) on (a, γ) but not on P.
    let h_y1: Vec<f64> = a_grid
        .par_iter()
        .map(|&a| h_y1_bits(a, v1_for(a, power, p).max(0.0), p, cfg))
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, usize)> = (0..g_grid.len())
        .flat_map(|gi| (0..a_grid.len()).map(move |ai| (gi, ai)))
        .collect();
    let values: Vec<Option<f64>> = cells
        .par_iter()
        .map(|&(gi, ai)| {
            let (a, gamma) = (a_grid[ai], g_grid[gi]);
            let slack = h_y1[ai] + binary_entropy_bits(gamma) - cond_entropy_y_given_w(a, gamma, p, cfg)? - 1.0;
            if slack < -ADMISSIBLE_TOL {
                return Ok(None);
            }
            let v1 = v1_for(a, power, p).max(0.0);
            cost_f_v1(a, gamma, v1, p, cfg).map(Some)
        })
        .collect::<Result<_>>()?;

    let best = cells
        .iter()
        .zip(&values)
        .filter_map(|(&cell, v)| v.map(|v| (cell, v)))
        .min_by(|x, y| x.1.total_cmp(&y.1));
    let Some(((gi, ai), value)) = best else {
        return Ok(NonZecOutcome::Infeasible);
    };

    let objective = |a: f64, gamma: f64| -> Result<Option<f64>> {
        if a < a_lo || a > a_hi || !(0.0..=0.5).contains(&gamma) {
            return Ok(None);
        }
        let v1 = v1_for(a, power, p).max(0.0);
        if slack_at_v1(a, gamma, v1, p, cfg)? < -ADMISSIBLE_TOL {
            return Ok(None);
        }
        cost_f_v1(a, gamma, v1, p, cfg).map(Some)
    };

    let (mut a, mut gamma, mut best_value) = (a_grid[ai], g_grid[gi], value);
    let mut step_a = if a_grid.len() > 1 { a_grid[1] - a_grid[0] } else { 0.0 };
    let mut step_g = g_grid[1] - g_grid[0];
    while best_value > 0.0 && (step_a >= search.refine_tol || step_g >= search.refine_tol) {
        let mut moved = false;
        for (da, dg) in [(step_a, 0.0), (-step_a, 0.0), (0.0, step_g), (0.0, -step_g)] {
            if da == 0.0 && dg == 0.0 {
                continue;
            }
            let (ca, cg) = ((a + da).clamp(a_lo, a_hi), (gamma + dg).clamp(0.0, 0.5));
            if let Some(v) = objective(ca, cg)? {
                if v < best_value {
                    (a, gamma, best_value) = (ca, cg, v);
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            step_a *= 0.5;
            step_g *= 0.5;
        }
    }

    Ok(NonZecOutcome::Feasible(NonZecOptimum {
        value: best_value,
        design: NonZecDesign {
            a,
            gamma,
            v1: v1_for(a, power, p).max(0.0),
            power,
        },
    }))
}

/// Every `(a, γ, P)` on the grids, with `a` spanning `a_points` of each power
/// interval. Powers below `Q(1 − 2/π)` contribute nothing.
pub fn cost_region(
    powers: &[f64],
    gammas: &[f64],
    a_points: usize,
    p: &ProblemParams,
    cfg: &QuadratureConfig,
) -> Result<Vec<CostSurfaceSample>> {
    if powers.is_empty() || gammas.is_empty() {
        return Err(Error::InvalidParameter("power and γ grids must be non-empty".into()));
    }
    let mut jobs = Vec::new();
    for &power in powers {
        if let Some((lo, hi)) = power_interval(power, p) {
            for &gamma in gammas {
                for a in grid(lo, hi, a_points) {
                    jobs.push((power, gamma, a));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|&(power, gamma, a)| {
            let v1 = v1_for(a, power, p).max(0.0);
            let info_slack = slack_at_v1(a, gamma, v1, p, cfg)?;
            Ok(CostSurfaceSample {
                a,
                gamma,
                power,
                f_value: cost_f_v1(a, gamma, v1, p, cfg)?,
                info_slack,
                admissible: info_slack >= -ADMISSIBLE_TOL,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::gaussian::std_normal_pdf;
    use crate::two_point;
    use crate::zec;

    fn params() -> ProblemParams {
        ProblemParams::new(1.0, 0.15).unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn cond_entropy_examples() {
        let p = params();
        let h0 = cond_entropy_y_given_w(0.8, 0.0, &p, &cfg()).unwrap();
        assert_eq!(h0, gaussian_entropy_bits(0.15));
        let h1 = cond_entropy_y_given_w(0.8, 0.1, &p, &cfg()).unwrap();
        let h9 = cond_entropy_y_given_w(0.8, 0.9, &p, &cfg()).unwrap();
        assert!((h1 - h9).abs() < 1e-9);
        let base = gaussian_entropy_bits(0.15);
        assert!(h1 >= base && h1 <= base + binary_entropy_bits(0.1));
    }

    #[test]
    fn slack_at_gamma_zero_is_zec() {
        let p = params();
        for &(a, power) in &[(0.8, 0.5), (0.5, 0.6), (1.0, 0.9)] {
            assert_eq!(
                info_slack_nonzec(a, 0.0, power, &p, &cfg()).unwrap(),
                zec::info_slack_zec(a, power, &p, &cfg()).unwrap()
            );
        }
    }

    #[test]
    fn slack_at_half_drops_w2_penalty() {
        let p = params();
        let (a, power) = (0.8, 0.5);
        let v1 = v1_for(a, power, &p);
        let h_y1 = h_y1_bits(a, v1, &p, &cfg()).unwrap();
        let hc = cond_entropy_y_given_w(a, 0.5, &p, &cfg()).unwrap();
        let s = info_slack_nonzec(a, 0.5, power, &p, &cfg()).unwrap();
        assert!((s - (h_y1 - hc)).abs() < 1e-12);
        assert!(s >= 0.0);
    }

    #[test]
    fn slack_relaxes_with_gamma() {
        let p = params();
        let power = 0.37;
        let (lo, hi) = power_interval(power, &p).unwrap();
        for a in grid(lo, hi, 9) {
            let s0 = info_slack_nonzec(a, 0.0, power, &p, &cfg()).unwrap();
            let s1 = info_slack_nonzec(a, 0.1, power, &p, &cfg()).unwrap();
            assert!(s1 >= s0 - 1e-9, "a = {a}: {s1} < {s0}");
        }
    }

    #[test]
    fn integrand_gamma_limits() {
        let p = params();
        let (a, v1) = (0.8, 0.05);
        for &(w, y) in &[(0.0, 0.3), (0.1, -0.7), (-0.2, 1.4)] {
            let g0 = normal_pdf(w, 0.0, v1);
            let g1 = normal_pdf(y - (w + a), 0.0, p.n());
            let g2 = normal_pdf(y - (w - a), 0.0, p.n());
            let i0 = mmse_integrand(w, y, a, 0.0, v1, &p);
            assert!((i0 - g0 * (g1 + g2)).abs() < 1e-12 * i0.max(1.0));
            let ih = mmse_integrand(w, y, a, 0.5, v1, &p);
            let expected = g0 * (g1 - g2).powi(2) / (g1 + g2);
            assert!((ih - expected).abs() < 1e-12 * expected.max(1.0));
        }
    }

    #[test]
    fn integrand_matches_posterior_assembly() {
        // I assembled from the posterior means and joint densities of (w1, w2 = ±a, y1)
        let p = params();
        let (a, gamma, v1, n) = (0.8_f64, 0.1, 0.02_f64, 0.15_f64);
        let (w1, y1) = (0.0, a);
        let sd = n.sqrt();
        let g0 = std_normal_pdf(w1 / v1.sqrt()) / v1.sqrt();
        let g1 = std_normal_pdf((y1 - (w1 + a)) / sd) / sd;
        let g2 = std_normal_pdf((y1 - (w1 - a)) / sd) / sd;
        let mut total = 0.0;
        for (p_given_plus, p_given_minus) in [(1.0 - gamma, gamma), (gamma, 1.0 - gamma)] {
            let post_plus = p_given_plus * g1 / (p_given_plus * g1 + p_given_minus * g2);
            let post_minus = 1.0 - post_plus;
            let cond_mean_offset = a * (post_plus - post_minus);
            let joint = 0.5 * g0 * (p_given_plus * g1 + p_given_minus * g2);
            // (a²/2)·I accumulates E[(offset)²] density
            total += cond_mean_offset.powi(2) * joint;
        }
        let from_posterior = total * 2.0 / (a * a);
        let direct = mmse_integrand(w1, y1, a, gamma, v1, &p);
        assert!(
            (direct - from_posterior).abs() < 1e-12 * direct,
            "{direct} vs {from_posterior}"
        );
    }

    #[test]
    fn cost_zero_at_gamma_zero() {
        let p = params();
        for &(a, v1) in &[(0.8, 0.05), (0.3, 0.4), (1.4, 0.01)] {
            let f = cost_f_v1(a, 0.0, v1, &p, &cfg()).unwrap();
            assert!(f.abs() < 1e-8, "a = {a}: {f}");
        }
    }

    #[test]
    fn cost_symmetric_in_gamma() {
        let p = params();
        for &(a, g, v1) in &[(0.8, 0.1, 0.05), (0.5, 0.3, 0.2), (1.1, 0.02, 0.0)] {
            let f = cost_f_v1(a, g, v1, &p, &cfg()).unwrap();
            let m = cost_f_v1(a, 1.0 - g, v1, &p, &cfg()).unwrap();
            assert!((f - m).abs() < 1e-7);
        }
    }

    #[test]
    fn cost_degenerates_to_two_point() {
        let p = params();
        for a in [0.4, 0.8, 1.2] {
            let f = cost_f_v1(a, 0.5, 0.0, &p, &cfg()).unwrap();
            let s2 = two_point::estimation_cost(a, &p, &cfg()).unwrap();
            assert!((f - s2).abs() < 1e-5, "a = {a}: {f} vs {s2}");
        }
    }

    #[test]
    fn tensor_rule_matches_reduction() {
        let p = params();
        let one = mmse_integral(0.8, 0.2, 0.0, &p, &cfg()).unwrap();
        for v1 in [1e-4, 0.05, 0.5, 2.0] {
            let two = mmse_integral_2d(0.8, 0.2, v1, &p, &cfg()).unwrap();
            assert!((two - one).abs() < 1e-8, "V1 = {v1}: {two} vs {one}");
        }
        for &(a, g, v1) in &[(1.5, 0.3, 0.1), (3.0, 0.5, 0.1), (2.0, 0.01, 1.0), (0.05, 0.2, 0.3)] {
            let one = mmse_integral(a, g, v1, &p, &cfg()).unwrap();
            let two = mmse_integral_2d(a, g, v1, &p, &cfg()).unwrap();
            assert!((two - one).abs() < 1e-8, "a = {a}, γ = {g}: {two} vs {one}");
        }
    }

    #[test]
    fn integral_in_range() {
        let p = params();
        for &(a, g, v1) in &[(0.2, 0.05, 0.1), (0.8, 0.25, 0.3), (1.5, 0.5, 0.01), (0.9, 0.0, 0.2)] {
            let s = mmse_integral(a, g, v1, &p, &cfg()).unwrap();
            assert!((-1e-9..=2.0 + 1e-9).contains(&s), "{s}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = params();
        assert!(cost_f_v1(0.8, 1.2, 0.1, &p, &cfg()).is_err());
        assert!(matches!(cost_f(0.8, 0.1, 0.3, &p, &cfg()), Err(Error::Domain(_))));
        assert!(matches!(
            info_slack_nonzec(0.8, 0.1, 0.3, &p, &cfg()),
            Err(Error::Domain(_))
        ));
        assert!(NonZecDesign::at_power(0.8, 0.7, 0.5, &p).is_err());
    }

    #[test]
    fn s_nonzec_zero_above_p_star() {
        let p = params();
        let search = SearchConfig {
            gamma_points: 6,
            a_points: 24,
            ..Default::default()
        };
        let out = s_nonzec(0.45, &p, &cfg(), &search).unwrap();
        let opt = out.optimum().unwrap();
        assert!(opt.value < 1e-8);
        assert_eq!(s_nonzec(0.3, &p, &cfg(), &search).unwrap(), NonZecOutcome::Infeasible);
    }

    #[test]
    fn s_nonzec_at_p2_min() {
        let p = params();
        let search = SearchConfig {
            gamma_points: 6,
            a_points: 24,
            ..Default::default()
        };
        let out = s_nonzec(p.p2_min(), &p, &cfg(), &search).unwrap();
        let s2 = two_point::estimation_cost(p.mean_abs_source(), &p, &cfg()).unwrap();
        let v = out.cost().value().unwrap();
        assert!((v - s2).abs() < 2e-3, "{v} vs {s2}");
    }

    #[test]
    fn region_gamma_zero_is_flat() {
        let p = params();
        let samples = cost_region(&[0.4, 0.6], &[0.0], 8, &p, &cfg()).unwrap();
        assert!(!samples.is_empty());
        for s in samples {
            assert!(s.f_value.abs() < 1e-8);
        }
    }
}
