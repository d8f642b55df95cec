//! Adaptive Gauss–Legendre integration on the line and tensor-product
//! Gauss–Hermite integration on the plane.
//!
//! The 2-D rule is driven by a pair of Gaussian-mixture "hints", one per axis.
//! The integral is rewritten as an expectation under the product of the hint
//! densities,
//!
//! ```text
//! ∬ f(x, y) dx dy = Σ_k Σ_l w_k w_l E_{N_k ⊗ N_l}[ f(x, y) / (h_x(x) h_y(y)) ]
//! ```
//!
//! and every component expectation is evaluated with a Gauss–Hermite rule
//! after the affine map `x = μ + √(2v)·u`. When the hints match the Gaussian
//! envelope of `f` the ratio is smooth and bounded and the rule converges in a
//! handful of nodes. The node count is doubled until two successive estimates
//! agree to `rel_tol`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::mixture::GaussianMixture1D;

/// Half-width, in scale units, of the window standing in for the real line.
pub const REAL_LINE_SIGMAS: f64 = 10.0;

const LEGENDRE_ORDER: usize = 10;
const INITIAL_PANELS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Panel bisections allowed in a 1-D integral.
    pub max_subdivisions: usize,
    /// Gauss–Hermite nodes per axis for the first 2-D estimate.
    pub hermite_nodes: usize,
    /// Node-count doublings allowed before a 2-D integral gives up.
    pub max_doublings: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_subdivisions: 20_000,
            hermite_nodes: 64,
            max_doublings: 3,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("quadrature tolerances must be positive".into()));
        }
        if self.hermite_nodes < 8 {
            return Err(Error::InvalidParameter("hermite_nodes must be at least 8".into()));
        }
        if self.max_doublings == 0 {
            return Err(Error::InvalidParameter("max_doublings must be at least 1".into()));
        }
        Ok(())
    }
}

/// Integration domain for [`integrate_1d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval {
        lo: f64,
        hi: f64,
    },
    /// The whole line, truncated to `center ± REAL_LINE_SIGMAS·scale`.
    Real {
        center: f64,
        scale: f64,
    },
}

pub fn integrate_1d<F>(f: F, domain: Domain, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let breaks = match domain {
        Domain::Interval { lo, hi } => uniform_breaks(lo, hi, INITIAL_PANELS),
        Domain::Real { center, scale } => {
            if scale.is_nan() || scale <= 0.0 {
                return Err(Error::Domain(format!("scale must be positive, got {scale}")));
            }
            let half = REAL_LINE_SIGMAS * scale;
            uniform_breaks(center - half, center + half, 2 * REAL_LINE_SIGMAS as usize)
        }
    };
    integrate_panels(f, &breaks, cfg)
}

pub(crate) fn uniform_breaks(lo: f64, hi: f64, panels: usize) -> Vec<f64> {
    let panels = panels.max(1);
    (0..=panels)
        .map(|i| {
            if i == panels {
                hi
            } else {
                lo + (hi - lo) * i as f64 / panels as f64
            }
        })
        .collect()
}

/// Adaptive bisection over the panels delimited by `breaks`.
pub(crate) fn integrate_panels<F>(f: F, breaks: &[f64], cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if breaks.len() < 2 {
        return Ok(0.0);
    }
    let (lo, hi) = (breaks[0], breaks[breaks.len() - 1]);
    let width = hi - lo;
    if width == 0.0 {
        return Ok(0.0);
    }

    let mut stack: Vec<(f64, f64, f64)> = Vec::with_capacity(breaks.len() * 2);
    let mut magnitude = 0.0;
    for w in breaks.windows(2) {
        let (est, abs_est) = legendre_panel(&f, w[0], w[1]);
        magnitude += abs_est;
        stack.push((w[0], w[1], est));
    }
    let tol = cfg.abs_tol.max(cfg.rel_tol * magnitude);

    let mut total = 0.0;
    let mut splits = 0usize;
    let mut worst = 0.0f64;
    while let Some((a, b, whole)) = stack.pop() {
        let m = 0.5 * (a + b);
        let (left, _) = legendre_panel(&f, a, m);
        let (right, _) = legendre_panel(&f, m, b);
        let err = (left + right - whole).abs();
        let local_tol = tol * (b - a) / width.abs();
        if err <= local_tol || m == a || m == b {
            total += left + right;
            continue;
        }
        splits += 1;
        worst = worst.max(err);
        if splits > cfg.max_subdivisions {
            return Err(Error::NonConvergence {
                context: format!("1-D adaptive quadrature on [{lo}, {hi}]"),
                last_change: worst,
            });
        }
        stack.push((a, m, left));
        stack.push((m, b, right));
    }
    Ok(total)
}

/// Gauss–Legendre estimate on `[a, b]` together with the estimate of `∫|f|`.
fn legendre_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let rule = legendre_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let (mut s, mut s_abs) = (0.0, 0.0);
    for &(x, w) in rule {
        let v = f(mid + half * x);
        s += w * v;
        s_abs += w * v.abs();
    }
    (s * half, s_abs * half.abs())
}

fn legendre_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(LEGENDRE_ORDER))
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        out[i] = (-z, w);
        out[n - 1 - i] = (z, w);
    }
    out
}

/// Nodes and weights of the `n`-point Gauss–Hermite rule for the weight `e^{−x²}`.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let pim4 = PI.powf(-0.25);
    let nf = n as f64;
    let mut rule: Vec<(f64, f64)> = hermite_jacobi_eigenvalues(n)
        .into_iter()
        .map(|mut z| {
            // Newton polish on the orthonormal recurrence; the weight follows from p'_n
            let mut pp = 0.0;
            for _ in 0..4 {
                let (mut p1, mut p2) = (pim4, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                if pp == 0.0 {
                    break;
                }
                z -= p1 / pp;
            }
            (z, 2.0 / (pp * pp))
        })
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    // exact symmetry
    for i in 0..n / 2 {
        let (x, w) = rule[n - 1 - i];
        let x = 0.5 * (x - rule[i].0);
        let w = 0.5 * (w + rule[i].1);
        rule[i] = (-x, w);
        rule[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        rule[n / 2].0 = 0.0;
    }
    rule
}

/// Eigenvalues of the symmetric tridiagonal Jacobi matrix of the Hermite
/// weight (zero diagonal, off-diagonal `√(k/2)`), by implicit QL.
fn hermite_jacobi_eigenvalues(n: usize) -> Vec<f64> {
    let mut d = vec![0.0f64; n];
    let mut e: Vec<f64> = (0..n)
        .map(|k| if k + 1 < n { ((k + 1) as f64 / 2.0).sqrt() } else { 0.0 })
        .collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 60, "QL iteration failed for the Hermite Jacobi matrix");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d
}

type Rule = Arc<Vec<(f64, f64)>>;

fn hermite_rule(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("hermite cache poisoned").get(&n) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(gauss_hermite(n));
    cache
        .lock()
        .expect("hermite cache poisoned")
        .entry(n)
        .or_insert_with(|| Arc::clone(&rule));
    rule
}

/// Integrate `f` over the plane with tensor Gauss–Hermite rules placed by the
/// per-axis hints. See the module documentation for the change of measure.
pub fn integrate_2d<F>(
    f: F,
    hint_x: &GaussianMixture1D,
    hint_y: &GaussianMixture1D,
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let mut nodes = cfg.hermite_nodes;
    let mut prev = tensor_hermite(&f, hint_x, hint_y, nodes);
    let mut change = f64::INFINITY;
    for _ in 0..cfg.max_doublings {
        nodes *= 2;
        let cur = tensor_hermite(&f, hint_x, hint_y, nodes);
        change = (cur - prev).abs();
        if change <= cfg.abs_tol.max(cfg.rel_tol * cur.abs()) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergence {
        context: format!("2-D Gauss–Hermite at {nodes} nodes per axis"),
        last_change: change,
    })
}

/// Hint-density values at the mapped nodes of one component.
struct AxisNodes {
    weight: f64,
    points: Vec<(f64, f64, f64)>, // (x, rule weight / √π, hint density)
}

fn axis_nodes(hint: &GaussianMixture1D, rule: &[(f64, f64)]) -> Vec<AxisNodes> {
    let inv_sqrt_pi = 1.0 / PI.sqrt();
    hint.components()
        .iter()
        .filter(|c| c.weight > 0.0)
        .map(|c| {
            let s = (2.0 * c.variance).sqrt();
            let points = rule
                .iter()
                .map(|&(u, w)| {
                    let x = c.mean + s * u;
                    (x, w * inv_sqrt_pi, hint.pdf(x))
                })
                .collect();
            AxisNodes {
                weight: c.weight,
                points,
            }
        })
        .collect()
}

fn tensor_hermite<F>(f: &F, hint_x: &GaussianMixture1D, hint_y: &GaussianMixture1D, n: usize) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let rule = hermite_rule(n);
    let xs = axis_nodes(hint_x, &rule);
    let ys = axis_nodes(hint_y, &rule);
    let mut total = 0.0;
    for cx in &xs {
        for cy in &ys {
            let mut acc = 0.0;
            for &(x, wx, hx) in &cx.points {
                let mut row = 0.0;
                for &(y, wy, hy) in &cy.points {
                    let h = hx * hy;
                    if h > 0.0 {
                        row += wy * f(x, y) / h;
                    }
                }
                acc += wx * row;
            }
            total += cx.weight * cy.weight * acc;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::gaussian::std_normal_pdf;

    #[test]
    fn legendre_weights_sum_to_two() {
        for n in [2, 5, 10, 15] {
            let s: f64 = gauss_legendre(n).iter().map(|p| p.1).sum();
            assert!((s - 2.0).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn legendre_exact_for_polynomials() {
        // degree 2n-1 = 19 for n = 10
        let rule = gauss_legendre(10);
        let s: f64 = rule.iter().map(|&(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn hermite_moments() {
        for n in [8, 64, 128, 256] {
            let rule = gauss_hermite(n);
            assert_eq!(rule.len(), n);
            let m0: f64 = rule.iter().map(|p| p.1).sum();
            let m2: f64 = rule.iter().map(|&(x, w)| w * x * x).sum();
            assert!((m0 - PI.sqrt()).abs() < 1e-12, "n = {n}: {m0}");
            assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-12, "n = {n}: {m2}");
            assert!(rule.windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn normal_over_line() {
        let cfg = QuadratureConfig::default();
        let v = integrate_1d(
            std_normal_pdf,
            Domain::Real {
                center: 0.0,
                scale: 1.0,
            },
            &cfg,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn interval_polynomial() {
        let cfg = QuadratureConfig::default();
        let v = integrate_1d(|x| x * x, Domain::Interval { lo: 0.0, hi: 3.0 }, &cfg).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
        let r = integrate_1d(|x| x, Domain::Interval { lo: 1.0, hi: 1.0 }, &cfg).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn nonconvergence_reported() {
        let cfg = QuadratureConfig {
            max_subdivisions: 3,
            ..Default::default()
        };
        let err = integrate_1d(|x| (50.0 * x).sin().abs(), Domain::Interval { lo: 0.0, hi: 10.0 }, &cfg);
        assert!(matches!(err, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn plane_products() {
        let cfg = QuadratureConfig::default();
        let hint = GaussianMixture1D::single(0.0, 1.0).unwrap();
        let one = integrate_2d(|x, y| std_normal_pdf(x) * std_normal_pdf(y), &hint, &hint, &cfg).unwrap();
        assert!((one - 1.0).abs() < 1e-9);
        let m2 = integrate_2d(|x, y| x * x * std_normal_pdf(x) * std_normal_pdf(y), &hint, &hint, &cfg).unwrap();
        assert!((m2 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn plane_with_mismatched_hint() {
        // a shifted, narrower Gaussian than the hint; still converges
        let cfg = QuadratureConfig::default();
        let hint = GaussianMixture1D::single(0.0, 1.0).unwrap();
        let v = integrate_2d(
            |x, y| crate::math::normal_pdf(x, 0.5, 0.4) * crate::math::normal_pdf(y, -0.3, 0.6),
            &hint,
            &hint,
            &cfg,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn validate_rejects_bad_config() {
        let mut c = QuadratureConfig::default();
        assert!(c.validate().is_ok());
        c.hermite_nodes = 4;
        assert!(c.validate().is_err());
        c = QuadratureConfig {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
