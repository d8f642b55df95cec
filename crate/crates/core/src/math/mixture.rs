use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::gaussian::{gaussian_entropy_bits, normal_pdf, xlog2x_neg};
use crate::math::quadrature::{integrate_panels, QuadratureConfig, REAL_LINE_SIGMAS};

const WEIGHT_SUM_TOL: f64 = 1e-12;
const DENSITY_FLOOR: f64 = 1e-300;
const MAX_INITIAL_PANELS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub mean: f64,
    pub variance: f64,
}

/// A finite mixture of univariate Gaussians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture1D {
    components: Vec<Component>,
}

impl GaussianMixture1D {
    /// Builds a mixture from `(weight, mean, variance)` triples.
    pub fn new(components: impl IntoIterator<Item = (f64, f64, f64)>) -> Result<Self> {
        let components: Vec<Component> = components
            .into_iter()
            .map(|(weight, mean, variance)| Component { weight, mean, variance })
            .collect();
        if components.is_empty() {
            return Err(Error::InvalidMixture("no components".into()));
        }
        let mut sum = 0.0;
        for (i, c) in components.iter().enumerate() {
            if !(c.weight >= 0.0 && c.weight.is_finite()) {
                return Err(Error::InvalidMixture(format!("weight {i} is {}", c.weight)));
            }
            if !(c.variance > 0.0 && c.variance.is_finite()) {
                return Err(Error::InvalidMixture(format!("variance {i} is {}", c.variance)));
            }
            if !c.mean.is_finite() {
                return Err(Error::InvalidMixture(format!("mean {i} is {}", c.mean)));
            }
            sum += c.weight;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidMixture(format!("weights sum to {sum}")));
        }
        Ok(Self { components })
    }

    pub fn single(mean: f64, variance: f64) -> Result<Self> {
        Self::new([(1.0, mean, variance)])
    }

    /// `(½, −a, v), (½, +a, v)`
    pub fn symmetric(a: f64, variance: f64) -> Result<Self> {
        Self::new([(0.5, -a, variance), (0.5, a, variance)])
    }

    /// `(1−γ, +a, v), (γ, −a, v)`
    pub fn crossover(a: f64, gamma: f64, variance: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!("γ = {gamma} outside [0, 1]")));
        }
        Self::new([(1.0 - gamma, a, variance), (gamma, -a, variance)])
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn pdf(&self, y: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * normal_pdf(y, c.mean, c.variance))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.mean).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.components
            .iter()
            .map(|c| c.weight * (c.variance + (c.mean - m).powi(2)))
            .sum()
    }

    /// Support window `[min μ − 10σ, max μ + 10σ]` over non-empty components.
    pub fn window(&self) -> (f64, f64) {
        self.components
            .iter()
            .filter(|c| c.weight > 0.0)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
                let half = REAL_LINE_SIGMAS * c.variance.sqrt();
                (lo.min(c.mean - half), hi.max(c.mean + half))
            })
    }

    fn min_sd(&self) -> f64 {
        self.components
            .iter()
            .filter(|c| c.weight > 0.0)
            .map(|c| c.variance.sqrt())
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn mixture_pdf(m: &GaussianMixture1D, y: f64) -> f64 {
    m.pdf(y)
}

/// Differential entropy `−∫ f log₂ f` of the mixture, in bits.
pub fn mixture_entropy_bits(m: &GaussianMixture1D, cfg: &QuadratureConfig) -> Result<f64> {
    let (lo, hi) = m.window();
    let panels = (((hi - lo) / m.min_sd()).ceil() as usize).clamp(16, MAX_INITIAL_PANELS);
    let breaks = crate::math::quadrature::uniform_breaks(lo, hi, panels);
    let nats = integrate_panels(
        |y| {
            let f = m.pdf(y);
            if f <= DENSITY_FLOOR {
                0.0
            } else {
                -f * f.ln()
            }
        },
        &breaks,
        cfg,
    )?;
    Ok(nats / LN_2)
}

/// Analytic bounds on the mixture entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyBracket {
    pub lower_bits: f64,
    pub upper_bits: f64,
}

impl EntropyBracket {
    pub fn contains(&self, h: f64, tol: f64) -> bool {
        h >= self.lower_bits - tol && h <= self.upper_bits + tol
    }
}

/// `h(Y | component) ≤ h(Y) ≤ h(Y | component) + H(weights)`.
pub fn entropy_bracket(m: &GaussianMixture1D) -> EntropyBracket {
    let lower: f64 = m
        .components
        .iter()
        .map(|c| c.weight * gaussian_entropy_bits(c.variance))
        .sum();
    let weight_entropy: f64 = m.components.iter().map(|c| xlog2x_neg(c.weight)).sum();
    EntropyBracket {
        lower_bits: lower,
        upper_bits: lower + weight_entropy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::gaussian::std_normal_pdf;
    use crate::math::quadrature::{integrate_1d, Domain};
    use proptest::prelude::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn validation() {
        assert!(GaussianMixture1D::new([]).is_err());
        assert!(GaussianMixture1D::new([(0.5, 0.0, 1.0)]).is_err());
        assert!(GaussianMixture1D::new([(1.2, 0.0, 1.0), (-0.2, 0.0, 1.0)]).is_err());
        assert!(GaussianMixture1D::new([(1.0, 0.0, 0.0)]).is_err());
        assert!(GaussianMixture1D::crossover(1.0, 1.5, 1.0).is_err());
        assert!(GaussianMixture1D::new([(0.3, 0.0, 1.0), (0.7, 1.0, 2.0)]).is_ok());
    }

    #[test]
    fn pdf_single_collapses_to_phi() {
        let m = GaussianMixture1D::single(0.0, 1.0).unwrap();
        assert!((m.pdf(0.0) - 0.398_942_280_4).abs() < 1e-10);
    }

    #[test]
    fn pdf_symmetric_at_zero() {
        let (a, v) = (0.7, 0.3);
        let m = GaussianMixture1D::symmetric(a, v).unwrap();
        let expected = std_normal_pdf(a / v.sqrt()) / v.sqrt();
        assert!((m.pdf(0.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn pdf_term_by_term() {
        let m = GaussianMixture1D::new([(0.7, 1.0, 2.0), (0.3, -1.0, 0.5)]).unwrap();
        let y: f64 = 0.5;
        let t1 = 0.7 * (-(y - 1.0).powi(2) / 4.0).exp() / (2.0 * std::f64::consts::PI * 2.0).sqrt();
        let t2 = 0.3 * (-(y + 1.0).powi(2) / 1.0).exp() / (2.0 * std::f64::consts::PI * 0.5).sqrt();
        assert!((m.pdf(y) - (t1 + t2)).abs() < 1e-15);
    }

    #[test]
    fn entropy_single_gaussian() {
        for v in [0.01, 0.15, 1.0, 7.5] {
            let m = GaussianMixture1D::single(0.3, v).unwrap();
            let h = mixture_entropy_bits(&m, &cfg()).unwrap();
            assert!((h - gaussian_entropy_bits(v)).abs() < 1e-8, "v = {v}: {h}");
        }
    }

    #[test]
    fn entropy_coincident_components() {
        let m = GaussianMixture1D::symmetric(0.0, 0.4).unwrap();
        let h = mixture_entropy_bits(&m, &cfg()).unwrap();
        assert!((h - gaussian_entropy_bits(0.4)).abs() < 1e-8);
    }

    #[test]
    fn entropy_well_separated() {
        let v: f64 = 0.2;
        let m = GaussianMixture1D::symmetric(5.0 * v.sqrt(), v).unwrap();
        let h = mixture_entropy_bits(&m, &cfg()).unwrap();
        assert!((h - gaussian_entropy_bits(v) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn bracket_examples() {
        let single = entropy_bracket(&GaussianMixture1D::single(0.0, 2.0).unwrap());
        assert_eq!(single.lower_bits, single.upper_bits);
        assert!((single.lower_bits - gaussian_entropy_bits(2.0)).abs() < 1e-15);

        let pair = entropy_bracket(&GaussianMixture1D::symmetric(1.0, 0.5).unwrap());
        assert!((pair.upper_bits - pair.lower_bits - 1.0).abs() < 1e-15);

        let skew = entropy_bracket(&GaussianMixture1D::new([(0.9, 0.0, 1.0), (0.1, 3.0, 1.0)]).unwrap());
        assert!((skew.upper_bits - skew.lower_bits - 0.468_995_593_589_281_2).abs() < 1e-12);
    }

    fn mixture_strategy() -> impl Strategy<Value = GaussianMixture1D> {
        prop::collection::vec((0.05f64..1.0, -3.0f64..3.0, 0.02f64..3.0), 1..4).prop_map(|raw| {
            let total: f64 = raw.iter().map(|r| r.0).sum();
            let mut comps: Vec<(f64, f64, f64)> = raw.iter().map(|&(w, m, v)| (w / total, m, v)).collect();
            // absorb rounding so weights sum to one within tolerance
            let s: f64 = comps.iter().map(|c| c.0).sum();
            comps[0].0 += 1.0 - s;
            GaussianMixture1D::new(comps).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn entropy_inside_bracket(m in mixture_strategy()) {
            let h = mixture_entropy_bits(&m, &cfg()).unwrap();
            prop_assert!(entropy_bracket(&m).contains(h, 1e-6), "h = {h}, bracket {:?}", entropy_bracket(&m));
        }

        #[test]
        fn entropy_translation_invariant(m in mixture_strategy(), shift in -5.0f64..5.0) {
            let shifted = GaussianMixture1D::new(
                m.components().iter().map(|c| (c.weight, c.mean + shift, c.variance)),
            ).unwrap();
            let h0 = mixture_entropy_bits(&m, &cfg()).unwrap();
            let h1 = mixture_entropy_bits(&shifted, &cfg()).unwrap();
            prop_assert!((h0 - h1).abs() < 1e-8, "{h0} vs {h1}");
        }

        #[test]
        fn entropy_scaling(m in mixture_strategy(), c in 0.2f64..5.0) {
            let scaled = GaussianMixture1D::new(
                m.components().iter().map(|k| (k.weight, c * k.mean, c * c * k.variance)),
            ).unwrap();
            let h0 = mixture_entropy_bits(&m, &cfg()).unwrap();
            let h1 = mixture_entropy_bits(&scaled, &cfg()).unwrap();
            prop_assert!((h1 - h0 - c.log2()).abs() < 1e-7, "{h0} {h1} {c}");
        }

        #[test]
        fn density_integrates_to_one(m in mixture_strategy()) {
            let (lo, hi) = m.window();
            let center = 0.5 * (lo + hi);
            let scale = (hi - lo) / 20.0;
            let mass = integrate_1d(|y| m.pdf(y), Domain::Real { center, scale }, &cfg()).unwrap();
            prop_assert!((mass - 1.0).abs() < 1e-9, "mass = {mass}");
        }
    }
}
