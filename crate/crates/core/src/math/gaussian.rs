use std::f64::consts::{E, LN_2, PI};

/// `1/√(2π)`
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density `φ(x) = e^{−x²/2}/√(2π)`.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Density of `N(mean, variance)` at `x`.
#[inline]
pub fn normal_pdf(x: f64, mean: f64, variance: f64) -> f64 {
    let sd = variance.sqrt();
    std_normal_pdf((x - mean) / sd) / sd
}

/// Differential entropy of `N(·, variance)` in bits: `½ log₂(2πe·v)`.
#[inline]
pub fn gaussian_entropy_bits(variance: f64) -> f64 {
    0.5 * (2.0 * PI * E * variance).log2()
}

/// `H₂(γ)` in bits, with `0·log 0 = 0` at the endpoints.
pub fn binary_entropy_bits(gamma: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&gamma), "γ = {gamma} outside [0, 1]");
    xlog2x_neg(gamma) + xlog2x_neg(1.0 - gamma)
}

/// `−p log₂ p`, zero at `p = 0`.
#[inline]
pub(crate) fn xlog2x_neg(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.ln() / LN_2
    }
}
