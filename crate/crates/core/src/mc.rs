//! Seeded Monte-Carlo simulation of the control systems.
//!
//! Draws are split into fixed-size batches. Batch `i` owns ChaCha8 stream `i`
//! of the configured seed and batch moments are merged in index order, so an
//! estimate depends only on `(seed, samples, batch)` and never on how rayon
//! schedules the work. Normals come from `rand_distr::StandardNormal`
//! (ziggurat); the crossover bit is a uniform draw compared against `γ`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::gaussian::normal_pdf;
use crate::math::mixture::GaussianMixture1D;
use crate::params::ProblemParams;
use crate::two_point::receiver;

pub const MIN_SAMPLES: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonteCarloConfig {
    pub samples: u64,
    pub seed: u64,
    pub batch: u64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            samples: 10_000_000,
            seed: 20_250_101,
            batch: 100_000,
        }
    }
}

impl MonteCarloConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "at least {MIN_SAMPLES} Monte-Carlo samples required, got {}",
                self.samples
            )));
        }
        if self.batch == 0 {
            return Err(Error::InvalidParameter("batch size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
}

impl McEstimate {
    /// `|mean − value| ≤ sigmas·std_error + floor`.
    pub fn agrees_with(&self, value: f64, sigmas: f64, floor: f64) -> bool {
        (self.mean - value).abs() <= sigmas * self.std_error + floor
    }

    /// Distance from `value` in standard errors (infinite for a mismatched
    /// zero-variance estimate).
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (self.mean - value).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

/// Empirical power `E[U1²]` and squared estimation error `E[(X1 − U2)²]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationEstimate {
    pub power: McEstimate,
    pub cost: McEstimate,
}

/// One joint draw of every variable in the system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub x0: f64,
    pub w1: f64,
    pub s: f64,
    pub w2: f64,
    pub u1: f64,
    pub x1: f64,
    pub z1: f64,
    pub y1: f64,
    pub u2: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0.0 {
            return other;
        }
        if other.n == 0.0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * other.n / n,
            m2: self.m2 + other.m2 + d * d * self.n * other.n / n,
        }
    }

    fn estimate(&self) -> McEstimate {
        let var = if self.n > 1.0 { self.m2 / (self.n - 1.0) } else { 0.0 };
        McEstimate {
            mean: self.mean,
            std_error: (var / self.n).sqrt(),
        }
    }
}

fn batch_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn batches(mc: &MonteCarloConfig) -> Vec<(u64, u64)> {
    let count = mc.samples.div_ceil(mc.batch);
    (0..count)
        .map(|i| (i, mc.batch.min(mc.samples - i * mc.batch)))
        .collect()
}

fn run<const K: usize, F>(mc: &MonteCarloConfig, draw: F) -> Result<[McEstimate; K]>
where
    F: Fn(&mut ChaCha8Rng) -> [f64; K] + Sync,
{
    mc.validate()?;
    let per_batch: Vec<[Moments; K]> = batches(mc)
        .into_par_iter()
        .map(|(index, size)| {
            let mut rng = batch_rng(mc.seed, index);
            let mut acc = [Moments::default(); K];
            for _ in 0..size {
                let xs = draw(&mut rng);
                for (m, x) in acc.iter_mut().zip(xs) {
                    m.push(x);
                }
            }
            acc
        })
        .collect();
    let total = per_batch.into_iter().fold([Moments::default(); K], |mut acc, b| {
        for (a, m) in acc.iter_mut().zip(b) {
            *a = a.merge(m);
        }
        acc
    });
    Ok(total.map(|m| m.estimate()))
}

#[inline]
fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

#[inline]
fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn two_point_draw<R: Rng>(rng: &mut R, a: f64, p: &ProblemParams) -> SampleRecord {
    let x0 = p.q().sqrt() * normal(rng);
    let s = sign(x0);
    let u1 = a * s - x0;
    let x1 = x0 + u1;
    let z1 = p.n().sqrt() * normal(rng);
    let y1 = x1 + z1;
    SampleRecord {
        x0,
        w1: 0.0,
        s,
        w2: a * s,
        u1,
        x1,
        z1,
        y1,
        u2: receiver(y1, a, p),
    }
}

/// Decoder output `E[X1 | w1, w2, y1]` written with the posterior weights of
/// the two candidate states `w1 ± a`.
fn non_zec_estimate(w1: f64, w2: f64, y1: f64, a: f64, gamma: f64, n: f64) -> f64 {
    let g1 = normal_pdf(y1, w1 + a, n);
    let g2 = normal_pdf(y1, w1 - a, n);
    let (p_plus, p_minus) = if w2 > 0.0 {
        (1.0 - gamma, gamma)
    } else {
        (gamma, 1.0 - gamma)
    };
    let num = p_plus * g1 - p_minus * g2;
    let den = p_plus * g1 + p_minus * g2;
    if den > 0.0 {
        w1 + a * num / den
    } else {
        w1 + a * sign(y1 - w1)
    }
}

fn non_zec_draw<R: Rng>(rng: &mut R, a: f64, gamma: f64, v1: f64, p: &ProblemParams) -> SampleRecord {
    let x0 = p.q().sqrt() * normal(rng);
    let w1 = v1.sqrt() * normal(rng);
    let flip = rng.random::<f64>() < gamma;
    let z1 = p.n().sqrt() * normal(rng);
    let s = sign(x0);
    let w2 = if flip { -a * s } else { a * s };
    let u1 = w1 + a * s - x0;
    let x1 = x0 + u1;
    let y1 = x1 + z1;
    // sign of w2 taken from the bits so that a = 0 still selects a branch
    let w2_sign = if (s > 0.0) != flip { 1.0 } else { -1.0 };
    let u2 = non_zec_estimate(w1, w2_sign, y1, a, gamma, p.n());
    SampleRecord {
        x0,
        w1,
        s,
        w2,
        u1,
        x1,
        z1,
        y1,
        u2,
    }
}

fn check_design(a: f64, gamma: f64, v1: f64) -> Result<()> {
    if a.is_nan() || a < 0.0 {
        return Err(Error::InvalidParameter(format!("a = {a} must be non-negative")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("γ = {gamma} outside [0, 1]")));
    }
    if v1.is_nan() || v1 < 0.0 {
        return Err(Error::InvalidParameter(format!("V1 = {v1} must be non-negative")));
    }
    Ok(())
}

pub fn simulate_two_point(a: f64, p: &ProblemParams, mc: &MonteCarloConfig) -> Result<SimulationEstimate> {
    check_design(a, 0.0, 0.0)?;
    let [power, cost] = run(mc, |rng| {
        let r = two_point_draw(rng, a, p);
        [r.u1 * r.u1, (r.x1 - r.u2).powi(2)]
    })?;
    Ok(SimulationEstimate { power, cost })
}

pub fn simulate_non_zec(
    a: f64,
    gamma: f64,
    v1: f64,
    p: &ProblemParams,
    mc: &MonteCarloConfig,
) -> Result<SimulationEstimate> {
    check_design(a, gamma, v1)?;
    let [power, cost] = run(mc, |rng| {
        let r = non_zec_draw(rng, a, gamma, v1, p);
        [r.u1 * r.u1, (r.x1 - r.u2).powi(2)]
    })?;
    Ok(SimulationEstimate { power, cost })
}

/// `E[W1 · (E[X1 | W1, W2, Y1] − W1)]`, which vanishes for every design.
pub fn cross_term_non_zec(a: f64, gamma: f64, v1: f64, p: &ProblemParams, mc: &MonteCarloConfig) -> Result<McEstimate> {
    check_design(a, gamma, v1)?;
    let [m] = run(mc, |rng| {
        let r = non_zec_draw(rng, a, gamma, v1, p);
        [r.w1 * (r.u2 - r.w1)]
    })?;
    Ok(m)
}

fn collect_records<F>(mc: &MonteCarloConfig, draw: F) -> Result<Vec<SampleRecord>>
where
    F: Fn(&mut ChaCha8Rng) -> SampleRecord + Sync,
{
    mc.validate()?;
    let chunks: Vec<Vec<SampleRecord>> = batches(mc)
        .into_par_iter()
        .map(|(index, size)| {
            let mut rng = batch_rng(mc.seed, index);
            (0..size).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// Raw draws of the two-point system, in the same order the estimators see them.
pub fn sample_two_point(a: f64, p: &ProblemParams, mc: &MonteCarloConfig) -> Result<Vec<SampleRecord>> {
    check_design(a, 0.0, 0.0)?;
    collect_records(mc, |rng| two_point_draw(rng, a, p))
}

/// Raw draws of the Non-ZEC system (`γ = 0` is the ZEC system).
pub fn sample_non_zec(
    a: f64,
    gamma: f64,
    v1: f64,
    p: &ProblemParams,
    mc: &MonteCarloConfig,
) -> Result<Vec<SampleRecord>> {
    check_design(a, gamma, v1)?;
    collect_records(mc, |rng| non_zec_draw(rng, a, gamma, v1, p))
}

/// Plug-in estimate `−(1/n) Σ log₂ f(Yᵢ)` with `Yᵢ` drawn from the mixture.
pub fn mc_entropy_bits(m: &GaussianMixture1D, mc: &MonteCarloConfig) -> Result<McEstimate> {
    let comps = m.components();
    let [h] = run(mc, |rng| {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = comps[comps.len() - 1];
        for c in comps {
            acc += c.weight;
            if u < acc {
                chosen = *c;
                break;
            }
        }
        let y = chosen.mean + chosen.variance.sqrt() * normal(rng);
        [-m.pdf(y).log2()]
    })?;
    Ok(h)
}
