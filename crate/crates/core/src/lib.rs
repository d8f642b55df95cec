//! Power/estimation cost trade-offs for the causal-encoder, noncausal-decoder
//! vector-valued Witsenhausen counterexample.
//!
//! The crate evaluates three control-communication strategies and the tools
//! needed to compare them:
//!
//! - [`two_point`]: Witsenhausen's two-point strategy `U1 = a·sign(X0) − X0`,
//!   its power cost, its estimation cost and the `a·tanh(a y/N)` receiver.
//! - [`zec`]: the zero-estimation-cost scheme, where `X1 = W1 + a·sign(X0)` is
//!   revealed to the decoder through block coding. Its admissible set and the
//!   minimum power `P*` at which it becomes feasible.
//! - [`non_zec`]: the same scheme with the sign auxiliary passed through a
//!   binary crossover channel of probability `γ`, trading estimation cost for
//!   power.
//! - [`mc`]: seeded, reproducible Monte-Carlo simulation of the systems above,
//!   used as an independent oracle for every analytic quantity.
//! - [`frontier`]: sweeps, the lower convex (time-sharing) envelope and CSV I/O.
//! - [`math`]: Gaussian mixtures, differential entropies and quadrature.
//!
//! All entropies and information slacks are expressed in bits.
//!
//! ```
//! use witsenhausen_zec::{zec, ProblemParams, QuadratureConfig};
//!
//! let params = ProblemParams::new(1.0, 0.15).unwrap();
//! let cfg = QuadratureConfig::default();
//! let p_star = zec::p_star(&params, &cfg, 1e-3).unwrap();
//! assert!((p_star - 0.383).abs() < 5e-3);
//! ```

pub mod cli;
pub mod error;
pub mod frontier;
pub mod math;
pub mod mc;
pub mod non_zec;
pub mod params;
pub mod two_point;
pub mod zec;

pub use error::{Error, Result};
pub use math::mixture::{EntropyBracket, GaussianMixture1D};
pub use math::quadrature::QuadratureConfig;
pub use params::{CostValue, ProblemParams};
