//! Gaussian primitives, Gaussian-mixture densities and entropies, and the
//! quadrature engine the cost computations are built on.

pub mod gaussian;
pub mod mixture;
pub mod quadrature;

pub use gaussian::{binary_entropy_bits, gaussian_entropy_bits, normal_pdf, std_normal_pdf};
pub use mixture::{entropy_bracket, mixture_entropy_bits, mixture_pdf};
pub use quadrature::{integrate_1d, integrate_2d, Domain};
