//! Differential entropy of Gaussian mixtures by quadrature, with the analytic
//! bracket and a plug-in Monte-Carlo estimate.

use witsenhausen_zec::math::{entropy_bracket, mixture_entropy_bits};
use witsenhausen_zec::mc::{mc_entropy_bits, MonteCarloConfig};
use witsenhausen_zec::{GaussianMixture1D, QuadratureConfig};

fn main() -> witsenhausen_zec::Result<()> {
    let cfg = QuadratureConfig::default();
    let mc = MonteCarloConfig::new(1_000_000, 1);
    let mixtures = [
        ("N(0, 1)", GaussianMixture1D::single(0.0, 1.0)?),
        ("±0.8, v = 0.15", GaussianMixture1D::symmetric(0.8, 0.15)?),
        ("±5, v = 1", GaussianMixture1D::symmetric(5.0, 1.0)?),
        ("crossover γ = 0.1", GaussianMixture1D::crossover(0.8, 0.1, 0.15)?),
        (
            "0.9·N(0,1) + 0.1·N(3,1)",
            GaussianMixture1D::new([(0.9, 0.0, 1.0), (0.1, 3.0, 1.0)])?,
        ),
    ];
    println!(
        "{:<26} {:>9} {:>9} {:>9} {:>17}",
        "mixture", "lower", "h", "upper", "Monte-Carlo"
    );
    for (name, m) in &mixtures {
        let b = entropy_bracket(m);
        let h = mixture_entropy_bits(m, &cfg)?;
        let est = mc_entropy_bits(m, &mc)?;
        println!(
            "{name:<26} {:9.5} {h:9.5} {:9.5} {:9.5} ± {:.0e}",
            b.lower_bits, b.upper_bits, est.mean, est.std_error
        );
    }
    Ok(())
}
