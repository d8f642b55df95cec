//! P*(N) at Q = 1: flat at Q(1 − 2/π) for small noise, saturating above Q
//! for large noise. Writes the curve as CSV to stdout.

use witsenhausen_zec::frontier::sweep_pstar_vs_n;
use witsenhausen_zec::QuadratureConfig;

fn main() -> witsenhausen_zec::Result<()> {
    let noises: Vec<f64> = (0..35).map(|i| 0.02 + 0.02 * i as f64).collect();
    let curve = sweep_pstar_vs_n(&noises, 1.0, &QuadratureConfig::default(), 1e-4)?;
    print!("{}", curve.to_csv(Some(("N", "P_star"))));
    Ok(())
}
