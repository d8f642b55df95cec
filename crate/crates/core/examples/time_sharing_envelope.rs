//! Lower convex envelope of the two-point and ZEC curves, with the input
//! point behind each hull vertex.

use witsenhausen_zec::frontier::{lower_convex_envelope, sweep_s_vs_p, Scheme, Support};
use witsenhausen_zec::{ProblemParams, QuadratureConfig};

fn main() -> witsenhausen_zec::Result<()> {
    let p = ProblemParams::new(1.0, 0.15)?;
    let cfg = QuadratureConfig::default();
    let powers: Vec<f64> = (0..=16).map(|i| 0.364 + 0.04 * i as f64).collect();

    let curves = vec![
        sweep_s_vs_p(Scheme::TwoPoint, &powers, &p, &cfg)?,
        sweep_s_vs_p(Scheme::Zec, &powers, &p, &cfg)?,
    ];
    let env = lower_convex_envelope(curves)?;
    print!("{}", env.provenance_csv());

    match env.support(0.37) {
        Some(Support::Mix { left, right, lambda }) => println!(
            "\nat P = 0.37 mix {lambda:.3} of P = {:.3} with {:.3} of P = {:.3}",
            left.x,
            1.0 - lambda,
            right.x
        ),
        other => println!("\nat P = 0.37: {other:?}"),
    }
    Ok(())
}
