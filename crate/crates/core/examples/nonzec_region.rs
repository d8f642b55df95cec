//! The Non-ZEC cost functional F(a, γ, P) over a small grid, with the
//! information slack that decides admissibility.

use witsenhausen_zec::non_zec::{cost_f, cost_region, info_slack_nonzec};
use witsenhausen_zec::{ProblemParams, QuadratureConfig};

fn main() -> witsenhausen_zec::Result<()> {
    let p = ProblemParams::new(1.0, 0.15)?;
    let cfg = QuadratureConfig::default();

    // γ and 1 − γ give the same MMSE
    for gamma in [0.1, 0.9] {
        println!("F(0.8, {gamma}, 0.5) = {:.8}", cost_f(0.8, gamma, 0.5, &p, &cfg)?);
    }
    println!(
        "slack at γ = 0.1: {:.5} bits",
        info_slack_nonzec(0.8, 0.1, 0.5, &p, &cfg)?
    );

    let samples = cost_region(&[0.37, 0.45], &[0.0, 0.05, 0.25, 0.5], 6, &p, &cfg)?;
    println!("\n    P      a      γ          F      slack  ok");
    for s in samples {
        println!(
            "{:.3}  {:.3}  {:.2}  {:9.3e}  {:+.4}  {}",
            s.power, s.a, s.gamma, s.f_value, s.info_slack, s.admissible
        );
    }
    Ok(())
}
