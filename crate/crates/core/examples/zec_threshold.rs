//! Admissible signal levels of the zero-estimation-cost scheme and the power
//! threshold P* above which the set is non-empty.

use witsenhausen_zec::zec;
use witsenhausen_zec::{ProblemParams, QuadratureConfig};

fn main() -> witsenhausen_zec::Result<()> {
    let p = ProblemParams::new(1.0, 0.15)?;
    let cfg = QuadratureConfig::default();

    for power in [0.37, 0.38, 0.39, 0.45, 0.6] {
        let set = zec::admissible_zec(power, &p, &cfg, zec::DEFAULT_GRID)?;
        println!(
            "P = {power:.3}: a ∈ {:?}, admissible {:?}, peak slack {:?}",
            set.power_interval, set.feasible_subset, set.max_slack
        );
    }

    let ps = zec::p_star(&p, &cfg, 1e-5)?;
    println!("\nP*(Q = 1, N = 0.15) = {ps:.5}");
    let peak = zec::max_slack_zec(ps, &p, &cfg, zec::DEFAULT_GRID)?.expect("feasible at P*");
    println!(
        "binding design: a = {:.5}, V1 = {:.5}",
        peak.a,
        zec::v1_for(peak.a, ps, &p)
    );
    Ok(())
}
