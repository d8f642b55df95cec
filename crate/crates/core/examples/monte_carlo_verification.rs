//! Seeded simulation of both systems against the quadrature values.

use witsenhausen_zec::mc::{cross_term_non_zec, simulate_non_zec, simulate_two_point, MonteCarloConfig};
use witsenhausen_zec::non_zec::cost_f_v1;
use witsenhausen_zec::two_point;
use witsenhausen_zec::{ProblemParams, QuadratureConfig};

fn main() -> witsenhausen_zec::Result<()> {
    let p = ProblemParams::new(1.0, 0.15)?;
    let cfg = QuadratureConfig::default();
    let mc = MonteCarloConfig::new(2_000_000, 7);

    let a = 0.8;
    let e = two_point::evaluate(a, &p, &cfg)?;
    let sim = simulate_two_point(a, &p, &mc)?;
    println!("two-point a = {a}");
    println!(
        "  power {:.6} vs {:.6} ± {:.1e}",
        e.power, sim.power.mean, sim.power.std_error
    );
    println!(
        "  cost  {:.6} vs {:.6} ± {:.1e}",
        e.cost, sim.cost.mean, sim.cost.std_error
    );

    let (gamma, v1) = (0.1, 0.2);
    let f = cost_f_v1(a, gamma, v1, &p, &cfg)?;
    let sim = simulate_non_zec(a, gamma, v1, &p, &mc)?;
    let cross = cross_term_non_zec(a, gamma, v1, &p, &mc)?;
    println!("Non-ZEC a = {a}, γ = {gamma}, V1 = {v1}");
    println!(
        "  power {:.6} vs {:.6} ± {:.1e}",
        v1 + e.power,
        sim.power.mean,
        sim.power.std_error
    );
    println!(
        "  cost  {:.6} vs {:.6} ± {:.1e} (z = {:.2})",
        f,
        sim.cost.mean,
        sim.cost.std_error,
        sim.cost.z_score(f)
    );
    println!("  E[W1(U2 − W1)] = {:.1e} ± {:.1e}", cross.mean, cross.std_error);
    Ok(())
}
