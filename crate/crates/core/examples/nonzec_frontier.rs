//! S_NonZEC(P) against S₂(P) at Q = 1, N = 0.15. Below P* the crossover
//! scheme trades a little estimation error for power.

use witsenhausen_zec::frontier::{sweep_s_vs_p, Scheme};
use witsenhausen_zec::non_zec::{s_nonzec, SearchConfig};
use witsenhausen_zec::{ProblemParams, QuadratureConfig};

fn main() -> witsenhausen_zec::Result<()> {
    let p = ProblemParams::new(1.0, 0.15)?;
    let cfg = QuadratureConfig::default();
    let powers: Vec<f64> = (0..=12).map(|i| 0.364 + 0.003 * i as f64).collect();

    let s2 = sweep_s_vs_p(Scheme::TwoPoint, &powers, &p, &cfg)?;
    let search = SearchConfig::default();
    println!("     P          S₂    S_NonZEC       a      γ");
    for &power in &powers {
        let outcome = s_nonzec(power, &p, &cfg, &search)?;
        let two = s2.eval(power).map_or("-".to_string(), |v| format!("{v:.3e}"));
        match outcome.optimum() {
            Some(o) => println!(
                "{power:.4}  {two:>10}  {:10.3e}  {:.4}  {:.3}",
                o.value, o.design.a, o.design.gamma
            ),
            None => println!("{power:.4}  {two:>10}  infeasible"),
        }
    }
    Ok(())
}
