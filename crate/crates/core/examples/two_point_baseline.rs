//! Power and estimation cost of Witsenhausen's two-point strategy, then the
//! S₂(P) curve with both branches of the power identity.

use witsenhausen_zec::two_point;
use witsenhausen_zec::{ProblemParams, QuadratureConfig};

fn main() -> witsenhausen_zec::Result<()> {
    let p = ProblemParams::new(1.0, 0.15)?;
    let cfg = QuadratureConfig::default();

    println!("     a        P₂(a)        S₂(a)");
    for i in 0..=10 {
        let a = 0.2 * i as f64;
        let e = two_point::evaluate(a, &p, &cfg)?;
        println!("{:6.2}  {:11.6}  {:11.3e}", e.a, e.power, e.cost);
    }

    println!("\nminimum power Q(1 − 2/π) = {:.6}", p.p2_min());
    for power in [0.36, p.p2_min(), 0.4, 0.6, 1.0] {
        let branches = two_point::s2_branches(power, &p, &cfg)?;
        let s = two_point::s2_of_p(power, &p, &cfg)?;
        println!("P = {power:.4}: {} root(s), S₂ = {s:?}", branches.len());
        for b in branches {
            println!("    a = {:.6}  S = {:.3e}", b.a, b.cost);
        }
    }
    Ok(())
}
