use std::f64::consts::PI;

use proptest::prelude::*;
use witsenhausen_zec::mc::{self, MonteCarloConfig};
use witsenhausen_zec::non_zec;
use witsenhausen_zec::two_point;
use witsenhausen_zec::zec;
use witsenhausen_zec::{ProblemParams, QuadratureConfig};

const SAMPLES: u64 = 2_000_000;

fn params() -> ProblemParams {
    ProblemParams::new(1.0, 0.15).unwrap()
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn two_point_power_at_mean_abs_source() {
    let p = params();
    let a = (2.0 / PI).sqrt();
    let sim = mc::simulate_two_point(a, &p, &MonteCarloConfig::new(SAMPLES, 11)).unwrap();
    assert!(sim.power.agrees_with(1.0 - 2.0 / PI, 3.0, 0.0), "{:?}", sim.power);
    assert!((1.0 - 2.0 / PI - 0.3634).abs() < 1e-4);
}

#[test]
fn balanced_crossover_without_dither_is_two_point() {
    let p = params();
    for (k, a) in [0.5, 0.9, 1.3].into_iter().enumerate() {
        let mc = MonteCarloConfig::new(SAMPLES, 100 + k as u64);
        let sim = mc::simulate_non_zec(a, 0.5, 0.0, &p, &mc).unwrap();
        let s2 = two_point::estimation_cost(a, &p, &cfg()).unwrap();
        assert!(sim.cost.agrees_with(s2, 3.0, 1e-12), "a = {a}: {:?} vs {s2}", sim.cost);
    }
}

#[test]
fn non_zec_power_is_dither_plus_two_point() {
    let p = params();
    for (k, (a, g, v1)) in [(0.6, 0.1, 0.3), (1.1, 0.25, 0.05), (0.9, 0.0, 0.5)]
        .into_iter()
        .enumerate()
    {
        let mc = MonteCarloConfig::new(SAMPLES, 200 + k as u64);
        let sim = mc::simulate_non_zec(a, g, v1, &p, &mc).unwrap();
        let expected = v1 + two_point::power_cost(a, &p);
        assert!(
            sim.power.agrees_with(expected, 3.0, 0.0),
            "{:?} vs {expected}",
            sim.power
        );
    }
}

#[test]
fn estimator_error_orthogonal_to_dither() {
    let p = params();
    for (k, (a, g, v1)) in [(0.8, 0.1, 0.2), (1.2, 0.4, 1.0)].into_iter().enumerate() {
        let mc = MonteCarloConfig::new(SAMPLES, 300 + k as u64);
        let cross = mc::cross_term_non_zec(a, g, v1, &p, &mc).unwrap();
        assert!(cross.agrees_with(0.0, 3.0, 0.0), "{cross:?}");
    }
}

#[test]
fn sample_records_follow_the_system_equations() {
    let p = params();
    let mc = MonteCarloConfig::new(20_000, 5);
    for r in mc::sample_non_zec(0.8, 0.2, 0.3, &p, &mc).unwrap() {
        assert!((r.x1 - (r.x0 + r.u1)).abs() < 1e-12);
        assert!((r.y1 - (r.x1 + r.z1)).abs() < 1e-12);
        assert!((r.x1 - (r.w1 + 0.8 * r.s)).abs() < 1e-12);
        assert!(r.w2.abs() == 0.8);
    }
    for r in mc::sample_non_zec(0.8, 0.0, 0.3, &p, &mc).unwrap() {
        assert_eq!(r.w2, 0.8 * r.s);
    }
    for r in mc::sample_two_point(0.8, &p, &mc).unwrap() {
        assert!((r.x1 - 0.8 * r.s).abs() < 1e-12);
        assert_eq!(r.s, if r.x0 >= 0.0 { 1.0 } else { -1.0 });
    }
}

#[test]
fn zec_designs_have_no_estimation_error() {
    let p = params();
    let sim = mc::simulate_non_zec(0.9, 0.0, 0.2, &p, &MonteCarloConfig::new(100_000, 3)).unwrap();
    assert!(sim.cost.mean < 1e-20, "{:?}", sim.cost);
}

#[test]
fn pstar_nondecreasing_in_noise() {
    let mut last = 0.0;
    for n in [0.02, 0.1, 0.2, 0.3, 0.45, 0.6] {
        let ps = zec::p_star(&ProblemParams::new(1.0, n).unwrap(), &cfg(), 1e-4).unwrap();
        assert!(ps >= last - 1e-4, "N = {n}: {ps} < {last}");
        last = ps;
    }
}

#[test]
fn pstar_scales_with_source_variance() {
    // (Q, N) → (cQ, cN) scales every power by c
    let base = zec::p_star(&ProblemParams::new(1.0, 0.15).unwrap(), &cfg(), 1e-5).unwrap();
    let scaled = zec::p_star(&ProblemParams::new(4.0, 0.6).unwrap(), &cfg(), 4e-5).unwrap();
    assert!((scaled - 4.0 * base).abs() < 2e-4, "{scaled} vs {}", 4.0 * base);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crossover_slack_dominates_zec_slack(
        a in 0.05f64..2.0,
        extra in 0.0f64..1.5,
        gamma in 0.0f64..=0.5,
    ) {
        let p = params();
        let power = two_point::power_cost(a, &p) + extra;
        let s0 = zec::info_slack_zec(a, power, &p, &cfg()).unwrap();
        let sg = non_zec::info_slack_nonzec(a, gamma, power, &p, &cfg()).unwrap();
        prop_assert!(sg >= s0 - 1e-9, "{sg} < {s0}");
    }

    #[test]
    fn cost_between_zero_and_prior_variance(
        a in 0.0f64..3.0,
        gamma in 0.0f64..=1.0,
        v1 in 0.0f64..2.0,
    ) {
        let p = params();
        let f = non_zec::cost_f_v1(a, gamma, v1, &p, &cfg()).unwrap();
        prop_assert!((0.0..=a * a).contains(&f));
    }

    #[test]
    fn crossover_cost_nondecreasing_in_gamma(a in 0.1f64..2.0, g in 0.0f64..0.45) {
        let p = params();
        let lo = non_zec::cost_f_v1(a, g, 0.1, &p, &cfg()).unwrap();
        let hi = non_zec::cost_f_v1(a, g + 0.05, 0.1, &p, &cfg()).unwrap();
        prop_assert!(hi >= lo - 1e-9, "{hi} < {lo}");
    }

    #[test]
    fn two_point_cost_bounded_by_prior(a in 0.0f64..3.0) {
        let p = params();
        let s = two_point::estimation_cost(a, &p, &cfg()).unwrap();
        prop_assert!(s >= 0.0 && s <= a * a);
        // never worse than the linear estimate's a²N/(a² + N)
        prop_assert!(s <= a * a * p.n() / (a * a + p.n()) + 1e-12);
    }
}
