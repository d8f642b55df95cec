use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::manifest::{manifest_path, sibling, RunManifest};
use super::*;
use crate::frontier::{self, format_number, Scheme};
use crate::mc::{self, McEstimate};
use crate::non_zec::{self, NonZecOutcome};
use crate::params::ProblemParams;
use crate::two_point;

struct Run {
    command: &'static str,
    argv: Vec<String>,
    settings: Settings,
    parameters: BTreeMap<String, Value>,
    started: Instant,
}

impl Run {
    fn new(command: &'static str, argv: Vec<String>, settings: Settings) -> Self {
        Self {
            command,
            argv,
            settings,
            parameters: BTreeMap::new(),
            started: Instant::now(),
        }
    }

    fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameter serialises"),
        );
    }

    /// Writes `primary` to `out` (plus sidecars and the manifest), or to stdout.
    fn emit(self, out: Option<&Path>, primary: &str, sidecars: Vec<(PathBuf, String)>) -> Result<()> {
        let Some(out) = out else {
            print!("{primary}");
            return Ok(());
        };
        std::fs::write(out, primary)?;
        let mut outputs = vec![out.display().to_string()];
        for (path, text) in &sidecars {
            std::fs::write(path, text)?;
            outputs.push(path.display().to_string());
        }
        let manifest = RunManifest {
            command: self.command.to_string(),
            argv: self.argv,
            parameters: self.parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            quadrature: self.settings.quadrature,
            mc: self.settings.mc,
            search: self.settings.search,
            wall_time: self.started.elapsed().as_secs_f64(),
            outputs,
        };
        let mpath = manifest_path(out);
        manifest.write(&mpath)?;
        log::info!("wrote {} and {}", out.display(), mpath.display());
        Ok(())
    }
}

fn problem(args: &ProblemArgs) -> Result<ProblemParams> {
    ProblemParams::new(args.q, args.n)
}

fn csv_line(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

pub(super) fn dispatch(cli: Cli, argv: Vec<String>) -> Result<i32> {
    if let Command::Replay(args) = &cli.command {
        return replay(args);
    }
    let settings = load_settings(&cli.global)?;
    match cli.command {
        Command::TwoPoint(args) => two_point_cmd(&args, Run::new("two-point", argv, settings)),
        Command::Pstar(args) => pstar_cmd(&args, Run::new("pstar", argv, settings)),
        Command::Nonzec(args) => nonzec_cmd(&args, Run::new("nonzec", argv, settings)),
        Command::Envelope(args) => envelope_cmd(&args, Run::new("envelope", argv, settings)),
        Command::Verify(args) => verify_cmd(&args, Run::new("verify", argv, settings)),
        Command::Replay(_) => unreachable!(),
    }
}

fn two_point_cmd(args: &TwoPointArgs, mut run: Run) -> Result<i32> {
    let p = problem(&args.problem)?;
    let cfg = run.settings.quadrature;
    run.param("Q", p.q());
    run.param("N", p.n());
    let mut csv = String::new();
    if let Some(grid) = &args.p_grid {
        run.param("p_grid", grid.to_string());
        let curve = frontier::sweep_s_vs_p(Scheme::TwoPoint, &grid.values(), &p, &cfg)?;
        csv = curve.to_csv(Some(("P", "S")));
    } else {
        let levels = match (&args.a, &args.a_grid) {
            (Some(a), _) => a.clone(),
            (None, Some(g)) => g.values(),
            (None, None) => unreachable!("clap enforces the grid group"),
        };
        if levels.is_empty() {
            return Err(Error::InvalidParameter("empty a grid".into()));
        }
        run.param("a", &levels);
        let evals = levels
            .par_iter()
            .map(|&a| two_point::evaluate(a, &p, &cfg))
            .collect::<Result<Vec<_>>>()?;
        csv_line(&mut csv, &["a".into(), "P".into(), "S".into()]);
        for e in evals {
            csv_line(
                &mut csv,
                &[format_number(e.a), format_number(e.power), format_number(e.cost)],
            );
        }
    }
    run.emit(args.out.as_deref(), &csv, Vec::new())?;
    Ok(EXIT_OK)
}

fn pstar_cmd(args: &PstarArgs, mut run: Run) -> Result<i32> {
    let tol = args.tol.unwrap_or(run.settings.tol_p);
    let cfg = run.settings.quadrature;
    run.param("Q", args.q);
    run.param("tol_P", tol);
    let csv = match (args.n, &args.n_grid) {
        (Some(n), _) => {
            run.param("N", n);
            let p = ProblemParams::new(args.q, n)?;
            let ps = zec::p_star(&p, &cfg, tol)?;
            let mut csv = String::new();
            csv_line(&mut csv, &["N".into(), "P_star".into()]);
            csv_line(&mut csv, &[format_number(n), format_number(ps)]);
            csv
        }
        (None, Some(grid)) => {
            run.param("n_grid", grid.to_string());
            frontier::sweep_pstar_vs_n(&grid.values(), args.q, &cfg, tol)?.to_csv(Some(("N", "P_star")))
        }
        (None, None) => unreachable!("clap enforces the noise group"),
    };
    run.emit(args.out.as_deref(), &csv, Vec::new())?;
    Ok(EXIT_OK)
}

fn nonzec_cmd(args: &NonZecArgs, mut run: Run) -> Result<i32> {
    let p = problem(&args.problem)?;
    let cfg = run.settings.quadrature;
    if let Some(v) = args.gamma_points {
        run.settings.search.gamma_points = v;
    }
    if let Some(v) = args.a_points {
        run.settings.search.a_points = v;
    }
    let search = run.settings.search;
    if search.gamma_points < 2 || search.a_points < 2 {
        return Err(Error::InvalidParameter(
            "gamma_points and a_points must be at least 2".into(),
        ));
    }
    run.param("Q", p.q());
    run.param("N", p.n());
    run.param("p_grid", args.p_grid.to_string());
    run.param("mode", args.mode);
    let powers = args.p_grid.values();
    let mut csv = String::new();
    match args.mode {
        NonZecMode::Min => {
            csv_line(&mut csv, &["P".into(), "S".into(), "a".into(), "gamma".into()]);
            for &power in &powers {
                match non_zec::s_nonzec(power, &p, &cfg, &search).map_err(|e| e.at_power(power))? {
                    NonZecOutcome::Feasible(o) => {
                        log::info!(
                            "S_NonZEC({power}) = {} at a = {}, γ = {}",
                            o.value,
                            o.design.a,
                            o.design.gamma
                        );
                        csv_line(
                            &mut csv,
                            &[
                                format_number(power),
                                format_number(o.value),
                                format_number(o.design.a),
                                format_number(o.design.gamma),
                            ],
                        );
                    }
                    NonZecOutcome::Infeasible => log::info!("S_NonZEC({power}): infeasible"),
                }
            }
        }
        NonZecMode::Region => {
            if args.gammas.iter().any(|g| !(0.0..=1.0).contains(g)) {
                return Err(Error::InvalidParameter("γ values must lie in [0, 1]".into()));
            }
            run.param("gammas", &args.gammas);
            let samples = non_zec::cost_region(&powers, &args.gammas, search.a_points, &p, &cfg)?;
            csv_line(
                &mut csv,
                &["P", "a", "gamma", "F", "info_slack", "admissible"].map(String::from),
            );
            for s in samples {
                csv_line(
                    &mut csv,
                    &[
                        format_number(s.power),
                        format_number(s.a),
                        format_number(s.gamma),
                        format_number(s.f_value),
                        format_number(s.info_slack),
                        u8::from(s.admissible).to_string(),
                    ],
                );
            }
        }
    }
    run.emit(args.out.as_deref(), &csv, Vec::new())?;
    Ok(EXIT_OK)
}

fn envelope_cmd(args: &EnvelopeArgs, mut run: Run) -> Result<i32> {
    let curves = args
        .inputs
        .iter()
        .map(frontier::ingest_csv)
        .collect::<Result<Vec<_>>>()?;
    run.param(
        "inputs",
        args.inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    );
    let env = frontier::lower_convex_envelope(curves)?;
    let csv = env.as_curve("envelope")?.to_csv(Some(("P", "S")));
    let sidecars = match &args.out {
        Some(out) => vec![(sibling(out, "provenance.csv"), env.provenance_csv())],
        None => Vec::new(),
    };
    run.emit(args.out.as_deref(), &csv, sidecars)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    analytic: f64,
    estimate: McEstimate,
    z_score: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    scheme: VerifyScheme,
    q: f64,
    n: f64,
    a: f64,
    gamma: f64,
    v1: f64,
    samples: u64,
    seed: u64,
    sigmas: f64,
    floor: f64,
    checks: Vec<Check>,
    pass: bool,
}

fn verify_cmd(args: &VerifyArgs, mut run: Run) -> Result<i32> {
    let p = problem(&args.problem)?;
    let cfg = run.settings.quadrature;
    let mcfg = run.settings.mc;
    let check = |name, analytic: f64, estimate: McEstimate| Check {
        name,
        analytic,
        estimate,
        z_score: estimate.z_score(analytic),
        pass: estimate.agrees_with(analytic, args.sigmas, args.floor),
    };
    let checks = match args.scheme {
        VerifyScheme::TwoPoint => {
            let eval = two_point::evaluate(args.a, &p, &cfg)?;
            let sim = mc::simulate_two_point(args.a, &p, &mcfg)?;
            vec![
                check("power", eval.power, sim.power),
                check("cost", eval.cost, sim.cost),
            ]
        }
        VerifyScheme::NonZec => {
            if !(0.0..=1.0).contains(&args.gamma) || args.v1.is_nan() || args.v1 < 0.0 {
                return Err(Error::InvalidParameter("need γ in [0, 1] and V1 ≥ 0".into()));
            }
            let power = args.v1 + two_point::power_cost(args.a, &p);
            let f = non_zec::cost_f_v1(args.a, args.gamma, args.v1, &p, &cfg)?;
            let sim = mc::simulate_non_zec(args.a, args.gamma, args.v1, &p, &mcfg)?;
            let cross = mc::cross_term_non_zec(args.a, args.gamma, args.v1, &p, &mcfg)?;
            vec![
                check("power", power, sim.power),
                check("cost", f, sim.cost),
                check("cross_term", 0.0, cross),
            ]
        }
    };
    let pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        println!(
            "{} {:<10} analytic {:.10} mc {:.10} ± {:.3e} (z = {:.2})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.analytic,
            c.estimate.mean,
            c.estimate.std_error,
            c.z_score
        );
    }
    let report = VerifyReport {
        scheme: args.scheme,
        q: p.q(),
        n: p.n(),
        a: args.a,
        gamma: args.gamma,
        v1: args.v1,
        samples: mcfg.samples,
        seed: mcfg.seed,
        sigmas: args.sigmas,
        floor: args.floor,
        checks,
        pass,
    };
    if let Some(out) = &args.out {
        run.param("scheme", args.scheme);
        run.param("a", args.a);
        run.param("gamma", args.gamma);
        run.param("v1", args.v1);
        let mut text = serde_json::to_string_pretty(&report).expect("report serialises");
        text.push('\n');
        run.emit(Some(out), &text, Vec::new())?;
    }
    let mut summary = String::new();
    let _ = write!(summary, "verification {}", if pass { "passed" } else { "FAILED" });
    eprintln!("{summary}");
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn replay(args: &ReplayArgs) -> Result<i32> {
    let manifest = RunManifest::load(&args.manifest)?;
    if manifest.tool_version != env!("CARGO_PKG_VERSION") {
        log::warn!(
            "manifest written by version {}, replaying with {}",
            manifest.tool_version,
            env!("CARGO_PKG_VERSION")
        );
    }
    let mut argv = manifest.argv.clone();
    if let Some(out) = &args.out {
        let out = out.display().to_string();
        match argv.iter().position(|a| a == "--out") {
            Some(i) if i + 1 < argv.len() => argv[i + 1] = out,
            _ => match argv.iter().position(|a| a.starts_with("--out=")) {
                Some(i) => argv[i] = format!("--out={out}"),
                None => argv.extend(["--out".to_string(), out]),
            },
        }
    }
    log::info!("replaying: wzec {}", argv.join(" "));
    let cli = Cli::try_parse_from(std::iter::once("wzec".to_string()).chain(argv.iter().cloned()))
        .map_err(|e| Error::InvalidParameter(format!("manifest arguments do not parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(Error::InvalidParameter("a manifest cannot record a replay".into()));
    }
    dispatch(cli, argv)
}
