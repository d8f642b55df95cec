//! Cost curves, parameter sweeps, the time-sharing envelope and CSV I/O.
//!
//! CSV files are comma separated with LF line endings, an optional single
//! header line and two numeric columns. Numbers are written with 17
//! significant digits so that a value survives a write/read cycle unchanged.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::quadrature::QuadratureConfig;
use crate::non_zec::{s_nonzec, SearchConfig};
use crate::params::{CostValue, ProblemParams};
use crate::{two_point, zec};

/// Formats a value with 17 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub label: String,
    points: Vec<(f64, f64)>,
    pub meta: BTreeMap<String, f64>,
}

impl Curve {
    /// Builds a curve; `x` must be strictly increasing and every value finite.
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(&(x, y)) = points.iter().find(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite point ({x}, {y})")));
        }
        if let Some(w) = points.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidParameter(format!(
                "x not strictly increasing: {} then {}",
                w[0].0, w[1].0
            )));
        }
        Ok(Self {
            label: label.into(),
            points,
            meta: BTreeMap::new(),
        })
    }

    pub fn with_meta(mut self, key: &str, value: f64) -> Self {
        self.meta.insert(key.to_string(), value);
        self
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Linear interpolation between stored points; `None` outside the range.
    pub fn eval(&self, x: f64) -> Option<f64> {
        interpolate(&self.points, x)
    }

    pub fn to_csv(&self, header: Option<(&str, &str)>) -> String {
        let mut out = String::new();
        if let Some((hx, hy)) = header {
            let _ = writeln!(out, "{hx},{hy}");
        }
        for &(x, y) in &self.points {
            let _ = writeln!(out, "{},{}", format_number(x), format_number(y));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>, header: Option<(&str, &str)>) -> Result<()> {
        std::fs::write(path, self.to_csv(header))?;
        Ok(())
    }
}

fn interpolate(points: &[(f64, f64)], x: f64) -> Option<f64> {
    let (first, last) = (points.first()?, points.last()?);
    if x < first.0 || x > last.0 {
        return None;
    }
    let i = points.partition_point(|p| p.0 < x);
    if i < points.len() && points[i].0 == x {
        return Some(points[i].1);
    }
    let (x0, y0) = points[i - 1];
    let (x1, y1) = points[i];
    Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scheme {
    TwoPoint,
    Zec,
    NonZec(SearchConfig),
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::TwoPoint => "S_2",
            Scheme::Zec => "S_ZEC",
            Scheme::NonZec(_) => "S_NonZEC",
        }
    }
}

fn check_increasing(grid: &[f64], what: &str) -> Result<()> {
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!(
            "{what} grid must be strictly increasing"
        )));
    }
    Ok(())
}

/// `S(P)` of one scheme over a power grid; infeasible powers are left out.
pub fn sweep_s_vs_p(scheme: Scheme, powers: &[f64], p: &ProblemParams, cfg: &QuadratureConfig) -> Result<Curve> {
    check_increasing(powers, "power")?;
    let values: Vec<CostValue> = powers
        .par_iter()
        .map(|&power| {
            let v = match scheme {
                Scheme::TwoPoint => two_point::s2_of_p(power, p, cfg),
                Scheme::Zec => zec::s_zec(power, p, cfg),
                Scheme::NonZec(search) => s_nonzec(power, p, cfg, &search).map(|o| o.cost()),
            };
            log::info!("{} at P = {power}: {v:?}", scheme.label());
            v.map_err(|e| e.at_power(power))
        })
        .collect::<Result<_>>()?;
    let points = powers
        .iter()
        .zip(values)
        .filter_map(|(&x, v)| v.value().map(|y| (x, y)))
        .collect();
    Ok(Curve::new(scheme.label(), points)?
        .with_meta("Q", p.q())
        .with_meta("N", p.n())
        .with_meta("rel_tol", cfg.rel_tol))
}

/// `P*(N)` at fixed `Q`; fails if the curve decreases by more than `tol_p`.
pub fn sweep_pstar_vs_n(noises: &[f64], q: f64, cfg: &QuadratureConfig, tol_p: f64) -> Result<Curve> {
    check_increasing(noises, "noise")?;
    let values: Vec<f64> = noises
        .par_iter()
        .map(|&n| {
            let p = ProblemParams::new(q, n)?;
            let ps = zec::p_star(&p, cfg, tol_p)?;
            log::info!("P*(N = {n}) = {ps}");
            Ok(ps)
        })
        .collect::<Result<_>>()?;
    for (i, w) in values.windows(2).enumerate() {
        if w[1] < w[0] - tol_p {
            return Err(Error::Monotonicity(format!(
                "P* drops from {} at N = {} to {} at N = {}",
                w[0],
                noises[i],
                w[1],
                noises[i + 1]
            )));
        }
    }
    Ok(Curve::new("P_star", noises.iter().copied().zip(values).collect())?
        .with_meta("Q", q)
        .with_meta("tol_P", tol_p))
}

/// A hull vertex and the input point it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullVertex {
    pub x: f64,
    pub y: f64,
    pub curve: usize,
    pub index: usize,
}

/// How the envelope value at some `x` is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Vertex(HullVertex),
    /// `λ·left + (1 − λ)·right`
    Mix {
        left: HullVertex,
        right: HullVertex,
        lambda: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub input_curves: Vec<Curve>,
    pub hull: Vec<HullVertex>,
}

impl Envelope {
    pub fn hull_points(&self) -> Vec<(f64, f64)> {
        self.hull.iter().map(|v| (v.x, v.y)).collect()
    }

    pub fn eval(&self, x: f64) -> Option<f64> {
        interpolate(&self.hull_points(), x)
    }

    pub fn support(&self, x: f64) -> Option<Support> {
        let (first, last) = (self.hull.first()?, self.hull.last()?);
        if x < first.x || x > last.x {
            return None;
        }
        let i = self.hull.partition_point(|v| v.x < x);
        if self.hull[i].x == x {
            return Some(Support::Vertex(self.hull[i]));
        }
        let (left, right) = (self.hull[i - 1], self.hull[i]);
        Some(Support::Mix {
            left,
            right,
            lambda: (right.x - x) / (right.x - left.x),
        })
    }

    pub fn as_curve(&self, label: &str) -> Result<Curve> {
        Curve::new(label, self.hull_points())
    }

    /// Sidecar CSV naming the source of every hull vertex.
    pub fn provenance_csv(&self) -> String {
        let mut out = String::from("x,y,curve,point_index\n");
        for v in &self.hull {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                format_number(v.x),
                format_number(v.y),
                self.input_curves[v.curve].label,
                v.index
            );
        }
        out
    }
}

fn cross(o: &HullVertex, a: &HullVertex, b: &HullVertex) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Lower convex hull of the union of all curve points.
///
/// Any convex combination of achievable `(P, S)` pairs is achievable by time
/// sharing, so this is the time-sharing frontier of the inputs.
pub fn lower_convex_envelope(curves: Vec<Curve>) -> Result<Envelope> {
    if curves.is_empty() {
        return Err(Error::DegenerateInput("no curves".into()));
    }
    let mut pts: Vec<HullVertex> = curves
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| {
            c.points().iter().enumerate().map(move |(pi, &(x, y))| HullVertex {
                x,
                y,
                curve: ci,
                index: pi,
            })
        })
        .collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateInput(format!("{} point(s) in total", pts.len())));
    }
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|later, earlier| later.x == earlier.x);

    let mut hull: Vec<HullVertex> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p) < 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    Ok(Envelope {
        input_curves: curves,
        hull,
    })
}

pub fn ingest_csv(path: impl AsRef<Path>) -> Result<Curve> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path.display().to_string();
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| name.clone());
    parse_csv(&text, &name, &label)
}

/// Parses two-column CSV text. A non-numeric first line is taken as a header;
/// rows are sorted by `x` and repeated `x` values keep the smallest `y`.
pub fn parse_csv(text: &str, source_name: &str, label: &str) -> Result<Curve> {
    let mut rows: Vec<(f64, f64)> = Vec::new();
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [x, y] => x.parse::<f64>().ok().zip(y.parse::<f64>().ok()),
            _ => None,
        };
        let is_first = std::mem::replace(&mut first, false);
        match parsed {
            Some((x, y)) if x.is_finite() && y.is_finite() => rows.push((x, y)),
            None if is_first && fields.iter().any(|f| f.parse::<f64>().is_err()) => {}
            _ => {
                return Err(Error::Parse {
                    source_name: source_name.to_string(),
                    line: i + 1,
                    message: format!("expected two finite numbers, got {line:?}"),
                })
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile(source_name.to_string()));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    rows.dedup_by(|later, earlier| later.0 == earlier.0);
    Curve::new(label, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_validation() {
        assert!(Curve::new("c", vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(Curve::new("c", vec![(0.0, f64::NAN)]).is_err());
        assert!(Curve::new("c", vec![(1.0, 1.0), (0.5, 2.0)]).is_err());
        assert!(Curve::new("c", vec![]).unwrap().is_empty());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let c = Curve::new("c", vec![(0.1, 1.0 / 3.0), (0.2, std::f64::consts::PI)]).unwrap();
        let back = parse_csv(&c.to_csv(Some(("P", "S"))), "mem", "c").unwrap();
        assert_eq!(back.points(), c.points());
    }

    #[test]
    fn parse_examples() {
        let c = parse_csv("0.1,0.5\n0.2,0.4", "mem", "x").unwrap();
        assert_eq!(c.points(), &[(0.1, 0.5), (0.2, 0.4)]);

        let h = parse_csv("P,S\n0.1,0.5\n0.2,0.4\n", "mem", "x").unwrap();
        assert_eq!(h.len(), 2);

        let u = parse_csv("0.3,1\n0.1,2\n0.2,3\n0.1,1.5\n", "mem", "x").unwrap();
        assert_eq!(u.points(), &[(0.1, 1.5), (0.2, 3.0), (0.3, 1.0)]);
    }

    #[test]
    fn parse_errors() {
        match parse_csv("0.1,0.5\n0.2,abc\n", "f.csv", "x") {
            Err(Error::Parse { line, source_name, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(source_name, "f.csv");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_csv("", "f.csv", "x"), Err(Error::EmptyFile(_))));
        assert!(matches!(parse_csv("x,y\n", "f.csv", "x"), Err(Error::EmptyFile(_))));
        assert!(matches!(
            parse_csv("1,2,3\n", "f.csv", "x"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn envelope_of_affine_curve_is_itself() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 * 0.1, 1.0 - 0.5 * i as f64 * 0.1)).collect();
        let c = Curve::new("line", pts.clone()).unwrap();
        let env = lower_convex_envelope(vec![c]).unwrap();
        for (x, y) in pts {
            assert!((env.eval(x).unwrap() - y).abs() < 1e-12);
        }
    }

    #[test]
    fn envelope_of_two_points() {
        let zec = Curve::new("zec", vec![(0.383, 0.0)]).unwrap();
        let tp = Curve::new("tp", vec![(0.363, 0.2)]).unwrap();
        let env = lower_convex_envelope(vec![zec, tp]).unwrap();
        assert_eq!(env.hull_points(), vec![(0.363, 0.2), (0.383, 0.0)]);
        assert!((env.eval(0.373).unwrap() - 0.1).abs() < 1e-12);
        match env.support(0.373).unwrap() {
            Support::Mix { left, right, lambda } => {
                assert_eq!((left.curve, right.curve), (1, 0));
                assert!((lambda - 0.5).abs() < 1e-9);
            }
            s => panic!("{s:?}"),
        }
        assert!(env.eval(0.4).is_none());
    }

    #[test]
    fn envelope_needs_two_points() {
        let one = Curve::new("one", vec![(0.0, 0.0)]).unwrap();
        assert!(matches!(
            lower_convex_envelope(vec![one]),
            Err(Error::DegenerateInput(_))
        ));
        assert!(lower_convex_envelope(vec![]).is_err());
    }

    #[test]
    fn two_point_sweep_reaches_zero_at_q() {
        let p = ProblemParams::new(1.0, 0.15).unwrap();
        let grid: Vec<f64> = (0..8).map(|i| 0.3 + 0.1 * i as f64).collect();
        let c = sweep_s_vs_p(Scheme::TwoPoint, &grid, &p, &QuadratureConfig::default()).unwrap();
        // 0.3 is below P₂^min and is omitted
        assert_eq!(c.points()[0].0, 0.4);
        let at_q = c.points().iter().find(|pt| (pt.0 - 1.0).abs() < 1e-12).unwrap();
        assert_eq!(at_q.1, 0.0);
        assert_eq!(c.meta["Q"], 1.0);
    }

    #[test]
    fn sweep_rejects_unsorted_grid() {
        let p = ProblemParams::new(1.0, 0.15).unwrap();
        assert!(sweep_s_vs_p(Scheme::TwoPoint, &[0.5, 0.4], &p, &QuadratureConfig::default()).is_err());
    }
}
