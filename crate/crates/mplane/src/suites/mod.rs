//! The named verification suites.
//!
//! Each check pits a numerical evaluation against a closed form or a second
//! independent route and reports pass/fail under the uniform rule
//! |lhs − rhs| ≤ max(abs_tol, 3·combined stderr) — or an explicit relative
//! bound where the criterion is deterministic. Every check derives its RNG
//! streams from the master seed and its own id, so results do not depend on
//! which suites run or in what order.

use std::time::Instant;

use mplane_core::report::{ParamValue, Report};
use mplane_core::rng::RngStreams;

use crate::config::SuiteConfig;
use crate::report::{CheckJson, SuiteReportJson, SCHEMA_VERSION};

mod appendix;
mod bernstein;
mod bessel;
mod beta;
mod fuglede;
mod functional_eq;
mod gamma;
mod heat;
mod inversion;
mod radial;
mod radon;
mod riesz;
mod wallach;
mod zeta;

pub struct Check {
    pub id: &'static str,
    pub run: fn(&SuiteConfig, &RngStreams) -> mplane_core::Result<Report>,
}

pub fn suite_ids() -> &'static [&'static str] {
    &[
        "gamma",
        "beta",
        "bessel",
        "appendix",
        "bernstein",
        "radial",
        "zeta",
        "functional-eq",
        "wallach",
        "heat",
        "riesz",
        "radon",
        "fuglede",
        "inversion",
        "all",
    ]
}

fn checks_for(id: &str) -> Option<Vec<Check>> {
    let v = match id {
        "gamma" => gamma::checks(),
        "beta" => beta::checks(),
        "bessel" => bessel::checks(),
        "appendix" => appendix::checks(),
        "bernstein" => bernstein::checks(),
        "radial" => radial::checks(),
        "zeta" => zeta::checks(),
        "functional-eq" => functional_eq::checks(),
        "wallach" => wallach::checks(),
        "heat" => heat::checks(),
        "riesz" => riesz::checks(),
        "radon" => radon::checks(),
        "fuglede" => fuglede::checks(),
        "inversion" => inversion::checks(),
        _ => return None,
    };
    Some(v)
}

/// The outcome of one suite run, with measured (but optionally unreported)
/// wall times per check.
pub struct Outcome {
    pub report: SuiteReportJson,
    pub check_walls: Vec<u64>,
}

/// Execute a suite by id. `None` for an unknown id.
pub fn run_suite(id: &str, cfg: &SuiteConfig) -> Option<Outcome> {
    let checks: Vec<Check> = if id == "all" {
        suite_ids()
            .iter()
            .filter(|s| **s != "all")
            .flat_map(|s| checks_for(s).expect("known id"))
            .collect()
    } else {
        checks_for(id)?
    };
    let master = RngStreams::new(cfg.seed, cfg.workers);
    let suite_start = Instant::now();
    let mut out = Vec::with_capacity(checks.len());
    let mut walls = Vec::with_capacity(checks.len());
    let mut pass_count = 0;
    let mut fail_count = 0;
    for check in checks {
        let streams = master.substream(fnv1a(check.id));
        let t0 = Instant::now();
        let result = (check.run)(cfg, &streams);
        let wall = t0.elapsed().as_millis() as u64;
        let report = match result {
            Ok(mut r) => {
                r.id = check.id.to_string();
                r
            }
            Err(e) => error_report(check.id, &e, cfg.seed),
        };
        if report.pass {
            pass_count += 1;
        } else {
            fail_count += 1;
        }
        out.push(CheckJson::from_report(&report, wall, cfg.timings));
        walls.push(wall);
    }
    let wall_ms = suite_start.elapsed().as_millis() as u64;
    Some(Outcome {
        report: SuiteReportJson {
            suite: id.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            schema: SCHEMA_VERSION,
            seed: cfg.seed,
            workers: cfg.workers,
            pass_count,
            fail_count,
            wall_ms: if cfg.timings { wall_ms } else { 0 },
            checks: out,
        },
        check_walls: walls,
    })
}

fn error_report(id: &str, e: &mplane_core::Error, seed: u64) -> Report {
    Report {
        id: id.to_string(),
        params: vec![("error".to_string(), ParamValue::Text(e.to_string()))],
        lhs: f64::NAN,
        stderr: f64::NAN,
        rhs: f64::NAN,
        pass: false,
        n_samples: 0,
        seed,
        wall_ms: 0,
        route: None,
    }
}

fn fnv1a(s: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

// shared helpers for the suite modules

pub(crate) fn mc_spec(cfg: &SuiteConfig, mult: f64) -> mplane_core::QuadratureSpec {
    mplane_core::QuadratureSpec {
        rel_tol: 0.9, // Monte Carlo checks gate on the 3σ rule, not rel_tol
        abs_tol: cfg.abs_tol,
        max_evals: ((cfg.samples as f64) * mult).max(2.0) as u64,
        strategy: mplane_core::Strategy::Auto,
    }
}

pub(crate) fn quad_spec(cfg: &SuiteConfig, rel_tol: f64) -> mplane_core::QuadratureSpec {
    mplane_core::QuadratureSpec {
        rel_tol: cfg.rel_tol.unwrap_or(rel_tol),
        abs_tol: cfg.abs_tol,
        max_evals: 100_000_000,
        strategy: mplane_core::Strategy::Auto,
    }
}

/// Deterministic full-rank sample points with σ_min bounded away from the
/// rank-deficient set.
pub(crate) fn full_rank_points(
    streams: &RngStreams,
    n: usize,
    m: usize,
    count: usize,
    min_sigma: f64,
) -> Vec<mplane_core::RectMatrix> {
    let mut rng = streams.stream(0);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = mplane_core::RectMatrix::sample_gaussian(&mut rng, n, m);
        let (hi, lo) = x.singular_extremes();
        if lo > 0.4 * hi && lo > min_sigma {
            out.push(x);
        }
    }
    out
}

/// A report for a deterministic comparison at an explicit relative bound.
pub(crate) fn rel_report(id: &str, lhs: f64, rhs: f64, rel_bound: f64, seed: u64) -> Report {
    let scale = rhs.abs().max(1e-300);
    let pass = (lhs - rhs).abs() <= rel_bound * scale;
    Report {
        id: id.to_string(),
        params: vec![("rel_bound".to_string(), ParamValue::Real(rel_bound))],
        lhs,
        stderr: 0.0,
        rhs,
        pass,
        n_samples: 0,
        seed,
        wall_ms: 0,
        route: None,
    }
}

/// Worst-deviation aggregate over a family of deterministic comparisons.
pub(crate) fn worst_rel_report(
    id: &str,
    pairs: &[(f64, f64)],
    rel_bound: f64,
    seed: u64,
) -> Report {
    let mut worst = 0.0f64;
    let mut worst_pair = (0.0, 0.0);
    for &(lhs, rhs) in pairs {
        let dev = (lhs - rhs).abs() / rhs.abs().max(1e-300);
        if dev > worst {
            worst = dev;
            worst_pair = (lhs, rhs);
        }
    }
    let mut r = rel_report(id, worst_pair.0, worst_pair.1, rel_bound, seed);
    r.pass = worst <= rel_bound;
    r.params.push(("worst_rel".to_string(), ParamValue::Real(worst)));
    r
}
