//! The functional equation of the zeta integral and its ε-regularized form.

use mplane_core::report::Report;
use mplane_core::rng::RngStreams;
use mplane_core::testfn::TestFunction;
use mplane_core::zeta::{verify_eq_3_5, verify_functional_equation};
use mplane_core::{Complex64, RectMatrix};

use super::Check;
use crate::config::SuiteConfig;

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "functional-eq-gaussian", run: gaussian },
        Check { id: "functional-eq-shifted", run: shifted },
        Check { id: "eps-regularized-identity", run: eps_identity },
    ]
}

/// Gaussian at (4, 2), α = 2: both sides are c_{n,m} by radial quadrature.
fn gaussian(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m) = (4usize, 2usize);
    let f = TestFunction::gaussian(n, m);
    let spec = super::quad_spec(cfg, 1e-7);
    let mut rep = verify_functional_equation(&f, Complex64::new(2.0, 0.0), n, m, &spec, streams)?;
    rep.pass = rep.pass && rep.rel_err() <= 1e-6;
    Ok(rep)
}

/// Shifted Gaussian: both sides by Monte Carlo, 3σ with σ/value ≤ 1e−2.
fn shifted(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m) = (4usize, 2usize);
    let center = RectMatrix::new(
        n,
        m,
        vec![0.25, -0.15, 0.1, 0.2, 0.0, 0.1, -0.2, 0.15],
    )?;
    let f = TestFunction::shifted_gaussian(n, m, center);
    let spec = super::mc_spec(cfg, 4.0);
    let mut rep = verify_functional_equation(&f, Complex64::new(2.0, 0.0), n, m, &spec, streams)?;
    let tight = rep.stderr / rep.rhs.abs().max(1e-300) <= 1e-2;
    rep.pass = rep.pass && tight;
    Ok(rep)
}

/// The ε-regularized identity at (n, m, α, ε) = (4, 2, 2, 0.5).
fn eps_identity(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m) = (4usize, 2usize);
    let f = TestFunction::gaussian(n, m);
    let spec = mplane_core::QuadratureSpec {
        rel_tol: 1e-6,
        max_evals: (cfg.samples / 50).max(2_000),
        ..super::mc_spec(cfg, 1.0)
    };
    verify_eq_3_5(&f, 2.0, 0.5, n, m, &spec, streams)
}
