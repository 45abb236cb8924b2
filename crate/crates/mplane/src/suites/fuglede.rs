//! The Fuglede identity γ₁(f̂)^∨ = I^k f at three (n, m, k) configurations.

use mplane_core::matrix::PosDefMatrix;
use mplane_core::radon::fuglede_check;
use mplane_core::report::Report;
use mplane_core::rng::RngStreams;
use mplane_core::testfn::TestFunction;
use mplane_core::RectMatrix;

use super::Check;
use crate::config::SuiteConfig;

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "fuglede-4-2-1", run: |c, s| config(c, s, 4, 2, 1) },
        Check { id: "fuglede-6-2-2", run: |c, s| config(c, s, 6, 2, 2) },
        Check { id: "fuglede-3-1-1", run: |c, s| config(c, s, 3, 1, 1) },
    ]
}

fn config(
    cfg: &SuiteConfig,
    streams: &RngStreams,
    n: usize,
    m: usize,
    k: usize,
) -> mplane_core::Result<Report> {
    let f = TestFunction::heat(n, m, PosDefMatrix::identity(m));
    let x = RectMatrix::zeros(n, m);
    let spec = super::mc_spec(cfg, 1.0);
    let mut rep = fuglede_check(&f, &x, k, n, m, &spec, streams)?;
    rep.params.push((
        "config".to_string(),
        mplane_core::report::ParamValue::Text(format!("({n},{m},{k})")),
    ));
    Ok(rep)
}
