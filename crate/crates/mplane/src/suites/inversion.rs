//! Even-order pointwise inversion of the Radon transform by Cayley-Laplace
//! powers of the backprojection.

use mplane_core::diff::DiffSpec;
use mplane_core::matrix::{PosDefMatrix, StiefelFrame};
use mplane_core::radon::{invert_radon_even_k, radon_closed_form};
use mplane_core::report::Report;
use mplane_core::rng::RngStreams;
use mplane_core::testfn::TestFunction;
use mplane_core::RectMatrix;

use super::{rel_report, Check};
use crate::config::SuiteConfig;

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "inversion-6-2-2", run: heat_recovery },
        Check { id: "inversion-3-1-2-classical", run: classical },
    ]
}

/// Recover h_{I₂}(0) from its Radon data at (n, m, k) = (6, 2, 2), 1e−2 rel.
fn heat_recovery(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m, k) = (6usize, 2usize, 2usize);
    let f = TestFunction::heat(n, m, PosDefMatrix::identity(m));
    let f_cl = f.clone();
    let data = move |xi: &StiefelFrame, t: &RectMatrix| {
        radon_closed_form(&f_cl, xi, t).expect("heat mixture")
    };
    let x = RectMatrix::zeros(n, m);
    let spec = mplane_core::QuadratureSpec {
        max_evals: (cfg.samples / 30).max(4_000),
        ..super::mc_spec(cfg, 1.0)
    };
    let got = invert_radon_even_k(&data, &x, k, n, m, &spec, &DiffSpec::default(), streams)?;
    let want = f.eval_real(&x);
    let mut rep = rel_report("inversion-6-2-2", got.re(), want, 1e-2, cfg.seed);
    rep.stderr = got.stderr;
    rep.n_samples = got.n_samples;
    Ok(rep)
}

/// The classical parity case (n, m, k) = (3, 1, 2): f = −Δ[γ₁ ǧ].
fn classical(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m, k) = (3usize, 1usize, 2usize);
    let f = TestFunction::heat(n, m, PosDefMatrix::diag(&[1.0])?);
    let f_cl = f.clone();
    let data = move |xi: &StiefelFrame, t: &RectMatrix| {
        radon_closed_form(&f_cl, xi, t).expect("heat mixture")
    };
    let mut x = RectMatrix::zeros(n, m);
    x.set(0, 0, 0.4);
    let spec = mplane_core::QuadratureSpec {
        max_evals: (cfg.samples / 50).max(3_000),
        ..super::mc_spec(cfg, 1.0)
    };
    let got = invert_radon_even_k(&data, &x, k, n, m, &spec, &DiffSpec::default(), streams)?;
    let want = f.eval_real(&x);
    let mut rep = rel_report("inversion-3-1-2-classical", got.re(), want, 2e-2, cfg.seed);
    rep.stderr = got.stderr;
    rep.n_samples = got.n_samples;
    Ok(rep)
}
