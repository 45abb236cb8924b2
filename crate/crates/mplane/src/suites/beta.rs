//! Beta function of the cone: bounded-cone quadrature against Γ-ratios.

use mplane_core::matrix::PosDefMatrix;
use mplane_core::quad::integrate_bounded_cone;
use mplane_core::report::Report;
use mplane_core::rng::RngStreams;
use mplane_core::special::siegel_beta;
use mplane_core::testfn::{ConeDecay, RadialFn};
use mplane_core::Complex64;

use super::{rel_report, Check};
use crate::config::SuiteConfig;

pub fn checks() -> Vec<Check> {
    vec![Check { id: "beta-quadrature-2-2", run: beta_2_2 }]
}

/// ∫₀^{I₂} |r|^{α−d}|I−r|^{β−d} dr = B₂(2,2) = π/45, rel ≤ 1e−5.
fn beta_2_2(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let m = 2usize;
    let (alpha, beta) = (2.0f64, 2.0f64);
    let d = (m as f64 + 1.0) / 2.0;
    let f0 = RadialFn::new(
        move |r: &PosDefMatrix| {
            let eye = mplane_core::matrix::SymMatrix::identity(r.size());
            match PosDefMatrix::new(eye.sub(r.as_sym())) {
                Ok(q) => Complex64::new(
                    ((alpha - d) * r.log_det() + (beta - d) * q.log_det()).exp(),
                    0.0,
                ),
                Err(_) => Complex64::new(0.0, 0.0),
            }
        },
        ConeDecay { exp_rate: 1.0, power_bound: 0.0 },
    );
    let spec = super::quad_spec(cfg, 1e-7);
    let got = integrate_bounded_cone(&f0, None, &PosDefMatrix::identity(m), &spec, streams)?;
    let want = siegel_beta(m, Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0)).real()?;
    let mut r = rel_report("beta-quadrature-2-2", got.re(), want, 1e-5, cfg.seed);
    r.n_samples = got.n_samples;
    Ok(r)
}
