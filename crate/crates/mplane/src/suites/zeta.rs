//! Zeta integrals: the Gaussian closed form by radial quadrature, the plain
//! mass at α = n, and insensitivity to perturbations on the rank-deficient
//! set.

use mplane_core::matrix::RectMatrix;
use mplane_core::report::{ParamValue, Report};
use mplane_core::rng::RngStreams;
use mplane_core::special::{named_const, siegel_gamma_real, NamedConst};
use mplane_core::testfn::{DecayMeta, TestFunction};
use mplane_core::zeta::zeta_integral;
use mplane_core::Complex64;
use std::sync::Arc;

use super::{rel_report, worst_rel_report, Check};
use crate::config::SuiteConfig;

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "zeta-gaussian-closed-form", run: gaussian_closed_form },
        Check { id: "zeta-alpha-n-mass", run: alpha_n_mass },
        Check { id: "zeta-zero-set-insensitivity", run: zero_set },
    ]
}

/// Z(e, α−n) = c_{n,m} Γ_m(α/2) at (n, m) = (4, 2), quadrature to 1e−6.
fn gaussian_closed_form(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m) = (4usize, 2usize);
    let f = TestFunction::gaussian(n, m);
    let spec = super::quad_spec(cfg, 1e-7);
    let c_nm = named_const(NamedConst::CNm { n, m }).real()?;
    let mut pairs = Vec::new();
    for &alpha in &[2.0f64, 2.5, 3.5] {
        let z = zeta_integral(&f, Complex64::new(alpha, 0.0), n, m, &spec, streams)?;
        pairs.push((z.value.re(), c_nm * siegel_gamma_real(m, alpha / 2.0)?));
    }
    Ok(worst_rel_report("zeta-gaussian-closed-form", &pairs, 1e-6, cfg.seed))
}

/// α = n: the weight is |x|⁰ and the zeta integral is the plain mass.
fn alpha_n_mass(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m) = (4usize, 2usize);
    let f = TestFunction::gaussian(n, m);
    let spec = super::quad_spec(cfg, 1e-7);
    let z = zeta_integral(&f, Complex64::new(n as f64, 0.0), n, m, &spec, streams)?;
    Ok(rel_report("zeta-alpha-n-mass", z.value.re(), f.mass().unwrap(), 1e-6, cfg.seed))
}

/// Modifying f on a thin tube around the rank-deficient set moves the
/// regular-region zeta integral by less than one standard error.
fn zero_set(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m) = (4usize, 2usize);
    let alpha = Complex64::new(2.0, 0.0);
    let f = TestFunction::gaussian(n, m);
    let bumped = {
        let f_cl = f.clone();
        TestFunction::custom(
            n,
            m,
            DecayMeta { gaussian_rate: 1.0, power_bound: 0.0, singular_power: None },
            Arc::new(move |x: &RectMatrix| {
                let v = f_cl.eval(x);
                let (hi, lo) = x.singular_extremes();
                if lo <= 1e-3 * hi.max(1.0) {
                    v * 2.0 // double the function on the tube
                } else {
                    v
                }
            }),
            None,
            None,
            None,
        )
    };
    let spec = mplane_core::QuadratureSpec {
        strategy: mplane_core::Strategy::MonteCarlo,
        ..super::mc_spec(cfg, 1.0)
    };
    let a = zeta_integral(&f, alpha, n, m, &spec, streams)?;
    let b = zeta_integral(&bumped, alpha, n, m, &spec, streams)?;
    let shift = (a.value.re() - b.value.re()).abs();
    let sigma = a.value.stderr.max(1e-300);
    let rep = Report {
        id: "zeta-zero-set-insensitivity".to_string(),
        params: vec![("shift_over_sigma".to_string(), ParamValue::Real(shift / sigma))],
        lhs: b.value.re(),
        stderr: sigma,
        rhs: a.value.re(),
        pass: shift < sigma,
        n_samples: a.value.n_samples + b.value.n_samples,
        seed: cfg.seed,
        wall_ms: 0,
        route: None,
    };
    Ok(rep)
}
