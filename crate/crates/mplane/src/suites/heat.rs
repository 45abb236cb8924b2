//! Heat kernels: unit mass, the convolution semigroup, and the Fourier form
//! against a direct Monte Carlo Fourier integral.

use mplane_core::matrix::PosDefMatrix;
use mplane_core::quad::{mc_run, sampling};
use mplane_core::report::{ParamValue, Report};
use mplane_core::riesz::heat_kernel;
use mplane_core::rng::RngStreams;
use mplane_core::testfn::TestFunction;
use mplane_core::zeta::zeta_integral;
use mplane_core::{Complex64, RectMatrix};

use super::{worst_rel_report, Check};
use crate::config::SuiteConfig;

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "heat-mass", run: mass },
        Check { id: "heat-semigroup-5pts", run: semigroup },
        Check { id: "heat-fourier-vs-mc", run: fourier_mc },
    ]
}

/// ∫ h_t dx = 1 to 1e−6 by radial quadrature, t ∈ {I₂, diag(1, 3)}.
fn mass(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m) = (4usize, 2usize);
    let spec = super::quad_spec(cfg, 1e-7);
    let mut pairs = Vec::new();
    for t in [PosDefMatrix::identity(2), PosDefMatrix::diag(&[1.0, 3.0])?] {
        let f = TestFunction::heat(n, m, t);
        let z = zeta_integral(&f, Complex64::new(n as f64, 0.0), n, m, &spec, streams)?;
        pairs.push((z.value.re(), 1.0));
    }
    Ok(worst_rel_report("heat-mass", &pairs, 1e-6, cfg.seed))
}

/// (h_t ∗ h_τ)(x) = h_{t+τ}(x) at 5 points within 3σ, by Monte Carlo
/// convolution over y ~ h_τ.
fn semigroup(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m) = (4usize, 2usize);
    let t = PosDefMatrix::diag(&[0.7, 1.2])?;
    let tau = PosDefMatrix::diag(&[1.1, 0.5])?;
    let sqrt_2tau = tau.scale(2.0)?.sqrt();
    let mut worst = 0.0f64;
    let mut worst_triple = (0.0, 0.0, 0.0);
    for (i, shift) in [0.0f64, 0.35, -0.5, 0.8, 0.2].iter().enumerate() {
        let mut x = RectMatrix::zeros(n, m);
        x.set(0, 0, *shift);
        x.set(2, 1, -shift * 0.6);
        let t_cl = t.clone();
        let x_cl = x.clone();
        let s2t = sqrt_2tau.clone();
        let est = mc_run(
            &streams.substream(i as u64),
            cfg.samples,
            move |rng| {
                // y ~ h_τ: rows i.i.d. N(0, 2τ)
                let g = sampling::gaussian_matrix(rng, n, m, 1.0);
                let y = g.mul(&s2t);
                Complex64::new(heat_kernel(&x_cl.sub(&y), &t_cl), 0.0)
            },
        );
        let want = heat_kernel(&x, &t.add(&tau));
        let dev = (est.re() - want).abs() / (3.0 * est.stderr).max(1e-300);
        if dev > worst {
            worst = dev;
            worst_triple = (est.re(), want, est.stderr);
        }
    }
    Ok(Report {
        id: "heat-semigroup-5pts".to_string(),
        params: vec![("worst_dev_over_3sigma".to_string(), ParamValue::Real(worst))],
        lhs: worst_triple.0,
        stderr: worst_triple.2,
        rhs: worst_triple.1,
        pass: worst <= 1.0,
        n_samples: 5 * cfg.samples,
        seed: cfg.seed,
        wall_ms: 0,
        route: None,
    })
}

/// ℱh_t(y) = exp(−tr(t y′y)) against the Monte Carlo characteristic
/// function E[exp(i tr(y′x))], x ~ h_t, at three frequencies.
fn fourier_mc(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m) = (4usize, 2usize);
    let t = PosDefMatrix::diag(&[1.0, 2.0])?;
    let sqrt_2t = t.scale(2.0)?.sqrt();
    let mut worst = 0.0f64;
    let mut worst_triple = (0.0, 0.0, 0.0);
    for (i, scale) in [0.3f64, 0.7, 1.1].iter().enumerate() {
        let mut y = RectMatrix::zeros(n, m);
        y.set(0, 0, *scale);
        y.set(1, 1, -0.4 * scale);
        y.set(3, 0, 0.2 * scale);
        let y_cl = y.clone();
        let s2t = sqrt_2t.clone();
        let est = mc_run(&streams.substream(i as u64), cfg.samples, move |rng| {
            let g = sampling::gaussian_matrix(rng, n, m, 1.0);
            let x = g.mul(&s2t);
            Complex64::new(0.0, y_cl.dot(&x)).exp()
        });
        let want = (-t.as_sym().trace_product(&y.gram())).exp();
        let dev = (est.value - Complex64::new(want, 0.0)).norm() / (3.0 * est.stderr).max(1e-300);
        if dev > worst {
            worst = dev;
            worst_triple = (est.re(), want, est.stderr);
        }
    }
    Ok(Report {
        id: "heat-fourier-vs-mc".to_string(),
        params: vec![("worst_dev_over_3sigma".to_string(), ParamValue::Real(worst))],
        lhs: worst_triple.0,
        stderr: worst_triple.2,
        rhs: worst_triple.1,
        pass: worst <= 1.0,
        n_samples: 3 * cfg.samples,
        seed: cfg.seed,
        wall_ms: 0,
        route: None,
    })
}
