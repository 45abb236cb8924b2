//! Riesz potentials: two-route agreement, the Gårding-Gindikin probe, the
//! semigroup, Δ-inversion, and the weighted rank-k identity.

use mplane_core::diff::DiffSpec;
use mplane_core::matrix::PosDefMatrix;
use mplane_core::quad::{mc_run, sampling};
use mplane_core::report::{ParamValue, Report};
use mplane_core::riesz::{
    gg_fractional, riesz_direct, riesz_heat, verify_delta_inverts_riesz,
    verify_riesz_semigroup, verify_weighted_identity, FrozenHeatGrid,
};
use mplane_core::rng::RngStreams;
use mplane_core::testfn::{ConeDecay, RadialFn, TestFunction};
use mplane_core::{Complex64, RectMatrix};

use super::Check;
use crate::config::SuiteConfig;

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "riesz-two-route-alpha-1.5", run: |c, s| two_route(c, s, 1.5) },
        Check { id: "riesz-two-route-alpha-2.0", run: |c, s| two_route(c, s, 2.0) },
        Check { id: "riesz-two-route-alpha-2.5", run: |c, s| two_route(c, s, 2.5) },
        Check { id: "riesz-gg-probe", run: gg_probe },
        Check { id: "riesz-semigroup", run: semigroup },
        Check { id: "riesz-delta-inversion", run: delta_inversion },
        Check { id: "riesz-weighted-identity", run: weighted },
    ]
}

/// Heat route (quadrature, σ/value ≤ 1e−3) vs direct Monte Carlo at two
/// points, (n, m) = (6, 2).
fn two_route(cfg: &SuiteConfig, streams: &RngStreams, alpha: f64) -> mplane_core::Result<Report> {
    let (n, m) = (6usize, 2usize);
    let f = TestFunction::heat(n, m, PosDefMatrix::diag(&[1.0, 1.5])?);
    let mut x1 = RectMatrix::zeros(n, m);
    x1.set(0, 0, 0.45);
    x1.set(2, 1, -0.3);
    let qspec = super::quad_spec(cfg, 1e-6);
    let mspec = super::mc_spec(cfg, 1.5);
    let a = Complex64::new(alpha, 0.0);
    let mut worst = 0.0f64;
    let mut worst_triple = (0.0, 0.0, 0.0);
    let mut tight = true;
    for (i, x) in [RectMatrix::zeros(n, m), x1].iter().enumerate() {
        let heat = riesz_heat(&f, x, a, n, m, &qspec, &streams.substream(i as u64))?;
        let direct = riesz_direct(&f, x, a, n, m, &mspec, &streams.substream(100 + i as u64))?;
        tight = tight && heat.stderr / heat.re().abs() <= 1e-3;
        let err = (heat.stderr.powi(2) + direct.stderr.powi(2)).sqrt();
        let dev = (heat.value - direct.value).norm() / (3.0 * err).max(1e-300);
        if dev > worst {
            worst = dev;
            worst_triple = (heat.re(), direct.re(), err);
        }
    }
    Ok(Report {
        id: "riesz-two-route".to_string(),
        params: vec![
            ("alpha".to_string(), ParamValue::Real(alpha)),
            ("worst_dev_over_3sigma".to_string(), ParamValue::Real(worst)),
        ],
        lhs: worst_triple.0,
        stderr: worst_triple.2,
        rhs: worst_triple.1,
        pass: worst <= 1.0 && tight,
        n_samples: 0,
        seed: cfg.seed,
        wall_ms: 0,
        route: Some("heat-vs-direct".to_string()),
    })
}

/// W_t[I^α f](x) = I₋^{α/2}[(W_· f)(x)](t) at the single probe t = I₂.
fn gg_probe(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m) = (6usize, 2usize);
    let alpha = 2.0f64;
    let tau = PosDefMatrix::diag(&[0.9, 1.2])?;
    let f = TestFunction::heat(n, m, tau.clone());
    let mut x = RectMatrix::zeros(n, m);
    x.set(1, 0, 0.4);
    let spec = super::quad_spec(cfg, 1e-7);
    // rhs: the fractional integral of τ ↦ (W_τ f)(x) = h_{τ+τ₀}(x)
    let f_cl = f.clone();
    let x_cl = x.clone();
    let g = RadialFn::new(
        move |t: &PosDefMatrix| f_cl.heat_smoothed(&x_cl, t).expect("heat"),
        ConeDecay { exp_rate: 0.0, power_bound: -(n as f64) / 2.0 },
    );
    let rhs = gg_fractional(
        &g,
        Some(&PosDefMatrix::identity(m)),
        Complex64::new(alpha / 2.0, 0.0),
        m,
        &spec,
        &streams.substream(1),
    )?;
    // lhs: Monte Carlo smoothing of the frozen-grid Riesz potential
    let grid = FrozenHeatGrid::build(alpha, &tau, n, 0.25)?;
    let x_in = x.clone();
    let lhs = mc_run(&streams.substream(2), (cfg.samples / 100).max(400), move |rng| {
        let y = sampling::gaussian_matrix(rng, n, m, std::f64::consts::SQRT_2);
        Complex64::new(grid.eval(&x_in.sub(&y)), 0.0)
    });
    Ok(Report::two_estimates("riesz-gg-probe", lhs, rhs, cfg.abs_tol, cfg.seed)
        .with_real("alpha", alpha))
}

/// I^α I^β f = I^{α+β} f at (n, m) = (6, 2), α = β = 2, x = 0, rel ≤ 1e−3.
fn semigroup(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m) = (6usize, 2usize);
    let f = TestFunction::heat(n, m, PosDefMatrix::identity(m));
    let x = RectMatrix::zeros(n, m);
    let spec = super::quad_spec(cfg, 1e-6);
    let mut rep = verify_riesz_semigroup(&f, &x, 2.0, 2.0, n, m, &spec, streams)?;
    rep.pass = rep.pass && rep.rel_err() <= 1e-3;
    Ok(rep)
}

/// Δ[I² f](x) = f(x) at (n, m) = (6, 2), rel ≤ 1e−3.
fn delta_inversion(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m) = (6usize, 2usize);
    let f = TestFunction::heat(n, m, PosDefMatrix::identity(m));
    let mut x = RectMatrix::zeros(n, m);
    x.set(0, 0, 0.7);
    x.set(1, 1, 0.9);
    x.set(2, 0, -0.3);
    let spec = super::quad_spec(cfg, 1e-6);
    let mut rep =
        verify_delta_inverts_riesz(&f, &x, 1, n, m, &spec, &DiffSpec::default(), streams)?;
    rep.pass = rep.pass && rep.rel_err() <= 1e-3;
    Ok(rep)
}

/// The weighted identity at (n, m, k, λ) = (4, 2, 1, 5), Gaussian f, 3σ.
fn weighted(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m, k) = (4usize, 2usize, 1usize);
    let f = TestFunction::gaussian(n, m);
    let spec = super::mc_spec(cfg, 3.0);
    verify_weighted_identity(&f, k, 5.0, n, m, &spec, streams)
}
