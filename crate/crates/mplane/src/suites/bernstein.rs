//! Bernstein identities: Δ|x|^λ = 𝓑(λ)|x|^{λ−2} at random full-rank points,
//! the iterated form Δ²|x|^{α+4−n} = B₂(α)|x|^{α−n}, and the D-operator
//! identities on the cone.

use mplane_core::diff::{cayley_laplace, cayley_laplace_power, d_operator, DiffSpec};
use mplane_core::matrix::{vol_factor, PosDefMatrix};
use mplane_core::report::{ParamValue, Report};
use mplane_core::rng::RngStreams;
use mplane_core::special::{bernstein_b, bernstein_bk, bernstein_cal_b, siegel_gamma_real};
use mplane_core::testfn::{ConeDecay, RadialFn, TestFunction};
use mplane_core::Complex64;

use super::{full_rank_points, worst_rel_report, Check};
use crate::config::SuiteConfig;

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "bernstein-n4-lambda-2.0", run: |c, s| dxm(c, s, 4, 2.0, 1e-6) },
        Check { id: "bernstein-n4-lambda-2.5", run: |c, s| dxm(c, s, 4, 2.5, 1e-3) },
        Check { id: "bernstein-n6-lambda-2.0", run: |c, s| dxm(c, s, 6, 2.0, 1e-6) },
        Check { id: "bernstein-n6-lambda-2.5", run: |c, s| dxm(c, s, 6, 2.5, 1e-3) },
        Check { id: "bernstein-n4-lambda-4.0", run: |c, s| dxm(c, s, 4, 4.0, 1e-3) },
        Check { id: "bernstein-iterated-k2", run: iterated },
        Check { id: "d-operator-exponential", run: d_exponential },
        Check { id: "d-operator-det-power", run: d_det_power },
        Check { id: "d-operator-gamma-ladder", run: d_gamma_ladder },
    ]
}

/// Δ|x|^λ / |x|^{λ−2} = 𝓑(λ) at 5 random full-rank points of M_{n,2}.
fn dxm(
    cfg: &SuiteConfig,
    streams: &RngStreams,
    n: usize,
    lambda: f64,
    rel: f64,
) -> mplane_core::Result<Report> {
    let m = 2usize;
    let f = TestFunction::det_power(n, m, lambda);
    // polynomial λ has no truncation error, so a larger step only averages
    // rounding noise down; non-polynomial λ stays at the default
    let spec = if lambda == 2.0 {
        DiffSpec { base_step: 0.05, ..Default::default() }
    } else {
        DiffSpec::default()
    };
    let want = bernstein_cal_b(Complex64::new(lambda, 0.0), n, m).re;
    let mut pairs = Vec::new();
    for x in full_rank_points(streams, n, m, 5, 0.5) {
        let delta = cayley_laplace(&f, &x, &spec)?;
        let got = delta / vol_factor(&x).powf(lambda - 2.0);
        pairs.push((got, want));
    }
    let mut rep = worst_rel_report("bernstein-dxm", &pairs, rel, cfg.seed);
    rep.params.push(("n".to_string(), ParamValue::Int(n as i64)));
    rep.params.push(("lambda".to_string(), ParamValue::Real(lambda)));
    Ok(rep)
}

/// Δ²|x|^{α+4−n} = B₂(α)|x|^{α−n} at (n, m, α) = (6, 2, 3), where B₂(3) = 0;
/// the deviation is measured against the natural coefficient scale.
fn iterated(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m, alpha) = (6usize, 2usize, 3.0f64);
    let lambda = alpha + 4.0 - n as f64;
    let f = TestFunction::det_power(n, m, lambda);
    let spec = DiffSpec { base_step: 0.05, ..Default::default() };
    let coeff = bernstein_bk(Complex64::new(alpha, 0.0), 2, n, m).re;
    // scale of the nonzero factors of B₂ around α = 3
    let coeff_scale = bernstein_cal_b(Complex64::new(lambda, 0.0), n, m).re.abs().max(30.0);
    let mut worst = 0.0f64;
    let mut worst_vals = (0.0, 0.0);
    for x in full_rank_points(streams, n, m, 5, 0.7) {
        let got = cayley_laplace_power(&f, &x, 2, &spec)?;
        let pow = vol_factor(&x).powf(alpha - n as f64);
        let want = coeff * pow;
        let dev = (got - want).abs() / (want.abs().max(coeff_scale * pow));
        if dev > worst {
            worst = dev;
            worst_vals = (got, want);
        }
    }
    Ok(Report {
        id: "bernstein-iterated-k2".to_string(),
        params: vec![
            ("alpha".to_string(), ParamValue::Real(alpha)),
            ("worst_normalized_dev".to_string(), ParamValue::Real(worst)),
        ],
        lhs: worst_vals.0,
        stderr: 0.0,
        rhs: worst_vals.1,
        pass: worst <= 1e-3,
        n_samples: 0,
        seed: cfg.seed,
        wall_ms: 0,
        route: None,
    })
}

/// D e^{−tr(rz)} = (−1)^m det(z) e^{−tr(rz)} at z = I, m ∈ {1, 2, 3}.
fn d_exponential(cfg: &SuiteConfig, _s: &RngStreams) -> mplane_core::Result<Report> {
    let mut pairs = Vec::new();
    for m in 1..=3usize {
        let g = RadialFn::new(
            |r: &PosDefMatrix| Complex64::new((-r.trace()).exp(), 0.0),
            ConeDecay { exp_rate: 1.0, power_bound: 0.0 },
        );
        let r = PosDefMatrix::diag(&[1.0, 1.5, 0.7][..m])?;
        let got = d_operator(&g, &r, &DiffSpec::default())?;
        let want = if m % 2 == 0 { 1.0 } else { -1.0 } * (-r.trace()).exp();
        pairs.push((got, want));
    }
    Ok(worst_rel_report("d-operator-exponential", &pairs, 1e-6, cfg.seed))
}

/// D|r|^α = b(α)|r|^{α−1} at r near I₂, α = 2.5.
fn d_det_power(cfg: &SuiteConfig, _s: &RngStreams) -> mplane_core::Result<Report> {
    let alpha = 2.5f64;
    let g = RadialFn::new(
        move |r: &PosDefMatrix| Complex64::new((alpha * r.log_det()).exp(), 0.0),
        ConeDecay { exp_rate: 0.0, power_bound: alpha },
    );
    let mut pairs = Vec::new();
    for r in [PosDefMatrix::identity(2), PosDefMatrix::diag(&[1.4, 0.8])?] {
        let got = d_operator(&g, &r, &DiffSpec::default())?;
        let want = bernstein_b(Complex64::new(alpha, 0.0), 2).re
            * ((alpha - 1.0) * r.log_det()).exp();
        pairs.push((got, want));
    }
    Ok(worst_rel_report("d-operator-det-power", &pairs, 1e-6, cfg.seed))
}

/// D(|r|^{α−d}/Γ_m(α)) = |r|^{α−1−d}/Γ_m(α−1): the gamma ladder.
fn d_gamma_ladder(cfg: &SuiteConfig, _s: &RngStreams) -> mplane_core::Result<Report> {
    let m = 2usize;
    let d = (m as f64 + 1.0) / 2.0;
    let alpha = 3.2f64;
    let g = RadialFn::new(
        move |r: &PosDefMatrix| Complex64::new(((alpha - d) * r.log_det()).exp(), 0.0),
        ConeDecay { exp_rate: 0.0, power_bound: alpha },
    );
    let r = PosDefMatrix::diag(&[1.2, 0.9])?;
    let got = d_operator(&g, &r, &DiffSpec::default())? / siegel_gamma_real(m, alpha)?;
    let want = ((alpha - 1.0 - d) * r.log_det()).exp() / siegel_gamma_real(m, alpha - 1.0)?;
    Ok(super::rel_report("d-operator-gamma-ladder", got, want, 1e-6, cfg.seed))
}
