//! Siegel gamma: cone quadrature against the product formula, plus the exact
//! Pochhammer and splitting identities.

use mplane_core::quad::integrate_cone;
use mplane_core::report::Report;
use mplane_core::rng::RngStreams;
use mplane_core::special::{pochhammer, siegel_gamma, siegel_gamma_real};
use mplane_core::testfn::RadialFn;
use mplane_core::Complex64;

use super::{rel_report, worst_rel_report, Check};
use crate::config::SuiteConfig;

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "gamma-quadrature-alpha-1.2", run: |c, s| quad_vs_product(c, s, 1.2) },
        Check { id: "gamma-quadrature-alpha-2.0", run: |c, s| quad_vs_product(c, s, 2.0) },
        Check { id: "gamma-quadrature-alpha-3.5", run: |c, s| quad_vs_product(c, s, 3.5) },
        Check { id: "gamma-pochhammer-identity", run: pochhammer_identity },
        Check { id: "gamma-splitting", run: splitting },
        Check { id: "gamma-ratio-identity", run: ratio_identity },
    ]
}

/// ∫ e^{−tr r}|r|^{α−d} dr over P₂ vs π^{1/2}Γ(α)Γ(α−1/2), rel ≤ 1e−6.
fn quad_vs_product(
    cfg: &SuiteConfig,
    streams: &RngStreams,
    alpha: f64,
) -> mplane_core::Result<Report> {
    let m = 2;
    let f0 = RadialFn::gamma_integrand(m, Complex64::new(alpha, 0.0));
    let spec = super::quad_spec(cfg, 1e-7);
    let got = integrate_cone(&f0, m, &spec, streams)?;
    let want = siegel_gamma_real(m, alpha)?;
    let mut r = rel_report("gamma-quadrature", got.re(), want, 1e-6, cfg.seed);
    r.params.push(("alpha".to_string(), mplane_core::report::ParamValue::Real(alpha)));
    r.n_samples = got.n_samples;
    Ok(r)
}

/// (−1)^m Γ_m(1−α/2)/Γ_m(−α/2) = 2^{−m}(α, m) at α = 1.3, m = 2, rel ≤ 1e−12.
fn pochhammer_identity(cfg: &SuiteConfig, _s: &RngStreams) -> mplane_core::Result<Report> {
    let (alpha, m) = (1.3f64, 2usize);
    let lhs = siegel_gamma(m, Complex64::new(1.0 - alpha / 2.0, 0.0)).value()?
        / siegel_gamma(m, Complex64::new(-alpha / 2.0, 0.0)).value()?
        * if m % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = pochhammer(Complex64::new(alpha, 0.0), m) * 2f64.powi(-(m as i32));
    Ok(rel_report("gamma-pochhammer-identity", lhs.re, rhs.re, 1e-12, cfg.seed))
}

/// Γ_m(α) = π^{k(m−k)/2} Γ_k(α) Γ_{m−k}(α−k/2) at m = 3, k = 1, across a few α.
fn splitting(cfg: &SuiteConfig, _s: &RngStreams) -> mplane_core::Result<Report> {
    let pi = std::f64::consts::PI;
    let mut pairs = Vec::new();
    for &alpha in &[1.7f64, 2.3, 3.1] {
        let a = Complex64::new(alpha, 0.0);
        let lhs = siegel_gamma(3, a).value()?;
        let rhs = pi.powf(1.0)
            * siegel_gamma(1, a).value()?
            * siegel_gamma(2, a - 0.5).value()?;
        pairs.push((lhs.re, rhs.re));
    }
    Ok(worst_rel_report("gamma-splitting", &pairs, 1e-12, cfg.seed))
}

/// Γ_m(α)/Γ_m(α+k/2) = Γ_k(α+(k−m)/2)/Γ_k(α+k/2) at m = 3, k = 1.
fn ratio_identity(cfg: &SuiteConfig, _s: &RngStreams) -> mplane_core::Result<Report> {
    let mut pairs = Vec::new();
    for &alpha in &[1.9f64, 2.6, 3.4] {
        let a = Complex64::new(alpha, 0.0);
        let lhs = siegel_gamma(3, a).value()? / siegel_gamma(3, a + 0.5).value()?;
        let rhs = siegel_gamma(1, a - 1.0).value()? / siegel_gamma(1, a + 0.5).value()?;
        pairs.push((lhs.re, rhs.re));
    }
    Ok(worst_rel_report("gamma-ratio-identity", &pairs, 1e-12, cfg.seed))
}
