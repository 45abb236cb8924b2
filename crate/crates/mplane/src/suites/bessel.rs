//! K-Bessel function: the two defining substitutions agree, the three
//! regime bounds hold on sampled (ν, r), and the small-argument limit
//! ε^{−mν} 𝒦_ν(εr) → Γ_m(−ν)|r|^ν is reproduced.

use mplane_core::matrix::{PosDefMatrix, RectMatrix};
use mplane_core::report::{ParamValue, Report};
use mplane_core::rng::RngStreams;
use mplane_core::special::kbessel::k_bessel_bound;
use mplane_core::special::{k_bessel, k_bessel_via, siegel_gamma_real, KBesselRoute};
use mplane_core::quad::sampling;
use mplane_core::Complex64;

use super::{rel_report, Check};
use crate::config::SuiteConfig;

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "kbessel-route-agreement", run: route_agreement },
        Check { id: "kbessel-bound-regular", run: |c, s| bound_regime(c, s, Regime::Regular) },
        Check { id: "kbessel-bound-negative", run: |c, s| bound_regime(c, s, Regime::Negative) },
        Check { id: "kbessel-bound-middle", run: |c, s| bound_regime(c, s, Regime::Middle) },
        Check { id: "kbessel-small-argument-limit", run: small_argument_limit },
    ]
}

fn sample_pd(rng: &mut mplane_core::ChaCha8Rng, m: usize) -> PosDefMatrix {
    loop {
        let a = RectMatrix::sample_gaussian(rng, m, m);
        let g = a.gram();
        let shifted = g.add(&mplane_core::matrix::SymMatrix::identity(m).scale(0.3));
        if let Ok(p) = PosDefMatrix::new(shifted) {
            return p;
        }
    }
}

/// 𝒦 via the two substitutions agrees within 3σ of the combined claimed
/// quadrature errors (m = 2, real and complex ν).
fn route_agreement(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let m = 2usize;
    let spec = super::quad_spec(cfg, 1e-8);
    let mut worst = 0.0f64;
    let mut worst_vals = (0.0, 0.0);
    for (i, &(re, im)) in [(1.5, 0.0), (-0.7, 0.0), (0.4, 0.8), (2.0, -0.5)].iter().enumerate() {
        let mut rng = streams.substream(i as u64).stream(0);
        let r = sample_pd(&mut rng, m);
        let nu = Complex64::new(re, im);
        let a = k_bessel_via(KBesselRoute::Direct, m, nu, &r, &spec, streams)?;
        let b = k_bessel_via(KBesselRoute::Inverted, m, nu, &r, &spec, streams)?;
        let err = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt().max(1e-300);
        let dev = (a.value - b.value).norm() / (3.0 * err);
        if dev > worst {
            worst = dev;
            worst_vals = (a.re(), b.re());
        }
    }
    let mut rep = Report {
        id: "kbessel-route-agreement".to_string(),
        params: vec![("worst_dev_over_3sigma".to_string(), ParamValue::Real(worst))],
        lhs: worst_vals.0,
        stderr: 0.0,
        rhs: worst_vals.1,
        pass: worst <= 1.0,
        n_samples: 0,
        seed: cfg.seed,
        wall_ms: 0,
        route: None,
    };
    rep.stderr = (worst_vals.0 - worst_vals.1).abs() / 3.0;
    Ok(rep)
}

enum Regime {
    Regular,
    Negative,
    Middle,
}

/// Estimates by regime; ~7 sampled (ν, r) per regime makes 20 in total.
fn bound_regime(
    cfg: &SuiteConfig,
    streams: &RngStreams,
    regime: Regime,
) -> mplane_core::Result<Report> {
    let m = 2usize;
    let d = (m as f64 + 1.0) / 2.0;
    let spec = super::quad_spec(cfg, 1e-7);
    let mut rng = streams.stream(0);
    let count = match regime {
        Regime::Middle => 6,
        _ => 7,
    };
    let mut worst_ratio = 0.0f64;
    for _ in 0..count {
        let (nu_re, eps) = match regime {
            Regime::Regular => (d - 1.0 + 0.2 + 2.0 * sampling::uniform(&mut rng), 0.0),
            Regime::Negative => (1.0 - d - 0.2 - 2.0 * sampling::uniform(&mut rng), 0.0),
            Regime::Middle => ((d - 1.0) * (2.0 * sampling::uniform(&mut rng) - 1.0), 0.5),
        };
        let nu_im = 0.8 * (2.0 * sampling::uniform(&mut rng) - 1.0);
        let r = sample_pd(&mut rng, m);
        let nu = Complex64::new(nu_re, nu_im);
        let got = k_bessel(m, nu, &r, &spec, streams)?;
        let bound = k_bessel_bound(m, nu_re, &r, eps);
        let ratio = got.value.norm() / (bound + 3.0 * got.stderr);
        worst_ratio = worst_ratio.max(ratio);
    }
    let id = match regime {
        Regime::Regular => "kbessel-bound-regular",
        Regime::Negative => "kbessel-bound-negative",
        Regime::Middle => "kbessel-bound-middle",
    };
    let mut rep = rel_report(id, worst_ratio.min(1.0 + worst_ratio), 1.0, 1e9, cfg.seed);
    rep.lhs = worst_ratio;
    rep.rhs = 1.0;
    rep.pass = worst_ratio <= 1.0 + 1e-9;
    rep.params = vec![("worst_value_over_bound".to_string(), ParamValue::Real(worst_ratio))];
    Ok(rep)
}

/// ε^{−mν} 𝒦_ν(εr) vs Γ_m(−ν)|r|^ν at ε = 1e−3, ν = −2, within 1e−2.
fn small_argument_limit(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let m = 2usize;
    let nu = -2.0f64;
    let eps = 1e-3f64;
    let r = PosDefMatrix::diag(&[1.0, 1.7])?;
    let spec = super::quad_spec(cfg, 1e-7);
    let scaled = r.scale(eps)?;
    let got = k_bessel(m, Complex64::new(nu, 0.0), &scaled, &spec, streams)?;
    let lim = siegel_gamma_real(m, -nu)? * r.det().powf(nu);
    let lhs = eps.powf(-(m as f64) * nu) * got.re();
    let mut rep = rel_report("kbessel-small-argument-limit", lhs, lim, 1e-2, cfg.seed);
    rep.params.push(("eps".to_string(), ParamValue::Real(eps)));
    rep.params.push(("nu".to_string(), ParamValue::Real(nu)));
    rep.n_samples = got.n_samples;
    Ok(rep)
}
