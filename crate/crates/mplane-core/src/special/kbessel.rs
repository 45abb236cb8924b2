//! The K-Bessel function of matrix argument,
//! 𝒦_ν(r) = ∫_{P_m} exp(tr(−s − r s⁻¹)) |s|^{ν−d} ds,
//! entire in ν, with the equivalent form obtained by s ↦ s⁻¹:
//! 𝒦_ν(r) = ∫_{P_m} exp(tr(−s⁻¹ − r s)) |s|^{−ν−d} ds.
//!
//! In triangular coordinates the integrand decays double-exponentially both
//! into the cone boundary and at infinity, so the nested tanh-sinh engine
//! converges geometrically for m ≤ 2. For m = 3 (integral dimension 6) a
//! lognormal-proposal Monte Carlo fallback is provided.

use alloc::vec;

use num_traits::Float;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::PosDefMatrix;
use crate::quad::{mc_run, MCEstimate, QuadratureSpec};
use crate::rng::RngStreams;
use crate::testfn::{ConeDecay, RadialFn};
use crate::Complex64;

/// The two defining substitutions; their agreement is an acceptance check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KBesselRoute {
    /// exp(tr(−s − r s⁻¹)) |s|^{ν−d}
    Direct,
    /// exp(tr(−s⁻¹ − r s)) |s|^{−ν−d}
    Inverted,
}

/// 𝒦_ν(r) through the default (direct) substitution.
pub fn k_bessel(
    m: usize,
    nu: Complex64,
    r: &PosDefMatrix,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<MCEstimate> {
    k_bessel_via(KBesselRoute::Direct, m, nu, r, spec, streams)
}

pub fn k_bessel_via(
    route: KBesselRoute,
    m: usize,
    nu: Complex64,
    r: &PosDefMatrix,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<MCEstimate> {
    if r.size() != m {
        return Err(Error::BadDimensions(alloc::format!(
            "argument is {}x{} for m = {m}",
            r.size(),
            r.size()
        )));
    }
    let d = (m as f64 + 1.0) / 2.0;
    let exponent = match route {
        KBesselRoute::Direct => nu - d,
        KBesselRoute::Inverted => -nu - d,
    };
    let r_cl = r.clone();
    let integrand = move |s: &PosDefMatrix| -> Complex64 {
        let inv = s.inverse();
        let (lin, prec) = match route {
            KBesselRoute::Direct => (s, &inv),
            KBesselRoute::Inverted => (&inv, s),
        };
        let trace_part = lin.trace() + r_cl.as_sym().trace_product(prec.as_sym());
        (exponent * s.log_det() - trace_part).exp()
    };
    match m {
        1 | 2 => {
            let f0 = RadialFn::new(integrand, ConeDecay { exp_rate: 1.0, power_bound: 0.0 });
            crate::quad::integrate_cone(&f0, m, spec, streams)
        }
        3 => k_bessel_mc(m, integrand, spec, streams),
        _ => Err(Error::ParameterOutOfRange(alloc::format!("K-Bessel at m = {m}"))),
    }
}

/// Lognormal/Gaussian proposal over triangular coordinates. Coarse, but the
/// integrand is bounded and rapidly decaying, so the weights stay tame.
fn k_bessel_mc(
    m: usize,
    integrand: impl Fn(&PosDefMatrix) -> Complex64,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<MCEstimate> {
    spec.validate()?;
    let sigma = 0.8;
    let est = mc_run(streams, spec.max_evals, |rng| {
        let mut diag = vec![0.0; m];
        let mut log_q = 0.0;
        for dj in diag.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *dj = (sigma * z).exp();
            // lognormal density, including the 1/t factor
            log_q += -0.5 * z * z
                - 0.5 * (2.0 * core::f64::consts::PI).ln()
                - sigma.ln()
                - dj.ln();
        }
        let off = m * (m - 1) / 2;
        let mut strict = vec![0.0; off];
        for sj in strict.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *sj = 1.2 * z;
            log_q += -0.5 * z * z - 0.5 * (2.0 * core::f64::consts::PI).ln() - 1.2f64.ln();
        }
        let t = crate::matrix::UpperTriangular::new(m, diag.clone(), strict).expect("diag > 0");
        let s = t.gram();
        let mut weight = 2f64.powi(m as i32);
        for (j, dj) in diag.iter().enumerate() {
            weight *= dj.powi((m - j) as i32);
        }
        integrand(&s) * weight * (-log_q).exp()
    });
    Ok(est)
}

/// |𝒦_ν(r)| upper bounds, by regime:
/// Re ν > d−1:      Γ_m(Re ν);
/// Re ν < 1−d:      Γ_m(−Re ν)·|r|^{Re ν};
/// otherwise:       Γ_m(d) + |r|^{1−d−ε} Γ_m(d−1+ε) for every ε > 0.
pub fn k_bessel_bound(m: usize, nu_re: f64, r: &PosDefMatrix, eps: f64) -> f64 {
    let d = (m as f64 + 1.0) / 2.0;
    if nu_re > d - 1.0 {
        crate::special::siegel_gamma_real(m, nu_re).expect("no pole for Re ν > d−1")
    } else if nu_re < 1.0 - d {
        crate::special::siegel_gamma_real(m, -nu_re).expect("no pole for Re ν < 1−d")
            * r.det().powf(nu_re)
    } else {
        crate::special::siegel_gamma_real(m, d).expect("finite")
            + r.det().powf(1.0 - d - eps)
                * crate::special::siegel_gamma_real(m, d - 1.0 + eps).expect("finite")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::siegel_gamma_real;

    const PI: f64 = core::f64::consts::PI;

    fn streams() -> RngStreams {
        RngStreams::new(5, 2)
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec { rel_tol: 1e-9, max_evals: 40_000_000, ..Default::default() }
    }

    #[test]
    fn scalar_macdonald_half_integer() {
        // m = 1: 𝒦_{1/2}(r) = √π e^{−2√r}, 𝒦_{−1/2}(r) = √π r^{−1/2} e^{−2√r}
        for &r_val in &[0.3, 1.0, 2.7] {
            let r = PosDefMatrix::diag(&[r_val]).unwrap();
            let got = k_bessel(1, Complex64::new(0.5, 0.0), &r, &spec(), &streams()).unwrap();
            let want = PI.sqrt() * (-2.0 * r_val.sqrt()).exp();
            assert!((got.re() - want).abs() < 1e-8 * want, "K_{{1/2}}({r_val})");

            let got = k_bessel(1, Complex64::new(-0.5, 0.0), &r, &spec(), &streams()).unwrap();
            let want = PI.sqrt() * (-2.0 * r_val.sqrt()).exp() / r_val.sqrt();
            assert!((got.re() - want).abs() < 1e-8 * want, "K_{{-1/2}}({r_val})");
        }
    }

    #[test]
    fn two_routes_agree_m2() {
        let r = PosDefMatrix::diag(&[0.8, 1.7]).unwrap();
        for &nu in &[1.3, -0.4, 2.0] {
            let a = k_bessel_via(
                KBesselRoute::Direct,
                2,
                Complex64::new(nu, 0.0),
                &r,
                &spec(),
                &streams(),
            )
            .unwrap();
            let b = k_bessel_via(
                KBesselRoute::Inverted,
                2,
                Complex64::new(nu, 0.0),
                &r,
                &spec(),
                &streams(),
            )
            .unwrap();
            assert!(
                a.agrees_with(&b, 1e-7 * a.re().abs()),
                "ν = {nu}: {} vs {}",
                a.re(),
                b.re()
            );
        }
    }

    #[test]
    fn bound_in_regular_regime() {
        // |𝒦_ν(r)| ≤ Γ_m(Re ν) for Re ν > d−1
        let r = PosDefMatrix::diag(&[0.5, 2.0]).unwrap();
        let nu = Complex64::new(2.2, 0.9);
        let got = k_bessel(2, nu, &r, &spec(), &streams()).unwrap();
        let bound = siegel_gamma_real(2, 2.2).unwrap();
        assert!(got.value.norm() <= bound * (1.0 + 1e-9));
    }
}
