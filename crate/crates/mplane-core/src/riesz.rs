//! Heat kernels, Gauss-Weierstrass smoothing, Gårding-Gindikin fractional
//! integrals on the cone, and Riesz potentials
//! I^α f(x) = γ_{n,m}(α)⁻¹ ∫ f(x−y)|y|^{α−n} dy,
//! with the heat representation
//! I^α f(x) = Γ_m(α/2)⁻¹ ∫_{P_m} |t|^{α/2−d} (W_t f)(x) dt
//! on the strip m−1 < Re α < n−m+1, plus the §-level identity verifiers
//! (semigroup, Δ-inversion, integral-order convolutions, weighted identity).
//!
//! Heat-family test functions are the workhorse: W_t is exact on them, so
//! the heat route reduces every identity here to cone-dimensional
//! quadrature.

use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;

use crate::diff::{radial_part_l, DiffSpec};
use crate::error::{Error, Result};
use crate::matrix::{haar_stiefel, PosDefMatrix, RectMatrix, SymMatrix};
use crate::quad::{integrate_cone, mc_run, sampling, MCEstimate, QuadratureSpec};
use crate::report::Report;
use crate::rng::RngStreams;
use crate::special::{named_const, riesz_const, siegel_gamma, stiefel_volume, NamedConst};
use crate::testfn::{heat_kernel_value, ConeDecay, RadialFn, TestFunction};
use crate::zeta::zeta_integral;
use crate::Complex64;

const PI: f64 = core::f64::consts::PI;

/// The heat-kernel parameter t ∈ P_m.
pub type HeatParam = PosDefMatrix;

/// h_t(x) = (4π)^{−nm/2} |t|^{−n/2} exp(−tr(t⁻¹ x′x)/4); unit mass in x.
pub fn heat_kernel(x: &RectMatrix, t: &HeatParam) -> f64 {
    heat_kernel_value(x, t)
}

/// The Gauss-Weierstrass integral (W_t f)(x) = ∫ h_t(x−y) f(y) dy.
///
/// Exact (stderr 0) for heat-family functions via the semigroup law; Monte
/// Carlo with the substitution y ↦ x − y t^{1/2}, y ~ h_{I_m}, otherwise.
pub fn gauss_weierstrass(
    f: &TestFunction,
    x: &RectMatrix,
    t: &HeatParam,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<MCEstimate> {
    if f.has_heat_form() {
        let v = f.heat_smoothed(x, t)?;
        return Ok(MCEstimate { value: v, stderr: 0.0, n_samples: 0 });
    }
    spec.validate()?;
    let (n, m) = (f.rows(), f.cols());
    let sqrt_t = t.sqrt();
    let x_cl = x.clone();
    let f_cl = f.clone();
    let est = mc_run(streams, spec.max_evals, move |rng| {
        // y ~ h_{I_m}: rows i.i.d. N(0, 2 I_m)
        let y = sampling::gaussian_matrix(rng, n, m, core::f64::consts::SQRT_2);
        f_cl.eval(&x_cl.sub(&y.mul(&sqrt_t)))
    });
    Ok(est)
}

/// Gårding-Gindikin fractional integral on the cone:
/// (I₋^λ g)(t) = Γ_m(λ)⁻¹ ∫_t^∞ g(τ)|τ−t|^{λ−d} dτ, Re λ > d−1,
/// computed by the substitution τ = t + u and a cone integral over u.
pub fn gg_fractional(
    g: &RadialFn,
    t: Option<&PosDefMatrix>,
    lambda: Complex64,
    m: usize,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<MCEstimate> {
    let d = (m as f64 + 1.0) / 2.0;
    if lambda.re <= d - 1.0 {
        return Err(Error::ParameterOutOfRange(alloc::format!(
            "Gårding-Gindikin needs Re λ > d−1, got {}",
            lambda.re
        )));
    }
    let base = t.cloned();
    let g_cl = g.clone();
    let integrand = RadialFn::new(
        move |u: &PosDefMatrix| {
            let arg = match &base {
                Some(b) => match b.add_sym(u.as_sym()) {
                    Ok(s) => s,
                    Err(_) => return Complex64::new(0.0, 0.0),
                },
                None => u.clone(),
            };
            g_cl.eval(&arg) * ((lambda - d) * u.log_det()).exp()
        },
        g.decay(),
    );
    let cone = integrate_cone(&integrand, m, spec, streams)?;
    let gamma_l = siegel_gamma(m, lambda).value()?;
    Ok(MCEstimate {
        value: cone.value / gamma_l,
        stderr: cone.stderr / gamma_l.norm(),
        n_samples: cone.n_samples,
    })
}

/// I^α f(x) as the absolutely convergent integral (Re α > m−1, away from the
/// γ_{n,m} poles), with the |y|^{α−n} weight absorbed into the zeta-module
/// proposal.
pub fn riesz_direct(
    f: &TestFunction,
    x: &RectMatrix,
    alpha: Complex64,
    n: usize,
    m: usize,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<MCEstimate> {
    let gamma = riesz_const(n, m, alpha).value()?;
    if alpha.re <= m as f64 - 1.0 {
        return Err(Error::OutOfRegularRegion);
    }
    // force the Monte Carlo route: f(x−·) is not radial
    let mc_spec = QuadratureSpec { strategy: crate::quad::Strategy::MonteCarlo, ..*spec };
    let shifted = shift_reflect(f, x);
    let z = zeta_integral(&shifted, alpha, n, m, &mc_spec, streams)?;
    Ok(MCEstimate {
        value: z.value.value / gamma,
        stderr: z.value.stderr / gamma.norm(),
        n_samples: z.value.n_samples,
    })
}

/// y ↦ f(x − y) as a test function with the same decay envelope.
fn shift_reflect(f: &TestFunction, x: &RectMatrix) -> TestFunction {
    let f_cl = f.clone();
    let x_cl = x.clone();
    TestFunction::custom(
        f.rows(),
        f.cols(),
        f.decay(),
        alloc::sync::Arc::new(move |y: &RectMatrix| f_cl.eval(&x_cl.sub(y))),
        None,
        None,
        None,
    )
}

/// I^α f(x) through the heat representation (strip m−1 < Re α < n−m+1);
/// needs a closed-form W_t f, exact for the heat family.
pub fn riesz_heat(
    f: &TestFunction,
    x: &RectMatrix,
    alpha: Complex64,
    n: usize,
    m: usize,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<MCEstimate> {
    strip_check(alpha.re, n, m)?;
    if !f.has_heat_form() {
        return Err(Error::MissingHeatForm);
    }
    let d = (m as f64 + 1.0) / 2.0;
    let f_cl = f.clone();
    let x_cl = x.clone();
    let integrand = RadialFn::new(
        move |t: &PosDefMatrix| {
            let w = f_cl.heat_smoothed(&x_cl, t).expect("heat form checked");
            ((alpha * 0.5 - d) * t.log_det()).exp() * w
        },
        // |t|^{α/2−d}(W_t f)(x) decays like |t|^{α/2−d−n/2} at infinity
        ConeDecay { exp_rate: 0.0, power_bound: (alpha.re - n as f64) / 2.0 },
    );
    let cone = integrate_cone(&integrand, m, spec, streams)?;
    let g = siegel_gamma(m, alpha * 0.5).value()?;
    Ok(MCEstimate {
        value: cone.value / g,
        stderr: cone.stderr / g.norm(),
        n_samples: cone.n_samples,
    })
}

/// I^k f(x) at integral order through the rank-k measure (valid for every
/// k = 1, …, n with k ∉ {n−m+1, …}):
/// I^k f(x) = γ₂ ∫_{V_{n,k}} dv ∫_{M_{k,m}} f(x − vω) dω.
pub fn riesz_integral_order(
    f: &TestFunction,
    x: &RectMatrix,
    k: usize,
    n: usize,
    m: usize,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<MCEstimate> {
    if k == 0 || k > n || (k + m) > n {
        // k ≤ n−m keeps Γ_k((n−m)/2) finite and stays clear of the excluded
        // orders n−m+1, n−m+2, …
        return Err(Error::ParameterOutOfRange(alloc::format!(
            "integral-order route needs 1 ≤ k ≤ n−m, got k = {k}"
        )));
    }
    let gamma2 = named_const(NamedConst::Gamma2 { n, m, k }).real()?;
    let est = frame_convolution(f, x, k, n, m, spec, streams)?;
    Ok(MCEstimate {
        value: est.value * gamma2,
        stderr: est.stderr * gamma2.abs(),
        n_samples: est.n_samples,
    })
}

/// (ζ_k ∗ f)(x) = c₁ ∫_{V_{n,k}} dv ∫_{M_{k,m}} f(x − vω) dω.
pub fn zeta_convolution(
    f: &TestFunction,
    x: &RectMatrix,
    k: usize,
    n: usize,
    m: usize,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<MCEstimate> {
    if k == 0 || k > n {
        return Err(Error::ParameterOutOfRange(alloc::format!("ζ_k at k = {k}")));
    }
    let c1 = named_const(NamedConst::C1 { n, m, k }).real()?;
    let est = frame_convolution(f, x, k, n, m, spec, streams)?;
    Ok(MCEstimate {
        value: est.value * c1,
        stderr: est.stderr * c1.abs(),
        n_samples: est.n_samples,
    })
}

/// ∫_{V_{n,k}} dv ∫_{M_{k,m}} f(x − vω) dω by Haar frames and Gaussian
/// importance on ω matched to the declared decay of f.
fn frame_convolution(
    f: &TestFunction,
    x: &RectMatrix,
    k: usize,
    n: usize,
    m: usize,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<MCEstimate> {
    spec.validate()?;
    let rate = f.decay().gaussian_rate;
    if rate <= 0.0 {
        return Err(Error::ParameterOutOfRange(String::from(
            "frame convolution needs a Gaussian decay rate",
        )));
    }
    let s2 = 1.0 / (2.0 * rate);
    let s = s2.sqrt();
    let coeff = stiefel_volume(n, k) * (2.0 * PI * s2).powf((k * m) as f64 / 2.0);
    let f_cl = f.clone();
    let x_cl = x.clone();
    let est = mc_run(streams, spec.max_evals, move |rng| {
        let v = haar_stiefel(rng, n, k).expect("n ≥ k");
        let omega = sampling::gaussian_matrix(rng, k, m, s);
        let boost = (omega.frobenius_sq() / (2.0 * s2)).exp();
        f_cl.eval(&x_cl.sub(&v.matrix().mul(&omega))) * boost
    });
    Ok(MCEstimate { value: est.value * coeff, stderr: est.stderr * coeff, n_samples: est.n_samples })
}

fn strip_check(alpha_re: f64, n: usize, m: usize) -> Result<()> {
    if alpha_re > m as f64 - 1.0 && alpha_re < (n as f64) - (m as f64) + 1.0 {
        Ok(())
    } else {
        Err(Error::StripViolation)
    }
}

// ---------------------------------------------------------------------------
// frozen-grid heat-route evaluator
// ---------------------------------------------------------------------------

/// A fixed tensor grid for ∫ |t|^{w} h_{t+τ}(z) dt as a function of z.
///
/// Finite-difference operators applied to quadrature-defined functions need
/// the quadrature error to vary *smoothly* with the argument; re-running an
/// adaptive rule at every stencil point makes the error jump between
/// refinement levels and the stencil amplifies the jumps by h^{−2m}. This
/// grid is built once (trapezoid in the usual triangular double-exponential
/// coordinates, ranges taken from the integrand at the center point with a
/// safety margin) and then shared by every evaluation.
pub struct FrozenHeatGrid {
    /// Per node: amplitude A_g (weights, |t|-powers, h³ factor, heat-kernel
    /// normalization, Γ_m(α/2) division) and the inverse M_g = (t_g + τ)⁻¹.
    nodes: Vec<(f64, SymMatrix)>,
}

impl FrozenHeatGrid {
    /// Build for  Γ_m(α/2)⁻¹ ∫ |t|^{α/2−d} h_{t+τ}(z) dt  on M_{n,2}.
    pub fn build(alpha: f64, tau: &PosDefMatrix, n: usize, h: f64) -> Result<FrozenHeatGrid> {
        let m = tau.size();
        if m != 2 {
            return Err(Error::ParameterOutOfRange(String::from(
                "frozen heat grid is specific to m = 2",
            )));
        }
        let d = (m as f64 + 1.0) / 2.0;
        let w = alpha / 2.0 - d;
        // amplitude of a node in triangular coordinates (t11, t22, t12),
        // evaluated at z = 0 for range scanning
        let node_amp = |u1: f64, u2: f64, v: f64| -> Option<(f64, SymMatrix, f64)> {
            let (t11, t22) = (u1.exp(), u2.exp());
            let t12 = (0.5 * PI * v.sinh()).sinh();
            let jac = u1.exp() * u2.exp() * 0.5 * PI * v.cosh() * (0.5 * PI * v.sinh()).cosh();
            let mut sym = SymMatrix::zeros(2);
            sym.set(0, 0, t11 * t11);
            sym.set(0, 1, t11 * t12);
            sym.set(1, 1, t12 * t12 + t22 * t22);
            let t = match PosDefMatrix::new(sym) {
                Ok(t) => t,
                Err(_) => return None,
            };
            let shifted = match t.add_sym(tau.as_sym()) {
                Ok(s) => s,
                Err(_) => return None,
            };
            let log_amp = w * t.log_det()
                - (n as f64) / 2.0 * shifted.log_det()
                - ((n * m) as f64) / 2.0 * (4.0 * PI).ln()
                + (2.0 * t11.ln() + t22.ln()) // cone weight t11² t22 (log)
                + (2.0 * core::f64::consts::LN_2); // 2^m
            let amp = log_amp.exp() * jac;
            if !amp.is_finite() {
                return None;
            }
            let inv = shifted.inverse();
            Some((amp, inv.as_sym().clone(), amp.abs()))
        };
        // scan each axis through the origin for its live range
        let scan = |dir: usize| -> (f64, f64) {
            let eval = |u: f64| -> f64 {
                let c = [
                    if dir == 0 { u } else { 0.0 },
                    if dir == 1 { u } else { 0.0 },
                    if dir == 2 { u } else { 0.0 },
                ];
                node_amp(c[0], c[1], c[2]).map(|(_, _, a)| a).unwrap_or(0.0)
            };
            let mut peak = eval(0.0);
            let mut lo = 0.0;
            let mut hi = 0.0;
            for sgn in [-1.0f64, 1.0] {
                let mut u = 0.0;
                let mut quiet = 0;
                loop {
                    u += sgn * 0.25;
                    if u.abs() > 60.0 {
                        break;
                    }
                    let a = eval(u);
                    peak = peak.max(a);
                    if a <= 1e-13 * peak {
                        quiet += 1;
                        if quiet >= 4 {
                            break;
                        }
                    } else {
                        quiet = 0;
                    }
                }
                if sgn < 0.0 {
                    lo = u;
                } else {
                    hi = u;
                }
            }
            (lo - 1.5, hi + 1.5)
        };
        let ranges = [scan(0), scan(1), scan(2)];
        let gamma = siegel_gamma(m, Complex64::new(alpha / 2.0, 0.0)).real()?;
        let cell = h * h * h / gamma;
        let mut nodes = Vec::new();
        let mut peak = 0.0f64;
        let steps = |lo: f64, hi: f64| ((hi - lo) / h).ceil() as i64;
        for i1 in 0..=steps(ranges[0].0, ranges[0].1) {
            let u1 = ranges[0].0 + i1 as f64 * h;
            for i2 in 0..=steps(ranges[1].0, ranges[1].1) {
                let u2 = ranges[1].0 + i2 as f64 * h;
                for i3 in 0..=steps(ranges[2].0, ranges[2].1) {
                    let v = ranges[2].0 + i3 as f64 * h;
                    if let Some((amp, inv, mag)) = node_amp(u1, u2, v) {
                        peak = peak.max(mag);
                        nodes.push((amp * cell, inv));
                    }
                }
            }
        }
        // prune dead weight
        let cut = peak * 1e-15 * cell;
        nodes.retain(|(a, _)| a.abs() > cut);
        Ok(FrozenHeatGrid { nodes })
    }

    /// Evaluate at displacement z (= x − center).
    pub fn eval(&self, z: &RectMatrix) -> f64 {
        let gram = z.gram();
        let mut acc = 0.0;
        for (amp, inv) in &self.nodes {
            let q = inv.trace_product(&gram);
            acc += amp * (-q / 4.0).exp();
        }
        acc
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

// ---------------------------------------------------------------------------
// identity verifiers
// ---------------------------------------------------------------------------

/// The semigroup property I^α I^β f = I^{α+β} f under
/// Re α, Re β > m−1 and Re(α+β) < n−m+1.
///
/// At a center point of a single heat term the two-sided evaluation reduces
/// to a pair of independent cone quadratures after whitening; the general
/// position falls back to a nested quadrature (outer t, inner s), which is
/// only cheap at m = 1.
pub fn verify_riesz_semigroup(
    f: &TestFunction,
    x: &RectMatrix,
    alpha: f64,
    beta: f64,
    n: usize,
    m: usize,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<Report> {
    if alpha <= m as f64 - 1.0 || beta <= m as f64 - 1.0 || alpha + beta >= (n - m) as f64 + 1.0 {
        return Err(Error::StripViolation);
    }
    let rhs = riesz_heat(
        f,
        x,
        Complex64::new(alpha + beta, 0.0),
        n,
        m,
        spec,
        &streams.substream(0x5601),
    )?;

    let lhs = match centered_single_term(f, x) {
        Some(tau) => {
            // W_t[I^β f](0-centered) = J(β)·|t+τ|^{(β−n)/2} with
            // J(β) = Γ_m(β/2)⁻¹(4π)^{−nm/2} ∫ |w|^{β/2−d}|I+w|^{−n/2} dw
            let d = (m as f64 + 1.0) / 2.0;
            let jfac = RadialFn::new(
                move |w: &PosDefMatrix| match w.add_sym(&SymMatrix::identity(w.size())) {
                    Ok(shifted) => ((beta / 2.0 - d) * w.log_det()
                        - (n as f64) / 2.0 * shifted.log_det())
                    .exp()
                    .into(),
                    Err(_) => Complex64::new(0.0, 0.0),
                },
                ConeDecay { exp_rate: 0.0, power_bound: (beta - n as f64) / 2.0 },
            );
            let j = integrate_cone(&jfac, m, spec, &streams.substream(0x5602))?;
            let tau_cl = tau.clone();
            let amp = f.heat_terms().expect("single term")[0].amplitude;
            let outer = RadialFn::new(
                move |t: &PosDefMatrix| match t.add_sym(tau_cl.as_sym()) {
                    Ok(shifted) => (((alpha / 2.0) - d) * t.log_det()
                        + (beta - n as f64) / 2.0 * shifted.log_det())
                    .exp()
                    .into(),
                    Err(_) => Complex64::new(0.0, 0.0),
                },
                ConeDecay { exp_rate: 0.0, power_bound: (alpha + beta - n as f64) / 2.0 },
            );
            let o = integrate_cone(&outer, m, spec, &streams.substream(0x5603))?;
            let ga = siegel_gamma(m, Complex64::new(alpha / 2.0, 0.0)).real()?;
            let gb = siegel_gamma(m, Complex64::new(beta / 2.0, 0.0)).real()?;
            let norm = amp * (4.0 * PI).powf(-((n * m) as f64) / 2.0) / (ga * gb);
            MCEstimate {
                value: o.value * j.value * norm,
                stderr: (o.stderr * j.value.norm() + j.stderr * o.value.norm()) * norm.abs(),
                n_samples: o.n_samples + j.n_samples,
            }
        }
        None => {
            // nested route: outer over t of |t|^{α/2−d} · W_t[I^β f](x),
            // inner over s of |s|^{β/2−d} (W_{t+s} f)(x)
            if !f.has_heat_form() {
                return Err(Error::MissingHeatForm);
            }
            let d = (m as f64 + 1.0) / 2.0;
            let inner_spec = QuadratureSpec {
                rel_tol: (spec.rel_tol * 0.1).max(1e-8),
                ..*spec
            };
            let f_cl = f.clone();
            let x_cl = x.clone();
            let inner_streams = streams.substream(0x5604);
            let gb = siegel_gamma(m, Complex64::new(beta / 2.0, 0.0)).real()?;
            let outer = RadialFn::new(
                move |t: &PosDefMatrix| {
                    let f_in = f_cl.clone();
                    let x_in = x_cl.clone();
                    let t_in = t.clone();
                    let inner = RadialFn::new(
                        move |s: &PosDefMatrix| {
                            let ts = t_in.add(s);
                            let w = f_in.heat_smoothed(&x_in, &ts).expect("heat form");
                            ((beta / 2.0 - d) * s.log_det()).exp() * w
                        },
                        ConeDecay { exp_rate: 0.0, power_bound: (beta - n as f64) / 2.0 },
                    );
                    let iv = integrate_cone(&inner, t_in_size(t), &inner_spec, &inner_streams)
                        .map(|e| e.value)
                        .unwrap_or(Complex64::new(f64::NAN, 0.0));
                    ((alpha / 2.0 - d) * t.log_det()).exp() * iv / gb
                },
                ConeDecay { exp_rate: 0.0, power_bound: (alpha + beta - n as f64) / 2.0 },
            );
            let o = integrate_cone(&outer, m, spec, &streams.substream(0x5605))?;
            let ga = siegel_gamma(m, Complex64::new(alpha / 2.0, 0.0)).real()?;
            MCEstimate {
                value: o.value / ga,
                stderr: o.stderr / ga.abs(),
                n_samples: o.n_samples,
            }
        }
    };
    Ok(Report::two_estimates("riesz-semigroup", lhs, rhs, spec.abs_tol, streams.seed())
        .with_real("alpha", alpha)
        .with_real("beta", beta))
}

fn t_in_size(t: &PosDefMatrix) -> usize {
    t.size()
}

/// Some(τ) when f is a single heat term centered exactly at x.
fn centered_single_term(f: &TestFunction, x: &RectMatrix) -> Option<PosDefMatrix> {
    let terms = f.heat_terms()?;
    if terms.len() != 1 {
        return None;
    }
    let centered = match &terms[0].center {
        None => x.frobenius_sq() == 0.0,
        Some(c) => c.sub(x).frobenius_sq() == 0.0,
    };
    if centered {
        Some(terms[0].tau.clone())
    } else {
        None
    }
}

/// (−1)^{mk} Δ^k [I^{2k} f](x) = f(x) for heat-family f, m−1 < 2k < n−m+1.
///
/// I^{2k}f is radial about the heat center, so Δ is applied through its
/// radial part on a frozen heat grid; the error estimate comes from
/// re-running with a 1.5× coarser grid.
pub fn verify_delta_inverts_riesz(
    f: &TestFunction,
    x: &RectMatrix,
    k: usize,
    n: usize,
    m: usize,
    spec: &QuadratureSpec,
    diff: &DiffSpec,
    streams: &RngStreams,
) -> Result<Report> {
    if k == 0 {
        // I⁰ is the identity
        let v = f.eval(x).re;
        return Ok(Report::two_sided("delta-inverts-riesz", MCEstimate::exact(v), v, spec.abs_tol, streams.seed())
            .with_int("k", 0));
    }
    strip_check(2.0 * k as f64, n, m)?;
    let terms = f.heat_terms().ok_or(Error::MissingHeatForm)?;
    if terms.len() != 1 || m != 2 || k != 1 {
        return Err(Error::ParameterOutOfRange(String::from(
            "Δ-inversion check implemented for single heat terms, m = 2, k = 1",
        )));
    }
    let tau = terms[0].tau.clone();
    let amp = terms[0].amplitude;
    let center = terms[0].center.clone().unwrap_or_else(|| RectMatrix::zeros(n, m));
    let z = x.sub(&center);
    let sign = if (m * k) % 2 == 0 { 1.0 } else { -1.0 };

    let mut values = [0.0f64; 2];
    for (idx, grid_h) in [0.22f64, 0.33].into_iter().enumerate() {
        let grid = FrozenHeatGrid::build(2.0 * k as f64, &tau, n, grid_h)?;
        let g0 = RadialFn::new(
            {
                // I^{2k}f(center + w) as a radial profile in r = w′w: the
                // grid consumes the displacement through its Gram matrix
                let gr = alloc::sync::Arc::new(grid);
                move |r: &PosDefMatrix| {
                    // embed r = w′w via any w with that Gram matrix
                    let t = crate::matrix::triangular_factor(r).expect("pd");
                    let w = RectMatrix::stack(
                        &t.to_rect(),
                        &RectMatrix::zeros(n - r.size(), r.size()),
                    );
                    Complex64::new(gr.eval(&w), 0.0)
                }
            },
            ConeDecay { exp_rate: 0.0, power_bound: 0.0 },
        );
        let r = PosDefMatrix::new(z.gram()).map_err(|_| Error::NearSingularSet)?;
        values[idx] = sign * amp * radial_part_l(&g0, &r, n, diff)?;
    }
    let lhs = MCEstimate {
        value: Complex64::new(values[0], 0.0),
        stderr: (values[0] - values[1]).abs(),
        n_samples: 0,
    };
    let rhs = f.eval(x).re;
    Ok(Report::two_sided("delta-inverts-riesz", lhs, rhs, spec.abs_tol, streams.seed())
        .with_int("k", k as i64))
}

/// The weighted identity for the rank-k convolution: for λ > k+m−1 and
/// radial f ≥ 0,
/// ∫ (ζ_k∗f)(x) |I+x′x|^{−λ/2} dx = c_λ ∫ f(x) |I + x′ Pr_{ℝ^{n−k}} x|^{−(λ−k)/2} dx.
pub fn verify_weighted_identity(
    f: &TestFunction,
    k: usize,
    lambda: f64,
    n: usize,
    m: usize,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<Report> {
    if lambda <= (k + m - 1) as f64 {
        return Err(Error::ParameterOutOfRange(alloc::format!(
            "weighted identity needs λ > k+m−1, got λ = {lambda}"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::ParameterOutOfRange(alloc::format!("k = {k}")));
    }
    let c_lambda = named_const(NamedConst::CLambda { n, m, k, lambda }).real()?;
    let c1 = named_const(NamedConst::C1 { n, m, k }).real()?;
    let rate = f.decay().gaussian_rate;
    if rate <= 0.0 {
        return Err(Error::ParameterOutOfRange(String::from("f must decay")));
    }
    let s2 = 1.0 / (2.0 * rate);
    let s = s2.sqrt();
    let dim = (n * m) as f64;
    let log_gauss_norm = dim * (0.5 * (2.0 * PI).ln() + s.ln());

    // LHS after substituting z = x − vω:
    // c₁ ∫ dv ∫ dω ∫ dz f(z) |I + (z+vω)′(z+vω)|^{−λ/2}
    // z Gaussian-matched to f, ω multivariate-t against the polynomial tail
    let km = (k * m) as f64;
    let nu = ((lambda - km) / 2.0).max(0.5);
    let coeff = c1 * stiefel_volume(n, k);
    let f_cl = f.clone();
    let lhs_est = mc_run(&streams.substream(0x0a11), spec.max_evals, move |rng| {
        let v = haar_stiefel(rng, n, k).expect("n ≥ k");
        let z = sampling::gaussian_matrix(rng, n, m, s);
        let (omega, q_omega) = sampling::student_t_matrix(rng, k, m, nu, 1.0);
        let xmat = z.add(&v.matrix().mul(&omega));
        let gram = xmat.gram();
        let mut sym = SymMatrix::identity(m);
        for i in 0..m {
            for j in i..m {
                sym.set(i, j, sym.get(i, j) + gram.get(i, j));
            }
        }
        let det = PosDefMatrix::new(sym).map(|p| p.log_det()).unwrap_or(f64::NAN);
        let boost = (z.frobenius_sq() / (2.0 * s2) + log_gauss_norm).exp();
        f_cl.eval(&z) * boost * (-lambda / 2.0 * det).exp() / q_omega
    });
    let lhs = MCEstimate {
        value: lhs_est.value * coeff,
        stderr: lhs_est.stderr * coeff,
        n_samples: lhs_est.n_samples,
    };

    // RHS: Gaussian-importance over x with the projected weight
    let f_cl = f.clone();
    let rhs_est = mc_run(&streams.substream(0x0a12), spec.max_evals, move |rng| {
        let x = sampling::gaussian_matrix(rng, n, m, s);
        let bottom = x.row_block(k, n);
        let gram = bottom.gram();
        let mut sym = SymMatrix::identity(m);
        for i in 0..m {
            for j in i..m {
                sym.set(i, j, sym.get(i, j) + gram.get(i, j));
            }
        }
        let det = PosDefMatrix::new(sym).map(|p| p.log_det()).unwrap_or(f64::NAN);
        let boost = (x.frobenius_sq() / (2.0 * s2) + log_gauss_norm).exp();
        f_cl.eval(&x) * boost * (-(lambda - k as f64) / 2.0 * det).exp()
    });
    let rhs = MCEstimate {
        value: rhs_est.value * c_lambda,
        stderr: rhs_est.stderr * c_lambda,
        n_samples: rhs_est.n_samples,
    };
    Ok(Report::two_estimates("weighted-identity", lhs, rhs, spec.abs_tol, streams.seed())
        .with_int("k", k as i64)
        .with_real("lambda", lambda))
}
