//! Test functions on M_{n,m} and radial profiles on the cone P_m.
//!
//! The canonical acceptance vehicles are finite mixtures of (possibly
//! shifted) heat kernels a·h_τ(x − x₀): the family is closed under Fourier
//! transform, Gauss-Weierstrass smoothing, translation, rotation, and the
//! matrix-plane Radon transform, so every identity involving those operators
//! has one side in closed form. Arbitrary callables are supported through
//! [`TestFunction::custom`], with whatever closed forms the caller supplies.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::{PosDefMatrix, RectMatrix, Rotation};
use crate::Complex64;

const PI: f64 = core::f64::consts::PI;

/// Decay metadata the integrators rely on when choosing proposals.
#[derive(Debug, Clone, Copy)]
pub struct DecayMeta {
    /// |f(x)| ≲ C·exp(−rate·tr(x′x)); 0 means no exponential decay.
    pub gaussian_rate: f64,
    /// Polynomial envelope exponent when there is no exponential decay.
    pub power_bound: f64,
    /// Exponent λ of a |x|_m^λ factor, when f is singular on the
    /// rank-deficient set; finite-difference operators refuse to evaluate
    /// close to that set when λ < 2m.
    pub singular_power: Option<f64>,
}

impl DecayMeta {
    pub fn gaussian(rate: f64) -> Self {
        Self { gaussian_rate: rate, power_bound: 0.0, singular_power: None }
    }
}

/// One term a·h_τ(x − x₀) of a heat-kernel mixture.
#[derive(Debug, Clone)]
pub struct HeatTerm {
    pub amplitude: f64,
    pub tau: PosDefMatrix,
    pub center: Option<RectMatrix>,
}

/// The heat kernel h_t(x) = (4π)^{−nm/2} |t|^{−n/2} exp(−tr(t⁻¹x′x)/4).
pub fn heat_kernel_value(x: &RectMatrix, t: &PosDefMatrix) -> f64 {
    let n = x.rows();
    let m = x.cols();
    debug_assert_eq!(t.size(), m);
    let q = t.inv_quad(x);
    let log_h = -((n * m) as f64) / 2.0 * (4.0 * PI).ln()
        - (n as f64) / 2.0 * t.log_det()
        - q / 4.0;
    log_h.exp()
}

impl HeatTerm {
    fn eval(&self, x: &RectMatrix) -> f64 {
        let arg = match &self.center {
            Some(c) => x.sub(c),
            None => x.clone(),
        };
        self.amplitude * heat_kernel_value(&arg, &self.tau)
    }

    /// ℱ[a·h_τ(· − x₀)](y) = a · e^{i tr(y′x₀)} · e^{−tr(τ y′y)}.
    fn fourier(&self, y: &RectMatrix) -> Complex64 {
        let quad = self.tau.as_sym().trace_product(&y.gram());
        let phase = match &self.center {
            Some(c) => y.dot(c),
            None => 0.0,
        };
        Complex64::new(0.0, phase).exp() * self.amplitude * (-quad).exp()
    }

    /// W_t[a·h_τ(· − x₀)](x) = a·h_{t+τ}(x − x₀), by the semigroup law.
    fn heat_smoothed(&self, x: &RectMatrix, t: &PosDefMatrix) -> f64 {
        let arg = match &self.center {
            Some(c) => x.sub(c),
            None => x.clone(),
        };
        self.amplitude * heat_kernel_value(&arg, &t.add(&self.tau))
    }
}

enum Kind {
    HeatMixture(Vec<HeatTerm>),
    Custom {
        f: Arc<dyn Fn(&RectMatrix) -> Complex64 + Send + Sync>,
        fourier: Option<Arc<dyn Fn(&RectMatrix) -> Complex64 + Send + Sync>>,
        heat: Option<Arc<dyn Fn(&RectMatrix, &PosDefMatrix) -> Complex64 + Send + Sync>>,
        radial: Option<RadialFn>,
    },
}

/// A callable on M_{n,m} with decay metadata and optional closed forms.
pub struct TestFunction {
    n: usize,
    m: usize,
    kind: Kind,
    decay: DecayMeta,
}

impl TestFunction {
    /// The Gaussian e(x) = exp(−tr(x′x)), stored as π^{nm/2}·h_{I/4}.
    pub fn gaussian(n: usize, m: usize) -> Self {
        Self::heat_mixture(
            n,
            m,
            alloc::vec![HeatTerm {
                amplitude: PI.powf((n * m) as f64 / 2.0),
                tau: PosDefMatrix::scaled_identity(m, 0.25).expect("positive"),
                center: None,
            }],
        )
    }

    /// exp(−tr((x−x₀)′(x−x₀))).
    pub fn shifted_gaussian(n: usize, m: usize, center: RectMatrix) -> Self {
        Self::heat_mixture(
            n,
            m,
            alloc::vec![HeatTerm {
                amplitude: PI.powf((n * m) as f64 / 2.0),
                tau: PosDefMatrix::scaled_identity(m, 0.25).expect("positive"),
                center: Some(center),
            }],
        )
    }

    /// A single heat kernel h_τ.
    pub fn heat(n: usize, m: usize, tau: PosDefMatrix) -> Self {
        Self::heat_mixture(
            n,
            m,
            alloc::vec![HeatTerm { amplitude: 1.0, tau, center: None }],
        )
    }

    pub fn heat_mixture(n: usize, m: usize, terms: Vec<HeatTerm>) -> Self {
        assert!(!terms.is_empty());
        let mut rate = f64::INFINITY;
        for term in &terms {
            debug_assert_eq!(term.tau.size(), m);
            rate = rate.min(1.0 / (4.0 * term.tau.max_eigenvalue()));
        }
        let f = Self {
            n,
            m,
            kind: Kind::HeatMixture(terms),
            decay: DecayMeta::gaussian(rate),
        };
        f.spot_check_closed_forms();
        f
    }

    /// An arbitrary callable with caller-declared metadata and closed forms.
    /// Closed forms supplied here are trusted; only mixture-built functions
    /// get the registration spot-check.
    pub fn custom(
        n: usize,
        m: usize,
        decay: DecayMeta,
        f: Arc<dyn Fn(&RectMatrix) -> Complex64 + Send + Sync>,
        fourier: Option<Arc<dyn Fn(&RectMatrix) -> Complex64 + Send + Sync>>,
        heat: Option<Arc<dyn Fn(&RectMatrix, &PosDefMatrix) -> Complex64 + Send + Sync>>,
        radial: Option<RadialFn>,
    ) -> Self {
        Self { n, m, kind: Kind::Custom { f, fourier, heat, radial }, decay }
    }

    /// |x|_m^λ as a radial test function (no decay; singular for λ < 0).
    pub fn det_power(n: usize, m: usize, lambda: f64) -> Self {
        let profile = RadialFn::new(
            move |r: &PosDefMatrix| Complex64::new(r.det().powf(lambda / 2.0), 0.0),
            ConeDecay { exp_rate: 0.0, power_bound: lambda },
        );
        let decay = DecayMeta {
            gaussian_rate: 0.0,
            power_bound: lambda,
            singular_power: Some(lambda),
        };
        Self {
            n,
            m,
            decay,
            kind: Kind::Custom {
                f: Arc::new(move |x: &RectMatrix| {
                    Complex64::new(crate::matrix::vol_factor(x).powf(lambda), 0.0)
                }),
                fourier: None,
                heat: None,
                radial: Some(profile),
            },
        }
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    pub fn decay(&self) -> DecayMeta {
        self.decay
    }

    pub fn eval(&self, x: &RectMatrix) -> Complex64 {
        match &self.kind {
            Kind::HeatMixture(terms) => {
                Complex64::new(terms.iter().map(|t| t.eval(x)).sum(), 0.0)
            }
            Kind::Custom { f, .. } => f(x),
        }
    }

    pub fn eval_real(&self, x: &RectMatrix) -> f64 {
        self.eval(x).re
    }

    pub fn has_fourier(&self) -> bool {
        match &self.kind {
            Kind::HeatMixture(_) => true,
            Kind::Custom { fourier, .. } => fourier.is_some(),
        }
    }

    /// Closed-form ℱf(y) = ∫ exp(tr(iy′x)) f(x) dx.
    pub fn fourier(&self, y: &RectMatrix) -> Result<Complex64> {
        match &self.kind {
            Kind::HeatMixture(terms) => Ok(terms.iter().map(|t| t.fourier(y)).sum()),
            Kind::Custom { fourier, .. } => match fourier {
                Some(g) => Ok(g(y)),
                None => Err(Error::MissingFourierForm),
            },
        }
    }

    /// Closed-form (W_t f)(x).
    pub fn heat_smoothed(&self, x: &RectMatrix, t: &PosDefMatrix) -> Result<Complex64> {
        match &self.kind {
            Kind::HeatMixture(terms) => {
                Ok(Complex64::new(terms.iter().map(|h| h.heat_smoothed(x, t)).sum(), 0.0))
            }
            Kind::Custom { heat, .. } => match heat {
                Some(g) => Ok(g(x, t)),
                None => Err(Error::MissingHeatForm),
            },
        }
    }

    pub fn has_heat_form(&self) -> bool {
        match &self.kind {
            Kind::HeatMixture(_) => true,
            Kind::Custom { heat, .. } => heat.is_some(),
        }
    }

    /// The heat-mixture structure, when this function is one.
    pub fn heat_terms(&self) -> Option<&[HeatTerm]> {
        match &self.kind {
            Kind::HeatMixture(terms) => Some(terms),
            Kind::Custom { .. } => None,
        }
    }

    /// Radial profile f₀ with f(x) = f₀(x′x), when one exists.
    pub fn radial_profile(&self) -> Option<RadialFn> {
        match &self.kind {
            Kind::HeatMixture(terms) => {
                if terms.iter().any(|t| t.center.is_some()) {
                    return None;
                }
                let n = self.n;
                let m = self.m;
                let terms: Vec<HeatTerm> = terms.clone();
                let mut rate = f64::INFINITY;
                for t in &terms {
                    rate = rate.min(1.0 / (4.0 * t.tau.max_eigenvalue()));
                }
                Some(RadialFn::new(
                    move |r: &PosDefMatrix| {
                        let mut acc = 0.0;
                        for term in &terms {
                            let inv = term.tau.inverse();
                            let quad = inv.as_sym().trace_product(r.as_sym());
                            acc += term.amplitude
                                * (4.0 * PI).powf(-((n * m) as f64) / 2.0)
                                * term.tau.det().powf(-(n as f64) / 2.0)
                                * (-quad / 4.0).exp();
                        }
                        Complex64::new(acc, 0.0)
                    },
                    ConeDecay { exp_rate: rate, power_bound: 0.0 },
                ))
            }
            Kind::Custom { radial, .. } => radial.clone(),
        }
    }

    /// ∫ f dx in closed form (heat mixtures only): the mass of h_t is 1.
    pub fn mass(&self) -> Option<f64> {
        match &self.kind {
            Kind::HeatMixture(terms) => Some(terms.iter().map(|t| t.amplitude).sum()),
            Kind::Custom { .. } => None,
        }
    }

    /// f(· + y), the translate; heat mixtures stay heat mixtures.
    pub fn translate(&self, y: &RectMatrix) -> Option<TestFunction> {
        match &self.kind {
            Kind::HeatMixture(terms) => {
                let moved = terms
                    .iter()
                    .map(|t| HeatTerm {
                        amplitude: t.amplitude,
                        tau: t.tau.clone(),
                        center: Some(match &t.center {
                            Some(c) => c.sub(y),
                            None => y.scale(-1.0),
                        }),
                    })
                    .collect();
                Some(TestFunction::heat_mixture(self.n, self.m, moved))
            }
            Kind::Custom { .. } => None,
        }
    }

    /// f(γ ·), the rotate; uses the rotation invariance of the heat kernel.
    pub fn rotate(&self, gamma: &Rotation) -> Option<TestFunction> {
        match &self.kind {
            Kind::HeatMixture(terms) => {
                let gt = gamma.matrix().transpose();
                let moved = terms
                    .iter()
                    .map(|t| HeatTerm {
                        amplitude: t.amplitude,
                        tau: t.tau.clone(),
                        center: t.center.as_ref().map(|c| gt.mul(c)),
                    })
                    .collect();
                Some(TestFunction::heat_mixture(self.n, self.m, moved))
            }
            Kind::Custom { .. } => None,
        }
    }

    /// Registration check: the derived closed forms must satisfy the defining
    /// operator algebra at spot points to 1e−8. Purely algebraic — it guards
    /// the bookkeeping, not the integrals.
    fn spot_check_closed_forms(&self) {
        let terms = match &self.kind {
            Kind::HeatMixture(terms) => terms,
            Kind::Custom { .. } => return,
        };
        let m = self.m;
        let t1 = PosDefMatrix::scaled_identity(m, 0.3).unwrap();
        let t2 = PosDefMatrix::scaled_identity(m, 0.7).unwrap();
        let mut probe = RectMatrix::zeros(self.n, m);
        for i in 0..self.n {
            for j in 0..m {
                probe.set(i, j, 0.1 + 0.05 * (i as f64) - 0.03 * (j as f64));
            }
        }
        // W_{t1}[W_{t2} f] = W_{t1+t2} f
        let once: f64 = terms
            .iter()
            .map(|h| {
                let arg = match &h.center {
                    Some(c) => probe.sub(c),
                    None => probe.clone(),
                };
                h.amplitude * heat_kernel_value(&arg, &t1.add(&t2).add(&h.tau))
            })
            .sum();
        let twice: f64 = terms
            .iter()
            .map(|h| {
                HeatTerm { amplitude: h.amplitude, tau: h.tau.add(&t2), center: h.center.clone() }
                    .heat_smoothed(&probe, &t1)
            })
            .sum();
        assert!(
            (once - twice).abs() <= 1e-8 * (1.0 + once.abs()),
            "heat semigroup bookkeeping broken: {once} vs {twice}"
        );
        // ℱ[W_t f](y) = exp(−tr(t y′y)) ℱf(y)
        let y = probe.scale(0.5);
        let lhs: Complex64 = terms
            .iter()
            .map(|h| {
                HeatTerm { amplitude: h.amplitude, tau: h.tau.add(&t1), center: h.center.clone() }
                    .fourier(&y)
            })
            .sum();
        let damp = (-t1.as_sym().trace_product(&y.gram())).exp();
        let rhs: Complex64 = terms.iter().map(|h| h.fourier(&y)).sum::<Complex64>() * damp;
        assert!(
            (lhs - rhs).norm() <= 1e-8 * (1.0 + lhs.norm()),
            "fourier/heat bookkeeping broken"
        );
    }
}

impl Clone for TestFunction {
    fn clone(&self) -> Self {
        let kind = match &self.kind {
            Kind::HeatMixture(t) => Kind::HeatMixture(t.clone()),
            Kind::Custom { f, fourier, heat, radial } => Kind::Custom {
                f: f.clone(),
                fourier: fourier.clone(),
                heat: heat.clone(),
                radial: radial.clone(),
            },
        };
        Self { n: self.n, m: self.m, kind, decay: self.decay }
    }
}

/// Cone-side decay metadata for radial profiles.
#[derive(Debug, Clone, Copy)]
pub struct ConeDecay {
    /// |f₀(r)| ≲ C·exp(−rate·tr r); 0 means none.
    pub exp_rate: f64,
    /// |f₀(r)| ≲ |r|^{power_bound/…}: polynomial envelope exponent at
    /// infinity (per unit of log det), used for integrability screening.
    pub power_bound: f64,
}

/// A function on the cone P_m, the radial profile of a radial function on
/// M_{n,m}: f(x) = f₀(x′x).
#[derive(Clone)]
pub struct RadialFn {
    f0: Arc<dyn Fn(&PosDefMatrix) -> Complex64 + Send + Sync>,
    decay: ConeDecay,
}

impl RadialFn {
    pub fn new(
        f0: impl Fn(&PosDefMatrix) -> Complex64 + Send + Sync + 'static,
        decay: ConeDecay,
    ) -> Self {
        Self { f0: Arc::new(f0), decay }
    }

    pub fn eval(&self, r: &PosDefMatrix) -> Complex64 {
        (self.f0)(r)
    }

    pub fn decay(&self) -> ConeDecay {
        self.decay
    }

    /// e^{−tr r} |r|^{α−d}, the Siegel gamma integrand.
    pub fn gamma_integrand(m: usize, alpha: Complex64) -> Self {
        let d = (m as f64 + 1.0) / 2.0;
        Self::new(
            move |r: &PosDefMatrix| {
                let pw = (alpha - d) * r.log_det() - r.trace();
                pw.exp()
            },
            ConeDecay { exp_rate: 1.0, power_bound: 0.0 },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_is_exactly_exp_minus_trace() {
        let f = TestFunction::gaussian(4, 2);
        let x = RectMatrix::new(4, 2, alloc::vec![0.3, -0.1, 0.7, 0.2, -0.5, 0.4, 0.1, 0.9])
            .unwrap();
        let want = (-x.frobenius_sq()).exp();
        assert!((f.eval_real(&x) - want).abs() < 1e-14 * want);
        assert!((f.mass().unwrap() - PI.powi(4)).abs() < 1e-10);
    }

    #[test]
    fn fourier_of_gaussian() {
        // ℱe(y) = π^{nm/2} exp(−tr(y′y)/4)
        let (n, m) = (3, 2);
        let f = TestFunction::gaussian(n, m);
        let y = RectMatrix::new(3, 2, alloc::vec![0.5, 0.1, -0.4, 0.8, 0.0, -0.2]).unwrap();
        let got = f.fourier(&y).unwrap();
        let want = PI.powf((n * m) as f64 / 2.0) * (-y.frobenius_sq() / 4.0).exp();
        assert!((got.re - want).abs() < 1e-13 * want && got.im.abs() < 1e-15);
    }

    #[test]
    fn translate_matches_pointwise() {
        let (n, m) = (4, 2);
        let f = TestFunction::gaussian(n, m);
        let y = RectMatrix::new(n, m, alloc::vec![0.2; 8]).unwrap();
        let fy = f.translate(&y).unwrap();
        let x = RectMatrix::new(n, m, alloc::vec![0.3, -0.1, 0.7, 0.2, -0.5, 0.4, 0.1, 0.9])
            .unwrap();
        let want = f.eval_real(&x.add(&y));
        assert!((fy.eval_real(&x) - want).abs() < 1e-14 * want.abs());
    }

    #[test]
    fn radial_profile_agrees() {
        let f = TestFunction::heat(5, 2, PosDefMatrix::diag(&[1.0, 2.0]).unwrap());
        let x = RectMatrix::new(5, 2, alloc::vec![0.1, 0.7, -0.3, 0.2, 0.5, -0.6, 0.4, 0.1, -0.2, 0.8])
            .unwrap();
        let prof = f.radial_profile().unwrap();
        let r = PosDefMatrix::new(x.gram()).unwrap();
        assert!((prof.eval(&r).re - f.eval_real(&x)).abs() < 1e-14);
    }
}
