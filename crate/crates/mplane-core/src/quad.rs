//! Integration engines: deterministic double-exponential quadrature over the
//! cone P_m (in triangular coordinates), bounded cone segments, and
//! Monte Carlo over Stiefel manifolds and M_{n,m}, plus the closed-form
//! verification battery for the four appendix integrals.
//!
//! Deterministic quadrature is used only for integrals of dimension ≤ 4; in
//! triangular coordinates the cone of m×m matrices has dimension m(m+1)/2,
//! so m ≤ 2 runs on quadrature and m = 3 falls back to Monte Carlo. All
//! estimators are bit-reproducible for a fixed `(seed, workers)` pair: the
//! sample space is striped across worker streams and reduced in stream order.

use alloc::vec;
use alloc::vec::Vec;

use core::cell::Cell;

use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::{
    haar_stiefel, triangular_factor, PosDefMatrix, RectMatrix, StiefelFrame, UpperTriangular,
};
use crate::report::Report;
use crate::rng::RngStreams;
use crate::special::{siegel_beta, siegel_gamma, stiefel_volume};
use crate::testfn::{RadialFn, TestFunction};
use crate::Complex64;

const PI: f64 = core::f64::consts::PI;

/// Tolerance/budget/strategy contract for the integrators.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    /// Target relative error (quadrature) or relative stderr (Monte Carlo).
    pub rel_tol: f64,
    /// Absolute floor below which the relative target is not enforced.
    pub abs_tol: f64,
    /// Evaluation budget; Monte Carlo uses it as the sample count.
    pub max_evals: u64,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    NestedTanhSinh,
    MonteCarlo,
    Auto,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-6, abs_tol: 1e-12, max_evals: 5_000_000, strategy: Strategy::Auto }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_budget(mut self, max_evals: u64) -> Self {
        self.max_evals = max_evals;
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.max_evals < 1 {
            return Err(Error::ParameterOutOfRange(alloc::format!(
                "rel_tol {} / max_evals {}",
                self.rel_tol,
                self.max_evals
            )));
        }
        Ok(())
    }

    fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// A numerical value with an error estimate: the sample standard error for
/// Monte Carlo, the last refinement difference for quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub value: Complex64,
    pub stderr: f64,
    pub n_samples: u64,
}

impl MCEstimate {
    pub fn re(&self) -> f64 {
        self.value.re
    }

    /// |self − other| ≤ max(abs_tol, 3·combined stderr)?
    pub fn agrees_with(&self, other: &MCEstimate, abs_tol: f64) -> bool {
        let err = (self.stderr.powi(2) + other.stderr.powi(2)).sqrt();
        (self.value - other.value).norm() <= abs_tol.max(3.0 * err)
    }

    pub fn exact(value: f64) -> Self {
        Self { value: Complex64::new(value, 0.0), stderr: 0.0, n_samples: 0 }
    }
}

// ---------------------------------------------------------------------------
// one-dimensional double-exponential quadrature
// ---------------------------------------------------------------------------

/// One coordinate axis with its variable transform.
#[derive(Debug, Clone, Copy)]
pub enum Axis1D {
    /// (0, ∞) through x = e^u.
    HalfLineLog,
    /// ℝ through the double-exponential x = sinh((π/2)·sinh u).
    RealLine,
    /// (lo, hi) through the tanh-sinh map; handles endpoint singularities.
    Finite(f64, f64),
}

impl Axis1D {
    #[inline]
    fn transform(&self, u: f64) -> (f64, f64) {
        match *self {
            Axis1D::HalfLineLog => {
                let x = u.exp();
                (x, x)
            }
            Axis1D::RealLine => {
                let s = 0.5 * PI * u.sinh();
                (s.sinh(), 0.5 * PI * u.cosh() * s.cosh())
            }
            Axis1D::Finite(lo, hi) => {
                let mid = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo);
                let s = 0.5 * PI * u.sinh();
                let sech = 1.0 / s.cosh();
                (mid + half * s.tanh(), half * 0.5 * PI * u.cosh() * sech * sech)
            }
        }
    }

    fn u_cap(&self) -> f64 {
        match self {
            // beyond |u| ≈ 4 the tanh-sinh weights underflow
            Axis1D::Finite(_, _) => 4.0,
            Axis1D::HalfLineLog => 690.0,
            Axis1D::RealLine => 6.0,
        }
    }

    /// Largest |x| worth visiting: far past every decay scale in this crate,
    /// but early enough that squares and determinants stay representable.
    fn x_cap(&self) -> f64 {
        1e60
    }
}

struct Budget<'a> {
    used: &'a Cell<u64>,
    max: u64,
}

impl Budget<'_> {
    #[inline]
    fn spend(&self) -> Result<()> {
        let u = self.used.get() + 1;
        self.used.set(u);
        if u > self.max {
            Err(Error::BudgetExceeded { evals: u })
        } else {
            Ok(())
        }
    }
}

/// Trapezoid sum over the transformed axis at step h, expanding outward from
/// u = 0 until the terms fall below `cut` relative to the running peak.
fn de_sum(
    axis: Axis1D,
    h: f64,
    f: &mut dyn FnMut(f64) -> Result<Complex64>,
    rel_tol: f64,
    budget: &Budget<'_>,
) -> Result<Complex64> {
    let cap = axis.u_cap();
    // walk the tails a few digits past the requested accuracy, not to the
    // bitter end: for slowly decaying (polynomial-tail) integrands the range
    // dominates the cost
    let cut = (rel_tol * 1e-5).clamp(1e-18, 1e-9);
    let mut total = Complex64::new(0.0, 0.0);
    let mut peak: f64 = 0.0;
    for dir in [1.0_f64, -1.0] {
        let mut quiet = 0;
        let mut j = if dir > 0.0 { 0i64 } else { -1 };
        loop {
            let u = j as f64 * h;
            if u.abs() > cap {
                break;
            }
            let (x, w) = axis.transform(u);
            if !x.is_finite() || x.abs() > axis.x_cap() {
                break;
            }
            budget.spend()?;
            let mut term = if w == 0.0 { Complex64::new(0.0, 0.0) } else { f(x)? * w };
            if !term.re.is_finite() || !term.im.is_finite() {
                // only reachable deep in the transformed tails, where the
                // double-exponential weight defeats any integrable
                // singularity and arithmetic under/overflows
                term = Complex64::new(0.0, 0.0);
            }
            total += term;
            let mag = term.norm();
            peak = peak.max(mag);
            if mag <= cut * peak {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
            j += dir as i64;
        }
    }
    Ok(total * h)
}

fn de_integrate_1d(
    axis: Axis1D,
    f: &mut dyn FnMut(f64) -> Result<Complex64>,
    rel_tol: f64,
    abs_tol: f64,
    budget: &Budget<'_>,
) -> Result<(Complex64, f64)> {
    let mut h = 0.5;
    let mut prev = de_sum(axis, h, f, rel_tol, budget)?;
    let mut err = f64::INFINITY;
    for _level in 0..10 {
        h *= 0.5;
        let cur = de_sum(axis, h, f, rel_tol, budget)?;
        err = (cur - prev).norm();
        prev = cur;
        if err <= abs_tol.max(rel_tol * cur.norm()) {
            return Ok((cur, err));
        }
    }
    Ok((prev, err))
}

/// Nested tensor quadrature with per-level dynamic axes: `axis(level,
/// outer_coords)` may depend on the already-fixed outer coordinates (used by
/// the bounded-cone parametrization, whose inner bounds are curved).
pub struct NestedQuad<'a> {
    pub dim: usize,
    pub axis: &'a dyn Fn(usize, &[f64]) -> Axis1D,
    pub integrand: &'a dyn Fn(&[f64]) -> Result<Complex64>,
}

impl NestedQuad<'_> {
    pub fn run(&self, spec: &QuadratureSpec) -> Result<MCEstimate> {
        spec.validate()?;
        let used = Cell::new(0u64);
        let budget = Budget { used: &used, max: spec.max_evals };
        let mut coords = vec![0.0; self.dim];
        // inner levels run tighter so their adaptivity jitter stays below
        // the outer target
        let mut tols = vec![spec.rel_tol; self.dim];
        for l in 1..self.dim {
            tols[l] = tols[l - 1] * 0.2;
        }
        let (value, err) = self.level(0, &mut coords, &tols, spec.abs_tol, &budget)?;
        if err > spec.tolerance_for(value.norm()) * 4.0 {
            return Err(Error::BudgetExceeded { evals: used.get() });
        }
        // the refinement difference understates the bias injected by the
        // inner-level tolerances, which are fractions of rel_tol
        let claimed = err.max(spec.rel_tol * value.norm());
        Ok(MCEstimate { value, stderr: claimed, n_samples: used.get() })
    }

    fn level(
        &self,
        l: usize,
        coords: &mut Vec<f64>,
        tols: &[f64],
        abs_tol: f64,
        budget: &Budget<'_>,
    ) -> Result<(Complex64, f64)> {
        let axis = (self.axis)(l, &coords[..l]);
        if l + 1 == self.dim {
            let mut f = |x: f64| -> Result<Complex64> {
                coords[l] = x;
                (self.integrand)(coords)
            };
            // the budget cell counts leaf evaluations; spend() happens in de_sum
            de_integrate_1d_leaf(axis, &mut f, tols[l], abs_tol, budget)
        } else {
            let mut f = |x: f64| -> Result<Complex64> {
                coords[l] = x;
                let (v, _) = self.level(l + 1, coords, tols, abs_tol, budget)?;
                Ok(v)
            };
            de_integrate_1d_no_spend(axis, &mut f, tols[l], abs_tol, budget)
        }
    }
}

fn de_integrate_1d_leaf(
    axis: Axis1D,
    f: &mut dyn FnMut(f64) -> Result<Complex64>,
    rel_tol: f64,
    abs_tol: f64,
    budget: &Budget<'_>,
) -> Result<(Complex64, f64)> {
    de_integrate_1d(axis, f, rel_tol, abs_tol, budget)
}

/// Outer levels do not spend budget themselves (their children do); reuse the
/// same machinery with a free budget.
fn de_integrate_1d_no_spend(
    axis: Axis1D,
    f: &mut dyn FnMut(f64) -> Result<Complex64>,
    rel_tol: f64,
    abs_tol: f64,
    _budget: &Budget<'_>,
) -> Result<(Complex64, f64)> {
    let free = Cell::new(0u64);
    let b = Budget { used: &free, max: u64::MAX };
    de_integrate_1d(axis, f, rel_tol, abs_tol, &b)
}

// ---------------------------------------------------------------------------
// Monte Carlo engine
// ---------------------------------------------------------------------------

/// Run `n_samples` of `term`, striped across the worker streams in order.
/// The reduction is a fixed-order sum over per-worker partials, so the result
/// is bit-identical for fixed `(seed, workers)`.
pub fn mc_run(
    streams: &RngStreams,
    n_samples: u64,
    mut term: impl FnMut(&mut ChaCha8Rng) -> Complex64,
) -> MCEstimate {
    let workers = streams.workers() as u64;
    let n = n_samples.max(2);
    let base = n / workers;
    let rem = n % workers;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sq_re = 0.0;
    let mut sq_im = 0.0;
    for w in 0..workers {
        let count = base + u64::from(w < rem);
        let mut rng = streams.stream(w as u32);
        let mut wsum = Complex64::new(0.0, 0.0);
        let mut wsq_re = 0.0;
        let mut wsq_im = 0.0;
        for _ in 0..count {
            let v = term(&mut rng);
            wsum += v;
            wsq_re += v.re * v.re;
            wsq_im += v.im * v.im;
        }
        sum += wsum;
        sq_re += wsq_re;
        sq_im += wsq_im;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var_re = ((sq_re - sum.re * sum.re / nf) / (nf - 1.0)).max(0.0);
    let var_im = ((sq_im - sum.im * sum.im / nf) / (nf - 1.0)).max(0.0);
    MCEstimate {
        value: mean,
        stderr: ((var_re + var_im) / nf).sqrt(),
        n_samples: n,
    }
}

// ---------------------------------------------------------------------------
// sampling helpers
// ---------------------------------------------------------------------------

pub mod sampling {
    use super::*;
    use crate::special::gamma_real;
    use rand_distr::{ChiSquared, Gamma};

    pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
        StandardNormal.sample(rng)
    }

    pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
        rng.random()
    }

    /// χ_k sample (k > 0, not necessarily an integer): √(Gamma(k/2, 2)).
    pub fn chi(rng: &mut ChaCha8Rng, dof: f64) -> f64 {
        let g = Gamma::new(dof / 2.0, 2.0).expect("dof > 0");
        g.sample(rng).sqrt()
    }

    /// log of the χ_k density at x > 0.
    pub fn chi_log_density(x: f64, dof: f64) -> f64 {
        (dof - 1.0) * x.ln() - 0.5 * x * x
            - ((dof / 2.0 - 1.0) * core::f64::consts::LN_2 + gamma_real(dof / 2.0).ln())
    }

    pub fn chi_squared(rng: &mut ChaCha8Rng, dof: f64) -> f64 {
        ChiSquared::new(dof).expect("dof > 0").sample(rng)
    }

    pub fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize, scale: f64) -> RectMatrix {
        let mut x = RectMatrix::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                x.set(i, j, scale * normal(rng));
            }
        }
        x
    }

    /// Standard multivariate Student-t sample on ℝ^{n·m} with `nu` degrees of
    /// freedom, reshaped to a matrix. Returned with its density value.
    pub fn student_t_matrix(
        rng: &mut ChaCha8Rng,
        n: usize,
        m: usize,
        nu: f64,
        scale: f64,
    ) -> (RectMatrix, f64) {
        let g = gaussian_matrix(rng, n, m, 1.0);
        let c = chi_squared(rng, nu);
        let factor = scale * (nu / c).sqrt();
        let x = g.scale(factor);
        (x.clone(), student_t_density(&x, nu, scale))
    }

    pub fn student_t_density(x: &RectMatrix, nu: f64, scale: f64) -> f64 {
        let d = (x.rows() * x.cols()) as f64;
        let q = x.frobenius_sq() / (scale * scale);
        let norm = gamma_real((nu + d) / 2.0)
            / (gamma_real(nu / 2.0) * (nu * PI).powf(d / 2.0) * scale.powf(d));
        norm * (1.0 + q / nu).powf(-(nu + d) / 2.0)
    }

    /// Density of the `scale`-std Gaussian matrix.
    pub fn gaussian_matrix_density(x: &RectMatrix, scale: f64) -> f64 {
        let d = (x.rows() * x.cols()) as f64;
        (2.0 * PI * scale * scale).powf(-d / 2.0)
            * (-x.frobenius_sq() / (2.0 * scale * scale)).exp()
    }
}

// ---------------------------------------------------------------------------
// cone integrals
// ---------------------------------------------------------------------------

/// Triangular coordinates for P_m: `coords` holds the m diagonal entries
/// first, then the strict upper entries row-major. None when a diagonal
/// coordinate has underflowed to zero (only happens at saturated transform
/// tails, where the quadrature weight has vanished as well).
fn coords_to_factor(m: usize, coords: &[f64]) -> Option<UpperTriangular> {
    if coords[..m].iter().any(|&d| d <= 0.0) {
        return None;
    }
    let diag = coords[..m].to_vec();
    let strict = coords[m..].to_vec();
    Some(UpperTriangular::new(m, diag, strict).expect("positive diagonals checked"))
}

/// Scaled triangular coordinates: the strict entry at (i, j) is
/// t_{i,j} = w_{i,j}·√((1 + t_{i,i}²)(1 + t_{j,j}²)). This keeps the analyticity
/// strip of
/// the double-exponential transform O(1) uniformly over the diagonal scales
/// (unscaled coordinates converge arbitrarily slowly for integrands with
/// polynomial tails once a diagonal entry is large). Returns the factor and
/// the Jacobian of the scaling.
fn scaled_coords_to_factor(m: usize, coords: &[f64]) -> Option<(UpperTriangular, f64)> {
    if coords[..m].iter().any(|&d| d <= 0.0) {
        return None;
    }
    let diag = coords[..m].to_vec();
    let mut strict = Vec::with_capacity(m * (m - 1) / 2);
    let mut jac = 1.0;
    let mut idx = m;
    for i in 0..m {
        for j in i + 1..m {
            let scale = ((1.0 + diag[i] * diag[i]) * (1.0 + diag[j] * diag[j])).sqrt();
            strict.push(coords[idx] * scale);
            jac *= scale;
            idx += 1;
        }
    }
    Some((UpperTriangular::new(m, diag, strict).expect("positive diagonals checked"), jac))
}

/// The cone measure weight in triangular coordinates:
/// dr = 2^m ∏_j t_{j,j}^{m−j} dt (0-based j).
fn cone_weight(m: usize, coords: &[f64]) -> f64 {
    let mut w = 2f64.powi(m as i32);
    for j in 0..m {
        w *= coords[j].powi((m - j) as i32);
    }
    w
}

/// ∫_{P_m} f₀(r) dr.
///
/// Deterministic double-exponential quadrature in triangular coordinates for
/// m ≤ 2 (≤ 3 coordinates); Monte Carlo with a chi/Gaussian proposal for
/// m = 3. The proposal scale comes from the profile's declared exponential
/// decay rate.
pub fn integrate_cone(
    f0: &RadialFn,
    m: usize,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<MCEstimate> {
    spec.validate()?;
    if m == 0 || m > 3 {
        return Err(Error::ParameterOutOfRange(alloc::format!("cone dimension m = {m}")));
    }
    let decay = f0.decay();
    if decay.exp_rate <= 0.0 && decay.power_bound >= 0.0 {
        return Err(Error::NonIntegrable);
    }
    let dim = m * (m + 1) / 2;
    let deterministic = match spec.strategy {
        Strategy::NestedTanhSinh => true,
        Strategy::MonteCarlo => false,
        Strategy::Auto => dim <= 4,
    };
    if deterministic {
        let axis = move |l: usize, _outer: &[f64]| {
            if l < m {
                Axis1D::HalfLineLog
            } else {
                Axis1D::RealLine
            }
        };
        let integrand = move |coords: &[f64]| -> Result<Complex64> {
            match scaled_coords_to_factor(m, coords) {
                Some((t, jac)) => Ok(f0.eval(&t.gram()) * cone_weight(m, coords) * jac),
                None => Ok(Complex64::new(0.0, 0.0)),
            }
        };
        NestedQuad { dim, axis: &axis, integrand: &integrand }.run(spec)
    } else {
        integrate_cone_mc(f0, m, spec, streams)
    }
}

/// Monte Carlo over the cone: t_{j,j} ~ s·χ_{m−j+1}, t_{i,j} ~ N(0, s²)
/// absorbs the cone weight; the residual importance weight is
/// f₀(t′t)·e^{tr(t′t)/(2s²)} times an explicit constant.
fn integrate_cone_mc(
    f0: &RadialFn,
    m: usize,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<MCEstimate> {
    let decay = f0.decay();
    if decay.exp_rate <= 0.0 {
        // a polynomial tail needs the heavier Student-t machinery; the cone
        // MC route is only exercised by exponentially decaying integrands
        return Err(Error::NonIntegrable);
    }
    let s2 = 1.0 / decay.exp_rate; // twice the minimal matched variance
    let s = s2.sqrt();
    let mut log_const = (m as f64) * core::f64::consts::LN_2;
    for j in 0..m {
        let dof = (m - j) as f64 + 1.0;
        // 1/q normalization of the scaled chi: s^dof · 2^{dof/2−1}Γ(dof/2)
        log_const += dof * s.ln()
            + (dof / 2.0 - 1.0) * core::f64::consts::LN_2
            + crate::special::gamma_real(dof / 2.0).ln();
    }
    let off = m * (m - 1) / 2;
    log_const += off as f64 * (0.5 * (2.0 * PI).ln() + s.ln());
    let constant = log_const.exp();
    let est = mc_run(streams, spec.max_evals, |rng| {
        let mut coords = vec![0.0; m * (m + 1) / 2];
        for (j, c) in coords.iter_mut().take(m).enumerate() {
            *c = s * sampling::chi(rng, (m - j) as f64 + 1.0);
        }
        for c in coords.iter_mut().skip(m) {
            *c = s * sampling::normal(rng);
        }
        let t = coords_to_factor(m, &coords).expect("chi samples are positive");
        let r = t.gram();
        let boost = (r.trace() / (2.0 * s2)).exp();
        f0.eval(&r) * boost * constant
    });
    if est.stderr > spec.tolerance_for(est.value.norm()) {
        return Err(Error::BudgetExceeded { evals: est.n_samples });
    }
    Ok(est)
}

/// ∫_a^b f₀(s) ds over the set {s: s − a ∈ P_m, b − s ∈ P_m}, with a = None
/// meaning the zero matrix.
///
/// Substitutes s = a + c′wc with b − a = c′c and w ranging over {0 < w < I};
/// for m ≤ 2 the w-region has exact nested bounds in triangular coordinates,
/// which the tanh-sinh axes absorb without boundary bias. m = 3 uses
/// rejection Monte Carlo.
pub fn integrate_bounded_cone(
    f0: &RadialFn,
    a: Option<&PosDefMatrix>,
    b: &PosDefMatrix,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<MCEstimate> {
    spec.validate()?;
    let m = b.size();
    let gap = match a {
        Some(a) => {
            PosDefMatrix::new(b.as_sym().sub(a.as_sym())).map_err(|_| Error::EmptyRegion)?
        }
        None => b.clone(),
    };
    let c = triangular_factor(&gap)?;
    let c_rect = c.to_rect();
    let jac = {
        let mut d = 1.0;
        for i in 0..m {
            d *= c.diag(i);
        }
        d.powi(m as i32 + 1)
    };
    let eval_at = |w: &PosDefMatrix| -> Result<Complex64> {
        // s = a + c′ w c
        let cw = c_rect.transpose().mul(&w.as_sym().to_rect()).mul(&c_rect);
        let mut sym = crate::matrix::SymMatrix::zeros(m);
        for i in 0..m {
            for j in i..m {
                let mut v = 0.5 * (cw.get(i, j) + cw.get(j, i));
                if let Some(a) = a {
                    v += a.get(i, j);
                }
                sym.set(i, j, v);
            }
        }
        // on the region boundary the reconstruction may lose definiteness to
        // rounding; the measure there is negligible
        match PosDefMatrix::new(sym) {
            Ok(s) => Ok(f0.eval(&s)),
            Err(_) => Ok(Complex64::new(0.0, 0.0)),
        }
    };
    match m {
        1 => {
            let axis = move |_l: usize, _outer: &[f64]| Axis1D::Finite(0.0, 1.0);
            let integrand = move |coords: &[f64]| -> Result<Complex64> {
                match coords_to_factor(1, coords) {
                    Some(t) => Ok(eval_at(&t.gram())? * cone_weight(1, coords)),
                    None => Ok(Complex64::new(0.0, 0.0)),
                }
            };
            NestedQuad { dim: 1, axis: &axis, integrand: &integrand }
                .run(spec)
                .map(|mut e| {
                    e.value *= jac;
                    e.stderr *= jac;
                    e
                })
        }
        2 => {
            // w = t′t with t = [[A, B], [0, C]]; w < I ⟺
            //   A < 1, B² < 1−A², C² < 1 − B²/(1−A²)
            let axis = move |l: usize, outer: &[f64]| match l {
                0 => Axis1D::Finite(0.0, 1.0),
                1 => {
                    let bb = (1.0 - outer[0] * outer[0]).max(0.0).sqrt();
                    Axis1D::Finite(-bb, bb)
                }
                _ => {
                    let aa = outer[0];
                    let bb = outer[1];
                    let top = (1.0 - bb * bb / (1.0 - aa * aa).max(1e-300)).max(0.0).sqrt();
                    Axis1D::Finite(0.0, top)
                }
            };
            // coordinate order (A, B, C) vs. the factor layout (diag, strict)
            let integrand = move |coords: &[f64]| -> Result<Complex64> {
                let reordered = [coords[0], coords[2], coords[1]];
                match coords_to_factor(2, &reordered) {
                    Some(t) => Ok(eval_at(&t.gram())? * cone_weight(2, &reordered)),
                    None => Ok(Complex64::new(0.0, 0.0)),
                }
            };
            NestedQuad { dim: 3, axis: &axis, integrand: &integrand }
                .run(spec)
                .map(|mut e| {
                    e.value *= jac;
                    e.stderr *= jac;
                    e
                })
        }
        3 => {
            // rejection sampling of {0 < w < I} in the triangular box
            let box_vol = 2f64.powi(3); // diag (0,1)³ × strict (−1,1)³
            let est = mc_run(streams, spec.max_evals, |rng| {
                let mut coords = [0.0; 6];
                for (j, c) in coords.iter_mut().enumerate() {
                    *c = if j < 3 {
                        rng.random::<f64>()
                    } else {
                        2.0 * rng.random::<f64>() - 1.0
                    };
                }
                let t = match coords_to_factor(3, &coords) {
                    Some(t) => t,
                    None => return Complex64::new(0.0, 0.0),
                };
                let w = t.gram();
                let eye_minus =
                    crate::matrix::SymMatrix::identity(3).sub(w.as_sym());
                if PosDefMatrix::new(eye_minus).is_err() {
                    return Complex64::new(0.0, 0.0);
                }
                match eval_at(&w) {
                    Ok(v) => v * cone_weight(3, &coords) * box_vol,
                    Err(_) => Complex64::new(0.0, 0.0),
                }
            });
            Ok(MCEstimate {
                value: est.value * jac,
                stderr: est.stderr * jac,
                n_samples: est.n_samples,
            })
        }
        _ => Err(Error::ParameterOutOfRange(alloc::format!("bounded cone at m = {m}"))),
    }
}

/// ∫_{V_{n,p}} f(v) dv = σ_{n,p} · E_Haar[f].
pub fn integrate_stiefel(
    f: &dyn Fn(&StiefelFrame) -> Complex64,
    n: usize,
    p: usize,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<MCEstimate> {
    spec.validate()?;
    let sigma = stiefel_volume(n, p);
    let est = mc_run(streams, spec.max_evals, |rng| {
        let v = haar_stiefel(rng, n, p).expect("sampler cannot fail for n ≥ p");
        f(&v)
    });
    let est = MCEstimate {
        value: est.value * sigma,
        stderr: est.stderr * sigma,
        n_samples: est.n_samples,
    };
    if est.stderr > spec.tolerance_for(est.value.norm()) {
        return Err(Error::BudgetExceeded { evals: est.n_samples });
    }
    Ok(est)
}

/// ∫_{M_{n,m}} f dx by Gaussian importance sampling, with the proposal scale
/// matched to the declared decay rate.
pub fn integrate_matrix_space(
    f: &TestFunction,
    n: usize,
    m: usize,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<MCEstimate> {
    spec.validate()?;
    let rate = f.decay().gaussian_rate;
    if rate <= 0.0 {
        return Err(Error::ParameterOutOfRange(alloc::string::String::from(
            "matrix-space MC needs a positive Gaussian decay rate",
        )));
    }
    // variance 1/(2·rate) matches the declared envelope exactly; centers and
    // subexponential factors only perturb the weight, not its tail
    let s = (1.0 / (2.0 * rate)).sqrt();
    let dim = (n * m) as f64;
    let log_norm = dim * (0.5 * (2.0 * PI).ln() + s.ln());
    let est = mc_run(streams, spec.max_evals, |rng| {
        let x = sampling::gaussian_matrix(rng, n, m, s);
        let boost = (x.frobenius_sq() / (2.0 * s * s) + log_norm).exp();
        f.eval(&x) * boost
    });
    if est.stderr > spec.tolerance_for(est.value.norm()) {
        return Err(Error::BudgetExceeded { evals: est.n_samples });
    }
    Ok(est)
}

// ---------------------------------------------------------------------------
// appendix verification battery
// ---------------------------------------------------------------------------

/// Which appendix integral to verify.
#[derive(Debug, Clone)]
pub enum AppendixCheck {
    /// ∫_s^∞ |r|^{−γ} |r−s|^{α−d} dr = |s|^{α−γ} B_m(α, γ−α).
    A1 { m: usize, alpha: f64, gamma: f64, s: PosDefMatrix },
    /// ∫_s^∞ |I+r|^{−γ} |r−s|^{α−d} dr = |I+s|^{α−γ} B_m(α, γ−α).
    A2 { m: usize, alpha: f64, gamma: f64, s: PosDefMatrix },
    /// ∫_{M_{k,m}} |b+y′y|^{−λ/2} dy = π^{km/2} Γ_m((λ−k)/2)/Γ_m(λ/2) · |b|^{(k−λ)/2}.
    A3 { m: usize, k: usize, lambda: f64, b: PosDefMatrix },
    /// ∫_{y′y<b} |b−y′y|^{(λ−k)/2−d} dy = π^{km/2} Γ_m((λ−k)/2)/Γ_m(λ/2) · |b|^{λ/2−d}.
    A4 { m: usize, k: usize, lambda: f64, b: PosDefMatrix },
}

impl AppendixCheck {
    pub fn id(&self) -> &'static str {
        match self {
            AppendixCheck::A1 { .. } => "A1",
            AppendixCheck::A2 { .. } => "A2",
            AppendixCheck::A3 { .. } => "A3",
            AppendixCheck::A4 { .. } => "A4",
        }
    }
}

/// Run one appendix identity: numerical left side against the closed form.
pub fn verify_appendix(
    check: &AppendixCheck,
    spec: &QuadratureSpec,
    streams: &RngStreams,
) -> Result<Report> {
    let d = |m: usize| (m as f64 + 1.0) / 2.0;
    let (lhs, rhs) = match check {
        AppendixCheck::A1 { m, alpha, gamma, s } => {
            let dd = d(*m);
            if *alpha <= dd - 1.0 || *gamma - *alpha <= dd - 1.0 {
                return Err(Error::ParameterOutOfRange(alloc::format!(
                    "A1 needs α > d−1 and γ−α > d−1, got α={alpha}, γ={gamma}"
                )));
            }
            let s_cl = s.clone();
            let (alpha, gamma) = (*alpha, *gamma);
            let f0 = RadialFn::new(
                move |u: &PosDefMatrix| match s_cl.add_sym(u.as_sym()) {
                    Ok(r) => Complex64::new(
                        (-gamma * r.log_det() + (alpha - dd) * u.log_det()).exp(),
                        0.0,
                    ),
                    Err(_) => Complex64::new(0.0, 0.0),
                },
                crate::testfn::ConeDecay { exp_rate: 0.0, power_bound: alpha - gamma },
            );
            let lhs = integrate_cone_poly(&f0, *m, spec)?;
            let b = siegel_beta(
                *m,
                Complex64::new(alpha, 0.0),
                Complex64::new(gamma - alpha, 0.0),
            )
            .real()?;
            (lhs, s.det().powf(alpha - gamma) * b)
        }
        AppendixCheck::A2 { m, alpha, gamma, s } => {
            let dd = d(*m);
            if *alpha <= dd - 1.0 || *gamma - *alpha <= dd - 1.0 {
                return Err(Error::ParameterOutOfRange(alloc::format!(
                    "A2 needs α > d−1 and γ−α > d−1, got α={alpha}, γ={gamma}"
                )));
            }
            let (alpha, gamma) = (*alpha, *gamma);
            let eye_plus_s = s.add_sym(&crate::matrix::SymMatrix::identity(*m))?;
            let base = eye_plus_s.clone();
            let f0 = RadialFn::new(
                move |u: &PosDefMatrix| match base.add_sym(u.as_sym()) {
                    Ok(r) => Complex64::new(
                        (-gamma * r.log_det() + (alpha - dd) * u.log_det()).exp(),
                        0.0,
                    ),
                    Err(_) => Complex64::new(0.0, 0.0),
                },
                crate::testfn::ConeDecay { exp_rate: 0.0, power_bound: alpha - gamma },
            );
            let lhs = integrate_cone_poly(&f0, *m, spec)?;
            let b = siegel_beta(
                *m,
                Complex64::new(alpha, 0.0),
                Complex64::new(gamma - alpha, 0.0),
            )
            .real()?;
            (lhs, eye_plus_s.det().powf(alpha - gamma) * b)
        }
        AppendixCheck::A3 { m, k, lambda, b } => {
            if *lambda <= (*k + *m - 1) as f64 {
                return Err(Error::ParameterOutOfRange(alloc::format!(
                    "A3 needs λ > k+m−1, got λ = {lambda}"
                )));
            }
            if k < m {
                return Err(Error::ParameterOutOfRange(alloc::string::String::from(
                    "A3 quadrature route needs k ≥ m",
                )));
            }
            let dd = d(*m);
            let (k_f, lambda_f) = (*k as f64, *lambda);
            let b_cl = b.clone();
            let f0 = RadialFn::new(
                move |r: &PosDefMatrix| match b_cl.add_sym(r.as_sym()) {
                    Ok(sum) => Complex64::new(
                        ((k_f / 2.0 - dd) * r.log_det() - lambda_f / 2.0 * sum.log_det()).exp(),
                        0.0,
                    ),
                    Err(_) => Complex64::new(0.0, 0.0),
                },
                crate::testfn::ConeDecay { exp_rate: 0.0, power_bound: (k_f - lambda_f) / 2.0 },
            );
            let cone = integrate_cone_poly(&f0, *m, spec)?;
            let factor = 2f64.powi(-(*m as i32)) * stiefel_volume(*k, *m);
            let lhs = MCEstimate {
                value: cone.value * factor,
                stderr: cone.stderr * factor,
                n_samples: cone.n_samples,
            };
            (lhs, appendix_rhs(*m, *k, *lambda) * b.det().powf((k_f - lambda_f) / 2.0))
        }
        AppendixCheck::A4 { m, k, lambda, b } => {
            if *lambda <= (*k + *m - 1) as f64 {
                return Err(Error::ParameterOutOfRange(alloc::format!(
                    "A4 needs λ > k+m−1, got λ = {lambda}"
                )));
            }
            if k < m {
                return Err(Error::ParameterOutOfRange(alloc::string::String::from(
                    "A4 quadrature route needs k ≥ m",
                )));
            }
            let dd = d(*m);
            let (k_f, lambda_f) = (*k as f64, *lambda);
            let b_cl = b.clone();
            let f0 = RadialFn::new(
                move |r: &PosDefMatrix| {
                    let diff = b_cl.as_sym().sub(r.as_sym());
                    match PosDefMatrix::new(diff) {
                        Ok(rem) => Complex64::new(
                            ((k_f / 2.0 - dd) * r.log_det()
                                + ((lambda_f - k_f) / 2.0 - dd) * rem.log_det())
                            .exp(),
                            0.0,
                        ),
                        Err(_) => Complex64::new(0.0, 0.0),
                    }
                },
                crate::testfn::ConeDecay { exp_rate: 1.0, power_bound: 0.0 },
            );
            let cone = integrate_bounded_cone(&f0, None, b, spec, streams)?;
            let factor = 2f64.powi(-(*m as i32)) * stiefel_volume(*k, *m);
            let lhs = MCEstimate {
                value: cone.value * factor,
                stderr: cone.stderr * factor,
                n_samples: cone.n_samples,
            };
            (lhs, appendix_rhs(*m, *k, *lambda) * b.det().powf(lambda_f / 2.0 - dd))
        }
    };
    Ok(Report::two_sided(check.id(), lhs, rhs, spec.abs_tol, streams.seed()))
}

/// π^{km/2} Γ_m((λ−k)/2) / Γ_m(λ/2).
fn appendix_rhs(m: usize, k: usize, lambda: f64) -> f64 {
    let num = siegel_gamma(m, Complex64::new((lambda - k as f64) / 2.0, 0.0))
        .real()
        .expect("λ > k+m−1 keeps the numerator finite");
    let den = siegel_gamma(m, Complex64::new(lambda / 2.0, 0.0)).real().expect("finite");
    PI.powf((k * m) as f64 / 2.0) * num / den
}

/// Deterministic cone quadrature for polynomially decaying profiles (the
/// appendix integrands): same triangular parametrization as
/// [`integrate_cone`], tolerances from `spec`.
fn integrate_cone_poly(f0: &RadialFn, m: usize, spec: &QuadratureSpec) -> Result<MCEstimate> {
    if m > 2 {
        return Err(Error::ParameterOutOfRange(alloc::string::String::from(
            "deterministic cone quadrature is limited to m ≤ 2",
        )));
    }
    let dim = m * (m + 1) / 2;
    let axis = move |l: usize, _outer: &[f64]| {
        if l < m {
            Axis1D::HalfLineLog
        } else {
            Axis1D::RealLine
        }
    };
    let integrand = move |coords: &[f64]| -> Result<Complex64> {
        match scaled_coords_to_factor(m, coords) {
            Some((t, jac)) => Ok(f0.eval(&t.gram()) * cone_weight(m, coords) * jac),
            None => Ok(Complex64::new(0.0, 0.0)),
        }
    };
    NestedQuad { dim, axis: &axis, integrand: &integrand }.run(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::siegel_gamma_real;
    use crate::testfn::ConeDecay;

    fn streams() -> RngStreams {
        RngStreams::new(11, 2)
    }

    #[test]
    fn gamma_cone_integral_m1_and_m2() {
        let spec = QuadratureSpec { rel_tol: 1e-10, max_evals: 80_000_000, ..Default::default() };
        for &(m, alpha) in &[(1usize, 1.7), (2, 1.2), (2, 2.0), (2, 3.5)] {
            let f0 = RadialFn::gamma_integrand(m, Complex64::new(alpha, 0.0));
            let got = integrate_cone(&f0, m, &spec, &streams()).unwrap();
            let want = siegel_gamma_real(m, alpha).unwrap();
            let rel = (got.re() - want).abs() / want;
            assert!(rel < 1e-8, "Γ_{m}({alpha}): rel err {rel:.2e}");
        }
    }

    #[test]
    fn gamma_cone_integral_complex_alpha() {
        let spec = QuadratureSpec { rel_tol: 1e-9, max_evals: 40_000_000, ..Default::default() };
        let alpha = Complex64::new(2.3, 0.7);
        let f0 = RadialFn::gamma_integrand(2, alpha);
        let got = integrate_cone(&f0, 2, &spec, &streams()).unwrap();
        let want = siegel_gamma(2, alpha).value().unwrap();
        assert!((got.value - want).norm() < 1e-7 * want.norm());
    }

    #[test]
    fn cone_mc_route_matches_quadrature() {
        let f0 = RadialFn::gamma_integrand(2, Complex64::new(2.0, 0.0));
        let spec = QuadratureSpec {
            rel_tol: 0.05,
            max_evals: 200_000,
            strategy: Strategy::MonteCarlo,
            ..Default::default()
        };
        let got = integrate_cone(&f0, 2, &spec, &streams()).unwrap();
        let want = siegel_gamma_real(2, 2.0).unwrap();
        assert!(
            (got.re() - want).abs() < 4.0 * got.stderr.max(1e-3),
            "MC {} vs {} (σ = {})",
            got.re(),
            want,
            got.stderr
        );
    }

    #[test]
    fn cone_mc_m3_gamma() {
        let f0 = RadialFn::gamma_integrand(3, Complex64::new(2.5, 0.0));
        let spec = QuadratureSpec { rel_tol: 0.05, max_evals: 400_000, ..Default::default() };
        let got = integrate_cone(&f0, 3, &spec, &streams()).unwrap();
        let want = siegel_gamma_real(3, 2.5).unwrap();
        assert!((got.re() - want).abs() < 4.0 * got.stderr, "{} vs {want}", got.re());
    }

    #[test]
    fn beta_bounded_cone() {
        // ∫₀^{I} |r|^{α−d}|I−r|^{β−d} dr = B_m(α, β)
        let spec = QuadratureSpec { rel_tol: 1e-8, max_evals: 40_000_000, ..Default::default() };
        for &(m, alpha, beta) in &[(1usize, 2.0, 2.0), (2, 2.0, 2.0), (2, 1.3, 2.4)] {
            let d = (m as f64 + 1.0) / 2.0;
            let f0 = RadialFn::new(
                move |r: &PosDefMatrix| {
                    let eye = crate::matrix::SymMatrix::identity(r.size());
                    let rem = eye.sub(r.as_sym());
                    match PosDefMatrix::new(rem) {
                        Ok(q) => Complex64::new(
                            r.det().powf(alpha - d) * q.det().powf(beta - d),
                            0.0,
                        ),
                        Err(_) => Complex64::new(0.0, 0.0),
                    }
                },
                ConeDecay { exp_rate: 1.0, power_bound: 0.0 },
            );
            let b = PosDefMatrix::identity(m);
            let got = integrate_bounded_cone(&f0, None, &b, &spec, &streams()).unwrap();
            let want = siegel_beta(m, Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0))
                .real()
                .unwrap();
            let rel = (got.re() - want).abs() / want;
            assert!(rel < 1e-6, "B_{m}({alpha},{beta}) rel err {rel:.2e}");
        }
    }

    #[test]
    fn bounded_cone_unit_mass() {
        let f0 = RadialFn::new(
            |_r: &PosDefMatrix| Complex64::new(1.0, 0.0),
            ConeDecay { exp_rate: 1.0, power_bound: 0.0 },
        );
        let spec = QuadratureSpec::default();
        let b = PosDefMatrix::identity(1);
        let got = integrate_bounded_cone(&f0, None, &b, &spec, &streams()).unwrap();
        assert!((got.re() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn bounded_cone_empty_region() {
        let f0 = RadialFn::new(
            |_r: &PosDefMatrix| Complex64::new(1.0, 0.0),
            ConeDecay { exp_rate: 1.0, power_bound: 0.0 },
        );
        let a = PosDefMatrix::identity(2);
        let b = PosDefMatrix::scaled_identity(2, 0.5).unwrap();
        let err = integrate_bounded_cone(&f0, Some(&a), &b, &QuadratureSpec::default(), &streams());
        assert_eq!(err.unwrap_err(), Error::EmptyRegion);
    }

    #[test]
    fn stiefel_volume_by_mc() {
        let spec = QuadratureSpec { rel_tol: 0.05, max_evals: 100, ..Default::default() };
        let got = integrate_stiefel(
            &|_v: &StiefelFrame| Complex64::new(1.0, 0.0),
            4,
            2,
            &spec,
            &streams(),
        )
        .unwrap();
        let want = stiefel_volume(4, 2);
        assert!((got.re() - want).abs() < 1e-10 * want); // constant integrand: exact
    }

    #[test]
    fn matrix_space_gaussian_mass() {
        let f = TestFunction::gaussian(4, 2);
        let spec = QuadratureSpec { rel_tol: 0.05, max_evals: 20_000, ..Default::default() };
        let got = integrate_matrix_space(&f, 4, 2, &spec, &streams()).unwrap();
        let want = PI.powi(4);
        // matched proposal gives a constant weight up to rounding noise
        assert!(got.stderr < 1e-6 * want);
        assert!((got.re() - want).abs() < 1e-8 * want);
    }

    #[test]
    fn determinism_bitwise() {
        let f = TestFunction::heat(4, 2, PosDefMatrix::diag(&[1.0, 2.0]).unwrap());
        let spec = QuadratureSpec { rel_tol: 0.2, max_evals: 5_000, ..Default::default() };
        let a = integrate_matrix_space(&f, 4, 2, &spec, &streams()).unwrap();
        let b = integrate_matrix_space(&f, 4, 2, &spec, &streams()).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.stderr, b.stderr);
    }

    #[test]
    fn budget_exceeded_on_tiny_budget() {
        let spec = QuadratureSpec { rel_tol: 1e-12, max_evals: 50, ..Default::default() };
        let f0 = RadialFn::gamma_integrand(2, Complex64::new(2.0, 0.0));
        assert!(matches!(
            integrate_cone(&f0, 2, &spec, &streams()),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn appendix_a1_a2_m2() {
        let spec = QuadratureSpec { rel_tol: 1e-6, max_evals: 40_000_000, ..Default::default() };
        let s = PosDefMatrix::diag(&[1.0, 2.0]).unwrap();
        let r1 = verify_appendix(
            &AppendixCheck::A1 { m: 2, alpha: 2.0, gamma: 4.5, s: s.clone() },
            &spec,
            &streams(),
        )
        .unwrap();
        assert!(r1.pass, "A1: {} vs {}", r1.lhs, r1.rhs);
        let r2 = verify_appendix(
            &AppendixCheck::A2 { m: 2, alpha: 2.0, gamma: 4.5, s },
            &spec,
            &streams(),
        )
        .unwrap();
        assert!(r2.pass, "A2: {} vs {}", r2.lhs, r2.rhs);
    }

    #[test]
    fn appendix_a3_a4_example() {
        let spec = QuadratureSpec { rel_tol: 1e-6, max_evals: 40_000_000, ..Default::default() };
        let b = PosDefMatrix::identity(2);
        let r3 = verify_appendix(
            &AppendixCheck::A3 { m: 2, k: 3, lambda: 6.0, b: b.clone() },
            &spec,
            &streams(),
        )
        .unwrap();
        // rhs = π³ Γ₂(3/2)/Γ₂(3)
        let want = PI.powi(3) * siegel_gamma_real(2, 1.5).unwrap()
            / siegel_gamma_real(2, 3.0).unwrap();
        assert!((r3.rhs - want).abs() < 1e-12 * want);
        assert!(r3.pass, "A3: {} vs {}", r3.lhs, r3.rhs);

        let r4 = verify_appendix(
            &AppendixCheck::A4 { m: 2, k: 3, lambda: 6.0, b },
            &spec,
            &streams(),
        )
        .unwrap();
        assert!(r4.pass, "A4: {} vs {}", r4.lhs, r4.rhs);
    }

    #[test]
    fn appendix_a1_m1_scalar() {
        // classical: ∫_s^∞ r^{−γ}(r−s)^{α−1} dr = s^{α−γ} B(α, γ−α)
        let spec = QuadratureSpec { rel_tol: 1e-9, max_evals: 10_000_000, ..Default::default() };
        let s = PosDefMatrix::diag(&[1.5]).unwrap();
        let r = verify_appendix(
            &AppendixCheck::A1 { m: 1, alpha: 1.5, gamma: 4.0, s },
            &spec,
            &streams(),
        )
        .unwrap();
        assert!(r.pass, "A1 m=1: {} vs {}", r.lhs, r.rhs);
    }

    #[test]
    fn parameter_range_rejected() {
        let s = PosDefMatrix::identity(2);
        assert!(matches!(
            verify_appendix(
                &AppendixCheck::A1 { m: 2, alpha: 1.0, gamma: 1.5, s },
                &QuadratureSpec::default(),
                &streams()
            ),
            Err(Error::ParameterOutOfRange(_))
        ));
    }
}
