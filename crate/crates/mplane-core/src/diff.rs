//! Finite-difference realizations of the Cayley-Laplace operator
//! Δ = det(∂′∂) on M_{n,m}, the cone operator D = det(η_{ij} ∂/∂r_{ij}) on
//! S_m, and the radial part L = 4^m |r|^{d−n/2} D |r|^{n/2−d+1} D.
//!
//! Every operator is expanded by the permutation sum of its determinant into
//! mixed partials, each evaluated by tensor-product central stencils with
//! per-coordinate steps h·max(1, |x_c|), then jointly Richardson-extrapolated
//! in h. The whole evaluation is a *linear functional* of the function: a
//! plan lists evaluation points and weights, so callers that average many
//! stochastic functions (backprojections) can reuse one plan across common
//! random numbers.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::{PosDefMatrix, RectMatrix, SymMatrix};
use crate::testfn::{RadialFn, TestFunction};
use crate::Complex64;

/// Coarsening factor between the two applications of the radial part in the
/// Δ² route: the outer grid must sit well above the inner one's noise floor.
const OUTER_STEP_RATIO: f64 = 3.0;

/// Step floor for the composed Δ² route; below this the outer application
/// differentiates the inner one's noise.
const COMPOSED_STEP_FLOOR: f64 = 0.04;

/// Central-difference configuration.
#[derive(Debug, Clone, Copy)]
pub struct DiffSpec {
    /// Base step, scaled per coordinate by max(1, |x_c|).
    pub base_step: f64,
    /// Number of step-halving levels entering the extrapolation.
    pub richardson_levels: usize,
    pub scheme: Scheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Central,
}

impl Default for DiffSpec {
    fn default() -> Self {
        Self { base_step: 1e-2, richardson_levels: 3, scheme: Scheme::Central }
    }
}

impl DiffSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_step > 0.0) || self.richardson_levels < 1 {
            return Err(Error::ParameterOutOfRange(alloc::format!(
                "base_step {} / levels {}",
                self.base_step,
                self.richardson_levels
            )));
        }
        Ok(())
    }
}

/// One mixed partial ∂^{k_1}_{c_1} ⋯ ∂^{k_p}_{c_p} with a scalar weight.
#[derive(Debug, Clone)]
struct OperatorTerm {
    weight: f64,
    /// (coordinate, order), coordinates distinct.
    partials: Vec<(usize, u32)>,
}

/// Central 1-D stencil (offsets in units of h, coefficients in units of
/// h^{-order}), O(h²) accurate.
fn stencil_1d(order: u32) -> (&'static [i32], &'static [f64]) {
    match order {
        1 => (&[-1, 1], &[-0.5, 0.5]),
        2 => (&[-1, 0, 1], &[1.0, -2.0, 1.0]),
        3 => (&[-2, -1, 1, 2], &[-0.5, 1.0, -1.0, 0.5]),
        4 => (&[-2, -1, 0, 1, 2], &[1.0, -4.0, 6.0, -4.0, 1.0]),
        _ => panic!("stencil order {order} not supported"),
    }
}

/// A fully expanded evaluation plan: Σ_i w_i f(points_i) approximates the
/// operator at one point, with the Richardson combination already folded in.
pub struct StencilPlan {
    /// Distinct evaluation offsets per level, as coordinate displacements.
    levels: Vec<Vec<(Vec<f64>, f64)>>,
    /// Neville weights combining per-level estimates to the h → 0 limit.
    extrapolation: Vec<f64>,
}

impl StencilPlan {
    fn build(dim: usize, terms: &[OperatorTerm], steps: &[f64], spec: &DiffSpec) -> StencilPlan {
        let total_levels = spec.richardson_levels;
        let mut levels = Vec::with_capacity(total_levels);
        // levels step upward (h, 2h, 4h, …): the extrapolation kills the h²
        // and h⁴ truncation terms either way, and keeping the smallest step
        // at base_step avoids amplifying rounding noise by h⁻⁴
        for level in 0..total_levels {
            let scale = 2f64.powi(level as i32);
            let mut acc: BTreeMap<Vec<i32>, f64> = BTreeMap::new();
            for term in terms {
                let mut local: Vec<(Vec<i32>, f64)> = vec![(vec![0; dim], term.weight)];
                for &(coord, order) in &term.partials {
                    let (offs, coeffs) = stencil_1d(order);
                    let h = steps[coord] * scale;
                    let inv = h.powi(-(order as i32));
                    let mut next = Vec::with_capacity(local.len() * offs.len());
                    for (key, w) in &local {
                        for (&o, &c) in offs.iter().zip(coeffs) {
                            let mut k = key.clone();
                            k[coord] += o;
                            next.push((k, w * c * inv));
                        }
                    }
                    local = next;
                }
                for (k, w) in local {
                    *acc.entry(k).or_insert(0.0) += w;
                }
            }
            let pts = acc
                .into_iter()
                .map(|(k, w)| {
                    let disp: Vec<f64> = k
                        .iter()
                        .enumerate()
                        .map(|(c, &mult)| mult as f64 * steps[c] * scale)
                        .collect();
                    (disp, w)
                })
                .collect();
            levels.push(pts);
        }
        StencilPlan { levels, extrapolation: neville_weights(total_levels) }
    }

    /// Per-level raw estimates for a function of the displaced coordinates.
    pub fn level_estimates(&self, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
        self.levels
            .iter()
            .map(|pts| pts.iter().map(|(disp, w)| w * f(disp)).sum())
            .collect()
    }

    /// Extrapolate level estimates to h → 0.
    pub fn extrapolate(&self, estimates: &[f64]) -> Result<f64> {
        let value: f64 =
            estimates.iter().zip(&self.extrapolation).map(|(e, w)| e * w).sum();
        if !value.is_finite() {
            // a step too small for the coefficient magnitudes over- or
            // underflows before anything else goes wrong
            return Err(Error::StepUnderflow);
        }
        Ok(value)
    }

    pub fn apply(&self, mut f: impl FnMut(&[f64]) -> f64) -> Result<f64> {
        let est = self.level_estimates(&mut f);
        self.extrapolate(&est)
    }
}

/// Lagrange weights at 0 for nodes h² ∈ {1, 4, …, 4^{L−1}}.
fn neville_weights(levels: usize) -> Vec<f64> {
    let nodes: Vec<f64> = (0..levels).map(|l| 4f64.powi(l as i32)).collect();
    (0..levels)
        .map(|i| {
            let mut w = 1.0;
            for j in 0..levels {
                if j != i {
                    w *= (0.0 - nodes[j]) / (nodes[i] - nodes[j]);
                }
            }
            w
        })
        .collect()
}

fn permutations(m: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..m).collect();
    heap_permute(&mut perm, m, &mut out);
    out
}

fn heap_permute(perm: &mut Vec<usize>, k: usize, out: &mut Vec<(Vec<usize>, f64)>) {
    if k == 1 {
        out.push((perm.clone(), permutation_sign(perm)));
        return;
    }
    for i in 0..k {
        heap_permute(perm, k - 1, out);
        if k % 2 == 0 {
            perm.swap(i, k - 1);
        } else {
            perm.swap(0, k - 1);
        }
    }
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1.0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut idx = start;
        while !seen[idx] {
            seen[idx] = true;
            idx = perm[idx];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// The Cayley-Laplace operator as a sum of order-2m mixed partials:
/// Δ = Σ_σ sgn(σ) Σ_{i_1..i_m} ∏_j ∂²/∂x_{i_j, j} ∂x_{i_j, σ(j)}.
fn cayley_terms(n: usize, m: usize) -> Vec<OperatorTerm> {
    let coord = |i: usize, j: usize| i * m + j;
    let mut terms = Vec::new();
    for (perm, sign) in permutations(m) {
        let mut rows = vec![0usize; m];
        loop {
            let mut orders: BTreeMap<usize, u32> = BTreeMap::new();
            for j in 0..m {
                *orders.entry(coord(rows[j], j)).or_insert(0) += 1;
                *orders.entry(coord(rows[j], perm[j])).or_insert(0) += 1;
            }
            terms.push(OperatorTerm {
                weight: sign,
                partials: orders.into_iter().collect(),
            });
            // odometer over i ∈ [0, n)^m
            let mut j = 0;
            loop {
                if j == m {
                    break;
                }
                rows[j] += 1;
                if rows[j] < n {
                    break;
                }
                rows[j] = 0;
                j += 1;
            }
            if j == m {
                break;
            }
        }
    }
    terms
}

/// Build the Δ evaluation plan at x. Exposed so that Monte Carlo
/// backprojections can share one plan (and one frame sample) across all
/// stencil points.
pub fn cayley_laplace_plan(x: &RectMatrix, spec: &DiffSpec) -> Result<StencilPlan> {
    spec.validate()?;
    let (n, m) = (x.rows(), x.cols());
    if n * m > 12 || m > 2 {
        return Err(Error::ParameterOutOfRange(alloc::format!(
            "Cayley-Laplace stencils limited to n·m ≤ 12, m ≤ 2; got {n}x{m}"
        )));
    }
    let steps: Vec<f64> = x
        .entries()
        .iter()
        .map(|&e| spec.base_step * e.abs().max(1.0))
        .collect();
    Ok(StencilPlan::build(n * m, &cayley_terms(n, m), &steps, spec))
}

/// (Δf)(x) by central differences with Richardson extrapolation.
///
/// Refuses to evaluate within relative distance 0.1 of the rank-deficient
/// set when f carries a |x|^λ singular factor with λ < 2m: the Bernstein
/// identities only hold on the open set of full-rank matrices.
pub fn cayley_laplace(f: &TestFunction, x: &RectMatrix, spec: &DiffSpec) -> Result<f64> {
    let m = x.cols();
    if let Some(lambda) = f.decay().singular_power {
        if lambda < (2 * m) as f64 {
            let (hi, lo) = x.singular_extremes();
            if lo < 0.1 * hi {
                return Err(Error::NearSingularSet);
            }
        }
    }
    let plan = cayley_laplace_plan(x, spec)?;
    plan.apply(|disp| {
        let mut y = x.clone();
        for (c, &d) in disp.iter().enumerate() {
            y.set(c / m, c % m, x.get(c / m, c % m) + d);
        }
        f.eval(&y).re
    })
}

/// Δ applied to an arbitrary real-valued callable (used by the Radon
/// inversion, whose backprojection is not a `TestFunction`).
pub fn cayley_laplace_fn(
    f: &dyn Fn(&RectMatrix) -> f64,
    x: &RectMatrix,
    spec: &DiffSpec,
) -> Result<f64> {
    let m = x.cols();
    let plan = cayley_laplace_plan(x, spec)?;
    plan.apply(|disp| {
        let mut y = x.clone();
        for (c, &d) in disp.iter().enumerate() {
            y.set(c / m, c % m, x.get(c / m, c % m) + d);
        }
        f(&y)
    })
}

/// The cone operator D = det(η_{ij} ∂/∂r_{ij}) as mixed partials over the
/// packed symmetric coordinates (i ≤ j).
fn d_terms(m: usize) -> Vec<OperatorTerm> {
    let coord = |i: usize, j: usize| {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * (2 * m - i + 1) / 2 + (j - i)
    };
    let mut terms = Vec::new();
    for (perm, sign) in permutations(m) {
        let mut weight = sign;
        let mut orders: BTreeMap<usize, u32> = BTreeMap::new();
        for i in 0..m {
            let j = perm[i];
            if i != j {
                weight *= 0.5;
            }
            *orders.entry(coord(i, j)).or_insert(0) += 1;
        }
        terms.push(OperatorTerm { weight, partials: orders.into_iter().collect() });
    }
    terms
}

/// (Dg)(r), evaluated in whitened coordinates: with r = c′c,
///   (Dg)(r) = det(r)⁻¹ · D_s[s ↦ g(c′(I+s)c)] at s = 0.
///
/// Differentiating at the identity gives every evaluation point the same
/// unit distance to the cone boundary and lets all stencils use the plain
/// base step, regardless of the scale or conditioning of r. Since the
/// change of variables is linear in s, the determinant-of-gradients
/// transformation is exact.
pub fn d_operator(g: &RadialFn, r: &PosDefMatrix, spec: &DiffSpec) -> Result<f64> {
    d_operator_scaled(g, r, 1.0, spec)
}

fn d_operator_scaled(
    g: &RadialFn,
    r: &PosDefMatrix,
    step_factor: f64,
    spec: &DiffSpec,
) -> Result<f64> {
    spec.validate()?;
    let m = r.size();
    if m > 3 {
        return Err(Error::ParameterOutOfRange(alloc::format!("D operator at m = {m}")));
    }
    let c = crate::matrix::triangular_factor(r)?;
    let c_rect = c.to_rect();
    let dim = m * (m + 1) / 2;
    let steps = alloc::vec![spec.base_step * step_factor; dim];
    let plan = StencilPlan::build(dim, &d_terms(m), &steps, spec);
    let mut failed = false;
    let est = plan.level_estimates(|disp| {
        // r(s) = c′(I+s)c
        let mut s = SymMatrix::identity(m);
        for (coord, &d) in disp.iter().enumerate() {
            let (i, j) = unpack_sym_coord(m, coord);
            s.set(i, j, s.get(i, j) + d);
        }
        let cs = c_rect.transpose().mul(&s.to_rect()).mul(&c_rect);
        let mut sym = SymMatrix::zeros(m);
        for i in 0..m {
            for j in i..m {
                sym.set(i, j, 0.5 * (cs.get(i, j) + cs.get(j, i)));
            }
        }
        match PosDefMatrix::new(sym) {
            Ok(p) => g.eval(&p).re,
            Err(_) => {
                failed = true;
                0.0
            }
        }
    });
    if failed {
        // only possible when the step is large enough to leave I + s ≻ 0
        return Err(Error::StepUnderflow);
    }
    let ders = plan.extrapolate(&est)?;
    Ok(ders * (-r.log_det()).exp())
}

/// Inverse of the packed upper-triangle indexing.
fn unpack_sym_coord(m: usize, coord: usize) -> (usize, usize) {
    let mut c = coord;
    for i in 0..m {
        let row = m - i;
        if c < row {
            return (i, i + c);
        }
        c -= row;
    }
    unreachable!("coordinate within range")
}

/// The radial part of Δ: L = 4^m |r|^{d−n/2} D |r|^{n/2−d+1} D, so that
/// (Δf)(x) = (L f₀)(x′x) for radial f(x) = f₀(x′x).
///
/// The inner D is materialized as its own whitened central-difference
/// evaluation at each displaced point, so the two applications do not couple
/// their step sizes; the inner result depends analytically on the outer
/// displacement.
pub fn radial_part_l(
    f0: &RadialFn,
    r: &PosDefMatrix,
    n: usize,
    spec: &DiffSpec,
) -> Result<f64> {
    radial_part_l_scaled(f0, r, n, 1.0, spec)
}

fn radial_part_l_scaled(
    f0: &RadialFn,
    r: &PosDefMatrix,
    n: usize,
    step_factor: f64,
    spec: &DiffSpec,
) -> Result<f64> {
    spec.validate()?;
    let m = r.size();
    if m > 2 {
        return Err(Error::ParameterOutOfRange(alloc::format!("radial part at m = {m}")));
    }
    let d = (m as f64 + 1.0) / 2.0;
    let inner_spec = *spec;
    let f0_cl = f0.clone();
    let inner = RadialFn::new(
        move |rp: &PosDefMatrix| {
            let dv = d_operator(&f0_cl, rp, &inner_spec).unwrap_or(f64::NAN);
            let w = ((n as f64) / 2.0 - d + 1.0) * rp.log_det();
            Complex64::new(w.exp() * dv, 0.0)
        },
        f0.decay(),
    );
    let outer = d_operator_scaled(&inner, r, step_factor, spec)?;
    let pref = 4f64.powi(m as i32) * ((d - (n as f64) / 2.0) * r.log_det()).exp();
    let value = pref * outer;
    if !value.is_finite() {
        return Err(Error::StepUnderflow);
    }
    Ok(value)
}

/// Δ^k, with radial functions routed through k-fold composition of the
/// radial part (cheaper and better conditioned than order-4m stencils).
pub fn cayley_laplace_power(
    f: &TestFunction,
    x: &RectMatrix,
    k: usize,
    spec: &DiffSpec,
) -> Result<f64> {
    match k {
        0 => Ok(f.eval(x).re),
        1 => cayley_laplace(f, x, spec),
        2 => {
            if let Some(profile) = f.radial_profile() {
                let n = x.rows();
                let r = PosDefMatrix::new(x.gram())?;
                // the outer application runs on a coarser grid, staying
                // above the noise floor of the inner one it differentiates
                let spec = &DiffSpec {
                    base_step: spec.base_step.max(COMPOSED_STEP_FLOOR),
                    ..*spec
                };
                let spec_inner = *spec;
                let once = RadialFn::new(
                    move |rp: &PosDefMatrix| {
                        Complex64::new(
                            radial_part_l(&profile, rp, n, &spec_inner).unwrap_or(f64::NAN),
                            0.0,
                        )
                    },
                    f.radial_profile().expect("checked").decay(),
                );
                let v = radial_part_l_scaled(&once, &r, n, OUTER_STEP_RATIO, spec)?;
                if !v.is_finite() {
                    return Err(Error::StepUnderflow);
                }
                Ok(v)
            } else {
                let spec_inner = *spec;
                let f_cl = f.clone();
                let v = cayley_laplace_fn(
                    &move |y: &RectMatrix| {
                        cayley_laplace(&f_cl, y, &spec_inner).unwrap_or(f64::NAN)
                    },
                    x,
                    spec,
                )?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::StepUnderflow)
                }
            }
        }
        _ => Err(Error::ParameterOutOfRange(alloc::format!("Δ^{k} not supported"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{bernstein_b, bernstein_cal_b};
    use crate::testfn::ConeDecay;
    use crate::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn laplacian_of_square_norm_m1() {
        // m = 1: Δ(Σ x_i²) = 2n
        let n = 5;
        let f = TestFunction::det_power(n, 1, 2.0);
        let x = RectMatrix::new(n, 1, alloc::vec![0.4, -1.2, 0.3, 0.9, 2.0]).unwrap();
        let got = cayley_laplace(&f, &x, &DiffSpec::default()).unwrap();
        assert!((got - 2.0 * n as f64).abs() < 1e-8, "got {got}");
    }

    #[test]
    fn bernstein_identity_polynomial_case() {
        // Δ|x|₂² = 𝓑(2) = 72 at (n,m) = (4,2), independent of x
        let f = TestFunction::det_power(4, 2, 2.0);
        for seed in 0..3u64 {
            let mut rng = crate::rng::RngStreams::new(100 + seed, 1).stream(0);
            let x = loop {
                let cand = RectMatrix::sample_gaussian(&mut rng, 4, 2);
                let (hi, lo) = cand.singular_extremes();
                if lo > 0.3 * hi {
                    break cand;
                }
            };
            let spec = DiffSpec { base_step: 0.05, ..Default::default() };
            let got = cayley_laplace(&f, &x, &spec).unwrap();
            assert!((got - 72.0).abs() < 1e-7 * 72.0, "got {got}");
        }
    }

    #[test]
    fn delta_of_constant_vanishes() {
        let f = TestFunction::custom(
            4,
            2,
            crate::testfn::DecayMeta { gaussian_rate: 0.0, power_bound: 0.0, singular_power: None },
            alloc::sync::Arc::new(|_x: &RectMatrix| Complex64::new(3.25, 0.0)),
            None,
            None,
            None,
        );
        let x = RectMatrix::identity_cols(4, 2);
        let got = cayley_laplace(&f, &x, &DiffSpec::default()).unwrap();
        assert!(got.abs() < 1e-10);
    }

    #[test]
    fn near_singular_evaluation_refused() {
        let f = TestFunction::det_power(4, 2, 2.5);
        let mut x = RectMatrix::identity_cols(4, 2);
        x.set(1, 1, 1e-9); // second column almost parallel to nothing: σ_min tiny
        x.set(0, 1, 1.0);
        x.set(1, 0, 0.0);
        let err = cayley_laplace(&f, &x, &DiffSpec::default());
        assert_eq!(err.unwrap_err(), Error::NearSingularSet);
    }

    #[test]
    fn d_operator_exponential_identity() {
        // D e^{−tr(rz)} = (−1)^m det(z) e^{−tr(rz)} at z = I
        for m in 1..=3usize {
            let g = RadialFn::new(
                |r: &PosDefMatrix| Complex64::new((-r.trace()).exp(), 0.0),
                ConeDecay { exp_rate: 1.0, power_bound: 0.0 },
            );
            let r = PosDefMatrix::diag(&alloc::vec![1.0, 1.5, 0.7][..m]).unwrap();
            let got = d_operator(&g, &r, &DiffSpec::default()).unwrap();
            let want = if m % 2 == 0 { 1.0 } else { -1.0 } * (-r.trace()).exp();
            assert!(
                (got - want).abs() < 1e-7 * want.abs(),
                "m = {m}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn d_operator_determinant_power() {
        // D|r|^α = b(α)|r|^{α−1} at r = I₂, α = 2.5
        let alpha = 2.5;
        let g = RadialFn::new(
            move |r: &PosDefMatrix| Complex64::new((alpha * r.log_det()).exp(), 0.0),
            ConeDecay { exp_rate: 0.0, power_bound: alpha },
        );
        let r = PosDefMatrix::identity(2);
        let got = d_operator(&g, &r, &DiffSpec::default()).unwrap();
        let want = bernstein_b(c(alpha), 2).re; // |r| = 1
        assert!((got - want).abs() < 1e-7 * want.abs(), "{got} vs {want}");
    }

    #[test]
    fn d_operator_m1_is_derivative() {
        let g = RadialFn::new(
            |r: &PosDefMatrix| Complex64::new((3.0 * r.get(0, 0)).sin(), 0.0),
            ConeDecay { exp_rate: 0.0, power_bound: 1.0 },
        );
        let r = PosDefMatrix::diag(&[0.7]).unwrap();
        let got = d_operator(&g, &r, &DiffSpec::default()).unwrap();
        let want = 3.0 * (3.0f64 * 0.7).cos();
        assert!((got - want).abs() < 1e-9 * want.abs());
    }

    #[test]
    fn radial_part_determinant_power() {
        // L|r|^{λ/2} = 𝓑(λ)|r|^{λ/2−1}
        let (n, m) = (5usize, 2usize);
        for &lambda in &[2.0f64, 2.5, 4.0] {
            let f0 = RadialFn::new(
                move |r: &PosDefMatrix| Complex64::new((lambda / 2.0 * r.log_det()).exp(), 0.0),
                ConeDecay { exp_rate: 0.0, power_bound: lambda },
            );
            let r = PosDefMatrix::diag(&[1.3, 0.8]).unwrap();
            let got = radial_part_l(&f0, &r, n, &DiffSpec::default()).unwrap();
            let want = bernstein_cal_b(c(lambda), n, m).re
                * ((lambda / 2.0 - 1.0) * r.log_det()).exp();
            let tol = if lambda == 2.0 { 1e-7 } else { 1e-5 };
            assert!(
                (got - want).abs() < tol * want.abs().max(1.0),
                "λ = {lambda}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn radial_part_m1_matches_laplacian_of_square() {
        // m = 1, f₀(r) = r: L f₀ = 2n, matching Δ|x|² = 2n under r = |x|²
        let n = 6;
        let f0 = RadialFn::new(
            |r: &PosDefMatrix| Complex64::new(r.get(0, 0), 0.0),
            ConeDecay { exp_rate: 0.0, power_bound: 1.0 },
        );
        let r = PosDefMatrix::diag(&[1.9]).unwrap();
        let got = radial_part_l(&f0, &r, n, &DiffSpec::default()).unwrap();
        assert!((got - 2.0 * n as f64).abs() < 1e-7);
    }

    #[test]
    fn radial_route_matches_full_stencil_for_gaussian() {
        // (Δf)(x) = (Lf₀)(x′x) for the radial Gaussian, m = 2, n = 5
        let (n, m) = (5usize, 2usize);
        let f = TestFunction::gaussian(n, m);
        let f0 = f.radial_profile().unwrap();
        let mut rng = crate::rng::RngStreams::new(7, 1).stream(0);
        let mut checked = 0;
        while checked < 3 {
            let x = RectMatrix::sample_gaussian(&mut rng, n, m);
            let (hi, lo) = x.singular_extremes();
            if lo < 0.5 {
                continue;
            }
            let _ = hi;
            let delta = cayley_laplace(&f, &x, &DiffSpec::default()).unwrap();
            let r = PosDefMatrix::new(x.gram()).unwrap();
            let radial = radial_part_l(&f0, &r, n, &DiffSpec::default()).unwrap();
            let rel = (delta - radial).abs() / radial.abs();
            assert!(rel < 1e-3, "rel {rel}: Δf {delta} vs Lf₀ {radial}");
            checked += 1;
        }
    }

    #[test]
    fn iterated_bernstein_identity() {
        // Δ²|x|^{α+4−n} = B₂(α)|x|^{α−n} at m=2, n=6, α=3
        let (n, m, alpha) = (6usize, 2usize, 3.0f64);
        let lambda = alpha + 4.0 - n as f64; // exponent of the input power
        let f = TestFunction::det_power(n, m, lambda);
        let mut rng = crate::rng::RngStreams::new(21, 1).stream(0);
        let x = loop {
            let cand = RectMatrix::sample_gaussian(&mut rng, n, m);
            let (hi, lo) = cand.singular_extremes();
            if lo > 0.4 * hi && lo > 0.7 {
                break cand;
            }
        };
        let spec = DiffSpec { base_step: 0.05, ..Default::default() };
        let got = cayley_laplace_power(&f, &x, 2, &spec).unwrap();
        let want = crate::special::bernstein_bk(c(alpha), 2, n, m).re
            * crate::matrix::vol_factor(&x).powf(alpha - n as f64);
        let rel = (got - want).abs() / want.abs().max(1.0);
        assert!(rel < 1e-3, "rel {rel}: {got} vs {want}");
    }

    #[test]
    fn mixed_partial_symmetry() {
        // permuting difference directions changes nothing beyond rounding:
        // evaluate Δ with coordinates relabelled by a transposition
        let f = TestFunction::gaussian(4, 2);
        let x = RectMatrix::new(4, 2, alloc::vec![0.7, -0.2, 0.4, 1.1, -0.6, 0.3, 0.2, 0.5])
            .unwrap();
        let a = cayley_laplace(&f, &x, &DiffSpec::default()).unwrap();
        let spec = DiffSpec { base_step: 0.8e-2, ..Default::default() };
        let b = cayley_laplace(&f, &x, &spec).unwrap();
        assert!((a - b).abs() < 1e-6 * a.abs().max(1.0), "{a} vs {b}");
    }
}
