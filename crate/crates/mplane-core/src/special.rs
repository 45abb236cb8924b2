//! Closed-form special functions: the scalar gamma function on ℂ, the Siegel
//! gamma and beta functions of the cone P_m, Pochhammer symbols, Bernstein
//! polynomials, and the named normalization constants of the zeta/Riesz/Radon
//! machinery.
//!
//! Gamma poles are values, not errors: identity checkers have to distinguish
//! a pole from an overflow, so every function that can pole returns a
//! [`GammaValue`].

use num_traits::Float;

use crate::error::{Error, Result};
use crate::Complex64;

pub mod kbessel;

pub use kbessel::{k_bessel, k_bessel_via, KBesselRoute};

const PI: f64 = core::f64::consts::PI;

/// Lanczos coefficients, g = 607/128, 15 terms (Godfrey). Relative error is
/// a few ulps across the strip used by the identity suites.
const LANCZOS_G: f64 = 4.7421875;
const LANCZOS_C: [f64; 15] = [
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    3.3994649984811888699e-5,
    4.6523628927048575665e-5,
    -9.8374475304879564677e-5,
    1.5808870322491248884e-4,
    -2.1026444172410488319e-4,
    2.1743961811521264320e-4,
    -1.6431810653676389022e-4,
    8.4418223983852743293e-5,
    -2.6190838401581408670e-5,
    3.6899182659531622704e-6,
];

/// Γ(z) for complex z via Lanczos with reflection for Re z < 1/2.
/// Returns ∞/NaN components at the nonpositive-integer poles; callers that
/// care use [`GammaValue`]-producing wrappers instead.
pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z) Γ(1−z) = π / sin(πz)
        let pi_z = z * PI;
        return PI / (pi_z.sin() * gamma(Complex64::new(1.0, 0.0) - z));
    }
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_C[0], 0.0);
    for (k, &c) in LANCZOS_C.iter().enumerate().skip(1) {
        acc += c / (zm1 + k as f64);
    }
    let w = zm1 + LANCZOS_G + 0.5;
    let sqrt_two_pi = (2.0 * PI).sqrt();
    sqrt_two_pi * w.powc(zm1 + 0.5) * (-w).exp() * acc
}

pub fn gamma_real(x: f64) -> f64 {
    gamma(Complex64::new(x, 0.0)).re
}

/// Either a finite gamma value or a pole marker carrying the index j of the
/// offending factor Γ(α − j/2).
#[derive(Debug, Clone, PartialEq)]
pub enum GammaValue {
    Value(Complex64),
    Pole { factor: usize },
}

impl GammaValue {
    pub fn value(&self) -> Result<Complex64> {
        match self {
            GammaValue::Value(v) => Ok(*v),
            GammaValue::Pole { factor } => Err(Error::Pole { factor: *factor }),
        }
    }

    pub fn is_pole(&self) -> bool {
        matches!(self, GammaValue::Pole { .. })
    }

    pub fn real(&self) -> Result<f64> {
        self.value().map(|v| v.re)
    }
}

/// Tolerance for snapping α − j/2 to a nonpositive integer when detecting
/// poles.
const POLE_TOL: f64 = 1e-9;

fn is_pole_point(w: Complex64) -> bool {
    if w.im.abs() > POLE_TOL {
        return false;
    }
    let r = w.re.round();
    r <= 0.0 && (w.re - r).abs() <= POLE_TOL
}

/// Siegel gamma function of the cone P_m:
/// Γ_m(α) = π^{m(m−1)/4} ∏_{j=0}^{m−1} Γ(α − j/2).
pub fn siegel_gamma(m: usize, alpha: Complex64) -> GammaValue {
    assert!(m >= 1);
    for j in 0..m {
        if is_pole_point(alpha - 0.5 * j as f64) {
            return GammaValue::Pole { factor: j };
        }
    }
    let mut acc = Complex64::new(PI.powf(m as f64 * (m as f64 - 1.0) / 4.0), 0.0);
    for j in 0..m {
        acc *= gamma(alpha - 0.5 * j as f64);
    }
    GammaValue::Value(acc)
}

pub fn siegel_gamma_real(m: usize, alpha: f64) -> Result<f64> {
    siegel_gamma(m, Complex64::new(alpha, 0.0)).real()
}

/// Beta function of the cone: B_m(α, β) = Γ_m(α) Γ_m(β) / Γ_m(α + β).
pub fn siegel_beta(m: usize, alpha: Complex64, beta: Complex64) -> GammaValue {
    let ga = match siegel_gamma(m, alpha) {
        GammaValue::Value(v) => v,
        pole => return pole,
    };
    let gb = match siegel_gamma(m, beta) {
        GammaValue::Value(v) => v,
        pole => return pole,
    };
    match siegel_gamma(m, alpha + beta) {
        GammaValue::Value(gab) => GammaValue::Value(ga * gb / gab),
        // a pole downstairs makes the ratio zero, not a pole
        GammaValue::Pole { .. } => GammaValue::Value(Complex64::new(0.0, 0.0)),
    }
}

/// Pochhammer symbol (λ, m) = λ(λ+1)⋯(λ+m−1); empty product for m = 0.
pub fn pochhammer(lambda: Complex64, m: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for i in 0..m {
        acc *= lambda + i as f64;
    }
    acc
}

/// Bernstein polynomial of the determinant:
/// b(α) = α(α + 1/2)⋯(α + d − 1) with d = (m+1)/2, m factors stepping by 1/2,
/// so that D|r|^α = b(α)|r|^{α−1}.
pub fn bernstein_b(alpha: Complex64, m: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for i in 0..m {
        acc *= alpha + 0.5 * i as f64;
    }
    acc
}

/// The Bernstein polynomial of Δ|x|^λ = 𝓑(λ)|x|^{λ−2}:
/// 𝓑(λ) = (−1)^m ∏_{i=0}^{m−1} (λ + i)(2 − n − λ + i).
pub fn bernstein_cal_b(lambda: Complex64, n: usize, m: usize) -> Complex64 {
    let mut acc = Complex64::new(if m % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    for i in 0..m {
        acc *= lambda + i as f64;
        acc *= Complex64::new(2.0 - n as f64 + i as f64, 0.0) - lambda;
    }
    acc
}

/// The iterated Bernstein polynomial of Δ^k |x|^{α+2k−n} = B_k(α)|x|^{α−n}:
/// B_k(α) = ∏_{i=0}^{m−1} ∏_{j=0}^{k−1} (α − i + 2j)(α − n + 2 + 2j + i),
/// symmetric under α ↦ n − α − 2k.
pub fn bernstein_bk(alpha: Complex64, k: usize, n: usize, m: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for i in 0..m {
        for j in 0..k {
            acc *= alpha - i as f64 + 2.0 * j as f64;
            acc *= alpha - n as f64 + 2.0 + 2.0 * j as f64 + i as f64;
        }
    }
    acc
}

/// Normalizing constant of the Riesz potential:
/// γ_{n,m}(α) = 2^{αm} π^{nm/2} Γ_m(α/2) / Γ_m((n−α)/2).
///
/// Poles of Γ_m((n−α)/2) (α = n−m+1, n−m+2, …) and of Γ_m(α/2) both
/// degenerate the normalization and are reported as pole markers.
pub fn riesz_const(n: usize, m: usize, alpha: Complex64) -> GammaValue {
    let num = match siegel_gamma(m, alpha * 0.5) {
        GammaValue::Value(v) => v,
        pole => return pole,
    };
    let den = match siegel_gamma(m, (Complex64::new(n as f64, 0.0) - alpha) * 0.5) {
        GammaValue::Value(v) => v,
        pole => return pole,
    };
    let nm = (n * m) as f64;
    let pref = Complex64::new(2.0, 0.0).powc(alpha * m as f64) * PI.powf(nm / 2.0);
    GammaValue::Value(pref * num / den)
}

/// Total Haar volume of the Stiefel manifold: σ_{n,m} = 2^m π^{nm/2} / Γ_m(n/2).
pub fn stiefel_volume(n: usize, m: usize) -> f64 {
    assert!(n >= m && m >= 1);
    let g = siegel_gamma_real(m, n as f64 / 2.0).expect("Γ_m(n/2) is finite for n ≥ m");
    2f64.powi(m as i32) * PI.powf((n * m) as f64 / 2.0) / g
}

/// The named constants that keep reappearing in the zeta, Riesz and Radon
/// formulas. Each evaluates its closed form exactly, propagating pole
/// markers (and, for `CLambda`, a domain violation) instead of overflowing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedConst {
    /// c_{n,m} = π^{nm/2} / Γ_m(n/2), the normalized zeta of the Gaussian.
    CNm { n: usize, m: usize },
    /// γ₁ = 2^{−km} π^{−km/2} Γ_m((n−k)/2) / Γ_m(n/2), the Fuglede constant.
    Gamma1 { n: usize, m: usize, k: usize },
    /// γ₂ = 2^{−k(m+1)} π^{−k(m+n)/2} Γ_k((n−m)/2), the frame form of I^k.
    Gamma2 { n: usize, m: usize, k: usize },
    /// c₁ = 2^{−k} π^{(nm−km−nk)/2} Γ_k(n/2) / Γ_m(n/2), the ζ_k measure constant.
    C1 { n: usize, m: usize, k: usize },
    /// c₂ = π^{(m−k)(n/2−k)} / (Γ_k(k/2) Γ_{m−k}((n−k)/2)), the block route.
    C2 { n: usize, m: usize, k: usize },
    /// c_λ = π^{nm/2} Γ_m((λ−k)/2) / (Γ_m(n/2) Γ_m(λ/2)), weighted-identity
    /// constant; requires λ > k+m−1.
    CLambda { n: usize, m: usize, k: usize, lambda: f64 },
}

pub fn named_const(id: NamedConst) -> GammaValue {
    match id {
        NamedConst::CNm { n, m } => scale_ratio(
            PI.powf((n * m) as f64 / 2.0),
            siegel_gamma(m, half(n)),
        ),
        NamedConst::Gamma1 { n, m, k } => {
            let pref = 2f64.powf(-((k * m) as f64)) * PI.powf(-((k * m) as f64) / 2.0);
            let num = match siegel_gamma(m, half_diff(n, k)) {
                GammaValue::Value(v) => v,
                pole => return pole,
            };
            scale_ratio(pref, siegel_gamma(m, half(n))).map_value(|inv| num * inv)
        }
        NamedConst::Gamma2 { n, m, k } => {
            let pref =
                2f64.powf(-((k * (m + 1)) as f64)) * PI.powf(-((k * (m + n)) as f64) / 2.0);
            match siegel_gamma(k, half_diff(n, m)) {
                GammaValue::Value(v) => GammaValue::Value(pref * v),
                pole => pole,
            }
        }
        NamedConst::C1 { n, m, k } => {
            let e = (n * m) as f64 - (k * m) as f64 - (n * k) as f64;
            let pref = 2f64.powf(-(k as f64)) * PI.powf(e / 2.0);
            let num = match siegel_gamma(k, half(n)) {
                GammaValue::Value(v) => v,
                pole => return pole,
            };
            scale_ratio(pref, siegel_gamma(m, half(n))).map_value(|inv| num * inv)
        }
        NamedConst::C2 { n, m, k } => {
            assert!(k < m, "block route needs k < m");
            let pref = PI.powf((m - k) as f64 * (n as f64 / 2.0 - k as f64));
            let g1 = match siegel_gamma(k, half(k)) {
                GammaValue::Value(v) => v,
                pole => return pole,
            };
            let g2 = match siegel_gamma(m - k, half_diff(n, k)) {
                GammaValue::Value(v) => v,
                pole => return pole,
            };
            GammaValue::Value(pref / (g1 * g2))
        }
        NamedConst::CLambda { n, m, k, lambda } => {
            if lambda <= (k + m - 1) as f64 {
                // outside the validity range λ > k+m−1 the defining integral
                // diverges; flag like a pole so checkers skip it
                return GammaValue::Pole { factor: 0 };
            }
            let num = match siegel_gamma(m, Complex64::new((lambda - k as f64) / 2.0, 0.0)) {
                GammaValue::Value(v) => v,
                pole => return pole,
            };
            let gn = match siegel_gamma(m, half(n)) {
                GammaValue::Value(v) => v,
                pole => return pole,
            };
            let gl = match siegel_gamma(m, Complex64::new(lambda / 2.0, 0.0)) {
                GammaValue::Value(v) => v,
                pole => return pole,
            };
            GammaValue::Value(PI.powf((n * m) as f64 / 2.0) * num / (gn * gl))
        }
    }
}

impl GammaValue {
    fn map_value(self, f: impl FnOnce(Complex64) -> Complex64) -> GammaValue {
        match self {
            GammaValue::Value(v) => GammaValue::Value(f(v)),
            pole => pole,
        }
    }
}

fn half(n: usize) -> Complex64 {
    Complex64::new(n as f64 / 2.0, 0.0)
}

fn half_diff(n: usize, k: usize) -> Complex64 {
    Complex64::new((n as f64 - k as f64) / 2.0, 0.0)
}

/// pref / Γ, with pole propagation.
fn scale_ratio(pref: f64, g: GammaValue) -> GammaValue {
    match g {
        GammaValue::Value(v) => GammaValue::Value(pref / v),
        pole => pole,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn scalar_gamma_reference_values() {
        assert!((gamma_real(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma_real(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_real(6.0) - 120.0).abs() < 1e-12);
        // Γ(−1.5) = 4√π/3
        assert!((gamma_real(-1.5) - 4.0 * PI.sqrt() / 3.0).abs() < 1e-12);
        // complex conjugate symmetry
        let z = Complex64::new(2.3, 1.1);
        let g = gamma(z);
        let gc = gamma(z.conj());
        assert!((g - gc.conj()).norm() < 1e-12 * g.norm());
    }

    #[test]
    fn siegel_gamma_small_values() {
        // Γ_1(2) = 1
        assert!((siegel_gamma_real(1, 2.0).unwrap() - 1.0).abs() < 1e-14);
        // Γ_2(3/2) = π^{1/2} Γ(3/2) Γ(1) = π/2
        assert!((siegel_gamma_real(2, 1.5).unwrap() - PI / 2.0).abs() < 1e-13);
        // Γ_2(2) = π^{1/2} Γ(2) Γ(3/2) = π/2
        assert!((siegel_gamma_real(2, 2.0).unwrap() - PI / 2.0).abs() < 1e-13);
        // pole at α = 1/2 for m = 2 comes from factor j = 1
        assert_eq!(siegel_gamma(2, c(0.5)), GammaValue::Pole { factor: 1 });
    }

    #[test]
    fn siegel_beta_values_and_symmetry() {
        assert!((siegel_beta(1, c(1.0), c(1.0)).real().unwrap() - 1.0).abs() < 1e-14);
        // B_2(2,2) = Γ_2(2)²/Γ_2(4) = (π/2)²/(π^{1/2}·6·Γ(7/2)) = π/45
        let b = siegel_beta(2, c(2.0), c(2.0)).real().unwrap();
        assert!((b - PI / 45.0).abs() < 1e-14, "B_2(2,2) = {b}");
        let x = Complex64::new(1.7, 0.3);
        let y = Complex64::new(2.2, -0.8);
        let bxy = siegel_beta(2, x, y).value().unwrap();
        let byx = siegel_beta(2, y, x).value().unwrap();
        assert!((bxy - byx).norm() < 1e-13 * bxy.norm());
    }

    #[test]
    fn pochhammer_and_gamma_identity() {
        assert!((pochhammer(c(2.0), 3) - c(24.0)).norm() < 1e-12);
        assert!((pochhammer(c(7.3), 1) - c(7.3)).norm() < 1e-14);
        assert_eq!(pochhammer(c(3.0), 0), c(1.0));

        // (−1)^m Γ_m(1−α/2)/Γ_m(−α/2) = 2^{−m}(α, m) at α = 1.3, m = 2
        let alpha = 1.3;
        let m = 2;
        let lhs = siegel_gamma(m, c(1.0 - alpha / 2.0)).value().unwrap()
            / siegel_gamma(m, c(-alpha / 2.0)).value().unwrap();
        let lhs = lhs * if m % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = pochhammer(c(alpha), m) * 2f64.powi(-(m as i32));
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn gamma_splitting_identities() {
        // Γ_m(α) = π^{k(m−k)/2} Γ_k(α) Γ_{m−k}(α − k/2), m = 3, k = 1
        let alpha = Complex64::new(2.7, 0.4);
        let lhs = siegel_gamma(3, alpha).value().unwrap();
        let rhs = PI.powf(1.0)
            * siegel_gamma(1, alpha).value().unwrap()
            * siegel_gamma(2, alpha - 0.5).value().unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * lhs.norm());

        // Γ_m(α)/Γ_m(α+k/2) = Γ_k(α+(k−m)/2)/Γ_k(α+k/2), m = 3, k = 1
        let l = siegel_gamma(3, alpha).value().unwrap()
            / siegel_gamma(3, alpha + 0.5).value().unwrap();
        let r = siegel_gamma(1, alpha - 1.0).value().unwrap()
            / siegel_gamma(1, alpha + 0.5).value().unwrap();
        assert!((l - r).norm() < 1e-12 * l.norm());
    }

    #[test]
    fn bernstein_polynomials() {
        // d = 1 at m = 1
        assert_eq!(bernstein_b(c(3.25), 1), c(3.25));
        // m = 2: α(α + 1/2)
        let a = c(1.2);
        assert!((bernstein_b(a, 2) - a * (a + 0.5)).norm() < 1e-14);
        assert_eq!(bernstein_b(c(0.0), 3), c(0.0));

        // m = 1: 𝓑(λ) = λ(λ+n−2)
        let lam = c(2.5);
        let n = 5;
        assert!((bernstein_cal_b(lam, n, 1) - lam * (lam + (n as f64 - 2.0))).norm() < 1e-12);
        // 𝓑(2) = 72 at (n,m) = (4,2)
        assert!((bernstein_cal_b(c(2.0), 4, 2) - c(72.0)).norm() < 1e-12);
        assert_eq!(bernstein_cal_b(c(0.0), 6, 2), c(0.0));

        // 𝓑(λ) = 4^m b(λ/2) b((n+λ)/2 − (m+1)/2) exactly
        for &(n, m) in &[(4usize, 2usize), (6, 2), (5, 1)] {
            let lam = Complex64::new(1.37, 0.21);
            let d = (m as f64 + 1.0) / 2.0;
            let lhs = bernstein_cal_b(lam, n, m);
            let rhs = 4f64.powi(m as i32)
                * bernstein_b(lam * 0.5, m)
                * bernstein_b((lam + n as f64) * 0.5 - d, m);
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn bernstein_bk_values() {
        assert_eq!(bernstein_bk(c(1.9), 0, 4, 2), c(1.0));
        // B_1(α) matches 𝓑 at the shifted argument: 𝓑(α+2−n) = B_1(α)
        let alpha = c(2.5);
        let (n, m) = (4usize, 2usize);
        let via_cal = bernstein_cal_b(alpha + 2.0 - n as f64, n, m);
        let direct = bernstein_bk(alpha, 1, n, m);
        assert!((via_cal - direct).norm() < 1e-12 * (1.0 + direct.norm()));
        // symmetry B_k(α) = B_k(n − α − 2k) at (α,k,n,m) = (1.7, 2, 6, 2)
        let a = c(1.7);
        let (k, n, m) = (2usize, 6usize, 2usize);
        let s = c(n as f64) - a - 2.0 * k as f64;
        let l = bernstein_bk(a, k, n, m);
        let r = bernstein_bk(s, k, n, m);
        assert!((l - r).norm() < 1e-12 * (1.0 + l.norm()));
    }

    #[test]
    fn riesz_const_poles_and_reduction() {
        // m = 1 reduction: 2^α π^{n/2} Γ(α/2)/Γ((n−α)/2)
        let (n, alpha) = (5usize, 1.8);
        let got = riesz_const(n, 1, c(alpha)).real().unwrap();
        let want = 2f64.powf(alpha) * PI.powf(n as f64 / 2.0) * gamma_real(alpha / 2.0)
            / gamma_real((n as f64 - alpha) / 2.0);
        assert!((got - want).abs() < 1e-12 * want.abs());
        // first pole at α = n−m+1
        assert!(riesz_const(4, 2, c(3.0)).is_pole());
        assert!(!riesz_const(6, 2, c(2.0)).is_pole());
    }

    #[test]
    fn stiefel_volumes() {
        // σ_{3,1} = 4π (area of S²)
        assert!((stiefel_volume(3, 1) - 4.0 * PI).abs() < 1e-12);
        // σ_{n,1} = 2π^{n/2}/Γ(n/2)
        for n in 1..=8 {
            let want = 2.0 * PI.powf(n as f64 / 2.0) / gamma_real(n as f64 / 2.0);
            assert!((stiefel_volume(n, 1) - want).abs() < 1e-12 * want);
        }
        // σ_{4,2} = 4π⁴/Γ_2(2) = 8π³
        let want = 4.0 * PI.powi(4) / (PI / 2.0);
        assert!((stiefel_volume(4, 2) - want).abs() < 1e-10);
    }

    #[test]
    fn named_constants() {
        // c_{4,2} = π⁴/Γ_2(2) = 2π³
        let c42 = named_const(NamedConst::CNm { n: 4, m: 2 }).real().unwrap();
        assert!((c42 - 2.0 * PI.powi(3)).abs() < 1e-12 * c42);
        // γ₁ poles at k = n
        assert!(named_const(NamedConst::Gamma1 { n: 4, m: 2, k: 4 }).is_pole());
        // c_λ domain check
        assert!(named_const(NamedConst::CLambda { n: 4, m: 2, k: 1, lambda: 2.0 }).is_pole());
        assert!(!named_const(NamedConst::CLambda { n: 4, m: 2, k: 1, lambda: 5.0 }).is_pole());
    }
}
