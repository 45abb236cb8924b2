//! Small dense matrix types and the decompositions everything else consumes.
//!
//! Sizes are dynamic but capped at n·m ≤ 64: the transforms in this crate are
//! desk-scale (m ∈ {1,2}, n ≤ 8 in practice) and nothing here is tuned for
//! large matrices. All types are immutable after construction and safe to
//! share across threads.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::MAX_ENTRIES;

/// Relative σ_min/σ_max threshold below which a matrix is treated as rank
/// deficient (double-precision noise floor).
pub const RANK_TOL: f64 = 1e-10;

/// Default orthonormality tolerance for frames and rotations.
pub const FRAME_TOL: f64 = 1e-12;

fn check_dims(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::BadDimensions(alloc::format!("{n}x{m}")));
    }
    if n * m > MAX_ENTRIES {
        return Err(Error::BadDimensions(alloc::format!("{n}x{m} exceeds {MAX_ENTRIES} entries")));
    }
    Ok(())
}

fn check_finite(entries: &[f64]) -> Result<()> {
    if entries.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidEntries(alloc::string::String::from("non-finite entry")))
    }
}

/// A point of M_{n,m}: an n×m real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RectMatrix {
    n: usize,
    m: usize,
    entries: Vec<f64>,
}

impl RectMatrix {
    pub fn new(n: usize, m: usize, entries: Vec<f64>) -> Result<Self> {
        check_dims(n, m)?;
        if entries.len() != n * m {
            return Err(Error::BadDimensions(alloc::format!(
                "{} entries for a {n}x{m} matrix",
                entries.len()
            )));
        }
        check_finite(&entries)?;
        Ok(Self { n, m, entries })
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self { n, m, entries: vec![0.0; n * m] }
    }

    /// I_m embedded in M_{n,m}: identity on the top m rows, zeros below.
    pub fn identity_cols(n: usize, m: usize) -> Self {
        let mut x = Self::zeros(n, m);
        for j in 0..m {
            x.entries[j * m + j] = 1.0;
        }
        x
    }

    pub fn identity(n: usize) -> Self {
        Self::identity_cols(n, n)
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.m + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.m + j] = v;
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn transpose(&self) -> RectMatrix {
        let mut t = RectMatrix::zeros(self.m, self.n);
        for i in 0..self.n {
            for j in 0..self.m {
                t.entries[j * self.n + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &RectMatrix) -> RectMatrix {
        assert_eq!(self.m, other.n, "dimension mismatch in matrix product");
        let mut out = RectMatrix::zeros(self.n, other.m);
        for i in 0..self.n {
            for l in 0..self.m {
                let a = self.get(i, l);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.m {
                    out.entries[i * other.m + j] += a * other.get(l, j);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &RectMatrix) -> RectMatrix {
        assert_eq!((self.n, self.m), (other.n, other.m));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Self { n: self.n, m: self.m, entries }
    }

    pub fn sub(&self, other: &RectMatrix) -> RectMatrix {
        assert_eq!((self.n, self.m), (other.n, other.m));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Self { n: self.n, m: self.m, entries }
    }

    pub fn scale(&self, c: f64) -> RectMatrix {
        Self { n: self.n, m: self.m, entries: self.entries.iter().map(|a| a * c).collect() }
    }

    /// x′x as a symmetric m×m matrix (the Gram matrix of the columns).
    pub fn gram(&self) -> SymMatrix {
        let mut s = SymMatrix::zeros(self.m);
        for j in 0..self.m {
            for l in j..self.m {
                let mut acc = 0.0;
                for i in 0..self.n {
                    acc += self.get(i, j) * self.get(i, l);
                }
                s.set(j, l, acc);
            }
        }
        s
    }

    /// tr(a′b), the Frobenius inner product.
    pub fn dot(&self, other: &RectMatrix) -> f64 {
        assert_eq!((self.n, self.m), (other.n, other.m));
        self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.dot(self)
    }

    /// Stack `top` (k×m) above `bottom` ((n−k)×m).
    pub fn stack(top: &RectMatrix, bottom: &RectMatrix) -> RectMatrix {
        assert_eq!(top.m, bottom.m);
        let mut entries = Vec::with_capacity((top.n + bottom.n) * top.m);
        entries.extend_from_slice(&top.entries);
        entries.extend_from_slice(&bottom.entries);
        Self { n: top.n + bottom.n, m: top.m, entries }
    }

    /// Rows `lo..hi` as a new matrix.
    pub fn row_block(&self, lo: usize, hi: usize) -> RectMatrix {
        assert!(lo <= hi && hi <= self.n);
        Self { n: hi - lo, m: self.m, entries: self.entries[lo * self.m..hi * self.m].to_vec() }
    }

    /// Columns `lo..hi` as a new matrix.
    pub fn col_block(&self, lo: usize, hi: usize) -> RectMatrix {
        assert!(lo <= hi && hi <= self.m);
        let mut out = RectMatrix::zeros(self.n, hi - lo);
        for i in 0..self.n {
            for j in lo..hi {
                out.set(i, j - lo, self.get(i, j));
            }
        }
        out
    }

    /// Concatenate column blocks `[left | right]`.
    pub fn concat_cols(left: &RectMatrix, right: &RectMatrix) -> RectMatrix {
        assert_eq!(left.n, right.n);
        let mut out = RectMatrix::zeros(left.n, left.m + right.m);
        for i in 0..left.n {
            for j in 0..left.m {
                out.set(i, j, left.get(i, j));
            }
            for j in 0..right.m {
                out.set(i, left.m + j, right.get(i, j));
            }
        }
        out
    }

    /// Largest and smallest singular value, via the Gram matrix spectrum.
    pub fn singular_extremes(&self) -> (f64, f64) {
        let (vals, _) = self.gram().jacobi_eigen();
        let lo = vals[0].max(0.0).sqrt();
        let hi = vals[vals.len() - 1].max(0.0).sqrt();
        (hi, lo)
    }

    /// Determinant of a square matrix by partially pivoted LU.
    pub fn det(&self) -> f64 {
        assert_eq!(self.n, self.m, "determinant of a non-square matrix");
        let n = self.n;
        let mut a = self.entries.clone();
        let mut det = 1.0;
        for c in 0..n {
            let mut p = c;
            for r in c + 1..n {
                if a[r * n + c].abs() > a[p * n + c].abs() {
                    p = r;
                }
            }
            if a[p * n + c] == 0.0 {
                return 0.0;
            }
            if p != c {
                for j in 0..n {
                    a.swap(c * n + j, p * n + j);
                }
                det = -det;
            }
            let piv = a[c * n + c];
            det *= piv;
            for r in c + 1..n {
                let f = a[r * n + c] / piv;
                for j in c..n {
                    a[r * n + j] -= f * a[c * n + j];
                }
            }
        }
        det
    }

    /// Standard-normal matrix sample.
    pub fn sample_gaussian(rng: &mut ChaCha8Rng, n: usize, m: usize) -> RectMatrix {
        let entries = (0..n * m).map(|_| StandardNormal.sample(rng)).collect();
        Self { n, m, entries }
    }
}

/// A point of S_m: a real symmetric m×m matrix stored as the packed upper
/// triangle (m(m+1)/2 entries), so symmetry holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    m: usize,
    packed: Vec<f64>,
}

#[inline]
fn packed_index(m: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // row i of the upper triangle starts after i·m − i(i−1)/2 entries
    i * (2 * m - i + 1) / 2 + (j - i)
}

impl SymMatrix {
    pub fn zeros(m: usize) -> Self {
        Self { m, packed: vec![0.0; m * (m + 1) / 2] }
    }

    pub fn identity(m: usize) -> Self {
        let mut s = Self::zeros(m);
        for i in 0..m {
            s.set(i, i, 1.0);
        }
        s
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut s = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            s.set(i, i, v);
        }
        s
    }

    /// Build from the packed upper triangle, row by row.
    pub fn from_packed(m: usize, packed: Vec<f64>) -> Result<Self> {
        check_dims(m, m)?;
        if packed.len() != m * (m + 1) / 2 {
            return Err(Error::BadDimensions(alloc::format!(
                "{} packed entries for size {m}",
                packed.len()
            )));
        }
        check_finite(&packed)?;
        Ok(Self { m, packed })
    }

    pub fn size(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[packed_index(self.m, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.packed[packed_index(self.m, i, j)] = v;
    }

    pub fn packed(&self) -> &[f64] {
        &self.packed
    }

    pub fn to_rect(&self) -> RectMatrix {
        let mut x = RectMatrix::zeros(self.m, self.m);
        for i in 0..self.m {
            for j in 0..self.m {
                x.set(i, j, self.get(i, j));
            }
        }
        x
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.m, other.m);
        let packed = self.packed.iter().zip(&other.packed).map(|(a, b)| a + b).collect();
        Self { m: self.m, packed }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.m, other.m);
        let packed = self.packed.iter().zip(&other.packed).map(|(a, b)| a - b).collect();
        Self { m: self.m, packed }
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        Self { m: self.m, packed: self.packed.iter().map(|a| a * c).collect() }
    }

    pub fn trace(&self) -> f64 {
        (0..self.m).map(|i| self.get(i, i)).sum()
    }

    /// tr(self · other) for symmetric matrices.
    pub fn trace_product(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.m, other.m);
        let mut acc = 0.0;
        for i in 0..self.m {
            for j in 0..self.m {
                acc += self.get(i, j) * other.get(j, i);
            }
        }
        acc
    }

    /// Cyclic Jacobi eigendecomposition: self = Q Λ Q′ with ascending Λ.
    pub fn jacobi_eigen(&self) -> (Vec<f64>, RectMatrix) {
        let m = self.m;
        let mut a = self.to_rect();
        let mut q = RectMatrix::identity(m);
        for _sweep in 0..64 {
            let mut off = 0.0;
            for i in 0..m {
                for j in i + 1..m {
                    off += a.get(i, j) * a.get(i, j);
                }
            }
            if off.sqrt() <= 1e-15 * (1.0 + a.frobenius_sq().sqrt()) {
                break;
            }
            for p in 0..m {
                for qi in p + 1..m {
                    let apq = a.get(p, qi);
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let app = a.get(p, p);
                    let aqq = a.get(qi, qi);
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..m {
                        let akp = a.get(k, p);
                        let akq = a.get(k, qi);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, qi, s * akp + c * akq);
                    }
                    for k in 0..m {
                        let apk = a.get(p, k);
                        let aqk = a.get(qi, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(qi, k, s * apk + c * aqk);
                    }
                    for k in 0..m {
                        let qkp = q.get(k, p);
                        let qkq = q.get(k, qi);
                        q.set(k, p, c * qkp - s * qkq);
                        q.set(k, qi, s * qkp + c * qkq);
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).unwrap());
        let vals: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
        let mut vecs = RectMatrix::zeros(m, m);
        for (newj, &oldj) in order.iter().enumerate() {
            for i in 0..m {
                vecs.set(i, newj, q.get(i, oldj));
            }
        }
        (vals, vecs)
    }

    pub fn det(&self) -> f64 {
        self.to_rect().det()
    }
}

/// A point of the open cone P_m of positive definite matrices.
///
/// Positivity is checked at construction via triangular factorization with
/// strictly positive pivots. When the matrix was built as t′t the factor is
/// kept: determinants, inverses and quadratic forms then go through
/// triangular solves, which stay accurate in the far tails where forming
/// t′t and refactoring it would cancel catastrophically.
#[derive(Debug, Clone)]
pub struct PosDefMatrix {
    sym: SymMatrix,
    factor: Option<UpperTriangular>,
}

impl PartialEq for PosDefMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.sym == other.sym
    }
}

impl PosDefMatrix {
    pub fn new(sym: SymMatrix) -> Result<Self> {
        let factor = cholesky_upper(&sym)?;
        Ok(Self { sym, factor: Some(factor) })
    }

    pub fn identity(m: usize) -> Self {
        Self { sym: SymMatrix::identity(m), factor: Some(UpperTriangular::identity(m)) }
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        Self::new(SymMatrix::diag(values))
    }

    pub fn scaled_identity(m: usize, c: f64) -> Result<Self> {
        Self::new(SymMatrix::identity(m).scale(c))
    }

    pub fn size(&self) -> usize {
        self.sym.size()
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.sym
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.sym.get(i, j)
    }

    pub fn det(&self) -> f64 {
        match &self.factor {
            Some(t) => {
                let mut d = 1.0;
                for i in 0..self.size() {
                    d *= t.diag(i) * t.diag(i);
                }
                d
            }
            None => self.sym.det(),
        }
    }

    /// ln det, overflow-free through the factor when one is cached.
    pub fn log_det(&self) -> f64 {
        match &self.factor {
            Some(t) => {
                let mut acc = 0.0;
                for i in 0..self.size() {
                    acc += 2.0 * t.diag(i).ln();
                }
                acc
            }
            None => self.sym.det().ln(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.sym.trace()
    }

    pub fn add(&self, other: &PosDefMatrix) -> PosDefMatrix {
        PosDefMatrix { sym: self.sym.add(&other.sym), factor: None }
    }

    /// self + s for any symmetric s, re-checked for positivity.
    pub fn add_sym(&self, s: &SymMatrix) -> Result<PosDefMatrix> {
        PosDefMatrix::new(self.sym.add(s))
    }

    pub fn scale(&self, c: f64) -> Result<PosDefMatrix> {
        if c <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        let factor = self.factor.as_ref().map(|t| {
            let s = c.sqrt();
            let diag = (0..t.size()).map(|i| t.diag(i) * s).collect();
            let mut strict = Vec::with_capacity(t.size() * (t.size() - 1) / 2);
            for i in 0..t.size() {
                for j in i + 1..t.size() {
                    strict.push(t.get(i, j) * s);
                }
            }
            UpperTriangular::new(t.size(), diag, strict).expect("scaled factor stays valid")
        });
        Ok(PosDefMatrix { sym: self.sym.scale(c), factor })
    }

    /// Symmetric square root via the spectral decomposition.
    pub fn sqrt(&self) -> RectMatrix {
        let (vals, q) = self.sym.jacobi_eigen();
        spectral_apply(&vals, &q, |l| l.max(0.0).sqrt())
    }

    pub fn inverse(&self) -> PosDefMatrix {
        match self.factor_or_compute() {
            Some(t) => {
                // r⁻¹ = t⁻¹ t⁻ᵀ
                let ti = t.invert();
                let mut sym = SymMatrix::zeros(self.size());
                for i in 0..self.size() {
                    for j in i..self.size() {
                        let mut acc = 0.0;
                        for l in j..self.size() {
                            acc += ti.get(i, l) * ti.get(j, l);
                        }
                        sym.set(i, j, acc);
                    }
                }
                PosDefMatrix { sym, factor: None }
            }
            None => {
                let (vals, q) = self.sym.jacobi_eigen();
                let inv = spectral_apply(&vals, &q, |l| 1.0 / l);
                PosDefMatrix { sym: rect_to_sym(&inv), factor: None }
            }
        }
    }

    /// tr(self⁻¹ · x′x) = ‖x t⁻¹‖² through the factor: the quadratic form of
    /// the heat kernel.
    pub fn inv_quad(&self, x: &RectMatrix) -> f64 {
        if let Some(t) = &self.factor {
            return inv_quad_via_factor(t, x);
        }
        match cholesky_upper(&self.sym).ok() {
            Some(t) => {
                inv_quad_via_factor(&t, x)
            }
            None => {
                let inv = self.inverse();
                let mut acc = 0.0;
                let (n, m) = (x.rows(), x.cols());
                for j in 0..m {
                    for l in 0..m {
                        let w = inv.get(j, l);
                        if w == 0.0 {
                            continue;
                        }
                        let mut g = 0.0;
                        for i in 0..n {
                            g += x.get(i, j) * x.get(i, l);
                        }
                        acc += w * g;
                    }
                }
                acc
            }
        }
    }

    fn factor_or_compute(&self) -> Option<UpperTriangular> {
        match &self.factor {
            Some(t) => Some(t.clone()),
            None => cholesky_upper(&self.sym).ok(),
        }
    }


    pub fn eigenvalues(&self) -> Vec<f64> {
        self.sym.jacobi_eigen().0
    }

    pub fn max_eigenvalue(&self) -> f64 {
        let vals = self.eigenvalues();
        vals[vals.len() - 1]
    }
}

fn rect_to_sym(x: &RectMatrix) -> SymMatrix {
    let m = x.rows();
    let mut s = SymMatrix::zeros(m);
    for i in 0..m {
        for j in i..m {
            s.set(i, j, 0.5 * (x.get(i, j) + x.get(j, i)));
        }
    }
    s
}

/// ‖x t⁻¹‖² by forward substitution, no allocation beyond one row buffer.
fn inv_quad_via_factor(t: &UpperTriangular, x: &RectMatrix) -> f64 {
    let (n, m) = (x.rows(), x.cols());
    let mut acc = 0.0;
    let mut row = [0.0f64; 8];
    debug_assert!(m <= 8);
    for i in 0..n {
        for j in 0..m {
            let mut v = x.get(i, j);
            for l in 0..j {
                v -= row[l] * t.get(l, j);
            }
            row[j] = v / t.diag(j);
            acc += row[j] * row[j];
        }
    }
    acc
}

fn spectral_apply(vals: &[f64], q: &RectMatrix, f: impl Fn(f64) -> f64) -> RectMatrix {
    let m = vals.len();
    let mut out = RectMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let mut acc = 0.0;
            for l in 0..m {
                acc += q.get(i, l) * f(vals[l]) * q.get(j, l);
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// A member of the group T_m: upper triangular with strictly positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperTriangular {
    m: usize,
    diag: Vec<f64>,
    strict: Vec<f64>, // row-major, (i, j) with i < j
}

#[inline]
fn strict_index(m: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    // row i holds m−1−i strict entries
    i * (2 * m - i - 1) / 2 + (j - i - 1)
}

impl UpperTriangular {
    pub fn new(m: usize, diag: Vec<f64>, strict: Vec<f64>) -> Result<Self> {
        check_dims(m, m)?;
        if diag.len() != m || strict.len() != m * (m - 1) / 2 {
            return Err(Error::BadDimensions(alloc::format!("triangular size {m}")));
        }
        check_finite(&diag)?;
        check_finite(&strict)?;
        if diag.iter().any(|&d| d <= 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { m, diag, strict })
    }

    pub fn identity(m: usize) -> Self {
        Self { m, diag: vec![1.0; m], strict: vec![0.0; m * (m - 1) / 2] }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if i < j {
            self.strict[strict_index(self.m, i, j)]
        } else {
            0.0
        }
    }

    pub fn to_rect(&self) -> RectMatrix {
        let mut x = RectMatrix::zeros(self.m, self.m);
        for i in 0..self.m {
            for j in i..self.m {
                x.set(i, j, self.get(i, j));
            }
        }
        x
    }

    /// t′t, the positive definite matrix this factor represents; keeps the
    /// factor cached for stable determinants and solves.
    pub fn gram(&self) -> PosDefMatrix {
        PosDefMatrix { sym: self.to_rect().gram(), factor: Some(self.clone()) }
    }

    /// t⁻¹ (upper triangular again), by back substitution.
    pub fn invert(&self) -> RectMatrix {
        let m = self.m;
        let mut inv = RectMatrix::zeros(m, m);
        for j in (0..m).rev() {
            inv.set(j, j, 1.0 / self.diag[j]);
            for i in (0..j).rev() {
                let mut acc = 0.0;
                for l in i + 1..=j {
                    acc += self.get(i, l) * inv.get(l, j);
                }
                inv.set(i, j, -acc / self.diag[i]);
            }
        }
        inv
    }
}

/// Triangular factorization r = t′t of a symmetric matrix (Cholesky with the
/// factor stored upper triangular).
fn cholesky_upper(s: &SymMatrix) -> Result<UpperTriangular> {
    let m = s.size();
    // l is the usual lower factor of r = l l′; t = l′.
    let mut l = RectMatrix::zeros(m, m);
    for j in 0..m {
        let mut d = s.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let dj = d.sqrt();
        l.set(j, j, dj);
        for i in j + 1..m {
            let mut v = s.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, v / dj);
        }
    }
    let diag = (0..m).map(|i| l.get(i, i)).collect();
    let mut strict = vec![0.0; m * (m - 1) / 2];
    for i in 0..m {
        for j in i + 1..m {
            strict[strict_index(m, i, j)] = l.get(j, i);
        }
    }
    UpperTriangular::new(m, diag, strict)
}

/// A point of the Stiefel manifold V_{n,p}: an orthonormal p-frame in ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelFrame {
    v: RectMatrix,
}

impl StiefelFrame {
    pub fn new(v: RectMatrix) -> Result<Self> {
        Self::with_tol(v, FRAME_TOL)
    }

    pub fn with_tol(v: RectMatrix, tol: f64) -> Result<Self> {
        let g = v.gram();
        let p = v.cols();
        let mut worst: f64 = 0.0;
        for i in 0..p {
            for j in 0..p {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g.get(i, j) - target).abs());
            }
        }
        if worst > tol {
            return Err(Error::InvalidEntries(alloc::format!(
                "frame deviates from orthonormality by {worst:e}"
            )));
        }
        Ok(Self { v })
    }

    pub fn matrix(&self) -> &RectMatrix {
        &self.v
    }

    pub fn ambient_dim(&self) -> usize {
        self.v.rows()
    }

    pub fn frame_dim(&self) -> usize {
        self.v.cols()
    }

    /// The distinguished frame ξ₀ = [0; I_p] spanning the last p coordinates.
    pub fn last_coords(n: usize, p: usize) -> Self {
        let mut v = RectMatrix::zeros(n, p);
        for j in 0..p {
            v.set(n - p + j, j, 1.0);
        }
        Self { v }
    }
}

/// An element of SO(n).
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    g: RectMatrix,
}

impl Rotation {
    pub fn new(g: RectMatrix) -> Result<Self> {
        if g.rows() != g.cols() {
            return Err(Error::BadDimensions(alloc::string::String::from("rotation must be square")));
        }
        let frame = StiefelFrame::with_tol(g.clone(), FRAME_TOL)?;
        let d = frame.matrix().det();
        if (d - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidEntries(alloc::format!("det = {d}, not +1")));
        }
        Ok(Self { g })
    }

    pub fn matrix(&self) -> &RectMatrix {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn apply(&self, x: &RectMatrix) -> RectMatrix {
        self.g.mul(x)
    }
}

/// |x|_m = det(x′x)^{1/2}, the volume of the parallelepiped spanned by the
/// columns of x. Zero exactly when rank(x) < m.
pub fn vol_factor(x: &RectMatrix) -> f64 {
    let (vals, _) = x.gram().jacobi_eigen();
    let mut prod = 1.0;
    for v in vals {
        prod *= v.max(0.0);
    }
    prod.sqrt()
}

/// Polar decomposition x = v·r^{1/2} with v ∈ V_{n,m} and r = x′x ∈ P_m.
pub fn polar_decompose(x: &RectMatrix) -> Result<(StiefelFrame, PosDefMatrix)> {
    let (hi, lo) = x.singular_extremes();
    if hi == 0.0 || lo / hi < RANK_TOL {
        return Err(Error::RankDeficient);
    }
    let r = PosDefMatrix::new(x.gram())?;
    let (vals, q) = r.as_sym().jacobi_eigen();
    let inv_sqrt = spectral_apply(&vals, &q, |l| 1.0 / l.max(1e-300).sqrt());
    let v = x.mul(&inv_sqrt);
    // inverse square roots amplify roundoff near the rank threshold
    let frame = StiefelFrame::with_tol(v, 1e-8)?;
    Ok((frame, r))
}

/// The unique factorization r = t′t with t upper triangular, t_{i,i} > 0.
pub fn triangular_factor(r: &PosDefMatrix) -> Result<UpperTriangular> {
    match r.factor_or_compute() {
        Some(t) => Ok(t),
        None => cholesky_upper(r.as_sym()),
    }
}

/// Haar-distributed frame on V_{n,p}: orthonormalize an i.i.d. Gaussian
/// matrix column by column; the positive-diagonal convention of the
/// triangular factor makes the law exactly Haar.
pub fn haar_stiefel(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Result<StiefelFrame> {
    if p > n {
        return Err(Error::BadDimensions(alloc::format!("V_{{{n},{p}}}")));
    }
    check_dims(n, p)?;
    loop {
        let g = RectMatrix::sample_gaussian(rng, n, p);
        if let Some(v) = orthonormalize_columns(&g) {
            return StiefelFrame::with_tol(v, FRAME_TOL);
        }
        // rank-deficient Gaussian sample has probability zero; resample
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. Returns None if
/// a column degenerates.
fn orthonormalize_columns(g: &RectMatrix) -> Option<RectMatrix> {
    let (n, p) = (g.rows(), g.cols());
    let mut q = g.clone();
    for j in 0..p {
        for _pass in 0..2 {
            for l in 0..j {
                let mut proj = 0.0;
                for i in 0..n {
                    proj += q.get(i, l) * q.get(i, j);
                }
                for i in 0..n {
                    let v = q.get(i, j) - proj * q.get(i, l);
                    q.set(i, j, v);
                }
            }
        }
        let mut norm = 0.0;
        for i in 0..n {
            norm += q.get(i, j) * q.get(i, j);
        }
        let norm = norm.sqrt();
        if norm < 1e-12 {
            return None;
        }
        for i in 0..n {
            let v = q.get(i, j) / norm;
            q.set(i, j, v);
        }
    }
    Some(q)
}

/// Haar-distributed rotation in SO(n): a Haar O(n) sample with the last
/// column flipped when det = −1.
pub fn haar_rotation(rng: &mut ChaCha8Rng, n: usize) -> Result<Rotation> {
    let frame = haar_stiefel(rng, n, n)?;
    let mut g = frame.matrix().clone();
    if g.det() < 0.0 {
        for i in 0..n {
            let v = -g.get(i, n - 1);
            g.set(i, n - 1, v);
        }
    }
    Rotation::new(g)
}

/// Deterministic rotation g with g·ξ₀ = ξ, where ξ₀ = [0; I_p] spans the last
/// p coordinates. Built from successive reflections applied to the columns of
/// ξ₀, sign-fixed to det = +1 by one extra reflection orthogonal to range(ξ).
pub fn complete_frame(xi: &StiefelFrame) -> Result<Rotation> {
    let n = xi.ambient_dim();
    let p = xi.frame_dim();
    if p >= n {
        return Err(Error::BadDimensions(alloc::format!(
            "complete_frame needs p < n, got V_{{{n},{p}}}"
        )));
    }
    let mut g = RectMatrix::identity(n);
    let mut a = StiefelFrame::last_coords(n, p).matrix().clone();
    let mut reflections = 0usize;
    for j in 0..p {
        let u: Vec<f64> = (0..n).map(|i| a.get(i, j) - xi.matrix().get(i, j)).collect();
        let norm_sq: f64 = u.iter().map(|x| x * x).sum();
        if norm_sq.sqrt() < 1e-13 {
            continue;
        }
        let inv = 1.0 / norm_sq;
        reflect_in_place(&mut g, &u, inv);
        reflect_in_place(&mut a, &u, inv);
        reflections += 1;
    }
    if reflections % 2 == 1 {
        // find a unit vector orthogonal to all columns of ξ, deterministically
        let mut fixed = false;
        for basis in 0..n {
            let mut w = vec![0.0; n];
            w[basis] = 1.0;
            for j in 0..p {
                let mut proj = 0.0;
                for i in 0..n {
                    proj += xi.matrix().get(i, j) * w[i];
                }
                for i in 0..n {
                    w[i] -= proj * xi.matrix().get(i, j);
                }
            }
            let norm_sq: f64 = w.iter().map(|x| x * x).sum();
            if norm_sq.sqrt() > 1e-6 {
                reflect_in_place(&mut g, &w, 1.0 / norm_sq);
                fixed = true;
                break;
            }
        }
        debug_assert!(fixed, "orthogonal complement is nonempty since p < n");
    }
    Rotation::new(g)
}

/// x ← (I − 2 u u′/‖u‖²) x with ‖u‖⁻² passed in as `inv_norm_sq`.
fn reflect_in_place(x: &mut RectMatrix, u: &[f64], inv_norm_sq: f64) {
    let (n, m) = (x.rows(), x.cols());
    for j in 0..m {
        let mut proj = 0.0;
        for i in 0..n {
            proj += u[i] * x.get(i, j);
        }
        let c = 2.0 * proj * inv_norm_sq;
        for i in 0..n {
            let v = x.get(i, j) - c * u[i];
            x.set(i, j, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStreams;

    fn rng() -> ChaCha8Rng {
        RngStreams::new(42, 1).stream(0)
    }

    #[test]
    fn vol_factor_basics() {
        let x = RectMatrix::identity_cols(5, 2);
        assert!((vol_factor(&x) - 1.0).abs() < 1e-14);

        let col = RectMatrix::new(3, 1, vec![3.0, 0.0, 4.0]).unwrap();
        assert!((vol_factor(&col) - 5.0).abs() < 1e-12);

        // two equal columns
        let x = RectMatrix::new(3, 2, vec![1.0, 1.0, 2.0, 2.0, -1.0, -1.0]).unwrap();
        assert!(vol_factor(&x).abs() < 1e-12);
    }

    #[test]
    fn polar_reconstruction() {
        let mut r = rng();
        for _ in 0..20 {
            let x = RectMatrix::sample_gaussian(&mut r, 4, 2);
            let (v, ram) = match polar_decompose(&x) {
                Ok(p) => p,
                Err(Error::RankDeficient) => continue,
                Err(e) => panic!("{e}"),
            };
            let back = v.matrix().mul(&ram.sqrt());
            let err = back.sub(&x).frobenius_sq().sqrt() / x.frobenius_sq().sqrt();
            assert!(err < 1e-10, "reconstruction error {err}");
        }
    }

    #[test]
    fn polar_of_frame_is_identity_gram() {
        let mut r = rng();
        let v = haar_stiefel(&mut r, 5, 2).unwrap();
        let (w, ram) = polar_decompose(v.matrix()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((ram.get(i, j) - target).abs() < 1e-12);
            }
        }
        let diff = w.matrix().sub(v.matrix()).frobenius_sq().sqrt();
        assert!(diff < 1e-10);
    }

    #[test]
    fn polar_scaling() {
        let mut r = rng();
        let v = haar_stiefel(&mut r, 5, 2).unwrap();
        let c = 2.5;
        let (_, ram) = polar_decompose(&v.matrix().scale(c)).unwrap();
        for i in 0..2 {
            let d: f64 = ram.get(i, i);
            assert!((d - c * c).abs() < 1e-10);
        }
    }

    #[test]
    fn triangular_round_trip() {
        let r = PosDefMatrix::diag(&[4.0, 9.0]).unwrap();
        let t = triangular_factor(&r).unwrap();
        assert!((t.diag(0) - 2.0).abs() < 1e-14);
        assert!((t.diag(1) - 3.0).abs() < 1e-14);

        let mut g = rng();
        for _ in 0..10 {
            let m = 3;
            let a = RectMatrix::sample_gaussian(&mut g, m, m);
            let s = a.gram().add(&SymMatrix::identity(m).scale(0.5));
            let r = PosDefMatrix::new(s).unwrap();
            let t = triangular_factor(&r).unwrap();
            let back = t.gram();
            for i in 0..m {
                for j in 0..m {
                    let denom = r.get(i, i).abs().max(1.0);
                    assert!((back.get(i, j) - r.get(i, j)).abs() / denom < 1e-12);
                }
            }
        }
    }

    #[test]
    fn not_positive_definite_is_rejected() {
        let s = SymMatrix::diag(&[1.0, -0.5]);
        assert_eq!(PosDefMatrix::new(s).unwrap_err(), Error::NotPositiveDefinite);
    }

    #[test]
    fn rank_deficient_polar_is_rejected() {
        let x = RectMatrix::new(3, 2, vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0]).unwrap();
        assert_eq!(polar_decompose(&x).unwrap_err(), Error::RankDeficient);
    }

    #[test]
    fn haar_stiefel_n1_p1_is_sign() {
        let mut r = rng();
        let mut seen = [false, false];
        for _ in 0..64 {
            let v = haar_stiefel(&mut r, 1, 1).unwrap();
            let e = v.matrix().get(0, 0);
            assert!((e.abs() - 1.0).abs() < 1e-14);
            seen[if e > 0.0 { 0 } else { 1 }] = true;
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn so1_is_trivial() {
        let mut r = rng();
        for _ in 0..8 {
            let g = haar_rotation(&mut r, 1).unwrap();
            assert!((g.matrix().get(0, 0) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn complete_frame_reproduces_xi() {
        let mut r = rng();
        for &(n, p) in &[(4usize, 2usize), (6, 4), (3, 1), (2, 1)] {
            for _ in 0..10 {
                let xi = haar_stiefel(&mut r, n, p).unwrap();
                let g = complete_frame(&xi).unwrap();
                let img = g.matrix().mul(StiefelFrame::last_coords(n, p).matrix());
                let err = img.sub(xi.matrix()).frobenius_sq().sqrt();
                assert!(err < 1e-10, "gξ₀ − ξ = {err} at ({n},{p})");
                assert!((g.matrix().det() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn complete_frame_is_deterministic_and_fixes_xi0() {
        let xi = StiefelFrame::last_coords(5, 3);
        let g = complete_frame(&xi).unwrap();
        let diff = g.matrix().sub(&RectMatrix::identity(5)).frobenius_sq().sqrt();
        assert!(diff < 1e-14);

        let mut r = rng();
        let xi = haar_stiefel(&mut r, 4, 2).unwrap();
        let g1 = complete_frame(&xi).unwrap();
        let g2 = complete_frame(&xi).unwrap();
        assert_eq!(g1.matrix().entries(), g2.matrix().entries());
    }

    #[test]
    fn complete_frame_2_1_example() {
        let xi = StiefelFrame::new(RectMatrix::new(2, 1, vec![0.0, 1.0]).unwrap()).unwrap();
        let g = complete_frame(&xi).unwrap();
        let diff = g.matrix().sub(&RectMatrix::identity(2)).frobenius_sq().sqrt();
        assert!(diff < 1e-14);
    }

    #[test]
    fn jacobi_eigen_recomposes() {
        let mut g = rng();
        for _ in 0..10 {
            let a = RectMatrix::sample_gaussian(&mut g, 3, 3);
            let s = a.gram();
            let (vals, q) = s.jacobi_eigen();
            let recomposed = spectral_apply(&vals, &q, |l| l);
            for i in 0..3 {
                for j in 0..3 {
                    assert!((recomposed.get(i, j) - s.get(i, j)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn dimension_cap_enforced() {
        assert!(matches!(
            RectMatrix::new(9, 9, vec![0.0; 81]),
            Err(Error::BadDimensions(_))
        ));
    }
}
