//! Pauli and Dirac matrices and the handful of closed forms built from them.
//!
//! Everything here is dense 2×2 or 4×4 complex arithmetic on stack arrays.
//! `dim` is the spinor dimension: 2 for the planar operator, 4 for the
//! three-dimensional one.

use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_traits::Float;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense complex matrix of size 2 or 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMatrix {
    dim: usize,
    m: [[Complex64; 4]; 4],
}

/// Complex spinor with 2 or 4 components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    dim: usize,
    c: [Complex64; 4],
}

/// Real unit vector in 2 or 3 dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector {
    dim: usize,
    c: [f64; 3],
}

/// Spinor dimension `2^(d-1)` for spatial dimension `d`.
pub fn spinor_dim(d: usize) -> Result<usize> {
    match d {
        2 => Ok(2),
        3 => Ok(4),
        _ => Err(Error::arg("dimension", "spatial dimension must be 2 or 3")),
    }
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::arg("dim", "matrix dimension must be 2 or 4"));
        }
        Ok(CMatrix { dim, m: [[ZERO; 4]; 4] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut out = Self::zeros(dim)?;
        for i in 0..dim {
            out.m[i][i] = ONE;
        }
        Ok(out)
    }

    /// Builds a matrix from row-major entries; `rows.len()` must be 2 or 4 and square.
    pub fn from_rows(rows: &[&[Complex64]]) -> Result<Self> {
        let mut out = Self::zeros(rows.len())?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != rows.len() {
                return Err(Error::arg("rows", "matrix must be square"));
            }
            out.m[i][..row.len()].copy_from_slice(row);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at zero-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        assert!(row < self.dim && col < self.dim, "index out of range");
        self.m[row][col]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut().take(self.dim) {
            for v in row.iter_mut().take(self.dim) {
                *v *= s;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.m[i][j] = self.m[j][i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.m[i][i]).sum()
    }

    pub fn apply(&self, s: &Spinor) -> Spinor {
        assert_eq!(self.dim, s.dim, "matrix/spinor dimension mismatch");
        let mut c = [ZERO; 4];
        for (i, out) in c.iter_mut().enumerate().take(self.dim) {
            let mut acc = ZERO;
            for j in 0..self.dim {
                acc += self.m[i][j] * s.c[j];
            }
            *out = acc;
        }
        Spinor { dim: self.dim, c }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }
}

impl Mul for CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let mut out = CMatrix { dim: self.dim, m: [[ZERO; 4]; 4] };
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = ZERO;
                for l in 0..self.dim {
                    acc += self.m[i][l] * rhs.m[l][j];
                }
                out.m[i][j] = acc;
            }
        }
        out
    }
}

impl Add for CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let mut out = self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.m[i][j] += rhs.m[i][j];
            }
        }
        out
    }
}

impl Sub for CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: CMatrix) -> CMatrix {
        self + rhs.scale(-ONE)
    }
}

impl Spinor {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::arg("dim", "spinor dimension must be 2 or 4"));
        }
        Ok(Spinor { dim, c: [ZERO; 4] })
    }

    pub fn from_slice(c: &[Complex64]) -> Result<Self> {
        let mut s = Self::zeros(c.len())?;
        s.c[..c.len()].copy_from_slice(c);
        Ok(s)
    }

    /// The `i`-th standard basis spinor.
    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        let mut s = Self::zeros(dim)?;
        if i >= dim {
            return Err(Error::arg("index", "basis index out of range"));
        }
        s.c[i] = ONE;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Complex64] {
        &self.c[..self.dim]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// Returns `self / |self|`; errors on the zero spinor.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::arg("spinor", "cannot normalize a zero or non-finite spinor"));
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        for v in out.c.iter_mut().take(self.dim) {
            *v *= s;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Add for Spinor {
    type Output = Spinor;

    fn add(self, rhs: Spinor) -> Spinor {
        assert_eq!(self.dim, rhs.dim, "spinor dimension mismatch");
        let mut out = self;
        for (a, b) in out.c.iter_mut().zip(rhs.c.iter()) {
            *a += *b;
        }
        out
    }
}

impl Sub for Spinor {
    type Output = Spinor;

    fn sub(self, rhs: Spinor) -> Spinor {
        assert_eq!(self.dim, rhs.dim, "spinor dimension mismatch");
        let mut out = self;
        for (a, b) in out.c.iter_mut().zip(rhs.c.iter()) {
            *a -= *b;
        }
        out
    }
}

impl UnitVector {
    /// Accepts `v` only if it already has unit length within `1e-12`.
    pub fn new(v: &[f64]) -> Result<Self> {
        let u = Self::normalized(v)?;
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::arg("k", "direction must be a unit vector"));
        }
        Ok(u)
    }

    /// Normalizes a nonzero 2- or 3-vector.
    pub fn normalized(v: &[f64]) -> Result<Self> {
        if v.len() != 2 && v.len() != 3 {
            return Err(Error::arg("k", "direction must have 2 or 3 components"));
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::arg("k", "direction must be nonzero and finite"));
        }
        let mut c = [0.0; 3];
        for (dst, src) in c.iter_mut().zip(v) {
            *dst = src / n;
        }
        Ok(UnitVector { dim: v.len(), c })
    }

    /// Standard basis vector `e_i` (zero-based).
    pub fn axis(dim: usize, i: usize) -> Result<Self> {
        let mut c = [0.0; 3];
        if i >= dim {
            return Err(Error::arg("k", "axis index out of range"));
        }
        c[i] = 1.0;
        Self::new(&c[..dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.as_slice().iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

fn check_index(j: usize) -> Result<()> {
    if (1..=3).contains(&j) {
        Ok(())
    } else {
        Err(Error::arg("j", "Pauli/Dirac index must be 1, 2 or 3"))
    }
}

fn sigma_raw(j: usize) -> [[Complex64; 2]; 2] {
    match j {
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        _ => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

/// Pauli matrix `σ_j`, `j ∈ {1, 2, 3}`.
pub fn pauli(j: usize) -> Result<CMatrix> {
    check_index(j)?;
    let s = sigma_raw(j);
    let mut out = CMatrix::zeros(2)?;
    for (r, row) in s.iter().enumerate() {
        out.m[r][..2].copy_from_slice(row);
    }
    Ok(out)
}

/// Dirac matrix `α_j = [[0, σ_j], [σ_j, 0]]`.
pub fn alpha(j: usize) -> Result<CMatrix> {
    check_index(j)?;
    let s = sigma_raw(j);
    let mut out = CMatrix::zeros(4)?;
    for r in 0..2 {
        for c in 0..2 {
            out.m[r][c + 2] = s[r][c];
            out.m[r + 2][c] = s[r][c];
        }
    }
    Ok(out)
}

/// `σ·v` for `d = 2`, `α·v` for `d = 3`; the dimension is `v.len()`.
pub fn dirac_dot(v: &[f64]) -> Result<CMatrix> {
    let d = v.len();
    let dim = spinor_dim(d)?;
    let mut out = CMatrix::zeros(dim)?;
    for (j, &vj) in v.iter().enumerate() {
        let m = if d == 2 { pauli(j + 1)? } else { alpha(j + 1)? };
        out = out + m.scale(Complex64::new(vj, 0.0));
    }
    Ok(out)
}

/// `exp(-i (D·k) θ) = I cos θ - i (D·k) sin θ`, using `(D·k)² = I`.
pub fn dirac_exp(k: &UnitVector, theta: f64) -> CMatrix {
    let dk = dirac_dot(k.as_slice()).expect("unit vector has valid dimension");
    let id = CMatrix::identity(dk.dim()).expect("valid dimension");
    id.scale(Complex64::new(theta.cos(), 0.0)) + dk.scale(Complex64::new(0.0, -theta.sin()))
}

/// Applies `exp(-i (D·k) θ)` to `u` without forming the matrix.
pub fn dirac_exp_apply(dk: &CMatrix, theta: f64, u: &Spinor) -> Spinor {
    let (s, c) = theta.sin_cos();
    u.scale(Complex64::new(c, 0.0)) + dk.apply(u).scale(Complex64::new(0.0, -s))
}

/// Unit spinor in the `+1` eigenspace of `D·k`.
///
/// Standard basis seeds are projected by `(I + D·k)/2` in order; the first
/// projection with squared norm at least `1/(2·dim)` is normalized. The
/// projector has trace `dim/2`, so some seed always qualifies.
pub fn plus_eigenspinor(k: &UnitVector) -> Result<Spinor> {
    let dk = dirac_dot(k.as_slice())?;
    let dim = dk.dim();
    let proj = (CMatrix::identity(dim)? + dk).scale(Complex64::new(0.5, 0.0));
    let threshold = 0.5 / dim as f64;
    for i in 0..dim {
        let p = proj.apply(&Spinor::basis(dim, i)?);
        if p.norm_sqr() >= threshold {
            return p.normalized();
        }
    }
    Err(Error::Invariant("all seed spinors annihilated by a rank dim/2 projector".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Plain triple loop, independent of the `Mul` impl.
    fn naive_mul(a: &CMatrix, b: &CMatrix) -> [[Complex64; 4]; 4] {
        let n = a.dim();
        let mut out = [[ZERO; 4]; 4];
        for (i, row) in out.iter_mut().enumerate().take(n) {
            for (j, v) in row.iter_mut().enumerate().take(n) {
                for l in 0..n {
                    *v += a.get(i, l) * b.get(l, j);
                }
            }
        }
        out
    }

    #[test]
    fn pauli_one_is_exact() {
        let s1 = pauli(1).unwrap();
        let expect = CMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]).unwrap();
        assert_eq!(s1, expect);
    }

    #[test]
    fn pauli_involutions_and_hermitian() {
        for j in 1..=3 {
            let s = pauli(j).unwrap();
            assert!(s.is_hermitian(0.0));
            assert_eq!(s * s, CMatrix::identity(2).unwrap());
            let a = alpha(j).unwrap();
            assert!(a.is_hermitian(0.0));
            assert_eq!(a * a, CMatrix::identity(4).unwrap());
        }
    }

    #[test]
    fn sigma2_sigma1_is_minus_i_sigma3() {
        let p = naive_mul(&pauli(2).unwrap(), &pauli(1).unwrap());
        // σ₂σ₁ = [[-i, 0], [0, i]]
        assert_eq!(p[0][0], c(0.0, -1.0));
        assert_eq!(p[0][1], ZERO);
        assert_eq!(p[1][0], ZERO);
        assert_eq!(p[1][1], c(0.0, 1.0));
        let s3 = pauli(3).unwrap().scale(c(0.0, -1.0));
        assert_eq!(pauli(2).unwrap() * pauli(1).unwrap(), s3);
    }

    #[test]
    fn alpha_block_structure() {
        let a1 = alpha(1).unwrap();
        assert_eq!(a1.get(0, 2), ZERO);
        assert_eq!(a1.get(0, 3), ONE);
    }

    #[test]
    fn alphas_anticommute() {
        let a1 = alpha(1).unwrap();
        let a2 = alpha(2).unwrap();
        let x = naive_mul(&a1, &a2);
        let y = naive_mul(&a2, &a1);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(x[i][j] + y[i][j], ZERO);
            }
        }
    }

    #[test]
    fn index_errors() {
        assert!(pauli(0).is_err());
        assert!(pauli(4).is_err());
        assert!(alpha(0).is_err());
        assert!(dirac_dot(&[1.0]).is_err());
        assert!(dirac_dot(&[1.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn dirac_dot_basis_and_square() {
        assert_eq!(dirac_dot(&[1.0, 0.0, 0.0]).unwrap(), alpha(1).unwrap());
        let k = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
        let m = dirac_dot(&k).unwrap();
        assert!((m * m).max_abs_diff(&CMatrix::identity(4).unwrap()) < 1e-14);
    }

    #[test]
    fn dirac_dot_eigenvalues_are_plus_minus_one() {
        // Characteristic polynomial via the trace and the involution property:
        // the eigenvalues of a Hermitian involution with trace t are ±1, with
        // (dim + t)/2 of them equal to +1.
        let k = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
        let m = dirac_dot(&k).unwrap();
        assert!(m.trace().norm() < 1e-15);
        assert!(m.is_hermitian(1e-15));
        // Explicit check: every column of (I ± M)/2 is an eigenvector.
        let id = CMatrix::identity(4).unwrap();
        for sign in [1.0, -1.0] {
            let p = (id + m.scale(c(sign, 0.0))).scale(c(0.5, 0.0));
            let rank = (p.trace().re).round() as i32;
            assert_eq!(rank, 2);
            for j in 0..4 {
                let v = p.apply(&Spinor::basis(4, j).unwrap());
                let r = m.apply(&v) - v.scale(c(sign, 0.0));
                assert!(r.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn dirac_exp_identities() {
        let k = UnitVector::normalized(&[1.0, 2.0, 2.0]).unwrap();
        let id = CMatrix::identity(4).unwrap();
        assert!(dirac_exp(&k, 0.0).max_abs_diff(&id) == 0.0);
        let e = dirac_exp(&k, 0.7) * dirac_exp(&k, -0.7);
        assert!(e.max_abs_diff(&id) < 1e-14);
    }

    #[test]
    fn dirac_exp_preserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let k = UnitVector::normalized(&[0.3, -0.4, 0.8]).unwrap();
        let e = dirac_exp(&k, 1.3);
        for _ in 0..20 {
            let comps: [Complex64; 4] =
                core::array::from_fn(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let u = Spinor::from_slice(&comps).unwrap();
            let v = naive_apply(&e, &u);
            assert!((norm(&v) - u.norm()).abs() < 1e-14);
        }
    }

    fn naive_apply(m: &CMatrix, u: &Spinor) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for (i, o) in out.iter_mut().enumerate().take(m.dim()) {
            for (j, uj) in u.components().iter().enumerate() {
                *o += m.get(i, j) * uj;
            }
        }
        out
    }

    fn norm(v: &[Complex64]) -> f64 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn plus_eigenspinor_e3() {
        let k = UnitVector::axis(3, 2).unwrap();
        let phi = plus_eigenspinor(&k).unwrap();
        let a3 = alpha(3).unwrap();
        assert!((a3.apply(&phi) - phi).norm() < 1e-15);
        assert!(phi.is_unit(1e-15));
    }

    #[test]
    fn plus_eigenspinor_residual_and_determinism() {
        let k = UnitVector::normalized(&[1.0, 2.0, 2.0]).unwrap();
        let phi = plus_eigenspinor(&k).unwrap();
        let m = dirac_dot(k.as_slice()).unwrap();
        assert!((m.apply(&phi) - phi).norm() <= 1e-12);
        assert!(phi.is_unit(1e-14));
        let again = plus_eigenspinor(&k).unwrap();
        for (a, b) in phi.components().iter().zip(again.components()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        let k2 = UnitVector::normalized(&[-0.6, 0.8]).unwrap();
        let phi2 = plus_eigenspinor(&k2).unwrap();
        let m2 = dirac_dot(k2.as_slice()).unwrap();
        assert!((m2.apply(&phi2) - phi2).norm() <= 1e-12);
    }

    #[test]
    fn unit_vector_checks() {
        assert!(UnitVector::new(&[1.0, 1.0, 0.0]).is_err());
        assert!(UnitVector::normalized(&[0.0, 0.0]).is_err());
        let v = UnitVector::normalized(&[3.0, 4.0]).unwrap();
        assert!((v.as_slice()[0] - 0.6).abs() < 1e-16);
    }

    proptest::proptest! {
        #[test]
        fn dirac_dot_square_and_isometry(
            v in proptest::array::uniform3(-5.0f64..5.0),
            u in proptest::array::uniform8(-1.0f64..1.0),
        ) {
            let m = dirac_dot(&v).unwrap();
            let n2: f64 = v.iter().map(|x| x * x).sum();
            let sq = m * m;
            let target = CMatrix::identity(4).unwrap().scale(c(n2, 0.0));
            proptest::prop_assert!(sq.max_abs_diff(&target) <= 1e-14 * (1.0 + n2));
            let spin = Spinor::from_slice(&[c(u[0], u[1]), c(u[2], u[3]), c(u[4], u[5]), c(u[6], u[7])]).unwrap();
            let lhs = m.apply(&spin).norm();
            proptest::prop_assert!((lhs - n2.sqrt() * spin.norm()).abs() <= 1e-13 * (1.0 + lhs));
        }

        #[test]
        fn dirac_exp_unitary_and_commuting(
            v in proptest::array::uniform3(-1.0f64..1.0),
            theta in -10.0f64..10.0,
        ) {
            proptest::prop_assume!(v.iter().map(|x| x * x).sum::<f64>() > 1e-4);
            let k = UnitVector::normalized(&v).unwrap();
            let e = dirac_exp(&k, theta);
            let m = dirac_dot(k.as_slice()).unwrap();
            let id = CMatrix::identity(4).unwrap();
            proptest::prop_assert!((e.adjoint() * e).max_abs_diff(&id) <= 1e-13);
            proptest::prop_assert!((e * m).max_abs_diff(&(m * e)) <= 1e-13);
        }
    }
}
