//! Per-factor linear algebra: complex amplitudes, small dense vectors and
//! operators on a single factor space.
//!
//! Everything here is immutable after construction. Dimensions are small
//! (a handful of amplitudes per factor), so plain `Vec`s and row-major
//! matrices are used throughout.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A complex amplitude.
pub type ComplexScalar = Complex64;

/// Tolerance for "is this vector normalized" checks.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance for algebraic identities (idempotence, adjointness, ...).
pub const ALGEBRA_TOL: f64 = 1e-12;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A vector in one factor space. Not necessarily normalized; use
/// [`LocalVector::normalize`] or [`LocalVector::check_normalized`] where
/// unit norm matters. The global phase is kept.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalVector {
    amps: Vec<Complex64>,
}

impl LocalVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidParameter("vector dimension must be positive".into()));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("vector amplitudes must be finite".into()));
        }
        Ok(Self { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|k⟩` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::Dimension { expected: dim, found: k + 1 });
        }
        let mut amps = vec![ZERO; dim];
        amps[k] = ONE;
        Ok(Self { amps })
    }

    /// `|↑⟩ = (1, 0)`.
    pub fn up() -> Self {
        Self { amps: vec![ONE, ZERO] }
    }

    /// `|↓⟩ = (0, 1)`.
    pub fn down() -> Self {
        Self { amps: vec![ZERO, ONE] }
    }

    /// Real unit vector `(cos θ, sin θ)`.
    pub fn at_angle(theta: f64) -> Self {
        Self { amps: vec![Complex64::new(theta.cos(), 0.0), Complex64::new(theta.sin(), 0.0)] }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }

    pub fn check_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::Normalization { norm: self.norm() })
        }
    }

    pub fn is_zero(&self) -> bool {
        self.amps.iter().all(|z| *z == ZERO)
    }

    /// Rescales to unit norm. Direction and global phase are preserved.
    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { amps: self.amps.iter().map(|z| z * s).collect() }
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        local_inner(self, other)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self { amps }
    }

    /// Maximum entrywise distance; `None` on dimension mismatch.
    pub fn distance(&self, other: &Self) -> Option<f64> {
        if self.dim() != other.dim() {
            return None;
        }
        Some(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.distance(other).is_some_and(|d| d <= tol)
    }
}

impl fmt::Debug for LocalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.amps.iter().map(|z| (z.re, z.im))).finish()
    }
}

impl Add for &LocalVector {
    type Output = LocalVector;
    fn add(self, rhs: &LocalVector) -> LocalVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector sum");
        LocalVector { amps: self.amps.iter().zip(&rhs.amps).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &LocalVector {
    type Output = LocalVector;
    fn sub(self, rhs: &LocalVector) -> LocalVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector difference");
        LocalVector { amps: self.amps.iter().zip(&rhs.amps).map(|(a, b)| a - b).collect() }
    }
}

/// `⟨a|b⟩ = Σ conj(a_k)·b_k`.
pub fn local_inner(a: &LocalVector, b: &LocalVector) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.dim(), found: b.dim() });
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Rescales `v` to unit norm.
pub fn normalize(v: &LocalVector) -> Result<LocalVector> {
    v.normalize()
}

/// Square matrix acting on one factor space, stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl LocalOperator {
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("operator dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::Dimension { expected: dim * dim, found: entries.len() });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::from_entries(dim, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        for k in 0..dim {
            entries[k * dim + k] = ONE;
        }
        Self { dim, entries }
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let dim = values.len();
        let mut entries = vec![ZERO; dim * dim];
        for (k, v) in values.iter().enumerate() {
            entries[k * dim + k] = *v;
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.entries[r * n + c].conj();
            }
        }
        Self { dim: n, entries }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::Dimension { expected: self.dim, found: rhs.dim });
        }
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                entries[r * n + c] = (0..n).map(|k| self.get(r, k) * rhs.get(k, c)).sum();
            }
        }
        Ok(Self { dim: n, entries })
    }

    pub fn apply(&self, v: &LocalVector) -> Result<LocalVector> {
        if v.dim() != self.dim {
            return Err(Error::Dimension { expected: self.dim, found: v.dim() });
        }
        let n = self.dim;
        let amps = (0..n).map(|r| (0..n).map(|c| self.get(r, c) * v.amps[c]).sum()).collect();
        Ok(LocalVector { amps })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_deviation(other) <= tol
    }

    /// Worst of the idempotence and self-adjointness residuals.
    pub fn projection_residual(&self) -> f64 {
        let sq = self.matmul(self).expect("square matrix");
        sq.max_deviation(self).max(self.adjoint().max_deviation(self))
    }

    pub fn is_projection(&self, tol: f64) -> bool {
        self.projection_residual() <= tol
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut entries = vec![ZERO; dim * dim];
        for r1 in 0..n {
            for c1 in 0..n {
                let a = self.get(r1, c1);
                for r2 in 0..m {
                    for c2 in 0..m {
                        entries[(r1 * m + r2) * dim + c1 * m + c2] = a * other.get(r2, c2);
                    }
                }
            }
        }
        Self { dim, entries }
    }

    /// Block-diagonal direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let dim = self.dim + other.dim;
        let mut entries = vec![ZERO; dim * dim];
        for r in 0..self.dim {
            for c in 0..self.dim {
                entries[r * dim + c] = self.get(r, c);
            }
        }
        for r in 0..other.dim {
            for c in 0..other.dim {
                entries[(self.dim + r) * dim + self.dim + c] = other.get(r, c);
            }
        }
        Self { dim, entries }
    }
}

impl fmt::Debug for LocalOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<(f64, f64)>> =
            (0..self.dim).map(|r| (0..self.dim).map(|c| (self.get(r, c).re, self.get(r, c).im)).collect()).collect();
        f.debug_struct("LocalOperator").field("dim", &self.dim).field("rows", &rows).finish()
    }
}

impl Mul<&LocalVector> for &LocalOperator {
    type Output = LocalVector;
    fn mul(self, rhs: &LocalVector) -> LocalVector {
        self.apply(rhs).expect("dimension mismatch in operator application")
    }
}

/// Real rotation `[[cos θ, −sin θ], [sin θ, cos θ]]` on a qubit factor.
pub fn rotate2(theta: f64) -> LocalOperator {
    let (s, c) = theta.sin_cos();
    LocalOperator::from_real(2, &[c, -s, s, c]).expect("2x2")
}

/// The quarter-turn generator `J = rotate2(π/2)` with exact entries.
pub(crate) fn quarter_turn() -> LocalOperator {
    LocalOperator::from_real(2, &[0.0, -1.0, 1.0, 0.0]).expect("2x2")
}

/// Rank-one projector `|v⟩⟨v|` onto a normalized vector.
pub fn projector_onto(v: &LocalVector) -> Result<LocalOperator> {
    v.check_normalized()?;
    let n = v.dim();
    let mut entries = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            entries.push(v.amps[r] * v.amps[c].conj());
        }
    }
    LocalOperator::from_entries(n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_of_basis_vectors() {
        let up = LocalVector::up();
        let down = LocalVector::down();
        assert_eq!(local_inner(&up, &up).unwrap(), ONE);
        assert_eq!(local_inner(&up, &down).unwrap(), ZERO);
    }

    #[test]
    fn inner_with_rotated_up() {
        let rotated = &rotate2(FRAC_PI_3) * &LocalVector::up();
        let z = local_inner(&LocalVector::up(), &rotated).unwrap();
        assert!((z - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_dimension_mismatch() {
        let a = LocalVector::up();
        let b = LocalVector::basis(3, 0).unwrap();
        assert_eq!(local_inner(&a, &b), Err(Error::Dimension { expected: 2, found: 3 }));
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_argument() {
        let a = LocalVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let b = LocalVector::new(vec![c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let s = c(0.3, -0.7);
        let lhs = local_inner(&a.scale(s), &b).unwrap();
        let rhs = s.conj() * local_inner(&a, &b).unwrap();
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn rotation_identities() {
        assert!(rotate2(0.0).approx_eq(&LocalOperator::identity(2), 0.0));
        let quarter = &rotate2(FRAC_PI_2) * &LocalVector::up();
        assert!(quarter.approx_eq(&LocalVector::down(), 1e-16));
        let r = rotate2(0.7).matmul(&rotate2(-0.7)).unwrap();
        assert!(r.approx_eq(&LocalOperator::identity(2), ALGEBRA_TOL));
        assert!(quarter_turn().approx_eq(&rotate2(FRAC_PI_2), 1e-16));
    }

    #[test]
    fn projector_examples() {
        let e = projector_onto(&LocalVector::up()).unwrap();
        assert!(e.approx_eq(&LocalOperator::diag(&[ONE, ZERO]), 0.0));
        let f = projector_onto(&LocalVector::down()).unwrap();
        assert!(f.approx_eq(&LocalOperator::diag(&[ZERO, ONE]), 0.0));
        let plus = LocalVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let p = projector_onto(&plus).unwrap();
        // outer product of (1,1)/√2 with itself: every entry 1/2
        for z in p.entries() {
            assert!((z - c(0.5, 0.0)).norm() < 1e-15);
        }
        assert!(p.is_projection(ALGEBRA_TOL));
        assert!((p.trace() - ONE).norm() < ALGEBRA_TOL);
    }

    #[test]
    fn projector_rejects_unnormalized() {
        let v = LocalVector::from_real(&[2.0, 0.0]).unwrap();
        assert!(matches!(projector_onto(&v), Err(Error::Normalization { .. })));
    }

    #[test]
    fn normalize_examples() {
        let v = LocalVector::from_real(&[2.0, 0.0]).unwrap().normalize().unwrap();
        assert!(v.approx_eq(&LocalVector::up(), 0.0));
        let v = LocalVector::from_real(&[1.0, 1.0]).unwrap().normalize().unwrap();
        assert!(v.approx_eq(&LocalVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap(), 2e-16));
        let v = LocalVector::new(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap().normalize().unwrap();
        assert!(v.approx_eq(&LocalVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap(), 2e-16));
    }

    #[test]
    fn normalize_zero_vector_fails() {
        let v = LocalVector::from_real(&[0.0, 0.0]).unwrap();
        assert_eq!(v.normalize(), Err(Error::ZeroVector));
    }

    #[test]
    fn direct_sum_and_kron_shapes() {
        let e = LocalOperator::diag(&[ONE, ZERO]);
        assert_eq!(e.direct_sum(&LocalOperator::identity(3)).dim(), 5);
        let k = e.kron(&e);
        assert!(k.approx_eq(&LocalOperator::diag(&[ONE, ZERO, ZERO, ZERO]), 0.0));
        let v = LocalVector::up().kron(&LocalVector::down());
        assert!(v.approx_eq(&LocalVector::basis(4, 1).unwrap(), 0.0));
    }

    #[test]
    fn polar_round_trip() {
        for &(re, im) in &[(0.3, -0.4), (-1.0, 0.0), (0.0, 2.5), (1e-3, 7.0)] {
            let z = c(re, im);
            let (r, phi) = z.to_polar();
            assert!((Complex64::from_polar(r, phi) - z).norm() < 1e-12);
        }
    }
}
