//! Dense complex matrices sized for small Hilbert spaces (d <= 16).
//!
//! Everything here is a pure function of its inputs. The eigensolver is a
//! cyclic complex Jacobi iteration; eigenvalues are returned in descending
//! order and every eigenvector is phase-fixed so that its largest-magnitude
//! component (lowest index on ties) is real and non-negative.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Off-diagonal Frobenius mass, relative to `max(1, ||A||_F)`, at which the
/// Jacobi sweeps stop.
const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;
/// Magnitudes this close to the maximum count as tied when fixing phases.
const PHASE_TIE_TOL: f64 = 1e-12;

/// Default support tolerance for pseudo-inverse square roots.
pub const SUPPORT_TOL: f64 = 1e-9;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `<u|v>`, conjugate-linear in the first argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(u: &[C64]) -> f64 {
    u.iter().map(|a| a.norm_sqr()).sum()
}

/// Multiplies `v` by the unit phase that makes its largest-magnitude entry
/// real and non-negative.
pub fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|a| a.norm() >= max - PHASE_TIE_TOL * max)
        .unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    for a in v.iter_mut() {
        *a *= phase;
    }
    v[pivot] = c64(v[pivot].re, 0.0);
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::default(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c64(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(Self {
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = c64(v, 0.0);
        }
        m
    }

    /// `|u><v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        debug_assert_eq!(u.len(), v.len());
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.dim.max(1)).map(<[C64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(v.len(), self.dim);
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `<u|A|v>`
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        inner(u, &self.mat_vec(v))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let (m, n) = (self.dim, other.dim);
        Self::from_fn(m * n, |i, j| self[(i / n, j / n)] * other[(i % n, j % n)])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Largest elementwise deviation from `U^dag U = I`.
    pub fn unitarity_residual(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&CMatrix::identity(self.dim))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::default() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// A Hermitian operator. Construction symmetrizes the input, so the stored
/// entries satisfy `a[i][j] == conj(a[j][i])` exactly.
#[derive(Clone, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    /// Symmetrizes `m` into `(m + m^dag) / 2`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.dim() == 0 {
            return Err(Error::InvalidInput("operator dimension must be >= 1".into()));
        }
        if !m.is_finite() {
            return Err(Error::InvalidInput("operator has non-finite entries".into()));
        }
        Ok(Self::symmetrized(m))
    }

    fn symmetrized(mut m: CMatrix) -> Self {
        let n = m.dim();
        for i in 0..n {
            m[(i, i)] = c64(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        Self(m)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim))
    }

    pub fn diag(values: &[f64]) -> Self {
        Self(CMatrix::diag(values))
    }

    /// `|v><v|` (not normalized).
    pub fn projector(v: &[C64]) -> Self {
        Self::symmetrized(CMatrix::outer(v, v))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `<v|A|v>`, real for Hermitian `A`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        self.0.sandwich(v, v).re
    }

    /// `tr(A B)` for Hermitian `A`, `B`.
    pub fn trace_product(&self, other: &HermitianOperator) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.0[(i, j)] * other.0[(j, i)]).re;
            }
        }
        acc
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn add(&self, other: &HermitianOperator) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &HermitianOperator) -> Self {
        Self(&self.0 - &other.0)
    }

    /// In-place `self += w |v><v|`.
    pub fn add_projector(&mut self, w: f64, v: &[C64]) {
        let n = self.dim();
        for i in 0..n {
            let vi = v[i] * w;
            for j in 0..n {
                self.0[(i, j)] += vi * v[j].conj();
            }
        }
    }

    /// `B A B` for Hermitian `B`.
    pub fn sandwiched_by(&self, b: &HermitianOperator) -> Self {
        Self::symmetrized(&(&b.0 * &self.0) * &b.0)
    }

    /// `U A U^dag`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self::symmetrized(&(u * &self.0) * &u.adjoint())
    }

    /// Largest elementwise deviation between two operators.
    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        self.0.max_abs_diff(&other.0)
    }
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Eigenvalues (descending) and matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

impl Eigen {
    /// `sum_k f(lambda_k) |v_k><v_k|`
    pub fn reconstruct_with(&self, mut f: impl FnMut(f64) -> f64) -> HermitianOperator {
        let dim = self.values.len();
        let mut out = HermitianOperator::zeros(dim);
        for (&lambda, v) in self.values.iter().zip(&self.vectors) {
            let w = f(lambda);
            if w != 0.0 {
                out.add_projector(w, v);
            }
        }
        out
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }
}

/// Full Hermitian eigendecomposition by cyclic Jacobi rotations.
pub fn eigendecompose(h: &HermitianOperator) -> Result<Eigen> {
    if !h.matrix().is_finite() {
        return Err(Error::InvalidInput("operator has non-finite entries".into()));
    }
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) < JACOBI_OFF_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable: equal eigenvalues keep their diagonal order.
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));

    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut col = v.column(k);
            fix_phase(&mut col);
            col
        })
        .collect();
    Ok(Eigen { values, vectors })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`; accumulates into `v`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on the (p, q) plane.
    let gpp = c64(c, 0.0);
    let gpq = c64(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * gpp + akq * gqp;
        a[(k, q)] = akp * gpq + akq * gqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a[(p, q)] = C64::default();
    a[(q, p)] = C64::default();
    a[(p, p)] = c64(a[(p, p)].re, 0.0);
    a[(q, q)] = c64(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

/// Largest eigenvalue and its phase-fixed unit eigenvector.
pub fn top_eigenpair(h: &HermitianOperator) -> Result<(f64, Vec<C64>)> {
    let eig = eigendecompose(h)?;
    let Eigen {
        mut values,
        mut vectors,
    } = eig;
    Ok((values.swap_remove(0), vectors.swap_remove(0)))
}

/// Largest eigenvalue only.
pub fn lambda_max(h: &HermitianOperator) -> Result<f64> {
    Ok(eigendecompose(h)?.values[0])
}

/// Pseudo-inverse square root on the support of a PSD operator.
///
/// Eigenvalues `<= support_tol` are treated as zero; any eigenvalue below
/// `-support_tol` is an error.
pub fn inv_sqrt_psd(a: &HermitianOperator, support_tol: f64) -> Result<HermitianOperator> {
    let eig = eigendecompose(a)?;
    check_psd(&eig, support_tol)?;
    Ok(eig.reconstruct_with(|l| if l > support_tol { l.sqrt().recip() } else { 0.0 }))
}

/// Square root of a PSD operator (negative rounding noise clipped to zero).
pub fn sqrt_psd(a: &HermitianOperator, support_tol: f64) -> Result<HermitianOperator> {
    let eig = eigendecompose(a)?;
    check_psd(&eig, support_tol)?;
    Ok(eig.reconstruct_with(|l| l.max(0.0).sqrt()))
}

/// Orthogonal projector onto the eigenspace with eigenvalues `> support_tol`.
pub fn support_projector(a: &HermitianOperator, support_tol: f64) -> Result<HermitianOperator> {
    let eig = eigendecompose(a)?;
    Ok(eig.reconstruct_with(|l| if l > support_tol { 1.0 } else { 0.0 }))
}

fn check_psd(eig: &Eigen, tol: f64) -> Result<()> {
    let min = eig.min();
    if min < -tol {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(())
}

pub fn is_psd(a: &HermitianOperator, tol: f64) -> bool {
    eigendecompose(a).is_ok_and(|e| e.min() >= -tol)
}

/// `exp(i H)` for Hermitian `H`, unitary by construction.
pub fn exp_i_hermitian(h: &HermitianOperator) -> Result<CMatrix> {
    let eig = eigendecompose(h)?;
    let n = h.dim();
    let mut u = CMatrix::zeros(n);
    for (&lambda, v) in eig.values.iter().zip(&eig.vectors) {
        let phase = C64::from_polar(1.0, lambda);
        for i in 0..n {
            let vi = v[i] * phase;
            for j in 0..n {
                u[(i, j)] += vi * v[j].conj();
            }
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_hermitian(dim: usize, entries: &[f64]) -> HermitianOperator {
        let m = CMatrix::from_fn(dim, |i, j| {
            let k = 2 * (i * dim + j);
            c64(entries[k % entries.len()], entries[(k + 1) % entries.len()])
        });
        HermitianOperator::new(m).unwrap()
    }

    fn two_state_rho(x: f64) -> HermitianOperator {
        let c = ((1.0 + x) / 2.0).sqrt();
        let s = ((1.0 - x) / 2.0).sqrt();
        let mut rho = HermitianOperator::zeros(2);
        rho.add_projector(0.5, &[c64(c, 0.0), c64(s, 0.0)]);
        rho.add_projector(0.5, &[c64(c, 0.0), c64(-s, 0.0)]);
        rho
    }

    #[test]
    fn construction_symmetrizes() {
        let m = CMatrix::from_rows(&[
            vec![c64(1.0, 0.3), c64(2.0, 1.0)],
            vec![c64(0.0, 0.0), c64(-1.0, 0.0)],
        ])
        .unwrap();
        let h = HermitianOperator::new(m).unwrap();
        assert_eq!(h.matrix()[(0, 1)], h.matrix()[(1, 0)].conj());
        assert_eq!(h.matrix()[(0, 0)].im, 0.0);
    }

    #[test]
    fn non_finite_is_rejected() {
        let m = CMatrix::diag(&[f64::NAN, 1.0]);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::InvalidInput(_))
        ));
        assert!(HermitianOperator::new(CMatrix::zeros(0)).is_err());
    }

    #[test]
    fn top_eigenpair_of_identity() {
        let (l, v) = top_eigenpair(&HermitianOperator::identity(2)).unwrap();
        assert_eq!(l, 1.0);
        assert_eq!(v, vec![c64(1.0, 0.0), c64(0.0, 0.0)]);
    }

    #[test]
    fn top_eigenpair_of_diagonal() {
        let (l, v) = top_eigenpair(&HermitianOperator::diag(&[0.8, 0.2])).unwrap();
        assert!((l - 0.8).abs() < 1e-15);
        assert_eq!(v, vec![c64(1.0, 0.0), c64(0.0, 0.0)]);
        let (l, v) = top_eigenpair(&HermitianOperator::diag(&[0.2, 0.8])).unwrap();
        assert!((l - 0.8).abs() < 1e-15);
        assert_eq!(v, vec![c64(0.0, 0.0), c64(1.0, 0.0)]);
    }

    #[test]
    fn two_state_density_spectrum() {
        // eigenvalues (1 +- x) / 2
        let rho = two_state_rho(0.6);
        let eig = eigendecompose(&rho).unwrap();
        assert!((eig.values[0] - 0.8).abs() < 1e-12);
        assert!((eig.values[1] - 0.2).abs() < 1e-12);
        assert!((lambda_max(&rho).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn eigendecompose_basic_cases() {
        let eig = eigendecompose(&HermitianOperator::identity(3)).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
        let p0 = HermitianOperator::projector(&[c64(1.0, 0.0), c64(0.0, 0.0)]);
        let eig = eigendecompose(&p0).unwrap();
        assert_eq!(eig.values, vec![1.0, 0.0]);
    }

    #[test]
    fn complex_off_diagonal_is_diagonalized() {
        let m = CMatrix::from_rows(&[
            vec![c64(0.0, 0.0), c64(0.0, -1.0)],
            vec![c64(0.0, 1.0), c64(0.0, 0.0)],
        ])
        .unwrap();
        let h = HermitianOperator::new(m).unwrap();
        let (l, v) = top_eigenpair(&h).unwrap();
        assert!((l - 1.0).abs() < 1e-14);
        let hv = h.matrix().mat_vec(&v);
        for k in 0..2 {
            assert!((hv[k] - v[k] * l).norm() < 1e-12);
        }
        // phase fixed: largest component real, non-negative
        assert!(v[0].im == 0.0 && v[0].re >= 0.0);
    }

    #[test]
    fn inv_sqrt_examples() {
        let b = inv_sqrt_psd(&HermitianOperator::identity(3), SUPPORT_TOL).unwrap();
        assert!(b.max_abs_diff(&HermitianOperator::identity(3)) < 1e-15);

        let b = inv_sqrt_psd(&HermitianOperator::diag(&[4.0, 0.0]), 1e-9).unwrap();
        assert!(b.max_abs_diff(&HermitianOperator::diag(&[0.5, 0.0])) < 1e-15);

        let rho = two_state_rho(0.6);
        let b = inv_sqrt_psd(&rho, SUPPORT_TOL).unwrap();
        let eig = eigendecompose(&b).unwrap();
        assert!((eig.values[0] - 1.0 / 0.2f64.sqrt()).abs() < 1e-10);
        assert!((eig.values[1] - 1.0 / 0.8f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn inv_sqrt_rejects_negative() {
        let err = inv_sqrt_psd(&HermitianOperator::diag(&[1.0, -0.1]), 1e-9).unwrap_err();
        assert!(matches!(err, Error::NotPsd { .. }));
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd(&HermitianOperator::identity(2), 1e-9));
        assert!(!is_psd(&HermitianOperator::identity(2).scale(-1.0), 1e-9));
        assert!(is_psd(&HermitianOperator::diag(&[1e-12, 1.0]), 1e-9));
    }

    #[test]
    fn exp_i_is_unitary() {
        let h = random_hermitian(4, &[0.3, -1.2, 0.7, 2.2, -0.4, 0.9, 1.5]);
        let u = exp_i_hermitian(&h).unwrap();
        assert!(u.unitarity_residual() < 1e-12);
        let u0 = exp_i_hermitian(&HermitianOperator::zeros(4)).unwrap();
        assert!(u0.max_abs_diff(&CMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn kron_of_identities() {
        let k = CMatrix::identity(2).kron(&CMatrix::identity(3));
        assert_eq!(k, CMatrix::identity(6));
    }

    fn hermitian_strategy() -> impl Strategy<Value = HermitianOperator> {
        (1usize..=8).prop_flat_map(|d| {
            prop::collection::vec(-2.0f64..2.0, 2 * d * d).prop_map(move |e| {
                let m = CMatrix::from_fn(d, |i, j| c64(e[2 * (i * d + j)], e[2 * (i * d + j) + 1]));
                HermitianOperator::new(m).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn reconstruction_and_orthonormality(h in hermitian_strategy()) {
            let eig = eigendecompose(&h).unwrap();
            let back = eig.reconstruct_with(|l| l);
            prop_assert!(back.max_abs_diff(&h) < 1e-10);
            for (i, u) in eig.vectors.iter().enumerate() {
                for (j, v) in eig.vectors.iter().enumerate() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((inner(u, v) - c64(target, 0.0)).norm() < 1e-10);
                }
            }
            prop_assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn top_pair_is_max_and_satisfies_eigen_equation(h in hermitian_strategy()) {
            let eig = eigendecompose(&h).unwrap();
            let (l, v) = top_eigenpair(&h).unwrap();
            prop_assert!((l - eig.values.iter().cloned().fold(f64::MIN, f64::max)).abs() < 1e-10);
            prop_assert!((norm_sqr(&v) - 1.0).abs() < 1e-12);
            let hv = h.matrix().mat_vec(&v);
            for k in 0..v.len() {
                prop_assert!((hv[k] - v[k] * l).norm() < 1e-10);
            }
        }

        #[test]
        fn rayleigh_dominance(
            h in hermitian_strategy(),
            seeds in prop::collection::vec(-1.0f64..1.0, 32),
        ) {
            let d = h.dim();
            let l = lambda_max(&h).unwrap();
            for t in 0..100 {
                let mut u: Vec<C64> = (0..d)
                    .map(|k| c64(seeds[(t + 3 * k) % 32] + 0.01 * t as f64, seeds[(7 * t + k + 1) % 32]))
                    .collect();
                let nrm = norm_sqr(&u).sqrt();
                if nrm == 0.0 { continue; }
                u.iter_mut().for_each(|a| *a /= nrm);
                prop_assert!(h.expectation(&u) <= l + 1e-10);
            }
        }

        #[test]
        fn inv_sqrt_sandwich_is_idempotent(h in hermitian_strategy()) {
            // A = H^2 is PSD, possibly ill-conditioned
            let a = HermitianOperator::new(h.matrix() * h.matrix()).unwrap();
            let b = inv_sqrt_psd(&a, SUPPORT_TOL).unwrap();
            let p = a.sandwiched_by(&b);
            let p2 = HermitianOperator::new(p.matrix() * p.matrix()).unwrap();
            prop_assert!(p2.max_abs_diff(&p) < 1e-8);
        }
    }
}
