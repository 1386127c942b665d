//! Dense complex linear algebra for small matrices.
//!
//! Everything here is sized for the truncated two-mode spaces used by the
//! rest of the crate: at most a few hundred rows, usually fewer than 64.
//! Matrices are stored row-major.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest admissible `max |H - H^dagger|` for input to the Hermitian solvers.
pub const HERMITIAN_ADMISSION_TOL: f64 = 1e-8;

/// Jacobi sweeps stop once the off-diagonal Frobenius mass drops below this
/// fraction of `||H||_F`.
pub const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-14;

const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_row_major(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `max |H - H^dagger|`, or infinity for a non-square matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            self[(r / other.rows, c / other.cols)] * other[(r % other.rows, c % other.cols)]
        })
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    fn check_hermitian_input(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if !self.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_ADMISSION_TOL {
            return Err(Error::NotHermitian { defect });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Eigen-decomposition `H = V diag(eigenvalues) V^dagger` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let scaled = ComplexMatrix::from_fn(v.rows(), v.cols(), |r, c| v[(r, c)] * self.eigenvalues[c]);
        &scaled * &v.dagger()
    }
}

/// The 2x2 unitary `[[c, s], [-s e^{-i phi}, c e^{-i phi}]]` that zeroes the
/// off-diagonal of the Hermitian block `[[app, apq], [conj(apq), aqq]]` under
/// `U^dagger A U`.
#[derive(Clone, Copy)]
struct JacobiRotation {
    u: [[Complex64; 2]; 2],
}

impl JacobiRotation {
    fn annihilating(app: f64, aqq: f64, apq: Complex64) -> Option<Self> {
        let r = apq.norm();
        if r == 0.0 {
            return None;
        }
        let phase = apq / r;
        let tau = (aqq - app) / (2.0 * r);
        let t = if tau == 0.0 {
            1.0
        } else {
            tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = t * c;
        let back = phase.conj();
        Some(Self {
            u: [
                [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
                [back * (-s), back * c],
            ],
        })
    }

    /// `cols(p, q) <- cols(p, q) * U`.
    fn apply_right(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        let u = &self.u;
        for k in 0..m.rows() {
            let mp = m[(k, p)];
            let mq = m[(k, q)];
            m[(k, p)] = mp * u[0][0] + mq * u[1][0];
            m[(k, q)] = mp * u[0][1] + mq * u[1][1];
        }
    }

    /// `rows(p, q) <- U^dagger * rows(p, q)`.
    fn apply_left_dagger(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        let u = &self.u;
        for k in 0..m.cols() {
            let mp = m[(p, k)];
            let mq = m[(q, k)];
            m[(p, k)] = u[0][0].conj() * mp + u[1][0].conj() * mq;
            m[(q, k)] = u[0][1].conj() * mp + u[1][1].conj() * mq;
        }
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// The input must be square, finite and Hermitian to
/// [`HERMITIAN_ADMISSION_TOL`]; it is symmetrized before iterating.
/// Eigenvalues come back ascending with matching eigenvector columns.
pub fn hermitian_eigensystem(h: &ComplexMatrix) -> Result<EigenSystem> {
    h.check_hermitian_input()?;
    let n = h.rows();
    let mut a = ComplexMatrix::from_fn(n, n, |r, c| (h[(r, c)] + h[(c, r)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_OFF_DIAGONAL_TOL * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let Some(rot) = JacobiRotation::annihilating(a[(p, p)].re, a[(q, q)].re, a[(p, q)]) else {
                    continue;
                };
                rot.apply_right(&mut a, p, q);
                rot.apply_left_dagger(&mut a, p, q);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                rot.apply_right(&mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigensystem(h).map(|e| e.eigenvalues)
}

/// Thin singular value decomposition `M = U diag(sigma) V^dagger`.
#[derive(Clone, Debug)]
pub struct Svd {
    /// `rows x k` with orthonormal columns, `k = min(rows, cols)`.
    pub u: ComplexMatrix,
    /// Descending, nonnegative.
    pub sigma: Vec<f64>,
    /// `cols x k` with orthonormal columns.
    pub v: ComplexMatrix,
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Columns of a working copy are pairwise orthogonalized by the same complex
/// rotations the eigensolver uses, applied to their Gram block. Left vectors
/// belonging to zero singular values are completed to an orthonormal set.
pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    // Work on the orientation with at least as many rows as columns.
    if m.rows() < m.cols() {
        let t = svd(&m.dagger())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    let rows = m.rows();
    let cols = m.cols();
    let mut w = m.clone();
    let mut v = ComplexMatrix::identity(cols);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::new(0.0, 0.0);
                for r in 0..rows {
                    let x = w[(r, p)];
                    let y = w[(r, q)];
                    app += x.norm_sqr();
                    aqq += y.norm_sqr();
                    apq += x.conj() * y;
                }
                if apq.norm() <= f64::EPSILON * (app * aqq).sqrt() || apq.norm() < f64::MIN_POSITIVE {
                    continue;
                }
                if let Some(rot) = JacobiRotation::annihilating(app, aqq, apq) {
                    rot.apply_right(&mut w, p, q);
                    rot.apply_right(&mut v, p, q);
                    rotated = true;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..cols)
        .map(|c| (0..rows).map(|r| w[(r, c)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let scale = norms.iter().cloned().fold(0.0, f64::max);
    let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    let mut sigma = Vec::with_capacity(cols);
    for &c in &order {
        let s = norms[c];
        sigma.push(s);
        if s > scale * 1e-13 && s > 0.0 {
            u_cols.push((0..rows).map(|r| w[(r, c)] / s).collect());
        } else {
            u_cols.push(Vec::new());
        }
    }
    let u_cols = complete_orthonormal(u_cols, rows);
    let u = ComplexMatrix::from_fn(rows, cols, |r, c| u_cols[c][r]);
    let v_sorted = ComplexMatrix::from_fn(cols, cols, |r, c| v[(r, order[c])]);
    Ok(Svd { u, sigma, v: v_sorted })
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    svd(m).map(|s| s.sigma)
}

/// Replaces empty entries of `cols` by unit vectors orthogonal to all others.
pub(crate) fn complete_orthonormal(mut cols: Vec<Vec<Complex64>>, dim: usize) -> Vec<Vec<Complex64>> {
    let mut candidate = 0;
    for i in 0..cols.len() {
        if !cols[i].is_empty() {
            continue;
        }
        while candidate < dim {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[candidate] = Complex64::new(1.0, 0.0);
            candidate += 1;
            // Two passes of Gram-Schmidt for stability.
            for _ in 0..2 {
                for other in cols.iter().filter(|c| !c.is_empty()) {
                    let proj: Complex64 = other.iter().zip(&e).map(|(o, x)| o.conj() * x).sum();
                    for (x, o) in e.iter_mut().zip(other) {
                        *x -= proj * o;
                    }
                }
            }
            let norm = e.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                cols[i] = e.into_iter().map(|x| x / norm).collect();
                break;
            }
        }
    }
    cols
}

/// `sum_k |lambda_k|` over the spectrum of a Hermitian matrix.
pub fn trace_norm(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(h)?.iter().map(|l| l.abs()).sum())
}

/// Hermitian matrix function `f(H) = V f(Lambda) V^dagger`.
pub(crate) fn hermitian_apply(h: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigensystem(h)?;
    let mapped = EigenSystem {
        eigenvalues: eig.eigenvalues.iter().map(|&l| f(l)).collect(),
        eigenvectors: eig.eigenvectors,
    };
    Ok(mapped.reconstruct())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_spectrum() {
        let e = hermitian_eigensystem(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let e = hermitian_eigensystem(&ComplexMatrix::from_diagonal(&[2.0, -1.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, 2.0]);
        assert!((e.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn complex_two_by_two() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let h = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]).unwrap();
        let e = hermitian_eigensystem(&h).unwrap();
        assert!((e.eigenvalues[0]).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 2.0).abs() < 1e-14);
        assert!((&e.reconstruct() - &h).max_abs() < 1e-14);
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        assert!(matches!(
            hermitian_eigensystem(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        let h = ComplexMatrix::from_real(2, 2, &[1.0, 0.5, 0.4, 1.0]).unwrap();
        assert!(matches!(hermitian_eigensystem(&h), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn singular_values_trivial_cases() {
        assert_eq!(singular_values(&ComplexMatrix::zeros(3, 3)).unwrap(), vec![0.0; 3]);
        let s = singular_values(&ComplexMatrix::from_diagonal(&[3.0, 4.0])).unwrap();
        assert_eq!(s, vec![4.0, 3.0]);
    }

    #[test]
    fn svd_reconstructs_wide_matrix() {
        let m = ComplexMatrix::from_fn(2, 4, |r, k| c((r + 2 * k) as f64 * 0.3 - 1.0, (r * k) as f64 * 0.1));
        let s = svd(&m).unwrap();
        let sig = ComplexMatrix::from_fn(s.u.cols(), s.v.cols(), |r, k| {
            if r == k {
                c(s.sigma[r], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let back = &(&s.u * &sig) * &s.v.dagger();
        assert!((&back - &m).max_abs() < 1e-13);
    }

    #[test]
    fn svd_completes_rank_deficient_left_basis() {
        let m = ComplexMatrix::from_diagonal(&[1.0, 0.0, 0.0]);
        let s = svd(&m).unwrap();
        let gram = &s.u.dagger() * &s.u;
        assert!((&gram - &ComplexMatrix::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn trace_norm_of_indefinite_diagonal() {
        let t = trace_norm(&ComplexMatrix::from_diagonal(&[0.5, -0.5])).unwrap();
        assert_eq!(t, 1.0);
    }

    #[test]
    fn trace_norm_of_singlet_partial_transpose() {
        // Partial transpose of the singlet projector (|01> - |10>)/sqrt(2).
        let h = ComplexMatrix::from_real(
            4,
            4,
            &[
                0.0, 0.0, 0.0, -0.5, //
                0.0, 0.5, 0.0, 0.0, //
                0.0, 0.0, 0.5, 0.0, //
                -0.5, 0.0, 0.0, 0.0,
            ],
        )
        .unwrap();
        let e = hermitian_eigenvalues(&h).unwrap();
        assert!((e[0] + 0.5).abs() < 1e-15);
        assert!((trace_norm(&h).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kron_of_identities() {
        let k = ComplexMatrix::identity(2).kron(&ComplexMatrix::identity(3));
        assert_eq!(k, ComplexMatrix::identity(6));
    }
}
