//! Truncated two-mode Fock space.
//!
//! Both modes share one cutoff `n_max`. A pair of photon numbers
//! `(n_a, n_b)` maps to the flat index `n_a * (n_max + 1) + n_b`, so the
//! partial transpose on mode A is a pure index permutation.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};

/// Normalization tolerance for pure states.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Hermiticity, trace and positivity tolerance for density operators.
pub const DENSITY_TOL: f64 = 1e-8;

/// Photon-number cutoff shared by both modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Truncation {
    n_max: usize,
}

impl Truncation {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::param("n_max", "must be at least 1"));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Single-mode dimension `n_max + 1`.
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Two-mode dimension `(n_max + 1)^2`.
    pub fn pair_dim(&self) -> usize {
        self.dim() * self.dim()
    }

    pub fn index(&self, n_a: usize, n_b: usize) -> usize {
        n_a * self.dim() + n_b
    }

    pub fn split(&self, index: usize) -> (usize, usize) {
        (index / self.dim(), index % self.dim())
    }

    fn ensure_same(&self, other: &Truncation) -> Result<()> {
        if self != other {
            return Err(Error::TruncationMismatch {
                left: self.n_max,
                right: other.n_max,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    A,
    B,
}

/// Normalized pure state `sum_{nm} alpha_{nm} |n>_A |m>_B`.
#[derive(Clone, Debug)]
pub struct PureBipartiteState {
    truncation: Truncation,
    amplitudes: ComplexMatrix,
}

impl PureBipartiteState {
    /// Wraps an amplitude matrix, rejecting anything not normalized to
    /// [`NORMALIZATION_TOL`].
    pub fn new(truncation: Truncation, amplitudes: ComplexMatrix) -> Result<Self> {
        let d = truncation.dim();
        if amplitudes.rows() != d || amplitudes.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: amplitudes.rows().max(amplitudes.cols()),
            });
        }
        if !amplitudes.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm_sqr = amplitudes.frobenius_norm().powi(2);
        if (norm_sqr - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Unnormalized { norm_sqr });
        }
        Ok(Self {
            truncation,
            amplitudes,
        })
    }

    /// Rescales the amplitudes to unit norm. Returns the state and the
    /// squared norm it had before rescaling.
    pub fn normalized(truncation: Truncation, amplitudes: ComplexMatrix) -> Result<(Self, f64)> {
        let norm_sqr = amplitudes.frobenius_norm().powi(2);
        if !(norm_sqr > 0.0) || !norm_sqr.is_finite() {
            return Err(Error::Unnormalized { norm_sqr });
        }
        let scaled = amplitudes.scale(Complex64::new(1.0 / norm_sqr.sqrt(), 0.0));
        Ok((Self::new(truncation, scaled)?, norm_sqr))
    }

    /// `|n_a>|n_b>`.
    pub fn fock(truncation: Truncation, n_a: usize, n_b: usize) -> Result<Self> {
        let d = truncation.dim();
        if n_a >= d || n_b >= d {
            return Err(Error::param("fock", format!("({n_a}, {n_b}) beyond n_max {}", truncation.n_max)));
        }
        let mut amps = ComplexMatrix::zeros(d, d);
        amps[(n_a, n_b)] = Complex64::new(1.0, 0.0);
        Self::new(truncation, amps)
    }

    /// Superposition of Fock pairs, `sum_k w_k |n_k, m_k>`, normalized.
    pub fn from_terms(truncation: Truncation, terms: &[((usize, usize), Complex64)]) -> Result<Self> {
        let d = truncation.dim();
        let mut amps = ComplexMatrix::zeros(d, d);
        for &((n, m), w) in terms {
            if n >= d || m >= d {
                return Err(Error::param("terms", format!("({n}, {m}) beyond n_max {}", truncation.n_max)));
            }
            amps[(n, m)] += w;
        }
        Ok(Self::normalized(truncation, amps)?.0)
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn amplitudes(&self) -> &ComplexMatrix {
        &self.amplitudes
    }

    pub fn amplitude(&self, n_a: usize, n_b: usize) -> Complex64 {
        self.amplitudes[(n_a, n_b)]
    }

    /// Pair-indexed state vector.
    pub fn vector(&self) -> Vec<Complex64> {
        self.amplitudes.as_slice().to_vec()
    }

    /// Re-embeds the state in a larger (or equal) truncation.
    pub fn embed(&self, target: Truncation) -> Result<Self> {
        if target.n_max < self.truncation.n_max {
            return Err(Error::param("truncation", "cannot embed into a smaller cutoff"));
        }
        let d = self.truncation.dim();
        let amps = ComplexMatrix::from_fn(target.dim(), target.dim(), |r, c| {
            if r < d && c < d {
                self.amplitudes[(r, c)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(target, amps)
    }

    /// `|psi><psi|`.
    pub fn to_density(&self) -> DensityOperator {
        let v = self.vector();
        DensityOperator::from_matrix_unchecked(self.truncation, ComplexMatrix::outer(&v, &v))
    }

    /// Joint photon-number distribution `p(n, m) = |alpha_{nm}|^2`.
    pub fn photon_distribution(&self) -> Vec<Vec<f64>> {
        let d = self.truncation.dim();
        (0..d)
            .map(|n| (0..d).map(|m| self.amplitudes[(n, m)].norm_sqr()).collect())
            .collect()
    }

    /// Mean total photon number over both modes.
    pub fn mean_photon_number(&self) -> f64 {
        mean_from_distribution(&self.photon_distribution())
    }
}

fn mean_from_distribution(p: &[Vec<f64>]) -> f64 {
    p.iter()
        .enumerate()
        .flat_map(|(n, row)| row.iter().enumerate().map(move |(m, &w)| (n + m) as f64 * w))
        .sum()
}

/// Density operator on the pair-indexed truncated space.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    truncation: Truncation,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity to [`DENSITY_TOL`].
    pub fn new(truncation: Truncation, matrix: ComplexMatrix) -> Result<Self> {
        let n = truncation.pair_dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.rows().max(matrix.cols()),
            });
        }
        let defect = matrix.hermiticity_defect();
        if defect > DENSITY_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = linalg::hermitian_eigenvalues(&matrix)?[0];
        if min < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { truncation, matrix })
    }

    pub(crate) fn from_matrix_unchecked(truncation: Truncation, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), truncation.pair_dim());
        Self { truncation, matrix }
    }

    /// Convex mixture `sum_k w_k rho_k`; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::param("mixture", "empty"))?;
        let t = first.1.truncation;
        let mut acc = ComplexMatrix::zeros(t.pair_dim(), t.pair_dim());
        let mut total = 0.0;
        for &(w, rho) in parts {
            t.ensure_same(&rho.truncation)?;
            if w < 0.0 {
                return Err(Error::param("mixture", "negative weight"));
            }
            total += w;
            acc = &acc + &rho.matrix.scale(Complex64::new(w, 0.0));
        }
        if (total - 1.0).abs() > DENSITY_TOL {
            return Err(Error::param("mixture", format!("weights sum to {total}")));
        }
        Ok(Self::from_matrix_unchecked(t, acc))
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn element(&self, (a, b): (usize, usize), (c, d): (usize, usize)) -> Complex64 {
        let t = self.truncation;
        self.matrix[(t.index(a, b), t.index(c, d))]
    }

    pub fn photon_distribution(&self) -> Vec<Vec<f64>> {
        let t = self.truncation;
        (0..t.dim())
            .map(|n| (0..t.dim()).map(|m| self.matrix[(t.index(n, m), t.index(n, m))].re).collect())
            .collect()
    }

    pub fn mean_photon_number(&self) -> f64 {
        mean_from_distribution(&self.photon_distribution())
    }

    /// Reduced single-mode state of `keep`.
    pub fn partial_trace(&self, keep: Mode) -> ComplexMatrix {
        let t = self.truncation;
        let d = t.dim();
        ComplexMatrix::from_fn(d, d, |r, c| {
            (0..d)
                .map(|k| match keep {
                    Mode::A => self.matrix[(t.index(r, k), t.index(c, k))],
                    Mode::B => self.matrix[(t.index(k, r), t.index(k, c))],
                })
                .sum()
        })
    }

    /// Partial transpose on mode A:
    /// `<n_a, n_b| rho^{T_A} |m_a, m_b> = <m_a, n_b| rho |n_a, m_b>`.
    pub fn partial_transpose(&self) -> ComplexMatrix {
        partial_transpose(self.truncation, &self.matrix)
    }
}

/// Partial transpose on mode A of any pair-indexed matrix.
pub fn partial_transpose(t: Truncation, m: &ComplexMatrix) -> ComplexMatrix {
    let n = t.pair_dim();
    ComplexMatrix::from_fn(n, n, |row, col| {
        let (na, nb) = t.split(row);
        let (ma, mb) = t.split(col);
        m[(t.index(ma, nb), t.index(na, mb))]
    })
}

/// Truncated single-mode coherent state.
#[derive(Clone, Debug)]
pub struct CoherentVector {
    pub amplitudes: Vec<Complex64>,
    /// Weight beyond the cutoff, `1 - sum |c_n|^2`. Not renormalized away.
    pub tail_error: f64,
}

/// `e^{-|alpha|^2/2} alpha^n / sqrt(n!)` for `n = 0..=n_max`.
pub fn coherent_vector(alpha: Complex64, t: Truncation) -> CoherentVector {
    let mut amplitudes = Vec::with_capacity(t.dim());
    let mut term = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..t.dim() {
        if n > 0 {
            term = term * alpha / (n as f64).sqrt();
        }
        amplitudes.push(term);
    }
    let kept: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    CoherentVector {
        amplitudes,
        tail_error: (1.0 - kept).max(0.0),
    }
}

/// Tail weight `1 - sum_{n <= n_max} e^{-x} x^n / n!` of a Poisson
/// distribution with mean `x = |alpha|^2`, summed from the far side so it
/// stays accurate when tiny.
pub fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    let mut term = (-mean).exp();
    for n in 1..=n_max + 1 {
        term *= mean / n as f64;
    }
    // term = P(n_max + 1)
    let mut tail = 0.0;
    let mut n = n_max + 1;
    while term > tail * 1e-18 && n < n_max + 2000 {
        tail += term;
        n += 1;
        term *= mean / n as f64;
    }
    tail
}

/// Smallest cutoff whose coherent tail for `|alpha| <= alpha_max` is below `tol`.
pub fn cutoff_for_coherent(alpha_max: f64, tol: f64) -> Truncation {
    let mean = alpha_max * alpha_max;
    let mut n_max = 1;
    while poisson_tail(mean, n_max) >= tol {
        n_max += 1;
    }
    Truncation { n_max }
}
