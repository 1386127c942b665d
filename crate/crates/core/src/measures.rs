//! Entanglement measures.
//!
//! Pure-state quantities are functions of the Schmidt coefficients. Mixed
//! states get the negativity (any dimension), the Wootters concurrence and
//! entanglement of formation (two-qubit supports), and the closed-form
//! entanglement of formation of a symmetric Gaussian state under loss.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{DensityOperator, PureBipartiteState, Truncation};
use crate::linalg::{self, ComplexMatrix};

/// Largest trace weight a state may carry outside a declared two-qubit support.
pub const SUPPORT_LEAK_TOL: f64 = 1e-8;

/// Schmidt decomposition `|psi> = sum_k c_k |phi_k>_A |chi_k>_B`.
#[derive(Clone, Debug)]
pub struct SchmidtSpectrum {
    /// Descending, nonnegative, squares sum to one.
    pub coefficients: Vec<f64>,
    /// Column `k` is `|phi_k>`.
    pub basis_a: ComplexMatrix,
    /// Column `k` is `|chi_k>`.
    pub basis_b: ComplexMatrix,
}

impl SchmidtSpectrum {
    /// A spectrum paired with the Fock bases, `sum_k c_k |k>|k>`. The
    /// coefficients are sorted descending.
    pub fn from_coefficients(coefficients: &[f64]) -> Result<Self> {
        let mut c = coefficients.to_vec();
        if c.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::param("coefficients", "must be finite and nonnegative"));
        }
        let norm_sqr: f64 = c.iter().map(|x| x * x).sum();
        if (norm_sqr - 1.0).abs() > 1e-10 {
            return Err(Error::Unnormalized { norm_sqr });
        }
        c.sort_by(|a, b| b.total_cmp(a));
        let n = c.len();
        Ok(Self {
            coefficients: c,
            basis_a: ComplexMatrix::identity(n),
            basis_b: ComplexMatrix::identity(n),
        })
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c > tol).count()
    }

    /// Rebuilds the amplitude matrix `sum_k c_k |phi_k><conj chi_k|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let a = &self.basis_a;
        let b = &self.basis_b;
        ComplexMatrix::from_fn(a.rows(), b.rows(), |n, m| {
            self.coefficients
                .iter()
                .enumerate()
                .map(|(k, &c)| a[(n, k)] * b[(m, k)] * c)
                .sum()
        })
    }
}

/// Schmidt decomposition via the SVD of the amplitude matrix.
pub fn schmidt(psi: &PureBipartiteState) -> Result<SchmidtSpectrum> {
    let svd = linalg::svd(psi.amplitudes())?;
    // alpha = U S V^dagger, so |chi_k> has components conj(V_{mk}).
    Ok(SchmidtSpectrum {
        coefficients: svd.sigma,
        basis_a: svd.u,
        basis_b: svd.v.conj(),
    })
}

fn entropy_term(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Shannon entropy in bits of a probability vector, `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().map(|&x| entropy_term(x)).sum()
}

/// Binary entropy `h(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_term(p) + entropy_term(1.0 - p)
}

/// Entanglement entropy `-sum c_k^2 log2 c_k^2`, in ebits.
pub fn entanglement_entropy(s: &SchmidtSpectrum) -> f64 {
    entropy_of_coefficients(&s.coefficients)
}

pub fn entropy_of_coefficients(c: &[f64]) -> f64 {
    c.iter().map(|&x| entropy_term(x * x)).sum()
}

/// `(1/2)((sum_k c_k)^2 - 1)`.
pub fn pure_negativity(s: &SchmidtSpectrum) -> f64 {
    negativity_of_coefficients(&s.coefficients)
}

pub fn negativity_of_coefficients(c: &[f64]) -> f64 {
    let sum: f64 = c.iter().sum();
    0.5 * (sum * sum - 1.0)
}

/// Linear mixedness of the reduced state, `1 - sum c_k^4`.
pub fn purity_measure(s: &SchmidtSpectrum) -> f64 {
    purity_of_coefficients(&s.coefficients)
}

pub fn purity_of_coefficients(c: &[f64]) -> f64 {
    1.0 - c.iter().map(|x| x.powi(4)).sum::<f64>()
}

/// `(||rho^{T_A}||_1 - 1) / 2`, from the eigenvalues of the partial transpose.
pub fn negativity(rho: &DensityOperator) -> Result<f64> {
    let norm = linalg::trace_norm(&rho.partial_transpose())?;
    Ok(((norm - 1.0) / 2.0).max(0.0))
}

/// Two orthonormal vectors per mode spanning the support of a state that
/// behaves as two qubits.
#[derive(Clone, Debug)]
pub struct TwoQubitBasis {
    pub mode_a: [Vec<Complex64>; 2],
    pub mode_b: [Vec<Complex64>; 2],
}

impl TwoQubitBasis {
    /// `{|0>, |1>}` on both modes.
    pub fn fock(t: Truncation) -> Self {
        let unit = |n: usize| {
            let mut v = vec![Complex64::new(0.0, 0.0); t.dim()];
            v[n] = Complex64::new(1.0, 0.0);
            v
        };
        Self {
            mode_a: [unit(0), unit(1)],
            mode_b: [unit(0), unit(1)],
        }
    }

    pub fn symmetric(pair: [Vec<Complex64>; 2]) -> Self {
        Self {
            mode_a: pair.clone(),
            mode_b: pair,
        }
    }

    /// Matrix of `rho` on the declared support, ordered `|e_i>|f_j>` with
    /// index `2 i + j`, plus the trace weight left outside it.
    pub fn restrict(&self, rho: &DensityOperator) -> Result<(ComplexMatrix, f64)> {
        let t = rho.truncation();
        let d = t.dim();
        for v in self.mode_a.iter().chain(&self.mode_b) {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: v.len() });
            }
        }
        let vectors: Vec<Vec<Complex64>> = (0..4)
            .map(|idx| {
                let e = &self.mode_a[idx / 2];
                let f = &self.mode_b[idx % 2];
                (0..t.pair_dim())
                    .map(|p| {
                        let (n, m) = t.split(p);
                        e[n] * f[m]
                    })
                    .collect()
            })
            .collect();
        let m = rho.matrix();
        let applied: Vec<Vec<Complex64>> = vectors.iter().map(|v| m.mul_vec(v)).collect();
        let restricted = ComplexMatrix::from_fn(4, 4, |r, c| {
            vectors[r].iter().zip(&applied[c]).map(|(x, y)| x.conj() * y).sum()
        });
        let leak = (rho.trace() - restricted.trace().re).max(0.0);
        Ok((restricted, leak))
    }
}

/// Wootters concurrence of a 4x4 two-qubit density matrix.
///
/// `C = max(0, l1 - l2 - l3 - l4)` with `l_i` the descending square roots of
/// the eigenvalues of `rho (sy x sy) rho* (sy x sy)`. Those equal the
/// eigenvalues of the Hermitian `sqrt(rho) rho~ sqrt(rho)`, which is what is
/// diagonalized here.
pub fn concurrence_matrix(rho: &ComplexMatrix) -> Result<f64> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.rows().max(rho.cols()),
        });
    }
    // sy (x) sy is the anti-diagonal with signs (-1, 1, 1, -1).
    let flip = ComplexMatrix::from_real(
        4,
        4,
        &[
            0.0, 0.0, 0.0, -1.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0,
        ],
    )?;
    let tilde = &(&flip * &rho.conj()) * &flip;
    let root = linalg::hermitian_apply(rho, |x| x.max(0.0).sqrt())?;
    let product = &(&root * &tilde) * &root;
    let mut lambdas: Vec<f64> = linalg::hermitian_eigenvalues(&product)?
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// Concurrence of `rho` on a declared two-qubit support.
pub fn concurrence(rho: &DensityOperator, basis: &TwoQubitBasis) -> Result<f64> {
    let (restricted, leak) = basis.restrict(rho)?;
    if leak > SUPPORT_LEAK_TOL {
        return Err(Error::SupportLeak { leak });
    }
    concurrence_matrix(&restricted)
}

/// `h((1 + sqrt(1 - C^2)) / 2)`.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0)
}

/// Entanglement of formation of a state on a declared two-qubit support.
pub fn eof_two_qubit(rho: &DensityOperator, basis: &TwoQubitBasis) -> Result<f64> {
    concurrence(rho, basis).map(eof_from_concurrence)
}

pub fn eof_two_qubit_matrix(rho: &ComplexMatrix) -> Result<f64> {
    concurrence_matrix(rho).map(eof_from_concurrence)
}

/// Entanglement entropy of a two-mode squeezed state with total mean photon
/// number `nbar`: the thermal entropy of one mode with mean `nbar / 2`,
/// `(nbar/2 + 1) log2(nbar/2 + 1) - (nbar/2) log2(nbar/2)`.
pub fn tmss_entropy_from_nbar(nbar: f64) -> f64 {
    let m = nbar.max(0.0) / 2.0;
    if m == 0.0 {
        return 0.0;
    }
    (m + 1.0) * (m + 1.0).log2() - m * m.log2()
}

/// Inverse of [`tmss_entropy_from_nbar`] by bisection.
pub fn tmss_nbar_from_entropy(entropy: f64) -> f64 {
    if entropy <= 0.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while tmss_entropy_from_nbar(hi) < entropy {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tmss_entropy_from_nbar(mid) < entropy {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `lambda = |gamma|^2 = nbar / (nbar + 2)`.
pub fn tmss_lambda(nbar: f64) -> f64 {
    nbar / (nbar + 2.0)
}

/// Pure-state negativity of the untruncated two-mode squeezed state,
/// `sum_n c_n = sqrt(1 - lambda) / (1 - sqrt(lambda))`.
pub fn tmss_pure_negativity(nbar: f64) -> f64 {
    let lambda = tmss_lambda(nbar);
    let sum = (1.0 - lambda).sqrt() / (1.0 - lambda.sqrt());
    0.5 * (sum * sum - 1.0)
}

/// Entanglement of formation of a two-mode squeezed state (total mean photon
/// number `nbar`) after loss `eta` on both modes.
///
/// With `sinh^2 r = nbar / 2` the state stays symmetric Gaussian with EPR
/// variance `delta = eta e^{-2r} + 1 - eta` (vacuum = 1), and
/// `E = c+ log2 c+ - c- log2 c-`, `c± = (delta^{-1/2} ± delta^{1/2})^2 / 4`.
pub fn gaussian_symmetric_eof(nbar: f64, eta: f64) -> f64 {
    let sinh2 = nbar.max(0.0) / 2.0;
    let r = sinh2.sqrt().asinh();
    let delta = eta * (-2.0 * r).exp() + (1.0 - eta);
    if delta >= 1.0 {
        return 0.0;
    }
    let a = delta.powf(-0.5);
    let b = delta.sqrt();
    let c_plus = (a + b).powi(2) / 4.0;
    let c_minus = (a - b).powi(2) / 4.0;
    let term = |x: f64| if x <= 0.0 { 0.0 } else { x * x.log2() };
    (term(c_plus) - term(c_minus)).max(0.0)
}

/// Two-photon entanglement with `m` modes per party: the single-photon-pair
/// superposition gives `log2 m`; `m` independent squeezed pairs with total
/// mean photon number `2/m` each give `m E_tmss(2/m)`.
pub fn multimode_counts(m: usize) -> Result<(f64, f64)> {
    if m < 1 {
        return Err(Error::param("modes", "must be at least 1"));
    }
    let mf = m as f64;
    Ok((mf.log2(), mf * tmss_entropy_from_nbar(2.0 / mf)))
}


#[cfg(test)]
mod properties {
    use super::*;
    use crate::channel::LossChannel;
    use proptest::prelude::*;

    fn pure_state(n_max: usize) -> impl Strategy<Value = PureBipartiteState> {
        let d = n_max + 1;
        prop::collection::vec(-1.0f64..1.0, 2 * d * d).prop_map(move |v| {
            let t = Truncation::new(n_max).unwrap();
            let amps = ComplexMatrix::from_fn(d, d, |i, j| Complex64::new(v[2 * (i * d + j)], v[2 * (i * d + j) + 1]));
            PureBipartiteState::normalized(t, amps).unwrap().0
        })
    }

    fn coefficients() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, 2..=8).prop_filter_map("nonzero", |v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            (n > 1e-3).then(|| v.iter().map(|x| x / n).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn mixed_negativity_of_pure_state_is_schmidt_formula(psi in (1usize..=6).prop_flat_map(pure_state)) {
            let s = schmidt(&psi).unwrap();
            prop_assert!((negativity(&psi.to_density()).unwrap() - pure_negativity(&s)).abs() < 1e-9);
        }

        #[test]
        fn coefficient_measures_ignore_order((c, seed) in (coefficients(), any::<u64>())) {
            let mut p = c.clone();
            let len = p.len();
            for i in (1..len).rev() {
                p.swap(i, (seed as usize).wrapping_mul(i + 7) % (i + 1));
            }
            prop_assert!((entropy_of_coefficients(&c) - entropy_of_coefficients(&p)).abs() < 1e-12);
            prop_assert!((negativity_of_coefficients(&c) - negativity_of_coefficients(&p)).abs() < 1e-12);
            prop_assert!((purity_of_coefficients(&c) - purity_of_coefficients(&p)).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn negativity_never_grows_under_loss(
            psi in (1usize..=4).prop_flat_map(pure_state),
            (e1, e2) in (0.0f64..=1.0, 0.0f64..=1.0),
        ) {
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let t = psi.truncation();
            let n = |eta: f64| negativity(&LossChannel::new(eta, t).unwrap().apply_pure(&psi).unwrap()).unwrap();
            let pure = pure_negativity(&schmidt(&psi).unwrap());
            prop_assert!(n(hi) <= pure + 1e-9);
            prop_assert!(n(lo) <= n(hi) + 1e-9);
        }
    }
}
