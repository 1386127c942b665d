//! Photon-absorption (pure loss) channel.
//!
//! A coherent state loses amplitude to an unobserved environment,
//! `|alpha>|0>_E -> |sqrt(eta) alpha>|sqrt(1 - eta) alpha>_E`. In the Fock
//! basis this is the operator-sum map with Kraus operators
//!
//! ```text
//! A_k |n> = sqrt( C(n, k) eta^(n-k) (1 - eta)^k ) |n - k>,   k = 0..=n_max
//! ```
//!
//! where `k` counts photons lost to the environment. Loss never raises the
//! photon number, so the truncated space is invariant and completeness holds
//! exactly on it.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{DensityOperator, Mode, PureBipartiteState, Truncation};
use crate::linalg::ComplexMatrix;

#[derive(Clone, Debug)]
pub struct LossChannel {
    eta: f64,
    truncation: Truncation,
    /// `coefficients[k][n]` is the single nonzero entry `(n - k, n)` of `A_k`
    /// (zero for `n < k`).
    coefficients: Vec<Vec<f64>>,
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl LossChannel {
    /// `eta` is the intensity transmissivity: the fraction of photons that survive.
    pub fn new(eta: f64, truncation: Truncation) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::param("eta", format!("{eta} not in [0, 1]")));
        }
        let d = truncation.dim();
        let coefficients = (0..d)
            .map(|k| {
                (0..d)
                    .map(|n| {
                        if n < k {
                            0.0
                        } else {
                            (binomial(n, k) * eta.powi((n - k) as i32) * (1.0 - eta).powi(k as i32)).sqrt()
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            eta,
            truncation,
            coefficients,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn kraus_count(&self) -> usize {
        self.coefficients.len()
    }

    /// Dense single-mode Kraus operator `A_k`.
    pub fn kraus(&self, k: usize) -> ComplexMatrix {
        let d = self.truncation.dim();
        let mut a = ComplexMatrix::zeros(d, d);
        for n in k..d {
            a[(n - k, n)] = Complex64::new(self.coefficients[k][n], 0.0);
        }
        a
    }

    /// Applies the channel to a single mode of a two-mode state.
    pub fn apply_to_mode(&self, rho: &DensityOperator, mode: Mode) -> Result<DensityOperator> {
        self.check(rho.truncation())?;
        let t = self.truncation;
        let d = t.dim();
        let m = rho.matrix();
        let mut out = ComplexMatrix::zeros(t.pair_dim(), t.pair_dim());
        for a in 0..d {
            for c in 0..d {
                let k_max = d - a.max(c);
                for b in 0..d {
                    for e in 0..d {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..k_max {
                            let coef = &self.coefficients[k];
                            acc += match mode {
                                Mode::A => m[(t.index(a + k, b), t.index(c + k, e))] * (coef[a + k] * coef[c + k]),
                                Mode::B => m[(t.index(b, a + k), t.index(e, c + k))] * (coef[a + k] * coef[c + k]),
                            };
                        }
                        match mode {
                            Mode::A => out[(t.index(a, b), t.index(c, e))] = acc,
                            Mode::B => out[(t.index(b, a), t.index(e, c))] = acc,
                        }
                    }
                }
            }
        }
        Ok(DensityOperator::from_matrix_unchecked(t, out))
    }

    /// `rho -> sum_{k,l} (A_k (x) A_l) rho (A_k (x) A_l)^dagger`: the same loss
    /// on both modes with independent environments.
    pub fn apply_two_mode(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let half = self.apply_to_mode(rho, Mode::A)?;
        self.apply_to_mode(&half, Mode::B)
    }

    /// Channel output for a pure input, built from its Kraus branches.
    pub fn apply_pure(&self, psi: &PureBipartiteState) -> Result<DensityOperator> {
        let t = self.truncation;
        let n = t.pair_dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for branch in self.branches(psi)? {
            let v = branch.amplitudes.as_slice();
            for r in 0..n {
                if v[r] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        Ok(DensityOperator::from_matrix_unchecked(t, out))
    }

    /// Unnormalized conditional states `(A_k (x) A_l)|psi>` for every pair of
    /// environment photon counts `(k, l)`. The squared norm of each is the
    /// probability of that environment outcome.
    pub fn branches(&self, psi: &PureBipartiteState) -> Result<Vec<KrausBranch>> {
        self.check(psi.truncation())?;
        let d = self.truncation.dim();
        let amps = psi.amplitudes();
        let mut out = Vec::new();
        for k in 0..d {
            for l in 0..d {
                let mut b = ComplexMatrix::zeros(d, d);
                let mut any = false;
                for n in 0..d - k {
                    for m in 0..d - l {
                        let w = self.coefficients[k][n + k] * self.coefficients[l][m + l];
                        if w != 0.0 {
                            b[(n, m)] = amps[(n + k, m + l)] * w;
                            any = true;
                        }
                    }
                }
                if any {
                    out.push(KrausBranch {
                        lost: (k, l),
                        amplitudes: b,
                    });
                }
            }
        }
        Ok(out)
    }

    fn check(&self, t: Truncation) -> Result<()> {
        if t != self.truncation {
            return Err(Error::TruncationMismatch {
                left: self.truncation.n_max(),
                right: t.n_max(),
            });
        }
        Ok(())
    }
}

/// One environment outcome of the two-mode loss channel acting on a pure state.
#[derive(Clone, Debug)]
pub struct KrausBranch {
    /// Photons lost from (mode A, mode B).
    pub lost: (usize, usize),
    /// Unnormalized amplitude matrix of the conditional state.
    pub amplitudes: ComplexMatrix,
}

impl KrausBranch {
    pub fn probability(&self) -> f64 {
        self.amplitudes.frobenius_norm().powi(2)
    }

    /// Entanglement entropy of the normalized conditional state; zero for a
    /// branch of vanishing weight.
    pub fn conditional_entropy(&self) -> Result<f64> {
        let w = self.probability();
        if w == 0.0 {
            return Ok(0.0);
        }
        let svd = crate::linalg::svd(&self.amplitudes)?;
        let c: Vec<f64> = svd.sigma.iter().map(|s| s / w.sqrt()).collect();
        Ok(crate::measures::entropy_of_coefficients(&c))
    }
}

/// Outcome-averaged entanglement `sum_k p_k E(psi_k)` when the environment
/// records how many photons each mode lost.
pub fn branch_averaged_entropy(channel: &LossChannel, psi: &PureBipartiteState) -> Result<f64> {
    channel
        .branches(psi)?
        .iter()
        .map(|b| Ok(b.probability() * b.conditional_entropy()?))
        .sum()
}

/// Image of the coherent dyad `|alpha><beta|` under single-mode loss:
/// `scale * |sqrt(eta) alpha><sqrt(eta) beta|`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DyadImage {
    pub scale: Complex64,
    pub ket: Complex64,
    pub bra: Complex64,
}

/// Closed form of the loss channel on a coherent dyad. Tracing out the
/// environment leaves the overlap `<sqrt(1-eta) beta | sqrt(1-eta) alpha>`,
/// so `scale = exp((1 - eta)(conj(beta) alpha - |alpha|^2/2 - |beta|^2/2))`.
pub fn coherent_dyad_image(alpha: Complex64, beta: Complex64, eta: f64) -> DyadImage {
    let exponent = (beta.conj() * alpha - alpha.norm_sqr() / 2.0 - beta.norm_sqr() / 2.0) * (1.0 - eta);
    let root = eta.sqrt();
    DyadImage {
        scale: exponent.exp(),
        ket: alpha * root,
        bra: beta * root,
    }
}
