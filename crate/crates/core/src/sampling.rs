//! State-space exploration: random bases at fixed Schmidt spectrum, and
//! Schmidt spectra constrained to fixed norm, negativity and entropy.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{PureBipartiteState, Truncation};
use crate::linalg::ComplexMatrix;
use crate::measures::{entropy_of_coefficients, negativity_of_coefficients, SchmidtSpectrum};

/// Deterministic random stream: ChaCha20 keyed by a 64-bit seed, with
/// independent substreams selected by the ChaCha stream id.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha20Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream `id` derived from the same seed.
    pub fn substream(&self, id: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(self.seed);
        inner.set_stream(id);
        Self { seed: self.seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform in `[lo, hi)` from 53 random bits.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let bits = self.inner.gen::<u64>() >> 11;
        let u = bits as f64 * (1.0 / (1u64 << 53) as f64);
        lo + (hi - lo) * u
    }
}

/// Real orthogonal basis from a chain of adjacent plane rotations.
#[derive(Clone, Debug, Serialize)]
pub struct BasisSample {
    pub angles: Vec<f64>,
    #[serde(skip)]
    pub matrix: ComplexMatrix,
}

/// `G_{M-2}(t_{M-2}) ... G_1(t_1) G_0(t_0)`, where `G_k` rotates the
/// `(k, k+1)` plane: `|k> -> cos t |k> + sin t |k+1>`,
/// `|k+1> -> -sin t |k> + cos t |k+1>`. Columns are the new basis vectors;
/// all-zero angles give the Fock basis.
///
/// `M - 1` angles reach only a sub-family of the orthogonal group.
pub fn givens_chain(angles: &[f64]) -> ComplexMatrix {
    let m = angles.len() + 1;
    let mut o = vec![0.0f64; m * m];
    for i in 0..m {
        o[i * m + i] = 1.0;
    }
    for (k, &theta) in angles.iter().enumerate() {
        let (s, c) = theta.sin_cos();
        // Left-multiply by G_k: only rows k and k+1 change.
        for col in 0..m {
            let a = o[k * m + col];
            let b = o[(k + 1) * m + col];
            o[k * m + col] = c * a - s * b;
            o[(k + 1) * m + col] = s * a + c * b;
        }
    }
    ComplexMatrix::from_real(m, m, &o).expect("square")
}

/// Random basis with `M - 1` angles drawn uniformly from `[0, theta_max)`.
pub fn random_basis(m: usize, theta_max: f64, rng: &mut SeededRng) -> Result<BasisSample> {
    if m < 2 {
        return Err(Error::param("dimension", "must be at least 2"));
    }
    if !(theta_max > 0.0 && theta_max <= 2.0 * std::f64::consts::PI) {
        return Err(Error::param("theta_max", format!("{theta_max} not in (0, 2 pi]")));
    }
    let angles: Vec<f64> = (0..m - 1).map(|_| rng.uniform(0.0, theta_max)).collect();
    Ok(BasisSample {
        matrix: givens_chain(&angles),
        angles,
    })
}

/// `sum_k c_k |a_k>|b_k>` with `a_k`, `b_k` the columns of the two bases.
pub fn rebase_state(coefficients: &[f64], basis_a: &ComplexMatrix, basis_b: &ComplexMatrix) -> Result<PureBipartiteState> {
    let d = basis_a.rows();
    if basis_b.rows() != d || basis_a.cols() != d || basis_b.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: basis_b.rows().max(basis_b.cols()).max(basis_a.cols()),
        });
    }
    if coefficients.len() > d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: coefficients.len(),
        });
    }
    let amps = ComplexMatrix::from_fn(d, d, |n, m| {
        coefficients
            .iter()
            .enumerate()
            .map(|(k, &c)| basis_a[(n, k)] * basis_b[(m, k)] * c)
            .sum::<Complex64>()
    });
    PureBipartiteState::new(Truncation::new(d - 1)?, amps)
}

/// Convergence threshold on `|E(c) - E_target|`.
pub const NEWTON_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITERATIONS: usize = 100;
/// Central-difference step used near the feasibility boundary.
pub const FALLBACK_STEP: f64 = 1e-7;
const SCAN_POINTS: usize = 256;

/// Output of [`solve_constrained_schmidt`].
#[derive(Clone, Debug, Serialize)]
pub struct ConstrainedSchmidt {
    /// Descending coefficients, meant to sit on `|k>|k>`.
    pub coefficients: Vec<f64>,
    /// Newton steps taken.
    pub iterations: usize,
}

impl ConstrainedSchmidt {
    pub fn spectrum(&self) -> SchmidtSpectrum {
        SchmidtSpectrum::from_coefficients(&self.coefficients).expect("solver output is normalized")
    }

    /// `sum_k c_k |k>|k>` in the Fock basis.
    pub fn state(&self) -> Result<PureBipartiteState> {
        let d = self.coefficients.len();
        PureBipartiteState::new(Truncation::new(d - 1)?, ComplexMatrix::from_diagonal(&self.coefficients))
    }
}

/// `c1, c2` from the norm and negativity constraints given `c3` and the tail.
struct Elimination {
    root_sum: f64,
    tail_sum: f64,
    tail_sq: f64,
}

struct Eliminated {
    c1: f64,
    c2: f64,
    disc_root: f64,
    s: f64,
}

impl Elimination {
    fn new(n_target: f64, tail: &[f64]) -> Self {
        Self {
            root_sum: (2.0 * n_target + 1.0).sqrt(),
            tail_sum: tail.iter().sum(),
            tail_sq: tail.iter().map(|x| x * x).sum(),
        }
    }

    /// `s = sqrt(2N+1) - c3 - sum tail`, `q = 1 - c3^2 - sum tail^2`,
    /// `c1,2 = (s ± sqrt(2q - s^2)) / 2`.
    fn eliminate(&self, c3: f64) -> Option<Eliminated> {
        let s = self.root_sum - c3 - self.tail_sum;
        let q = 1.0 - c3 * c3 - self.tail_sq;
        let disc = 2.0 * q - s * s;
        if s < 0.0 || disc < 0.0 {
            return None;
        }
        let r = disc.sqrt();
        let c2 = (s - r) / 2.0;
        if c2 < 0.0 {
            return None;
        }
        Some(Eliminated {
            c1: (s + r) / 2.0,
            c2,
            disc_root: r,
            s,
        })
    }
}

/// `d/dc [-c^2 log2 c^2]`.
fn entropy_slope(c: f64) -> f64 {
    if c <= 0.0 {
        return f64::INFINITY;
    }
    -2.0 * c * ((c * c).log2() + 1.0 / LN_2)
}

/// Finds Schmidt coefficients `c_1..c_M` (`M = tail.len() + 3`) with
/// `sum c_k^2 = 1`, `(sum c_k)^2 = 2 N + 1` and entropy `E`, holding
/// `c_4..c_M = tail` fixed.
///
/// `c_1, c_2` follow analytically from the two quadratic constraints; Newton
/// iteration on `c_3` drives the entropy to the target, halving any step
/// that does not reduce the residual. Newton starts from the midpoint of the
/// first sign change of the residual on a scan of the feasible `c_3`
/// interval (the smallest-`c_3` root).
pub fn solve_constrained_schmidt(e_target: f64, n_target: f64, tail: &[f64]) -> Result<ConstrainedSchmidt> {
    if tail.is_empty() {
        return Err(Error::param("tail", "need at least one fixed coefficient (rank >= 4)"));
    }
    if tail.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::param("tail", "entries must be finite and nonnegative"));
    }
    if !(n_target >= 0.0) || !(e_target >= 0.0) {
        return Err(Error::param("targets", "entropy and negativity must be nonnegative"));
    }
    let elim = Elimination::new(n_target, tail);
    let coeffs = |c3: f64, e: &Eliminated| {
        let mut v = Vec::with_capacity(tail.len() + 3);
        v.extend_from_slice(&[e.c1, e.c2, c3]);
        v.extend_from_slice(tail);
        v
    };
    let residual = |c3: f64| -> Option<f64> {
        elim.eliminate(c3).map(|e| entropy_of_coefficients(&coeffs(c3, &e)) - e_target)
    };

    let c3_max = (1.0 - elim.tail_sq).max(0.0).sqrt();
    let grid: Vec<(f64, Option<f64>)> = (0..=SCAN_POINTS)
        .map(|i| {
            let c3 = c3_max * i as f64 / SCAN_POINTS as f64;
            (c3, residual(c3))
        })
        .collect();
    if grid.iter().all(|(_, r)| r.is_none()) {
        return Err(Error::Infeasible("no c3 satisfies the norm and negativity constraints".into()));
    }
    let bracket = grid.windows(2).find_map(|w| match (w[0].1, w[1].1) {
        (Some(a), Some(b)) if a == 0.0 || a * b < 0.0 => Some((w[0].0, w[1].0)),
        _ => None,
    });
    let mut c3 = match bracket {
        Some((lo, hi)) => 0.5 * (lo + hi),
        None => {
            let best = grid
                .iter()
                .filter_map(|&(c, r)| r.map(|r| (c, r.abs())))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty");
            best.0
        }
    };
    if let Some(exact) = grid.iter().find(|(_, r)| *r == Some(0.0)) {
        c3 = exact.0;
    }

    let mut f = residual(c3).ok_or_else(|| Error::Infeasible("Newton start outside feasible set".into()))?;
    let mut iterations = 0;
    while f.abs() >= NEWTON_TOL {
        if iterations == NEWTON_MAX_ITERATIONS {
            return Err(Error::NewtonFailed {
                iterations,
                residual: f.abs(),
            });
        }
        iterations += 1;
        let slope = newton_slope(&elim, c3).or_else(|| {
            let (a, b) = (residual(c3 + FALLBACK_STEP)?, residual(c3 - FALLBACK_STEP)?);
            Some((a - b) / (2.0 * FALLBACK_STEP))
        });
        let Some(slope) = slope.filter(|s| s.is_finite() && *s != 0.0) else {
            return Err(Error::NewtonFailed {
                iterations,
                residual: f.abs(),
            });
        };
        let mut step = -f / slope;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = c3 + step;
            if trial >= 0.0 {
                if let Some(ft) = residual(trial) {
                    if ft.abs() < f.abs() {
                        c3 = trial;
                        f = ft;
                        accepted = true;
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::NewtonFailed {
                iterations,
                residual: f.abs(),
            });
        }
    }

    let e = elim
        .eliminate(c3)
        .ok_or_else(|| Error::Infeasible("converged outside feasible set".into()))?;
    let mut c = coeffs(c3, &e);
    c.sort_by(|a, b| b.total_cmp(a));
    Ok(ConstrainedSchmidt {
        coefficients: c,
        iterations,
    })
}

/// `dE/dc3` through the elimination of `c1`, `c2`; `None` at the boundary
/// where the elimination is not differentiable.
fn newton_slope(elim: &Elimination, c3: f64) -> Option<f64> {
    let e = elim.eliminate(c3)?;
    if e.disc_root <= 1e-12 || e.c2 <= 0.0 || c3 <= 0.0 {
        return None;
    }
    // ds/dc3 = -1, dq/dc3 = -2 c3, dr/dc3 = (2 dq - 2 s ds) / (2 r).
    let dr = (e.s - 2.0 * c3) / e.disc_root;
    let dc1 = (-1.0 + dr) / 2.0;
    let dc2 = (-1.0 - dr) / 2.0;
    Some(entropy_slope(e.c1) * dc1 + entropy_slope(e.c2) * dc2 + entropy_slope(c3))
}

/// Result of [`sample_constrained_states`].
#[derive(Clone, Debug, Serialize)]
pub struct ConstrainedSamples {
    pub spectra: Vec<ConstrainedSchmidt>,
    /// Tails drawn, in order, including rejected ones.
    pub attempts: usize,
    pub rejected: usize,
    /// Upper edge of the tail box, see [`tail_box`].
    pub tail_box: f64,
}

/// Minimum acceptance rate before sampling gives up.
pub const MIN_FEASIBILITY_RATE: f64 = 1e-3;
const FEASIBILITY_WARMUP: usize = 10_000;

/// Upper edge of the tail-sampling box. Output spectra are sorted, so the
/// tail can be taken to hold the smallest coefficients without losing any
/// spectrum: beyond `sqrt(2N+1)` and normalization, the fourth-largest
/// coefficient is at most `1/2`, and any single weight `w <= 1/2` obeys
/// `h(w) <= E`.
pub fn tail_box(e_target: f64, n_target: f64) -> f64 {
    let mut c = (2.0 * n_target + 1.0).sqrt().min(0.5);
    if e_target < 1.0 {
        // Lower root of h(w) = E on [0, 1/2].
        let (mut lo, mut hi) = (0.0, 0.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if crate::measures::binary_entropy(mid) < e_target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        c = c.min(hi.sqrt());
    }
    c
}

/// Draws tails `c_4..c_rank` uniformly from `[0, tail_box(E, N))`, solves
/// each, and keeps the feasible ones until `count` are collected.
pub fn sample_constrained_states(
    rank: usize,
    e_target: f64,
    n_target: f64,
    count: usize,
    rng: &mut SeededRng,
) -> Result<ConstrainedSamples> {
    if rank < 4 {
        return Err(Error::param("rank", "must be at least 4"));
    }
    let tail_box = tail_box(e_target, n_target);
    let mut spectra = Vec::with_capacity(count);
    let mut attempts = 0;
    while spectra.len() < count {
        attempts += 1;
        let tail: Vec<f64> = (0..rank - 3).map(|_| rng.uniform(0.0, tail_box)).collect();
        match solve_constrained_schmidt(e_target, n_target, &tail) {
            Ok(s) => spectra.push(s),
            Err(Error::Infeasible(_)) | Err(Error::NewtonFailed { .. }) => {}
            Err(e) => return Err(e),
        }
        if attempts >= FEASIBILITY_WARMUP {
            let rate = spectra.len() as f64 / attempts as f64;
            if rate < MIN_FEASIBILITY_RATE {
                return Err(Error::LowFeasibility {
                    rate,
                    limit: MIN_FEASIBILITY_RATE,
                    attempts,
                    accepted: spectra.len(),
                });
            }
        }
    }
    Ok(ConstrainedSamples {
        rejected: attempts - spectra.len(),
        spectra,
        attempts,
        tail_box,
    })
}

/// Re-evaluates the three constraints; returns the largest violation.
pub fn constraint_violation(c: &[f64], e_target: f64, n_target: f64) -> f64 {
    let norm = (c.iter().map(|x| x * x).sum::<f64>() - 1.0).abs();
    let neg = (negativity_of_coefficients(c) - n_target).abs();
    let ent = (entropy_of_coefficients(c) - e_target).abs();
    norm.max(neg).max(ent)
}


#[cfg(test)]
mod properties {
    use super::*;
    use crate::measures::schmidt;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn givens_chain_is_orthogonal(angles in prop::collection::vec(0.0f64..6.3, 1..12)) {
            let o = givens_chain(&angles);
            let id = ComplexMatrix::identity(angles.len() + 1);
            prop_assert!((&(&o.transpose() * &o) - &id).max_abs() < 1e-13);
        }

        #[test]
        fn rebasing_keeps_the_spectrum(seed in any::<u64>(), theta in 0.01f64..6.28) {
            let c = [0.8, 0.5, 0.3, 0.1];
            let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            let c: Vec<f64> = c.iter().map(|x| x / norm).collect();
            let mut rng = SeededRng::new(seed);
            let a = random_basis(4, theta, &mut rng).unwrap();
            let b = random_basis(4, theta, &mut rng).unwrap();
            let s = schmidt(&rebase_state(&c, &a.matrix, &b.matrix).unwrap()).unwrap();
            for (x, y) in s.coefficients.iter().zip(&c) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn solver_output_meets_constraints(tail in 0.0f64..0.17) {
            let n = 0.2079;
            if let Ok(sol) = solve_constrained_schmidt(0.2, n, &[tail]) {
                prop_assert!(constraint_violation(&sol.coefficients, 0.2, n) < 1e-8);
                prop_assert!(sol.coefficients.iter().all(|&x| x >= 0.0));
            }
        }
    }
}
