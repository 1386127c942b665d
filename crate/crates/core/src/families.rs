//! State families: two-mode squeezed states, the single-photon family on
//! `{|0>, |1>}` per mode, and the three entangled-coherent families.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::channel::LossChannel;
use crate::error::{Error, Result};
use crate::fock::{PureBipartiteState, Truncation};
use crate::linalg::ComplexMatrix;
use crate::measures::{self, TwoQubitBasis, SUPPORT_LEAK_TOL};

/// Largest coherent-state embedding error accepted by [`ecs_state`].
pub const EMBEDDING_TOL: f64 = 1e-10;

/// Truncated two-mode squeezed state `prop. sum_n gamma^n |n>|n>`, with
/// `gamma = sqrt(nbar / (nbar + 2))` real and nonnegative, renormalized after
/// truncation.
#[derive(Clone, Debug)]
pub struct TruncatedTmss {
    pub state: PureBipartiteState,
    /// Weight the untruncated state carries beyond `n_max`, `lambda^(n_max+1)`.
    pub truncation_error: f64,
}

pub fn tmss(nbar: f64, t: Truncation) -> Result<TruncatedTmss> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::param("nbar", format!("{nbar} must be finite and nonnegative")));
    }
    let lambda = measures::tmss_lambda(nbar);
    Ok(TruncatedTmss {
        state: tmss_from_lambda(lambda, t)?,
        truncation_error: lambda.powi(t.dim() as i32),
    })
}

fn tmss_from_lambda(lambda: f64, t: Truncation) -> Result<PureBipartiteState> {
    let coeffs = tmss_coefficients(lambda, t.dim());
    let amps = ComplexMatrix::from_diagonal(&coeffs);
    PureBipartiteState::new(t, amps)
}

/// Normalized geometric coefficients `prop. lambda^(n/2)`, `n < rank`.
pub fn tmss_coefficients(lambda: f64, rank: usize) -> Vec<f64> {
    let g = lambda.sqrt();
    let raw: Vec<f64> = (0..rank).map(|n| g.powi(n as i32)).collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    raw.into_iter().map(|x| x / norm).collect()
}

/// The rank-`t.dim()` truncated squeezed state whose own (renormalized)
/// entanglement entropy equals `entropy`, found by bisection on `lambda`.
pub fn truncated_tmss_with_entropy(entropy: f64, t: Truncation) -> Result<PureBipartiteState> {
    let rank = t.dim();
    let max = (rank as f64).log2();
    if !(0.0..max).contains(&entropy) {
        return Err(Error::param("entropy", format!("{entropy} outside [0, log2 {rank})")));
    }
    let f = |lambda: f64| measures::entropy_of_coefficients(&tmss_coefficients(lambda, rank));
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < entropy {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    tmss_from_lambda(0.5 * (lo + hi), t)
}

/// Parameters of `sqrt(p)|phi>|chi> + sqrt(1-p)|phi_perp>|chi_perp>` with
/// `|phi> = cos a|0> + sin a|1>`, `|phi_perp> = -sin a|0> + cos a|1>` and
/// likewise for mode B with angle `b`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SinglePhotonFamilyParams {
    pub p: f64,
    pub alpha_angle: f64,
    pub beta_angle: f64,
}

impl SinglePhotonFamilyParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.p) {
            return Err(Error::param("p", format!("{} not in [0, 1/2]", self.p)));
        }
        if !self.alpha_angle.is_finite() || !self.beta_angle.is_finite() {
            return Err(Error::param("angles", "must be finite"));
        }
        Ok(())
    }

    /// `p (sin^2 a + sin^2 b) + (1 - p)(cos^2 a + cos^2 b)`.
    pub fn mean_photon_number(&self) -> f64 {
        let (sa, ca) = self.alpha_angle.sin_cos();
        let (sb, cb) = self.beta_angle.sin_cos();
        self.p * (sa * sa + sb * sb) + (1.0 - self.p) * (ca * ca + cb * cb)
    }
}

pub fn single_photon_state(params: &SinglePhotonFamilyParams) -> Result<PureBipartiteState> {
    params.validate()?;
    let (sa, ca) = params.alpha_angle.sin_cos();
    let (sb, cb) = params.beta_angle.sin_cos();
    let phi = [ca, sa];
    let phi_perp = [-sa, ca];
    let chi = [cb, sb];
    let chi_perp = [-sb, cb];
    let wp = params.p.sqrt();
    let wq = (1.0 - params.p).sqrt();
    let amps = ComplexMatrix::from_fn(2, 2, |n, m| Complex64::new(wp * phi[n] * chi[m] + wq * phi_perp[n] * chi_perp[m], 0.0));
    PureBipartiteState::new(Truncation::new(1)?, amps)
}

/// Which superposition of even/odd cat states `|±>` makes up the state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum EcsKind {
    /// `sqrt(p)|+>|+> + sqrt(1-p) e^{i phi}|->|->`.
    SymmetricOddHeavy,
    /// `sqrt(1-p)|+>|+> + sqrt(p) e^{i phi}|->|->`.
    SymmetricEvenHeavy,
    /// `sqrt(p)|+>|-> + sqrt(1-p) e^{i phi}|->|+>`.
    Crossed,
}

impl EcsKind {
    pub const ALL: [EcsKind; 3] = [EcsKind::SymmetricOddHeavy, EcsKind::SymmetricEvenHeavy, EcsKind::Crossed];

    /// 1, 2 or 3, the label used in output tables.
    pub fn number(self) -> u8 {
        match self {
            EcsKind::SymmetricOddHeavy => 1,
            EcsKind::SymmetricEvenHeavy => 2,
            EcsKind::Crossed => 3,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(EcsKind::SymmetricOddHeavy),
            2 => Ok(EcsKind::SymmetricEvenHeavy),
            3 => Ok(EcsKind::Crossed),
            _ => Err(Error::param("kind", format!("{n} is not 1, 2 or 3"))),
        }
    }

    /// Weights on `|s_a>|s_b>` indexed `[a][b]` with `0 = |+>`, `1 = |->`.
    fn weights(self, p: f64, phi: f64) -> [[Complex64; 2]; 2] {
        let zero = Complex64::new(0.0, 0.0);
        let phase = Complex64::from_polar(1.0, phi);
        let sp = Complex64::new(p.sqrt(), 0.0);
        let sq = Complex64::new((1.0 - p).sqrt(), 0.0);
        match self {
            EcsKind::SymmetricOddHeavy => [[sp, zero], [zero, sq * phase]],
            EcsKind::SymmetricEvenHeavy => [[sq, zero], [zero, sp * phase]],
            EcsKind::Crossed => [[zero, sp], [sq * phase, zero]],
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EcsParams {
    pub kind: EcsKind,
    pub p: f64,
    pub phi: f64,
    /// Real coherent amplitude, strictly positive.
    pub alpha: f64,
}

impl EcsParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.p) {
            return Err(Error::param("p", format!("{} not in [0, 1/2]", self.p)));
        }
        if !self.phi.is_finite() {
            return Err(Error::param("phi", "must be finite"));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::param("alpha", format!("{} must be finite and positive", self.alpha)));
        }
        Ok(())
    }
}

/// Even and odd cat states `|±> = (|a> ± |-a>)/sqrt(N±)` in the Fock basis.
///
/// Each is the parity sector of the truncated coherent vector, normalized, so
/// the pair is exactly orthonormal. The embedding error is the largest
/// relative weight either sector loses to truncation.
#[derive(Clone, Debug)]
pub struct CatBasis {
    pub plus: Vec<Complex64>,
    pub minus: Vec<Complex64>,
    pub embedding_error: f64,
}

pub fn cat_basis(alpha: f64, t: Truncation) -> Result<CatBasis> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::param("alpha", format!("{alpha} must be finite and positive")));
    }
    // Parity sectors of alpha^n / sqrt(n!); the common e^{-a^2/2} cancels.
    let mut raw = Vec::with_capacity(t.dim());
    let mut term = 1.0f64;
    for n in 0..t.dim() {
        if n > 0 {
            term *= alpha / (n as f64).sqrt();
        }
        raw.push(term);
    }
    let a2 = alpha * alpha;
    let sector = |parity: usize| -> (Vec<Complex64>, f64) {
        let v: Vec<f64> = raw.iter().enumerate().map(|(n, &x)| if n % 2 == parity { x } else { 0.0 }).collect();
        let kept: f64 = v.iter().map(|x| x * x).sum();
        // Full-sector weight: cosh(a^2) for even, sinh(a^2) for odd.
        let full = if parity == 0 { a2.cosh() } else { a2.sinh() };
        let norm = kept.sqrt();
        let vec = v.into_iter().map(|x| Complex64::new(x / norm, 0.0)).collect();
        (vec, ((full - kept) / full).max(0.0))
    };
    let (plus, e_plus) = sector(0);
    let (minus, e_minus) = sector(1);
    Ok(CatBasis {
        plus,
        minus,
        embedding_error: e_plus.max(e_minus),
    })
}

impl CatBasis {
    pub fn two_qubit_basis(&self) -> TwoQubitBasis {
        TwoQubitBasis::symmetric([self.plus.clone(), self.minus.clone()])
    }
}

#[derive(Clone, Debug)]
pub struct EcsState {
    pub state: PureBipartiteState,
    pub embedding_error: f64,
}

/// Entangled coherent state of the given kind in the truncated Fock basis.
pub fn ecs_state(params: &EcsParams, t: Truncation) -> Result<EcsState> {
    params.validate()?;
    let cats = cat_basis(params.alpha, t)?;
    if cats.embedding_error > EMBEDDING_TOL {
        return Err(Error::EmbeddingError {
            error: cats.embedding_error,
            limit: EMBEDDING_TOL,
        });
    }
    let w = params.kind.weights(params.p, params.phi);
    let vecs = [&cats.plus, &cats.minus];
    let d = t.dim();
    let amps = ComplexMatrix::from_fn(d, d, |n, m| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                acc += w[a][b] * vecs[a][n] * vecs[b][m];
            }
        }
        acc
    });
    Ok(EcsState {
        state: PureBipartiteState::normalized(t, amps)?.0,
        embedding_error: cats.embedding_error,
    })
}

/// Smallest cutoff at which `ecs_state` accepts amplitude `alpha`.
pub fn ecs_truncation(alpha: f64) -> Truncation {
    let mut n_max = 1;
    loop {
        let t = Truncation::new(n_max).expect("n_max >= 1");
        match cat_basis(alpha, t) {
            Ok(c) if c.embedding_error <= EMBEDDING_TOL * 1e-2 => return t,
            _ => n_max += 1,
        }
    }
}

/// Mean total photon number of an entangled coherent state, in closed form.
/// `<n>` is `a^2 tanh(a^2)` on `|+>` and `a^2 coth(a^2)` on `|->`.
pub fn ecs_mean_photon_number(params: &EcsParams) -> f64 {
    let a2 = params.alpha * params.alpha;
    let n = [a2 * a2.tanh(), a2 / a2.tanh()];
    let w = params.kind.weights(params.p, params.phi);
    let mut total = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            total += w[a][b].norm_sqr() * (n[a] + n[b]);
        }
    }
    total
}

/// Entanglement of formation after loss, computed in the Fock basis: the
/// Kraus branches of the channel are projected onto the cat basis of
/// `sqrt(eta) alpha`, and Wootters' formula is applied to the resulting
/// two-qubit state.
pub fn decohered_ecs_eof(params: &EcsParams, eta: f64, t: Truncation) -> Result<f64> {
    let state = ecs_state(params, t)?.state;
    let channel = LossChannel::new(eta, t)?;
    let lossy = cat_basis(eta.sqrt() * params.alpha, t)?;
    let basis = [&lossy.plus, &lossy.minus];

    let mut rho = ComplexMatrix::zeros(4, 4);
    for branch in channel.branches(&state)? {
        let b = &branch.amplitudes;
        let mut w = [Complex64::new(0.0, 0.0); 4];
        for (idx, wi) in w.iter_mut().enumerate() {
            let e = basis[idx / 2];
            let f = basis[idx % 2];
            for n in 0..t.dim() {
                if e[n] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for m in 0..t.dim() {
                    *wi += e[n].conj() * f[m].conj() * b[(n, m)];
                }
            }
        }
        for r in 0..4 {
            for c in 0..4 {
                rho[(r, c)] += w[r] * w[c].conj();
            }
        }
    }
    let leak = (1.0 - rho.trace().re).max(0.0);
    if leak > SUPPORT_LEAK_TOL {
        return Err(Error::SupportLeak { leak });
    }
    measures::eof_two_qubit_matrix(&rho)
}

/// Single-mode loss on cat dyads: `Phi(|s><s'|) = sum M[s][s'][r][r'] |r'><r''|`
/// with `|r'>` the cat states of `sqrt(eta) alpha` (index 0 even, 1 odd).
///
/// Derived from the coherent-dyad image `|sa><s'a| -> D^{[s != s']} |sb><s'b|`,
/// `D = exp(-2 (1 - eta) a^2)`, re-expanded in the output cat basis. All
/// coefficients stay bounded as `a -> 0`.
fn cat_loss_map(alpha: f64, eta: f64) -> [[[[f64; 2]; 2]; 2]; 2] {
    let a2 = alpha * alpha;
    // N+ = 2 + 2 e^{-2a^2}, N- = -2 expm1(-2a^2).
    let norms = |x: f64| (2.0 + 2.0 * (-2.0 * x).exp(), -2.0 * (-2.0 * x).exp_m1());
    let (np, nm) = norms(a2);
    let (np2, nm2) = norms(eta * a2);
    let one_minus_d = -(-2.0 * (1.0 - eta) * a2).exp_m1();
    let one_plus_d = 2.0 - one_minus_d;
    // Ratios N-'/N- and sqrt(N-'/N-) have finite limits eta and sqrt(eta).
    let odd_ratio = if nm > 0.0 { nm2 / nm } else { eta };
    let k = (np2 / np).sqrt() * odd_ratio.sqrt() / 2.0;
    let mut m = [[[[0.0; 2]; 2]; 2]; 2];
    m[0][0][0][0] = one_plus_d * np2 / (2.0 * np);
    m[0][0][1][1] = one_minus_d * nm2 / (2.0 * np);
    m[1][1][1][1] = one_plus_d * odd_ratio / 2.0;
    // (1 - D) / N- -> (1 - eta) / 2 as a -> 0.
    m[1][1][0][0] = if nm > 0.0 { one_minus_d * np2 / (2.0 * nm) } else { (1.0 - eta) * np2 / 4.0 };
    m[0][1][0][1] = one_plus_d * k;
    m[0][1][1][0] = one_minus_d * k;
    m[1][0][1][0] = one_plus_d * k;
    m[1][0][0][1] = one_minus_d * k;
    m
}

/// Two-qubit density matrix, in the cat basis of `sqrt(eta) alpha`, of an
/// entangled coherent state after loss, in closed form. No Fock truncation
/// is involved.
pub fn decohered_ecs_matrix_closed_form(params: &EcsParams, eta: f64) -> Result<ComplexMatrix> {
    params.validate()?;
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::param("eta", format!("{eta} not in [0, 1]")));
    }
    let m = cat_loss_map(params.alpha, eta);
    let w = params.kind.weights(params.p, params.phi);
    let mut rho = ComplexMatrix::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            for a2 in 0..2 {
                for b2 in 0..2 {
                    let weight = w[a][b] * w[a2][b2].conj();
                    if weight == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for r in 0..4 {
                        for c in 0..4 {
                            let f = m[a][a2][r / 2][c / 2] * m[b][b2][r % 2][c % 2];
                            if f != 0.0 {
                                rho[(r, c)] += weight * f;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(rho)
}

/// [`decohered_ecs_eof`] through the closed-form cat-basis loss map.
pub fn decohered_ecs_eof_closed_form(params: &EcsParams, eta: f64) -> Result<f64> {
    let rho = decohered_ecs_matrix_closed_form(params, eta)?;
    measures::eof_two_qubit_matrix(&rho)
}

/// `(|11> + |00>)/sqrt(2)`.
pub fn bell_even() -> PureBipartiteState {
    let t = Truncation::new(1).expect("n_max = 1");
    PureBipartiteState::new(t, ComplexMatrix::from_diagonal(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])).expect("normalized")
}

/// `(|10> + |01>)/sqrt(2)`.
pub fn bell_odd() -> PureBipartiteState {
    let t = Truncation::new(1).expect("n_max = 1");
    PureBipartiteState::new(t, ComplexMatrix::from_real(2, 2, &[0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]).expect("2x2"))
        .expect("normalized")
}
