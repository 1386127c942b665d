//! Experiment runners. Each returns a [`Table`] whose rows are one
//! evaluated state each; the `robust-light` binary writes them to disk.
//!
//! Random parameters are drawn sequentially from a seeded stream and the
//! expensive evaluation fans out over rayon with order-preserving collection,
//! so output does not depend on the worker count.

pub mod config;
pub mod table;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

pub use config::{ConfigOverrides, ExperimentConfig, ExperimentId};
pub use table::{Cell, Table};

use crate::channel::LossChannel;
use crate::error::{Error, Result};
use crate::families::{
    self, cat_basis, decohered_ecs_eof, decohered_ecs_eof_closed_form, ecs_mean_photon_number, ecs_state,
    single_photon_state, truncated_tmss_with_entropy, EcsKind, EcsParams, SinglePhotonFamilyParams,
};
use crate::fock::{PureBipartiteState, Truncation};
use crate::measures::{
    self, binary_entropy, entanglement_entropy, eof_two_qubit, gaussian_symmetric_eof, negativity, pure_negativity,
    purity_measure, schmidt, tmss_entropy_from_nbar, tmss_pure_negativity, TwoQubitBasis,
};
use crate::sampling::{constraint_violation, random_basis, rebase_state, sample_constrained_states, SeededRng};

/// Rebased states must reproduce the reference Schmidt functionals to this.
pub const SCHMIDT_INVARIANCE_TOL: f64 = 1e-9;
/// Constrained samples must satisfy their three constraints to this.
pub const CONSTRAINT_TOL: f64 = 1e-8;

/// Gaussian EoF quoted for `nbar = 0.5138` at `eta = 1/2`, carried in the
/// TMSS table for comparison.
pub const QUOTED_GAUSSIAN_EOF: (f64, f64, f64) = (0.5138, 0.5, 0.3979);

pub fn run(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentId::Fig1 => run_fig1(cfg),
        ExperimentId::Fig2 => run_fig2(cfg),
        ExperimentId::Fig34 => run_fig34(cfg),
        ExperimentId::Fig5 => run_fig5(cfg),
        ExperimentId::Fig67 | ExperimentId::Fig89 => run_constrained(cfg),
        ExperimentId::TmssTable => run_tmss_table(cfg),
    }
}

/// Runs every experiment into `dir` as `<name>.csv`. Overrides that do not
/// apply to an experiment are ignored for it.
pub fn sweep(overrides: &ConfigOverrides, dir: &Path) -> Result<Vec<PathBuf>> {
    let configs = ExperimentId::ALL
        .iter()
        .map(|&id| ExperimentConfig::resolve(id, overrides, true))
        .collect::<Result<Vec<_>>>()?;
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for mut cfg in configs {
        let path = dir.join(format!("{}.csv", cfg.experiment));
        cfg.out = Some(path.clone());
        run(&cfg)?.write_to_path(&path)?;
        written.push(path);
    }
    Ok(written)
}

fn angle_grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| PI * i as f64 / (points - 1) as f64).collect()
}

fn single_photon_sweep(cfg: &ExperimentConfig) -> Result<Vec<(SinglePhotonFamilyParams, PureBipartiteState)>> {
    let p = ExperimentConfig::need(&cfg.p, "p")?;
    let grid = angle_grid(ExperimentConfig::need(&cfg.angle_points, "angle_points")?);
    grid.iter()
        .flat_map(|&a| grid.iter().map(move |&b| (a, b)))
        .map(|(alpha_angle, beta_angle)| {
            let params = SinglePhotonFamilyParams { p, alpha_angle, beta_angle };
            Ok((params, single_photon_state(&params)?))
        })
        .collect()
}

/// Decohered entanglement of formation over the single-photon family.
pub fn run_fig1(cfg: &ExperimentConfig) -> Result<Table> {
    let states = single_photon_sweep(cfg)?;
    let t = Truncation::new(1)?;
    let channel = LossChannel::new(cfg.eta, t)?;
    let basis = TwoQubitBasis::fock(t);
    let rows = states
        .par_iter()
        .enumerate()
        .map(|(i, (params, psi))| {
            let eof = eof_two_qubit(&channel.apply_pure(psi)?, &basis)?;
            if !(-1e-12..=1.0 + 1e-12).contains(&eof) {
                return Err(Error::Contract {
                    invariant: "0 <= EoF <= 1",
                    detail: format!("row {i}: {eof}"),
                });
            }
            Ok(vec![
                Cell::from(i),
                params.alpha_angle.into(),
                params.beta_angle.into(),
                params.mean_photon_number().into(),
                entanglement_entropy(&schmidt(psi)?).into(),
                eof.into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(cfg, &["index", "alpha", "beta", "nbar", "pure_entropy", "decohered_eof"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Decohered negativity over the single-photon family.
pub fn run_fig5(cfg: &ExperimentConfig) -> Result<Table> {
    let states = single_photon_sweep(cfg)?;
    let channel = LossChannel::new(cfg.eta, Truncation::new(1)?)?;
    let rows = states
        .par_iter()
        .enumerate()
        .map(|(i, (params, psi))| {
            Ok(vec![
                Cell::from(i),
                params.alpha_angle.into(),
                params.beta_angle.into(),
                params.mean_photon_number().into(),
                pure_negativity(&schmidt(psi)?).into(),
                negativity(&channel.apply_pure(psi)?)?.into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(
        cfg,
        &["index", "alpha", "beta", "nbar", "pure_negativity", "decohered_negativity"],
    );
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Decohered entanglement of formation of the three entangled-coherent
/// families. Without `n_max` the closed-form route is used; with it, the
/// states are built in the truncated Fock space and sent through the Kraus
/// channel.
pub fn run_fig2(cfg: &ExperimentConfig) -> Result<Table> {
    let p = ExperimentConfig::need(&cfg.p, "p")?;
    let phases = ExperimentConfig::need(&cfg.phases, "phases")?;
    let alphas = ExperimentConfig::need(&cfg.alpha_grid, "alpha_grid")?;
    let mut inputs = Vec::with_capacity(3 * phases.len() * alphas.len());
    for kind in EcsKind::ALL {
        for &phi in &phases {
            for &alpha in &alphas {
                inputs.push(EcsParams { kind, p, phi, alpha });
            }
        }
    }
    let truncation = cfg.n_max.map(Truncation::new).transpose()?;
    let rows = inputs
        .par_iter()
        .map(|params| {
            params.validate()?;
            let (eof, embedding) = match truncation {
                None => (decohered_ecs_eof_closed_form(params, cfg.eta)?, None),
                Some(t) => {
                    let s = ecs_state(params, t)?;
                    cat_basis(cfg.eta.sqrt() * params.alpha, t)?;
                    (decohered_ecs_eof(params, cfg.eta, t)?, Some(s.embedding_error))
                }
            };
            Ok(vec![
                Cell::from(params.kind.number() as usize),
                params.phi.into(),
                params.alpha.into(),
                ecs_mean_photon_number(params).into(),
                binary_entropy(p).into(),
                eof.into(),
                embedding.into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(
        cfg,
        &["kind", "phi", "alpha", "nbar", "pure_entropy", "decohered_eof", "embedding_error"],
    );
    table.set_summary("route", if truncation.is_some() { "fock" } else { "closed-form" })?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// 64-bit FNV-1a over the bit patterns of a list of angles.
fn angle_hash(angles: &[f64]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for a in angles {
        for byte in a.to_bits().to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

fn join_f64(xs: &[f64]) -> String {
    xs.iter().map(|&x| table::fmt_f64(x)).collect::<Vec<_>>().join(";")
}

#[derive(Serialize)]
struct ReferenceSummary {
    nbar: f64,
    pure_entropy: f64,
    pure_negativity: f64,
    decohered_negativity: f64,
}

/// Squeezed-state Schmidt coefficients placed on random real bases of each
/// mode, one cloud per `theta_max`, plus the squeezed state itself.
pub fn run_fig34(cfg: &ExperimentConfig) -> Result<Table> {
    let t = Truncation::new(ExperimentConfig::need(&cfg.n_max, "n_max")?)?;
    let samples = ExperimentConfig::need(&cfg.samples, "samples")?;
    let thetas = ExperimentConfig::need(&cfg.theta_max, "theta_max")?;
    let e_target = ExperimentConfig::need(&cfg.e_target, "e_target")?;
    let d = t.dim();

    let reference = truncated_tmss_with_entropy(e_target, t)?;
    let ref_spec = schmidt(&reference)?;
    let coefficients = ref_spec.coefficients.clone();
    let channel = LossChannel::new(cfg.eta, t)?;
    let ref_entropy = entanglement_entropy(&ref_spec);
    let ref_neg = pure_negativity(&ref_spec);
    let ref_summary = ReferenceSummary {
        nbar: reference.mean_photon_number(),
        pure_entropy: ref_entropy,
        pure_negativity: ref_neg,
        decohered_negativity: negativity(&channel.apply_pure(&reference)?)?,
    };

    let root = SeededRng::new(cfg.seed);
    let mut inputs = Vec::with_capacity(samples * thetas.len());
    for (j, &theta) in thetas.iter().enumerate() {
        let mut rng = root.substream(j as u64);
        for i in 0..samples {
            let a = random_basis(d, theta, &mut rng)?;
            let b = random_basis(d, theta, &mut rng)?;
            inputs.push((theta, i, a, b));
        }
    }

    let rows = inputs
        .par_iter()
        .map(|(theta, i, a, b)| {
            let psi = rebase_state(&coefficients, &a.matrix, &b.matrix)?;
            let spec = schmidt(&psi)?;
            let (e, n) = (entanglement_entropy(&spec), pure_negativity(&spec));
            let drift = (e - ref_entropy).abs().max((n - ref_neg).abs());
            if drift > SCHMIDT_INVARIANCE_TOL {
                return Err(Error::Contract {
                    invariant: "rebasing preserves entropy and pure negativity",
                    detail: format!("theta_max {theta}, sample {i}: drift {drift:e}"),
                });
            }
            let angles: Vec<f64> = a.angles.iter().chain(&b.angles).copied().collect();
            Ok(vec![
                Cell::from("sample"),
                (*theta).into(),
                Cell::from(*i),
                angle_hash(&angles).into(),
                join_f64(&angles).into(),
                psi.mean_photon_number().into(),
                e.into(),
                n.into(),
                negativity(&channel.apply_pure(&psi)?)?.into(),
                Cell::Null,
            ])
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(
        cfg,
        &[
            "row_kind",
            "theta_max",
            "sample",
            "angle_hash",
            "angles",
            "nbar",
            "pure_entropy",
            "pure_negativity",
            "decohered_negativity",
            "decohered_eof",
        ],
    );
    table.push(vec![
        "reference".into(),
        Cell::Null,
        Cell::Null,
        Cell::Null,
        Cell::Null,
        ref_summary.nbar.into(),
        ref_entropy.into(),
        ref_neg.into(),
        ref_summary.decohered_negativity.into(),
        Cell::Null,
    ]);
    table.set_summary("reference", &ref_summary)?;
    table.set_summary("schmidt_coefficients", &coefficients)?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

#[derive(Serialize)]
struct ConstrainedSummary {
    e_target: f64,
    n_target: f64,
    attempts: usize,
    rejected: usize,
    tail_box: f64,
    reference: ReferenceSummary,
    best_decohered_negativity: f64,
    best_relative_improvement: f64,
    best_nbar: f64,
    spearman_purity_vs_decohered_negativity: f64,
}

/// Pure negativity of the squeezed state truncated to `rank` Schmidt terms
/// with entropy `e`.
pub fn truncated_tmss_negativity(e: f64, rank: usize) -> Result<f64> {
    let psi = truncated_tmss_with_entropy(e, Truncation::new(rank - 1)?)?;
    Ok(pure_negativity(&schmidt(&psi)?))
}

/// States `sum_k c_k |k>|k>` with fixed entropy and pure negativity, with
/// the truncated squeezed state of the same rank and entropy as reference.
pub fn run_constrained(cfg: &ExperimentConfig) -> Result<Table> {
    let rank = ExperimentConfig::need(&cfg.rank, "rank")?;
    let samples = ExperimentConfig::need(&cfg.samples, "samples")?;
    let e_target = ExperimentConfig::need(&cfg.e_target, "e_target")?;
    let t = Truncation::new(rank - 1)?;
    let n_target = match cfg.n_target {
        Some(n) => n,
        None => truncated_tmss_negativity(e_target, rank)?,
    };
    let channel = LossChannel::new(cfg.eta, t)?;

    let reference = truncated_tmss_with_entropy(e_target, t)?;
    let ref_spec = schmidt(&reference)?;
    let ref_summary = ReferenceSummary {
        nbar: reference.mean_photon_number(),
        pure_entropy: entanglement_entropy(&ref_spec),
        pure_negativity: pure_negativity(&ref_spec),
        decohered_negativity: negativity(&channel.apply_pure(&reference)?)?,
    };

    let mut rng = SeededRng::new(cfg.seed).substream(0);
    let drawn = sample_constrained_states(rank, e_target, n_target, samples, &mut rng)?;

    let evaluated = drawn
        .spectra
        .par_iter()
        .enumerate()
        .map(|(i, sol)| {
            let violation = constraint_violation(&sol.coefficients, e_target, n_target);
            if violation > CONSTRAINT_TOL {
                return Err(Error::Contract {
                    invariant: "constrained sample satisfies norm, negativity and entropy",
                    detail: format!("sample {i}: violation {violation:e}"),
                });
            }
            let psi = sol.state()?;
            let spec = sol.spectrum();
            Ok((
                psi.mean_photon_number(),
                purity_measure(&spec),
                negativity(&channel.apply_pure(&psi)?)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut columns: Vec<&'static str> = vec!["row_kind", "sample"];
    const COEFF_NAMES: [&str; 12] = ["c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8", "c9", "c10", "c11", "c12"];
    columns.extend(&COEFF_NAMES[..rank]);
    columns.extend(["nbar", "pure_entropy", "pure_negativity", "purity", "decohered_negativity", "decohered_eof"]);
    let mut table = Table::new(cfg, &columns);

    let row = |kind: &str, index: Cell, c: &[f64], nbar: f64, e: f64, n: f64, purity: f64, dn: f64| {
        let mut r = vec![Cell::from(kind), index];
        r.extend(c.iter().map(|&x| Cell::from(x)));
        r.extend([nbar.into(), e.into(), n.into(), purity.into(), dn.into(), Cell::Null]);
        r
    };
    table.push(row(
        "reference",
        Cell::Null,
        &ref_spec.coefficients,
        ref_summary.nbar,
        ref_summary.pure_entropy,
        ref_summary.pure_negativity,
        purity_measure(&ref_spec),
        ref_summary.decohered_negativity,
    ));
    for (i, (sol, &(nbar, purity, dn))) in drawn.spectra.iter().zip(&evaluated).enumerate() {
        let c = &sol.coefficients;
        table.push(row(
            "sample",
            Cell::from(i),
            c,
            nbar,
            measures::entropy_of_coefficients(c),
            measures::negativity_of_coefficients(c),
            purity,
            dn,
        ));
    }

    let best = evaluated.iter().max_by(|a, b| a.2.total_cmp(&b.2));
    let purities: Vec<f64> = evaluated.iter().map(|r| r.1).collect();
    let negs: Vec<f64> = evaluated.iter().map(|r| r.2).collect();
    table.set_summary(
        "constrained",
        ConstrainedSummary {
            e_target,
            n_target,
            attempts: drawn.attempts,
            rejected: drawn.rejected,
            tail_box: drawn.tail_box,
            best_decohered_negativity: best.map_or(f64::NAN, |b| b.2),
            best_relative_improvement: best.map_or(f64::NAN, |b| b.2 / ref_summary.decohered_negativity - 1.0),
            best_nbar: best.map_or(f64::NAN, |b| b.0),
            spearman_purity_vs_decohered_negativity: spearman(&purities, &negs),
            reference: ref_summary,
        },
    )?;
    Ok(table)
}

/// Two-mode squeezed state over a grid of mean photon numbers: closed-form
/// entropy, pure negativity and Gaussian EoF, and the truncated-Fock
/// decohered negativity.
pub fn run_tmss_table(cfg: &ExperimentConfig) -> Result<Table> {
    let t = Truncation::new(ExperimentConfig::need(&cfg.n_max, "n_max")?)?;
    let grid = ExperimentConfig::need(&cfg.nbar_grid, "nbar_grid")?;
    let channel = LossChannel::new(cfg.eta, t)?;
    let (q_nbar, q_eta, q_eof) = QUOTED_GAUSSIAN_EOF;
    let rows = grid
        .par_iter()
        .map(|&nbar| {
            let s = families::tmss(nbar, t)?;
            let quoted = (nbar == q_nbar && cfg.eta == q_eta).then_some(q_eof);
            Ok(vec![
                Cell::from(nbar),
                tmss_entropy_from_nbar(nbar).into(),
                tmss_pure_negativity(nbar).into(),
                gaussian_symmetric_eof(nbar, cfg.eta).into(),
                quoted.into(),
                negativity(&channel.apply_pure(&s.state)?)?.into(),
                s.truncation_error.into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(
        cfg,
        &[
            "nbar",
            "entropy",
            "pure_negativity",
            "gaussian_eof",
            "quoted_gaussian_eof",
            "decohered_negativity",
            "truncation_error",
        ],
    );
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Ranks with ties sharing their mean rank.
fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let mean = (i + j) as f64 / 2.0;
        for &k in &idx[i..=j] {
            r[k] = mean;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation; `NaN` for fewer than two points or a
/// constant input.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return f64::NAN;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_handles_ties_and_sign() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 4.0, 9.0, 16.0]) - 1.0).abs() < 1e-15);
        assert_eq!(ranks(&[2.0, 1.0, 2.0]), vec![1.5, 0.0, 1.5]);
        assert!(spearman(&[1.0], &[1.0]).is_nan());
    }

    #[test]
    fn angle_hash_is_stable() {
        assert_eq!(angle_hash(&[]), "cbf29ce484222325");
        assert_ne!(angle_hash(&[0.0]), angle_hash(&[-0.0]));
    }

    fn small(id: ExperimentId) -> ExperimentConfig {
        let mut c = ExperimentConfig::defaults(id);
        c.angle_points = c.angle_points.map(|_| 5);
        c.samples = c.samples.map(|_| 20);
        c.alpha_grid = c.alpha_grid.map(|_| vec![0.5, 1.0]);
        c.nbar_grid = c.nbar_grid.map(|_| vec![0.5, 1.0]);
        c.n_max = c.n_max.map(|n| n.min(8));
        c
    }

    #[test]
    fn every_experiment_runs_small() {
        for id in ExperimentId::ALL {
            let t = run(&small(id)).unwrap();
            assert!(!t.rows.is_empty(), "{id}");
            assert!(t.rows.iter().all(|r| r.len() == t.metadata.columns.len()));
        }
    }

    #[test]
    fn fig34_reference_row_comes_first() {
        let t = run_fig34(&small(ExperimentId::Fig34)).unwrap();
        assert_eq!(t.rows[0][0].as_str(), Some("reference"));
        assert_eq!(t.rows.len(), 1 + 2 * 20);
        assert_eq!(t.column("decohered_eof").iter().filter(|x| x.is_some()).count(), 0);
    }

    #[test]
    fn fig2_fock_route_matches_closed_form() {
        let mut c = small(ExperimentId::Fig2);
        c.phases = Some(vec![0.3]);
        let closed = run_fig2(&c).unwrap().column("decohered_eof");
        c.n_max = Some(20);
        let fock = run_fig2(&c).unwrap().column("decohered_eof");
        for (a, b) in closed.iter().zip(&fock) {
            assert!((a.unwrap() - b.unwrap()).abs() < 1e-6);
        }
    }
}
