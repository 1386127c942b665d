//! Experiment configuration: per-experiment defaults, JSON config files and
//! flag overrides, validated before any computation.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::binary_entropy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    Fig1,
    Fig2,
    Fig34,
    Fig5,
    Fig67,
    Fig89,
    TmssTable,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        ExperimentId::Fig1,
        ExperimentId::Fig2,
        ExperimentId::Fig34,
        ExperimentId::Fig5,
        ExperimentId::Fig67,
        ExperimentId::Fig89,
        ExperimentId::TmssTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Fig1 => "fig1",
            ExperimentId::Fig2 => "fig2",
            ExperimentId::Fig34 => "fig34",
            ExperimentId::Fig5 => "fig5",
            ExperimentId::Fig67 => "fig67",
            ExperimentId::Fig89 => "fig89",
            ExperimentId::TmssTable => "tmss-table",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Partial configuration from a JSON file or command-line flags. Every
/// field is optional; unknown keys are rejected.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub eta: Option<f64>,
    pub p: Option<f64>,
    pub phases: Option<Vec<f64>>,
    pub alpha_grid: Option<Vec<f64>>,
    pub angle_points: Option<usize>,
    pub n_max: Option<usize>,
    pub samples: Option<usize>,
    pub theta_max: Option<Vec<f64>>,
    pub e_target: Option<f64>,
    pub n_target: Option<f64>,
    pub rank: Option<usize>,
    pub seed: Option<u64>,
    pub nbar_grid: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
}

impl ConfigOverrides {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// `other` wins wherever it is set.
    pub fn merge(mut self, other: ConfigOverrides) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(eta, p, phases, alpha_grid, angle_points, n_max, samples, theta_max, e_target, n_target, rank, seed, nbar_grid, out);
        self
    }
}

pub const DEFAULT_SEED: u64 = 20_050_101;

/// Fully resolved configuration. Fields that do not apply to the
/// experiment are `None` and serialize as `null`.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub eta: f64,
    pub p: Option<f64>,
    pub phases: Option<Vec<f64>>,
    pub alpha_grid: Option<Vec<f64>>,
    /// Points per axis of the square angle grid over `[0, pi]`.
    pub angle_points: Option<usize>,
    /// `None` for fig2 selects the closed-form route.
    pub n_max: Option<usize>,
    pub samples: Option<usize>,
    pub theta_max: Option<Vec<f64>>,
    pub e_target: Option<f64>,
    /// `None` for fig67/fig89 means "pure negativity of the truncated
    /// squeezed state at `e_target`"; the runner records the value used.
    pub n_target: Option<f64>,
    pub rank: Option<usize>,
    pub seed: u64,
    pub nbar_grid: Option<Vec<f64>>,
    /// Where the table is written; not part of the recorded metadata so
    /// the same run written to two places compares equal.
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn grid(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| ((start + step * i as f64) * 1e12).round() / 1e12).collect()
}

impl ExperimentConfig {
    pub fn defaults(experiment: ExperimentId) -> Self {
        let mut c = ExperimentConfig {
            experiment,
            eta: 0.5,
            p: None,
            phases: None,
            alpha_grid: None,
            angle_points: None,
            n_max: None,
            samples: None,
            theta_max: None,
            e_target: None,
            n_target: None,
            rank: None,
            seed: DEFAULT_SEED,
            nbar_grid: None,
            out: None,
        };
        match experiment {
            ExperimentId::Fig1 | ExperimentId::Fig5 => {
                c.p = Some(1.0 / 3.0);
                c.angle_points = Some(101);
            }
            ExperimentId::Fig2 => {
                c.p = Some(1.0 / 3.0);
                c.phases = Some(vec![0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI]);
                c.alpha_grid = Some(grid(0.05, 0.05, 40));
            }
            ExperimentId::Fig34 => {
                c.n_max = Some(6);
                c.samples = Some(1000);
                c.theta_max = Some(vec![0.1, 2.0 * PI]);
                c.e_target = Some(binary_entropy(1.0 / 3.0));
            }
            ExperimentId::Fig67 | ExperimentId::Fig89 => {
                c.samples = Some(1000);
                c.e_target = Some(0.2);
                c.rank = Some(if experiment == ExperimentId::Fig67 { 4 } else { 5 });
            }
            ExperimentId::TmssTable => {
                c.n_max = Some(12);
                let mut g = grid(0.1, 0.1, 20);
                g.extend([0.5138, 0.5876]);
                g.sort_by(f64::total_cmp);
                c.nbar_grid = Some(g);
            }
        }
        c
    }

    /// Defaults, then `overrides`. Setting a field the experiment does not
    /// use is a configuration error unless `lenient`, in which case it is
    /// ignored (used by `sweep`).
    pub fn resolve(experiment: ExperimentId, overrides: &ConfigOverrides, lenient: bool) -> Result<Self> {
        let mut c = Self::defaults(experiment);
        let uses_n_max = matches!(experiment, ExperimentId::Fig2 | ExperimentId::Fig34 | ExperimentId::TmssTable);
        let uses_n_target = matches!(experiment, ExperimentId::Fig67 | ExperimentId::Fig89);

        let mut unused = Vec::new();
        macro_rules! apply {
            ($f:ident, $applies:expr) => {
                if let Some(v) = overrides.$f.clone() {
                    if $applies {
                        c.$f = Some(v);
                    } else {
                        unused.push(stringify!($f));
                    }
                }
            };
        }
        apply!(p, c.p.is_some());
        apply!(phases, c.phases.is_some());
        apply!(alpha_grid, c.alpha_grid.is_some());
        apply!(angle_points, c.angle_points.is_some());
        apply!(n_max, uses_n_max);
        apply!(samples, c.samples.is_some());
        apply!(theta_max, c.theta_max.is_some());
        apply!(e_target, c.e_target.is_some());
        apply!(n_target, uses_n_target);
        apply!(rank, c.rank.is_some());
        apply!(nbar_grid, c.nbar_grid.is_some());
        if let Some(eta) = overrides.eta {
            c.eta = eta;
        }
        if let Some(seed) = overrides.seed {
            c.seed = seed;
        }
        c.out = overrides.out.clone();
        if !unused.is_empty() && !lenient {
            return Err(Error::Config(format!("{experiment} does not use: {}", unused.join(", "))));
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(0.0..=1.0).contains(&self.eta) {
            return bad(format!("eta = {} not in [0, 1]", self.eta));
        }
        if let Some(p) = self.p {
            if !(0.0..=0.5).contains(&p) {
                return bad(format!("p = {p} not in [0, 1/2]"));
            }
        }
        if let Some(phases) = &self.phases {
            if phases.is_empty() || phases.iter().any(|x| !x.is_finite()) {
                return bad("phases must be a nonempty list of finite values".into());
            }
        }
        if let Some(alphas) = &self.alpha_grid {
            if alphas.is_empty() || alphas.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
                return bad("alpha_grid must be a nonempty list of positive values".into());
            }
        }
        if let Some(n) = self.angle_points {
            if n < 2 {
                return bad("angle_points must be at least 2".into());
            }
        }
        if let Some(n) = self.n_max {
            if n < 1 || n > 40 {
                return bad(format!("n_max = {n} not in [1, 40]"));
            }
        }
        if let Some(s) = self.samples {
            if s < 1 {
                return bad("samples must be at least 1".into());
            }
        }
        if let Some(ts) = &self.theta_max {
            if ts.is_empty() || ts.iter().any(|&t| !(t > 0.0 && t <= 2.0 * PI)) {
                return bad("theta_max values must lie in (0, 2 pi]".into());
            }
        }
        if let Some(r) = self.rank {
            if !(4..=12).contains(&r) {
                return bad(format!("rank = {r} not in [4, 12]"));
            }
        }
        if let Some(e) = self.e_target {
            let cap = match (self.rank, self.n_max) {
                (Some(r), _) => (r as f64).log2(),
                (None, Some(n)) => ((n + 1) as f64).log2(),
                _ => f64::INFINITY,
            };
            if !(e > 0.0 && e < cap) {
                return bad(format!("e_target = {e} not in (0, {cap})"));
            }
        }
        if let Some(n) = self.n_target {
            if !(n >= 0.0 && n.is_finite()) {
                return bad(format!("n_target = {n} must be finite and nonnegative"));
            }
        }
        if let Some(g) = &self.nbar_grid {
            if g.is_empty() || g.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
                return bad("nbar_grid must be a nonempty list of nonnegative values".into());
            }
        }
        Ok(())
    }

    pub(crate) fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
        v.clone().ok_or_else(|| Error::Config(format!("missing {name}")))
    }
}
