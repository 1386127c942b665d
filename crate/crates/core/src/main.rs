//! Command-line driver for the experiment tables.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 when a numerical
//! contract is violated.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use robust_light::experiments::{self, ConfigOverrides, ExperimentConfig, ExperimentId};
use robust_light::Error;

#[derive(Parser)]
#[command(name = "robust-light", version, about = "Photon-loss robustness tables for entangled states of light")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Decohered EoF over the single-photon family.
    Fig1,
    /// Decohered EoF of the three entangled-coherent families.
    Fig2,
    /// Randomly rebased squeezed-state spectra.
    Fig34,
    /// Decohered negativity over the single-photon family.
    Fig5,
    /// Constrained rank-4 spectra.
    Fig67,
    /// Constrained rank-5 spectra.
    Fig89,
    /// Squeezed-state closed forms and Fock-space decohered negativity.
    TmssTable,
    /// Every experiment, written into the `--out` directory.
    Sweep,
}

#[derive(Args)]
struct Flags {
    #[arg(long, global = true)]
    eta: Option<f64>,
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long, global = true)]
    n_max: Option<usize>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Repeat or comma-separate for several clouds.
    #[arg(long, global = true, value_delimiter = ',')]
    theta_max: Option<Vec<f64>>,
    #[arg(long, global = true)]
    e_target: Option<f64>,
    #[arg(long, global = true)]
    n_target: Option<f64>,
    #[arg(long, global = true)]
    rank: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (directory for `sweep`); stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON file of configuration values; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Flags {
    fn overrides(&self) -> Result<ConfigOverrides, Error> {
        let file = match &self.config {
            Some(path) => ConfigOverrides::from_json_file(path)?,
            None => ConfigOverrides::default(),
        };
        Ok(file.merge(ConfigOverrides {
            eta: self.eta,
            p: self.p,
            n_max: self.n_max,
            samples: self.samples,
            theta_max: self.theta_max.clone(),
            e_target: self.e_target,
            n_target: self.n_target,
            rank: self.rank,
            seed: self.seed,
            out: self.out.clone(),
            ..Default::default()
        }))
    }
}

fn execute(cli: &Cli) -> Result<(), Error> {
    let overrides = cli.flags.overrides()?;
    let id = match cli.command {
        Command::Fig1 => ExperimentId::Fig1,
        Command::Fig2 => ExperimentId::Fig2,
        Command::Fig34 => ExperimentId::Fig34,
        Command::Fig5 => ExperimentId::Fig5,
        Command::Fig67 => ExperimentId::Fig67,
        Command::Fig89 => ExperimentId::Fig89,
        Command::TmssTable => ExperimentId::TmssTable,
        Command::Sweep => {
            let dir = overrides.out.clone().unwrap_or_else(|| PathBuf::from("results"));
            for path in experiments::sweep(&overrides, &dir)? {
                eprintln!("wrote {}", path.display());
            }
            return Ok(());
        }
    };
    let cfg = ExperimentConfig::resolve(id, &overrides, false)?;
    let table = experiments::run(&cfg)?;
    match &cfg.out {
        Some(path) => table.write_to_path(path),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(&mut lock)?;
            lock.flush().map_err(Error::from)
        }
    }
}

/// 2 for configuration errors, 3 for everything numerical.
fn exit_code(e: &Error) -> u8 {
    if e.is_config_error() {
        2
    } else {
        3
    }
}

fn report(e: &Error) {
    match e {
        Error::Contract { invariant, .. } => eprintln!("numerical contract violated [{invariant}]: {e}"),
        _ if e.is_config_error() => eprintln!("error: {e}"),
        _ => eprintln!("numerical contract violated: {e}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("robust-light").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("cfg.json");
        std::fs::write(&cfg, r#"{"eta": 0.9, "seed": 5, "samples": 3}"#).unwrap();
        let cli = parse(&["fig34", "--config", cfg.to_str().unwrap(), "--eta", "0.3"]);
        let o = cli.flags.overrides().unwrap();
        let resolved = ExperimentConfig::resolve(ExperimentId::Fig34, &o, false).unwrap();
        assert_eq!(resolved.eta, 0.3);
        assert_eq!(resolved.seed, 5);
        assert_eq!(resolved.samples, Some(3));
    }

    #[test]
    fn theta_max_accepts_lists() {
        let cli = parse(&["fig34", "--theta-max", "0.1,0.2"]);
        assert_eq!(cli.flags.theta_max, Some(vec![0.1, 0.2]));
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let out = |name: &str| dir.path().join(name);
        for name in ["a.csv", "b.csv"] {
            let cli = parse(&["fig67", "--samples", "40", "--seed", "9", "--out", out(name).to_str().unwrap()]);
            execute(&cli).unwrap();
        }
        let read = |name: &str| std::fs::read_to_string(out(name)).unwrap();
        assert!(read("a.csv") == read("b.csv"));
    }

    #[test]
    fn exit_codes() {
        let bad = execute(&parse(&["fig1", "--eta", "2"])).unwrap_err();
        assert_eq!(exit_code(&bad), 2);
        let inapplicable = execute(&parse(&["fig1", "--rank", "5"])).unwrap_err();
        assert_eq!(exit_code(&inapplicable), 2);
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("cfg.json");
        std::fs::write(&cfg, "{not json").unwrap();
        let broken = execute(&parse(&["fig1", "--config", cfg.to_str().unwrap()])).unwrap_err();
        assert_eq!(exit_code(&broken), 2);
        let contract = Error::Contract { invariant: "x", detail: String::new() };
        assert_eq!(exit_code(&contract), 3);
        assert_eq!(exit_code(&Error::NoConvergence { sweeps: 100 }), 3);
    }
}
