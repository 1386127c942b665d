//! Running an experiment from overrides and writing its table to stdout.

use robust_light::experiments::{run, ConfigOverrides, ExperimentConfig, ExperimentId};

fn main() -> robust_light::Result<()> {
    let overrides = ConfigOverrides { samples: Some(5), seed: Some(42), ..Default::default() };
    let cfg = ExperimentConfig::resolve(ExperimentId::Fig67, &overrides, false)?;
    let table = run(&cfg)?;
    table.write(std::io::stdout().lock())
}
