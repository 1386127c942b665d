//! The single-photon family scored by negativity instead of EoF.

use robust_light::experiments::{run_fig5, ExperimentConfig, ExperimentId};

fn main() -> robust_light::Result<()> {
    let t = run_fig5(&ExperimentConfig::defaults(ExperimentId::Fig5))?;
    let nbar = t.column("nbar");
    let pure = t.column("pure_negativity");
    let dec = t.column("decohered_negativity");
    for i in (0..t.rows.len()).step_by(t.rows.len() / 10) {
        println!(
            "nbar {:.4}  pure N {:.5}  decohered N {:.5}",
            nbar[i].unwrap(),
            pure[i].unwrap(),
            dec[i].unwrap()
        );
    }
    Ok(())
}
