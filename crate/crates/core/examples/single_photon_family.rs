//! Decohered entanglement of formation across the single-photon family.

use robust_light::experiments::{run_fig1, ExperimentConfig, ExperimentId};

fn main() -> robust_light::Result<()> {
    let cfg = ExperimentConfig::defaults(ExperimentId::Fig1);
    let t = run_fig1(&cfg)?;
    let nbar = t.column("nbar");
    let eof = t.column("decohered_eof");
    let pure = t.column("pure_entropy");
    let best = (0..t.rows.len()).max_by(|&i, &j| eof[i].unwrap().total_cmp(&eof[j].unwrap())).unwrap();
    println!("{} states, eta {:?}, p {:?}", t.rows.len(), cfg.eta, cfg.p);
    println!(
        "largest decohered EoF {:.5} at nbar {:.4} (pure entropy {:.5})",
        eof[best].unwrap(),
        nbar[best].unwrap(),
        pure[best].unwrap()
    );
    for target in [2.0 / 3.0, 1.0, 4.0 / 3.0] {
        let m = (0..t.rows.len())
            .filter(|&i| (nbar[i].unwrap() - target).abs() < 1e-9)
            .map(|i| eof[i].unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        println!("  nbar {target:.4}: best EoF {m:.5}");
    }
    Ok(())
}
