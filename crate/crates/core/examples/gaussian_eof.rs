//! Gaussian entanglement of formation of a lossy squeezed state, and the
//! multimode photon-pair comparison.

use robust_light::measures::{gaussian_symmetric_eof, multimode_counts, tmss_entropy_from_nbar};

fn main() -> robust_light::Result<()> {
    for nbar in [0.1, 0.5138, 1.0, 2.0] {
        println!(
            "nbar {nbar:<7} pure {:.4}  eta 0.9 {:.4}  eta 0.5 {:.4}",
            tmss_entropy_from_nbar(nbar),
            gaussian_symmetric_eof(nbar, 0.9),
            gaussian_symmetric_eof(nbar, 0.5)
        );
    }
    for m in [1, 4, 64, 1024] {
        let (single, squeezed) = multimode_counts(m)?;
        println!("modes {m:<5} superposition {single:.4} squeezed pairs {squeezed:.4}");
    }
    Ok(())
}
