//! Entropy, negativity and purity of a truncated two-mode squeezed state.

use robust_light::families::tmss;
use robust_light::fock::Truncation;
use robust_light::measures::{
    entanglement_entropy, pure_negativity, purity_measure, schmidt, tmss_entropy_from_nbar, tmss_nbar_from_entropy,
};

fn main() -> robust_light::Result<()> {
    let t = Truncation::new(16)?;
    for nbar in [0.1, 0.5138, 1.0, 2.0] {
        let s = tmss(nbar, t)?;
        let spectrum = schmidt(&s.state)?;
        println!(
            "nbar {nbar:<7} E {:.6} (exact {:.6})  N {:.6}  purity {:.6}  tail {:.1e}",
            entanglement_entropy(&spectrum),
            tmss_entropy_from_nbar(nbar),
            pure_negativity(&spectrum),
            purity_measure(&spectrum),
            s.truncation_error,
        );
    }
    println!("nbar carrying one ebit: {:.6}", tmss_nbar_from_entropy(1.0));
    Ok(())
}
