//! Schmidt spectra with prescribed entropy and negativity, and how they
//! fare under loss.

use robust_light::channel::LossChannel;
use robust_light::experiments::truncated_tmss_negativity;
use robust_light::fock::Truncation;
use robust_light::measures::{negativity, purity_of_coefficients};
use robust_light::sampling::{constraint_violation, sample_constrained_states, SeededRng};

fn main() -> robust_light::Result<()> {
    let (rank, e) = (4, 0.2);
    let n = truncated_tmss_negativity(e, rank)?;
    let mut rng = SeededRng::new(1);
    let samples = sample_constrained_states(rank, e, n, 20, &mut rng)?;
    println!(
        "E {e} N {n:.6}: {} accepted of {} tails (box {:.4})",
        samples.spectra.len(),
        samples.attempts,
        samples.tail_box
    );
    let channel = LossChannel::new(0.5, Truncation::new(rank - 1)?)?;
    for s in samples.spectra.iter().take(5) {
        let c = &s.coefficients;
        let dec = negativity(&channel.apply_pure(&s.state()?)?)?;
        println!(
            "  c {:.4?} purity {:.5} violation {:.1e} decohered N {dec:.6}",
            c,
            purity_of_coefficients(c),
            constraint_violation(c, e, n)
        );
    }
    Ok(())
}
