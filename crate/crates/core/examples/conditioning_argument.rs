//! Splitting the decohered state into Kraus branches: conditioning on no
//! photon loss concentrates entanglement, averaging over branches does not.

use robust_light::channel::{branch_averaged_entropy, LossChannel};
use robust_light::families::{bell_even, bell_odd};
use robust_light::fock::Truncation;

fn main() -> robust_light::Result<()> {
    let ch = LossChannel::new(0.5, Truncation::new(1)?)?;
    for (name, psi) in [("|00>+|11>", bell_even()), ("|01>+|10>", bell_odd())] {
        println!("{name}");
        for b in ch.branches(&psi)? {
            println!(
                "  lost {:?}: probability {:.4} conditional entropy {:.5}",
                b.lost,
                b.probability(),
                b.conditional_entropy()?
            );
        }
        println!("  branch-averaged entropy {:.5}", branch_averaged_entropy(&ch, &psi)?);
    }
    Ok(())
}
