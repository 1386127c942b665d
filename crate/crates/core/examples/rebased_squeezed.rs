//! Rebasing a truncated squeezed state in random local bases: the Schmidt
//! spectrum is fixed, the decohered negativity is not.

use robust_light::channel::LossChannel;
use robust_light::families::truncated_tmss_with_entropy;
use robust_light::fock::Truncation;
use robust_light::measures::{binary_entropy, negativity, schmidt};
use robust_light::sampling::{random_basis, rebase_state, SeededRng};

fn main() -> robust_light::Result<()> {
    let t = Truncation::new(6)?;
    let reference = truncated_tmss_with_entropy(binary_entropy(1.0 / 3.0), t)?;
    let coeffs = schmidt(&reference)?.coefficients;
    let channel = LossChannel::new(0.5, t)?;
    println!("reference: nbar {:.4} decohered N {:.6}", reference.mean_photon_number(), negativity(&channel.apply_pure(&reference)?)?);

    let mut rng = SeededRng::new(7);
    for theta_max in [0.1, 1.0, std::f64::consts::TAU] {
        let mut best = f64::NEG_INFINITY;
        for _ in 0..50 {
            let a = random_basis(t.dim(), theta_max, &mut rng)?;
            let b = random_basis(t.dim(), theta_max, &mut rng)?;
            let psi = rebase_state(&coeffs, &a.matrix, &b.matrix)?;
            best = best.max(negativity(&channel.apply_pure(&psi)?)?);
        }
        println!("theta_max {theta_max:.3}: best of 50 decohered N {best:.6}");
    }
    Ok(())
}
