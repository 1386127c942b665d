//! The photon-loss channel on a two-mode squeezed state, checked against the
//! closed-form action on coherent dyads.

use robust_light::channel::{coherent_dyad_image, LossChannel};
use robust_light::families::tmss;
use robust_light::fock::{coherent_vector, Truncation};
use robust_light::measures::negativity;
use robust_light::Complex64;

fn main() -> robust_light::Result<()> {
    let t = Truncation::new(12)?;
    let psi = tmss(0.5138, t)?.state;
    let rho = psi.to_density();
    for eta in [1.0, 0.9, 0.7, 0.5, 0.3, 0.0] {
        let out = LossChannel::new(eta, t)?.apply_two_mode(&rho)?;
        println!(
            "eta {eta:.1}: trace {:.12} nbar {:.6} N {:.6}",
            out.trace(),
            out.mean_photon_number(),
            negativity(&out)?
        );
    }

    // <n|E(|a><b|)|m> from Kraus operators vs the closed form, single mode.
    let (alpha, beta, eta) = (Complex64::new(0.8, 0.3), Complex64::new(-0.4, 0.6), 0.5);
    let tc = Truncation::new(30)?;
    let ch = LossChannel::new(eta, tc)?;
    let va = coherent_vector(alpha, tc).amplitudes;
    let vb = coherent_vector(beta, tc).amplitudes;
    let img = coherent_dyad_image(alpha, beta, eta);
    let ka = coherent_vector(img.ket, tc).amplitudes;
    let kb = coherent_vector(img.bra, tc).amplitudes;
    let mut kraus_01 = Complex64::new(0.0, 0.0);
    for k in 0..ch.kraus_count() {
        let a = ch.kraus(k);
        let mut left = Complex64::new(0.0, 0.0);
        let mut right = Complex64::new(0.0, 0.0);
        for j in 0..tc.dim() {
            left += a[(0, j)] * va[j];
            right += (a[(1, j)] * vb[j]).conj();
        }
        kraus_01 += left * right;
    }
    let closed_01 = img.scale * ka[0] * kb[1].conj();
    println!("dyad element <0|.|1>: Kraus {kraus_01:.12} closed form {closed_01:.12}");
    Ok(())
}
