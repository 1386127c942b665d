//! The three entangled-coherent families under loss, closed form against
//! the truncated Fock route.

use robust_light::families::{
    decohered_ecs_eof, decohered_ecs_eof_closed_form, ecs_mean_photon_number, ecs_truncation, EcsKind, EcsParams,
};

fn main() -> robust_light::Result<()> {
    for kind in EcsKind::ALL {
        println!("kind {}", kind.number());
        for alpha in [0.1, 0.5, 1.0, 1.5, 2.0] {
            let params = EcsParams { kind, p: 1.0 / 3.0, phi: 0.0, alpha };
            let closed = decohered_ecs_eof_closed_form(&params, 0.5)?;
            let fock = decohered_ecs_eof(&params, 0.5, ecs_truncation(alpha))?;
            println!(
                "  alpha {alpha:.1} nbar {:.4}: EoF {closed:.6} (Fock route {fock:.6})",
                ecs_mean_photon_number(&params)
            );
        }
    }
    Ok(())
}
