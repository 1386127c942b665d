//! Photon-absorption decoherence of bipartite entangled states of light.
//!
//! States live in a truncated two-mode Fock space. The crate provides:
//!
//! - [`linalg`]: dense complex kernels (Jacobi Hermitian eigensolver, one-sided
//!   Jacobi SVD, trace norm) sized for a few dozen rows.
//! - [`fock`]: pure states, density operators, partial trace and transpose,
//!   photon statistics and coherent-state embedding.
//! - [`channel`]: the photon-loss channel, both as Kraus operators in the Fock
//!   basis and as its closed-form action on coherent-state dyads.
//! - [`measures`]: Schmidt decomposition, entanglement entropy, negativity,
//!   Wootters concurrence, Gaussian entanglement of formation, purity.
//! - [`families`]: the two-mode squeezed state, the single-photon family and
//!   the three entangled-coherent families.
//! - [`sampling`]: seeded random bases and the constrained Schmidt solver.
//! - [`experiments`]: the experiment runners behind the `robust-light` binary,
//!   writing CSV tables with a JSON metadata header.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod channel;
pub mod error;
pub mod experiments;
pub mod families;
pub mod fock;
pub mod linalg;
pub mod measures;
pub mod sampling;

pub use error::{Error, Result};
pub use num_complex::Complex64;
