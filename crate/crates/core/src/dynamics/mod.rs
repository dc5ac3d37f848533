//! Time-domain evolution of two coupled Duffing oscillators under flux drives,
//! and the damped-cosine fit used to read couplings off population traces.

mod fit;
mod integrate;
mod system;

pub use fit::{fit_damped_cosine, DampedCosine};
pub use integrate::{
    evolve, evolve_interaction_picture, evolve_interaction_picture_with, evolve_with,
    parking_frequencies, Integration, TimeTrace, NORM_TOLERANCE,
};
pub use system::{hamiltonian_at, TwoQubitSystem};
