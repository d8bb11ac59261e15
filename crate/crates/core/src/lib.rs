//! Desk-scale numerical laboratory for nondegenerate triple-photon
//! downconversion with a quantized, depletable pump.
//!
//! A pump photon splits into one photon in each of three distinct modes.
//! Starting from triplet vacuum and a coherent pump, this crate evolves the
//! joint state exactly within its conserved-number blocks, projects the
//! reduced triplet state onto homodyne outcomes, and computes the derived
//! quantities: Wigner functions and their negativity and macroscopicity,
//! cat/Bell/qudit fidelities, purity, higher-order steering, and conditional
//! higher-order squeezing.
//!
//! # Module map
//!
//! - [`fock`] — replicated-index Fock types, quadrature eigenfunctions,
//!   coherent/cat/Bell/qudit constructors.
//! - [`dynamics`] — block-diagonal propagation with pump depletion and the
//!   perturbative short-time oracle.
//! - [`dense`] — brute-force 4-mode tensor oracle (independent verification
//!   path; tiny cutoffs only).
//! - [`conditioning`] — homodyne projection, outcome densities, ensemble
//!   averages over outcomes.
//! - [`observables`] — Wigner functions, negativity, macroscopicity,
//!   fidelities, moments, steering, conditional squeezing.
//! - [`scenario`] — declarative figure-reproduction runs: TOML configs in,
//!   CSV tables and a JSON manifest out. The `triphoton` binary is a thin
//!   front end over this module.
//!
//! # Runnable examples
//!
//! One example per major capability lives under `examples/`:
//!
//! ```text
//! cargo run --release --example cat_preparation       # homodyne-projected cat states
//! cargo run --release --example bell_projection       # Bell/qudit pair from one detector
//! cargo run --release --example steering_sweep        # S^{a->bc}, S^{b->a} over time
//! cargo run --release --example conditional_squeezing # V_bc, V_a2 windows
//! cargo run --release --example oracle_check          # block propagator vs dense tensor
//! ```

pub mod conditioning;
pub mod dense;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod observables;
pub mod scenario;

pub use conditioning::{
    condition, ensemble_average, outcome_density, outcome_density_on, HomodyneSetting,
    OutcomeGrid, QuadRule,
};
pub use dynamics::{block_generator, evolve, reduce_to_triplets, undepleted_short_time, JointState, SimParams};
pub use error::{Error, Result};
pub use fock::{
    bell_target, cat_state, coherent_amplitudes, hermite_function, qudit_target,
    quadrature_eigenfunction, CorrelatedFockDensity, FockCutoffs, Mode, PureFockVector, Quadrature,
};
pub use observables::{
    cat_fidelity, conditional_squeezing, dominant_eigenvector, fidelity, ladder_moment,
    macroscopicity, negativity, negativity_two_mode, optimal_cat_fidelity, purity,
    quadrature_stats, steering, wigner, wigner_two_mode, Axis, LadderOp, ModeCConditioning,
    SqueezeObservable, SteeringDirection, SteeringReport, WignerGrid, WignerGrid4,
};
