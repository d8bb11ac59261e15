//! Derived quantities: Wigner functions and their negativity and
//! macroscopicity, purities and fidelities, higher-order moments, steering,
//! and conditional squeezing.

pub mod fidelity;
pub mod moments;
pub mod steering;
pub mod wigner;

pub use fidelity::{cat_fidelity, dominant_eigenvector, fidelity, optimal_cat_fidelity, purity};
pub use moments::{ladder_moment, quadrature_stats, LadderOp, QuadStats};
pub use steering::{
    conditional_squeezing, steering, ModeCConditioning, SqueezeObservable, SteeringDirection,
    SteeringReport,
};
pub use wigner::{
    macroscopicity, negativity, negativity_two_mode, wigner, wigner_two_mode,
    wigner_via_characteristic, Axis, WignerGrid, WignerGrid4,
};
