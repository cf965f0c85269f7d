//! Open-system model of the two standing modes and the NV transition.
//!
//! The composite space is `atom ⊗ a₊ ⊗ a₋`, each mode truncated at its own
//! Fock cutoff. The atom basis is `{|g⟩, |e⟩}` in that order. Collapse
//! operators carry energy decay rates, so that the amplitude decays of the
//! mean-field equations (κ₊, κ₋, γ_s/2) are reproduced:
//!
//! | channel            | operator        | amplitude rate |
//! |--------------------|-----------------|----------------|
//! | intrinsic, a₊      | √κ₀ a₊          | κ₀/2           |
//! | taper, a₊          | √κ₁ a₊          | κ₁/2           |
//! | scattering, a₊     | √(2κ_R) a₊      | κ_R            |
//! | intrinsic, a₋      | √κ₀ a₋          | κ₀/2           |
//! | taper, a₋          | √κ₁ a₋          | κ₁/2           |
//! | spontaneous        | √γ_s σ₋         | γ_s/2          |

mod correlation;
mod liouville;
mod model;

pub use correlation::{
    convergence_check, g2_scan, g2_tau, output_moments, port_moments, ConvergenceReport, CorrelationResult,
    G2ScanPoint, Port, PortMoments, G2_TAU_STEP_FACTOR,
};
pub use liouville::{liouvillian, liouvillian_from, steady_state, DensityOperator};
pub use model::{
    build_model, drive_for_occupation, predicted_occupation, CollapseOp, Cutoffs, Operators, QuantumModel,
    HEADROOM_FRACTION,
};
