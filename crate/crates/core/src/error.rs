use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dipole pole: gamma_s = 0 with probe on the emitter resonance (delta_pc = delta_ec = {delta:e} rad/s)")]
    Singularity { delta: f64 },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("phase undefined for amplitude of modulus {0:e}")]
    UndefinedPhase(f64),

    #[error(
        "Fock truncation too small: predicted occupation {predicted:e} exceeds headroom {limit:e} for cutoff {cutoff}"
    )]
    Truncation { predicted: f64, limit: f64, cutoff: usize },

    #[error("matrix is singular to working precision (pivot {pivot:e} at column {column})")]
    SingularMatrix { pivot: f64, column: usize },

    #[error("solution residual {residual:e} exceeds bound {bound:e}")]
    ResidualTooLarge { residual: f64, bound: f64 },

    #[error("steady state is not unique: {0}")]
    NonUniqueSteadyState(String),

    #[error("density operator check failed: {0}")]
    InvalidState(String),

    #[error("matrix of {entries} entries exceeds the dense size cap of {cap}")]
    Size { entries: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("g2 undefined: output flux {0:e} is below the 1e-30 floor")]
    UndefinedG2(f64),
}
