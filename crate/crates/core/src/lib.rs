//! Single diamond nanocrystal coupled to the twin whispering-gallery modes of a
//! microtoroid probed through a tapered fiber.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: dense complex matrices, Kronecker products, LU, Hermitian
//!   eigenvalues and a classical RK4 step.
//! * [`params`]: fabrication inputs to coupling and damping rates.
//! * [`semiclassical`]: linearised steady-state input-output response
//!   (spectra, losses, phase, interference components, dips).
//! * [`quantum`]: truncated Fock-space Lindblad model, steady state and
//!   output-field photon statistics.
//! * [`exec`]: sequential or data-parallel evaluation of independent scan
//!   points.
//!
//! Rates are angular (rad/s) everywhere inside the crate. Anything labelled
//! MHz is an ordinary frequency `ω / 2π`, see [`units`].

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
mod error;
pub mod exec;
pub mod numerics;
pub mod params;
pub mod quantum;
pub mod semiclassical;
pub mod units;

pub use error::{Error, Result};
pub use exec::ExecPolicy;
pub use params::{DeltaEcSpec, DerivedRates, Kappa1Spec, Region, SystemConfig};
