//! Dense complex linear algebra used by the open-system solver.
//!
//! Tensor-factor ordering for the composite space is fixed as
//! `atom ⊗ a₊ ⊗ a₋`; see [`embed`].

mod cmatrix;
mod eigen;
mod lu;
mod ode;

pub use cmatrix::{embed, kron, CMatrix, MAX_ENTRIES};
pub use eigen::{hermitian_eigenvalues, symmetric_eigenvalues};
pub use lu::{lu_solve, Lu};
pub use ode::{rk4_step, LinearMap};

pub use num_complex::Complex64 as C64;
