use num_complex::Complex64 as C64;

use super::QuantumModel;
use crate::numerics::{hermitian_eigenvalues, CMatrix, Lu, MAX_ENTRIES};
use crate::{Error, Result};

const TRACE_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-9;
const POSITIVITY_TOL: f64 = 1e-7;
const RESIDUAL_TOL: f64 = 1e-8;

/// Adds `coeff · (Bᵀ ⊗ A)`, the column-major matrix of `ρ ↦ AρB`.
fn add_sandwich(l: &mut CMatrix, a: &CMatrix, b: &CMatrix, coeff: C64) {
    let n = a.rows();
    let nz = |m: &CMatrix| -> Vec<(usize, usize, C64)> {
        let mut v = Vec::new();
        for i in 0..m.rows() {
            for (j, &z) in m.row(i).iter().enumerate() {
                if z != C64::new(0.0, 0.0) {
                    v.push((i, j, z));
                }
            }
        }
        v
    };
    let a_nz = nz(a);
    let b_nz = nz(b);
    for &(bl, bj, bz) in &b_nz {
        // (Bᵀ)[j, l] = B[l, j]
        let s = coeff * bz;
        for &(ai, ak, az) in &a_nz {
            l[(bj * n + ai, bl * n + ak)] += s * az;
        }
    }
}

/// `L[ρ] = −i[H, ρ] + Σ_C (CρC† − ½{C†C, ρ})` acting on column-major
/// `vec(ρ)`.
pub fn liouvillian_from(h: &CMatrix, collapse: &[CMatrix]) -> Result<CMatrix> {
    let n = h.rows();
    if !h.is_square() || collapse.iter().any(|c| c.rows() != n || c.cols() != n) {
        return Err(Error::Dimension("Hamiltonian and collapse operators must share one square shape".into()));
    }
    let entries = n.pow(4);
    if entries > MAX_ENTRIES {
        return Err(Error::Size { entries, cap: MAX_ENTRIES });
    }
    let id = CMatrix::identity(n);
    let mut l = CMatrix::zeros(n * n, n * n);
    let i = C64::new(0.0, 1.0);

    // H_eff = H − (i/2) Σ C†C collects every left/right action
    let mut h_eff = h.clone();
    for c in collapse {
        h_eff.add_scaled(&(&c.adjoint() * c), -0.5 * i);
    }
    add_sandwich(&mut l, &h_eff, &id, -i);
    add_sandwich(&mut l, &id, &h_eff.adjoint(), i);
    for c in collapse {
        add_sandwich(&mut l, c, &c.adjoint(), C64::new(1.0, 0.0));
    }
    Ok(l)
}

pub fn liouvillian(model: &QuantumModel) -> Result<CMatrix> {
    let ops: Vec<CMatrix> = model.collapse.iter().filter(|c| c.rate != 0.0).map(|c| c.op.clone()).collect();
    liouvillian_from(&model.hamiltonian, &ops)
}

/// Validated density matrix.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: CMatrix,
    min_eigenvalue: f64,
}

impl DensityOperator {
    /// Checks trace, Hermiticity and positivity (up to truncation error).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension("density operator must be square".into()));
        }
        let tr = matrix.trace();
        if (tr - 1.0).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let herm = matrix.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("Hermiticity error {herm:e}")));
        }
        let min_eigenvalue = hermitian_eigenvalues(&matrix)?[0];
        if min_eigenvalue < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eigenvalue:e}")));
        }
        Ok(Self { matrix, min_eigenvalue })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// `Tr(ρ·O)`.
    pub fn expect(&self, op: &CMatrix) -> C64 {
        self.matrix.trace_product(op)
    }
}

/// Solves `L·vec(ρ) = 0` with one row replaced by the trace condition.
///
/// The trace row is scaled by `‖L‖∞` so it does not dominate pivoting.
pub fn steady_state(l: &CMatrix) -> Result<DensityOperator> {
    let nn = l.rows();
    let n = (nn as f64).sqrt().round() as usize;
    if !l.is_square() || n * n != nn {
        return Err(Error::Dimension(format!("{}x{} is not a Liouvillian shape", l.rows(), l.cols())));
    }
    let scale = l.norm_inf().max(1.0);
    let mut a = l.clone();
    {
        let row = a.row_mut(0);
        row.fill(C64::new(0.0, 0.0));
        for k in 0..n {
            row[k * n + k] = C64::new(scale, 0.0);
        }
    }
    let mut b = vec![C64::new(0.0, 0.0); nn];
    b[0] = C64::new(scale, 0.0);

    let lu = Lu::factor(&a).map_err(|e| match e {
        Error::SingularMatrix { pivot, column } => Error::NonUniqueSteadyState(format!(
            "trace-constrained Liouvillian is singular (pivot {pivot:e} at column {column})"
        )),
        other => other,
    })?;
    let x = lu.solve(&b)?;

    let lx = l.matvec(&x)?;
    let residual = lx.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if residual >= RESIDUAL_TOL * l.norm_inf() {
        return Err(Error::ResidualTooLarge { residual, bound: RESIDUAL_TOL * l.norm_inf() });
    }
    let rho = CMatrix::unvectorize(&x, n)?;
    let herm = rho.hermiticity_error();
    if herm > HERMITIAN_TOL {
        return Err(Error::InvalidState(format!("steady state Hermiticity error {herm:e}")));
    }
    // drop the round-off anti-Hermitian part
    let rho = (&rho + &rho.adjoint()).scale_real(0.5);
    DensityOperator::new(rho)
}
