use num_complex::Complex64 as C64;

use super::CMatrix;
use crate::{Error, Result};

/// Relative pivot floor: a pivot below `PIVOT_FLOOR · ‖A‖∞` is singular.
const PIVOT_FLOOR: f64 = 1e-14;
/// Backward-error bound checked by [`lu_solve`].
const RESIDUAL_BOUND: f64 = 1e-10;

/// LU factorisation with partial (row) pivoting, `P·A = L·U`.
///
/// `L` (unit diagonal) and `U` share one row-major buffer.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn factor(a: &CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!("LU needs a square matrix, got {}x{}", a.rows(), a.cols())));
        }
        let n = a.rows();
        let floor = PIVOT_FLOOR * a.norm_inf();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let data = lu.as_mut_slice();

        for k in 0..n {
            let (p, pmag) =
                (k..n)
                    .map(|i| (i, data[i * n + k].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmag > floor) || pmag == 0.0 {
                return Err(Error::SingularMatrix { pivot: pmag, column: k });
            }
            if p != k {
                for j in 0..n {
                    data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let (head, tail) = data.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..];
            let inv = C64::new(1.0, 0.0) / pivot_row[k];
            for row in tail.chunks_exact_mut(n) {
                if row[k] == C64::new(0.0, 0.0) {
                    continue;
                }
                let f = row[k] * inv;
                row[k] = f;
                for (x, &u) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                    *x -= f * u;
                }
            }
        }
        Ok(Self { n, lu, perm, swaps })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Smallest `|U_kk|`.
    pub fn min_pivot(&self) -> f64 {
        (0..self.n).map(|k| self.lu[(k, k)].norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn determinant(&self) -> C64 {
        let sign = if self.swaps.is_multiple_of(2) { 1.0 } else { -1.0 };
        (0..self.n).map(|k| self.lu[(k, k)]).product::<C64>() * sign
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::Dimension(format!("rhs of length {} for {n}x{n} system", b.len())));
        }
        let lu = self.lu.as_slice();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &lu[i * n..i * n + i];
            let s: C64 = row.iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &lu[i * n..(i + 1) * n];
            let s: C64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, y)| u * y).sum();
            x[i] = (x[i] - s) / row[i];
        }
        if x.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::SingularMatrix { pivot: self.min_pivot(), column: n });
        }
        Ok(x)
    }
}

/// Solves `A x = b` by partial-pivoting LU and verifies
/// `‖Ax − b‖∞ ≤ 10⁻¹⁰ ‖A‖∞ ‖x‖∞`.
pub fn lu_solve(a: &CMatrix, b: &[C64]) -> Result<Vec<C64>> {
    let x = Lu::factor(a)?.solve(b)?;
    let ax = a.matvec(&x)?;
    let residual = ax.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    let xnorm = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bound = RESIDUAL_BOUND * a.norm_inf() * xnorm;
    if residual > bound {
        return Err(Error::ResidualTooLarge { residual, bound });
    }
    Ok(x)
}
