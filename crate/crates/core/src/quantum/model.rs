use std::f64::consts::SQRT_2;

use num_complex::Complex64 as C64;

use crate::numerics::{embed, CMatrix};
use crate::params::DerivedRates;
use crate::semiclassical::intracavity_state;
use crate::{Error, Result};

/// Mean occupations must stay below this fraction of the Fock cutoff.
pub const HEADROOM_FRACTION: f64 = 0.1;

/// Highest Fock number kept in each standing mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cutoffs {
    pub plus: usize,
    pub minus: usize,
}

impl Cutoffs {
    pub const fn new(plus: usize, minus: usize) -> Self {
        Self { plus, minus }
    }

    pub fn incremented(self) -> Self {
        Self::new(self.plus + 1, self.minus + 1)
    }

    /// Hilbert-space dimension `2·(n₊+1)·(n₋+1)`.
    pub fn dim(self) -> usize {
        2 * (self.plus + 1) * (self.minus + 1)
    }
}

impl Default for Cutoffs {
    fn default() -> Self {
        Self::new(3, 3)
    }
}

#[derive(Debug, Clone)]
pub struct Operators {
    pub a_plus: CMatrix,
    pub a_minus: CMatrix,
    pub sigma: CMatrix,
    pub identity: CMatrix,
}

impl Operators {
    pub fn new(cutoffs: Cutoffs) -> Result<Self> {
        let i2 = CMatrix::identity(2);
        let ip = CMatrix::identity(cutoffs.plus + 1);
        let im = CMatrix::identity(cutoffs.minus + 1);
        // σ₋ = |g⟩⟨e| with |g⟩ = 0, |e⟩ = 1
        let sm = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0])?;
        Ok(Self {
            a_plus: embed(&i2, &CMatrix::annihilation(cutoffs.plus), &im)?,
            a_minus: embed(&i2, &ip, &CMatrix::annihilation(cutoffs.minus))?,
            sigma: embed(&sm, &ip, &im)?,
            identity: CMatrix::identity(cutoffs.dim()),
        })
    }

    /// Composite basis index of `|atom, n₊, n₋⟩` (atom 0 = g, 1 = e).
    pub fn index(cutoffs: Cutoffs, excited: bool, n_plus: usize, n_minus: usize) -> usize {
        let np = cutoffs.plus + 1;
        let nm = cutoffs.minus + 1;
        (excited as usize) * np * nm + n_plus * nm + n_minus
    }
}

#[derive(Debug, Clone)]
pub struct CollapseOp {
    pub label: &'static str,
    /// Energy decay rate, rad/s.
    pub rate: f64,
    /// `√rate · L`.
    pub op: CMatrix,
}

#[derive(Debug, Clone)]
pub struct QuantumModel {
    pub cutoffs: Cutoffs,
    pub dim: usize,
    pub delta_pc: f64,
    pub delta_ec: f64,
    /// Coherent input amplitude in the clockwise port, √(photons/s).
    pub drive_eps: f64,
    pub rates: DerivedRates,
    pub ops: Operators,
    pub hamiltonian: CMatrix,
    pub collapse: Vec<CollapseOp>,
}

impl QuantumModel {
    /// Builds the model without the truncation-headroom check.
    pub fn build_unchecked(
        rates: &DerivedRates,
        delta_pc: f64,
        delta_ec: f64,
        cutoffs: Cutoffs,
        drive_eps: f64,
    ) -> Result<Self> {
        if cutoffs.plus < 2 || cutoffs.minus < 2 {
            return Err(Error::InvalidInput(format!("cutoffs must be >= 2, got {cutoffs:?}")));
        }
        if !(drive_eps >= 0.0) || !drive_eps.is_finite() {
            return Err(Error::InvalidInput(format!("drive must be finite and >= 0, got {drive_eps}")));
        }
        let ops = Operators::new(cutoffs)?;
        let hamiltonian = hamiltonian(rates, delta_pc, delta_ec, drive_eps, &ops);
        let collapse = collapse_ops(rates, &ops);
        Ok(Self {
            cutoffs,
            dim: cutoffs.dim(),
            delta_pc,
            delta_ec,
            drive_eps,
            rates: *rates,
            ops,
            hamiltonian,
            collapse,
        })
    }

    /// Same physical point with different cutoffs.
    pub fn with_cutoffs(&self, cutoffs: Cutoffs) -> Result<Self> {
        Self::build_unchecked(&self.rates, self.delta_pc, self.delta_ec, cutoffs, self.drive_eps)
    }

    /// `√κ₁·(a₊ ± a₋)/√2`, the cavity part of the transmitted (+) or
    /// reflected (−) output field.
    pub fn port_field(&self, sign: f64) -> CMatrix {
        let mut f = self.ops.a_plus.clone();
        f.add_scaled(&self.ops.a_minus, C64::new(sign, 0.0));
        f.scale_real((self.rates.kappa1 / 2.0).sqrt())
    }

    /// Transmitted output operator `ε·I + √κ₁·a_cw`.
    pub fn transmitted_output(&self) -> CMatrix {
        let mut out = self.port_field(1.0);
        out.add_scaled(&self.ops.identity, C64::new(self.drive_eps, 0.0));
        out
    }

    pub fn reflected_output(&self) -> CMatrix {
        self.port_field(-1.0)
    }
}

/// Probe-frame Hamiltonian
///
/// ```text
/// H = −Δpc(n₊ + n₋) − (Δpc − Δec)σ₊σ₋ − 2g·n₊ + √2·G(a₊†σ₋ + σ₊a₊)
///     − i√(κ₁/2)·ε·(a₊† − a₊ + a₋† − a₋)
/// ```
///
/// The drive sign matches the `−√(κ₁/2)·a_in` source of the mean-field
/// equations.
fn hamiltonian(rates: &DerivedRates, delta_pc: f64, delta_ec: f64, eps: f64, ops: &Operators) -> CMatrix {
    let n_plus = &ops.a_plus.adjoint() * &ops.a_plus;
    let n_minus = &ops.a_minus.adjoint() * &ops.a_minus;
    let n_e = &ops.sigma.adjoint() * &ops.sigma;
    let jc = &ops.a_plus.adjoint() * &ops.sigma;

    let mut h = CMatrix::zeros(ops.identity.rows(), ops.identity.cols());
    h.add_scaled(&n_plus, C64::new(-delta_pc - 2.0 * rates.g_scat, 0.0));
    h.add_scaled(&n_minus, C64::new(-delta_pc, 0.0));
    h.add_scaled(&n_e, C64::new(-(delta_pc - delta_ec), 0.0));
    let coupling = SQRT_2 * rates.g_coh;
    h.add_scaled(&jc, C64::new(coupling, 0.0));
    h.add_scaled(&jc.adjoint(), C64::new(coupling, 0.0));

    let drive = (rates.kappa1 / 2.0).sqrt() * eps;
    if drive != 0.0 {
        for a in [&ops.a_plus, &ops.a_minus] {
            // −i·d·(a† − a)
            h.add_scaled(&a.adjoint(), C64::new(0.0, -drive));
            h.add_scaled(a, C64::new(0.0, drive));
        }
    }
    h
}

fn collapse_ops(rates: &DerivedRates, ops: &Operators) -> Vec<CollapseOp> {
    let mk = |label, rate: f64, op: &CMatrix| CollapseOp { label, rate, op: op.scale_real(rate.sqrt()) };
    vec![
        mk("intrinsic_plus", rates.kappa0, &ops.a_plus),
        mk("taper_plus", rates.kappa1, &ops.a_plus),
        mk("scatter_plus", 2.0 * rates.kappa_r, &ops.a_plus),
        mk("intrinsic_minus", rates.kappa0, &ops.a_minus),
        mk("taper_minus", rates.kappa1, &ops.a_minus),
        mk("spontaneous", rates.gamma_s, &ops.sigma),
    ]
}

/// Linear-response estimate of `(n₊, n₋)` for input amplitude `drive_eps`.
pub fn predicted_occupation(rates: &DerivedRates, delta_pc: f64, delta_ec: f64, drive_eps: f64) -> Result<(f64, f64)> {
    let s = intracavity_state(rates, delta_pc, delta_ec)?;
    let p = drive_eps * drive_eps;
    Ok((p * s.a_plus.norm_sqr(), p * s.a_minus.norm_sqr()))
}

/// Input amplitude giving a predicted largest mode occupation `target`.
pub fn drive_for_occupation(rates: &DerivedRates, delta_pc: f64, delta_ec: f64, target: f64) -> Result<f64> {
    let (np, nm) = predicted_occupation(rates, delta_pc, delta_ec, 1.0)?;
    let n = np.max(nm);
    if !(n > 0.0) {
        return Err(Error::DegenerateConfiguration("cavity is not driven by the taper (kappa1 = 0)".into()));
    }
    Ok((target / n).sqrt())
}

/// Builds the probe-frame model, refusing drives whose predicted occupation
/// exceeds [`HEADROOM_FRACTION`] of the smaller cutoff.
pub fn build_model(
    rates: &DerivedRates,
    delta_pc: f64,
    delta_ec: f64,
    cutoffs: Cutoffs,
    drive_eps: f64,
) -> Result<QuantumModel> {
    if drive_eps > 0.0 {
        let (np, nm) = predicted_occupation(rates, delta_pc, delta_ec, drive_eps)?;
        let cutoff = cutoffs.plus.min(cutoffs.minus);
        let limit = HEADROOM_FRACTION * cutoff as f64;
        let predicted = np.max(nm);
        if predicted > limit {
            return Err(Error::Truncation { predicted, limit, cutoff });
        }
    }
    QuantumModel::build_unchecked(rates, delta_pc, delta_ec, cutoffs, drive_eps)
}
