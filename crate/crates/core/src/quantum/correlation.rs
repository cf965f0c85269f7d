use num_complex::Complex64 as C64;

use super::liouville::{liouvillian, steady_state, DensityOperator};
use super::model::{build_model, Cutoffs, QuantumModel};
use crate::exec::{map_ordered, ExecPolicy};
use crate::numerics::{rk4_step, CMatrix, LinearMap, MAX_ENTRIES};
use crate::params::DerivedRates;
use crate::semiclassical::Scan;
use crate::{Error, Result};

/// RK4 step for delayed correlations is `G2_TAU_STEP_FACTOR / max|L_ii|`.
pub const G2_TAU_STEP_FACTOR: f64 = 1e-2;

const FLUX_FLOOR: f64 = 1e-30;
const G2_REL_TOL: f64 = 1e-3;
const FLUX_REL_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    /// Clockwise output, `ε + √κ₁·a_cw`.
    Transmitted,
    /// Counter-clockwise output, `√κ₁·a_ccw`.
    Reflected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortMoments {
    pub mean: C64,
    /// `⟨A†A⟩`, photons/s.
    pub flux: f64,
    /// `⟨A†²A²⟩`.
    pub coincidence: f64,
    pub g2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub g2_zero: f64,
    pub out_flux: f64,
    /// `⟨A_out⟩`; divided by the drive this is the transmission amplitude.
    pub out_mean: C64,
    pub coincidence: f64,
    pub n_plus: f64,
    pub n_minus: f64,
    pub converged: bool,
    pub cutoff_used: Cutoffs,
}

fn port_operator(model: &QuantumModel, port: Port) -> CMatrix {
    match port {
        Port::Transmitted => model.transmitted_output(),
        Port::Reflected => model.reflected_output(),
    }
}

pub fn port_moments(rho: &DensityOperator, model: &QuantumModel, port: Port) -> Result<PortMoments> {
    let a = port_operator(model, port);
    let ad = a.adjoint();
    let n_op = &ad * &a;
    let flux = rho.expect(&n_op).re;
    if !(flux >= FLUX_FLOOR) {
        return Err(Error::UndefinedG2(flux));
    }
    let aa = &a * &a;
    let coincidence = rho.expect(&(&aa.adjoint() * &aa)).re;
    Ok(PortMoments { mean: rho.expect(&a), flux, coincidence, g2: coincidence / (flux * flux) })
}

/// Transmitted-port flux and zero-delay `g²`, plus mode occupations.
pub fn output_moments(rho: &DensityOperator, model: &QuantumModel) -> Result<CorrelationResult> {
    let m = port_moments(rho, model, Port::Transmitted)?;
    let n_plus = rho.expect(&(&model.ops.a_plus.adjoint() * &model.ops.a_plus)).re;
    let n_minus = rho.expect(&(&model.ops.a_minus.adjoint() * &model.ops.a_minus)).re;
    Ok(CorrelationResult {
        g2_zero: m.g2.max(0.0),
        out_flux: m.flux,
        out_mean: m.mean,
        coincidence: m.coincidence,
        n_plus: n_plus.max(0.0),
        n_minus: n_minus.max(0.0),
        converged: false,
        cutoff_used: model.cutoffs,
    })
}

fn solve_point(model: &QuantumModel) -> Result<(DensityOperator, Option<CorrelationResult>)> {
    let rho = steady_state(&liouvillian(model)?)?;
    let res = match output_moments(&rho, model) {
        Ok(r) => Some(r),
        Err(Error::UndefinedG2(_)) if model.drive_eps == 0.0 => None,
        Err(e) => return Err(e),
    };
    Ok((rho, res))
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub cutoff_used: Cutoffs,
    /// Moments at `cutoff_used`; `None` for an undriven model.
    pub result: Option<CorrelationResult>,
}

fn rel_change(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

fn agrees(a: &Option<CorrelationResult>, b: &Option<CorrelationResult>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => {
            rel_change(x.g2_zero, y.g2_zero) < G2_REL_TOL && rel_change(x.out_flux, y.out_flux) < FLUX_REL_TOL
        }
        _ => false,
    }
}

fn fits(c: Cutoffs) -> bool {
    c.dim().pow(4) <= MAX_ENTRIES
}

/// Re-solves with every cutoff raised by one and compares `g²(0)` (10⁻³
/// relative) and flux (10⁻⁴ relative); on disagreement escalates once more.
/// Escalation stops early when the next Liouvillian would exceed the dense
/// size cap, and the point is then reported unconverged.
pub fn convergence_check(model: &QuantumModel) -> Result<ConvergenceReport> {
    if model.drive_eps == 0.0 {
        return Ok(ConvergenceReport { converged: true, cutoff_used: model.cutoffs, result: None });
    }
    let (_, mut prev) = solve_point(model)?;
    let mut cut = model.cutoffs;
    for _ in 0..2 {
        let next = cut.incremented();
        if !fits(next) {
            break;
        }
        let (_, cur) = solve_point(&model.with_cutoffs(next)?)?;
        if agrees(&prev, &cur) {
            let result = cur.map(|r| CorrelationResult { converged: true, cutoff_used: next, ..r });
            return Ok(ConvergenceReport { converged: true, cutoff_used: next, result });
        }
        prev = cur;
        cut = next;
    }
    let result = prev.map(|r| CorrelationResult { converged: false, cutoff_used: cut, ..r });
    Ok(ConvergenceReport { converged: false, cutoff_used: cut, result })
}

#[derive(Debug, Clone)]
pub struct G2ScanPoint {
    pub delta_pc: f64,
    pub result: Result<CorrelationResult>,
}

/// Steady-state photon statistics across a probe scan. Failing points are
/// reported in place; the rest of the scan still runs.
#[allow(clippy::too_many_arguments)]
pub fn g2_scan(
    rates: &DerivedRates,
    delta_ec: f64,
    scan: &Scan,
    drive_eps: f64,
    cutoffs: Cutoffs,
    check_convergence: bool,
    policy: ExecPolicy,
) -> Result<Vec<G2ScanPoint>> {
    scan.validate()?;
    let grid = scan.grid();
    Ok(map_ordered(policy, &grid, |&d| {
        let result = build_model(rates, d, delta_ec, cutoffs, drive_eps).and_then(|m| {
            if check_convergence {
                let rep = convergence_check(&m)?;
                rep.result.ok_or(Error::UndefinedG2(0.0))
            } else {
                let rho = steady_state(&liouvillian(&m)?)?;
                output_moments(&rho, &m)
            }
        });
        G2ScanPoint { delta_pc: d, result }
    }))
}

/// Row-compressed copy of a dense superoperator for repeated products.
struct SparseMap {
    n: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseMap {
    fn from_dense(m: &CMatrix) -> Self {
        let mut row_start = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..m.rows() {
            for (j, &z) in m.row(i).iter().enumerate() {
                if z != C64::new(0.0, 0.0) {
                    cols.push(j);
                    vals.push(z);
                }
            }
            row_start.push(cols.len());
        }
        Self { n: m.rows(), row_start, cols, vals }
    }
}

impl LinearMap for SparseMap {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, y: &[C64], out: &mut [C64]) {
        for (o, w) in out.iter_mut().zip(self.row_start.windows(2)) {
            let (a, b) = (w[0], w[1]);
            *o = self.cols[a..b].iter().zip(&self.vals[a..b]).map(|(&j, &v)| v * y[j]).sum();
        }
    }
}

/// Delayed coincidences `g²(τ) = Tr[A†A·e^{Lτ}(AρA†)] / ⟨A†A⟩²` on the
/// transmitted port, by fixed-step RK4 on the conditioned state.
pub fn g2_tau(rho: &DensityOperator, model: &QuantumModel, tau_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if tau_grid.first() != Some(&0.0) || tau_grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidInput("tau grid must start at 0 and be non-decreasing".into()));
    }
    let l = liouvillian(model)?;
    let max_rate = (0..l.rows()).map(|i| l[(i, i)].norm()).fold(0.0, f64::max);
    if !(max_rate > 0.0) {
        return Err(Error::Integration("Liouvillian has no dynamics".into()));
    }
    let h_max = G2_TAU_STEP_FACTOR / max_rate;
    let map = SparseMap::from_dense(&l);

    let a = model.transmitted_output();
    let n_op = &a.adjoint() * &a;
    let flux = rho.expect(&n_op).re;
    if !(flux >= FLUX_FLOOR) {
        return Err(Error::UndefinedG2(flux));
    }
    let conditioned = &(&a * rho.matrix()) * &a.adjoint();
    let norm0 = conditioned.trace().norm();
    let mut y = conditioned.vectorize();
    let n = model.dim;

    let observe = |v: &[C64]| -> Result<f64> {
        let m = CMatrix::unvectorize(v, n)?;
        Ok(m.trace_product(&n_op).re / (flux * flux))
    };

    let mut out = Vec::with_capacity(tau_grid.len());
    let mut t = 0.0;
    for &target in tau_grid {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / h_max).ceil() as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                y = rk4_step(&map, &y, h)?;
            }
            t = target;
            let tr: C64 = (0..n).map(|k| y[k * n + k]).sum();
            if tr.norm() > 10.0 * norm0 {
                return Err(Error::Integration(format!(
                    "conditioned state grew to trace {:e}; use a smaller step",
                    tr.norm()
                )));
            }
        }
        out.push((target, observe(&y)?));
    }
    Ok(out)
}
