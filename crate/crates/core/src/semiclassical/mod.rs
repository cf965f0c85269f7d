//! Linearised steady-state input–output response.
//!
//! Under weak driving the emitter stays near its ground state (σ_z → −1), so
//! the standing-mode equations of motion become linear and the stationary
//! amplitudes follow from the two denominators
//!
//! ```text
//! D₊ = i(Δpc + 2g) − κ₊ + 2G² / [i(Δpc − Δec) − γ_s/2]
//! D₋ = iΔpc − κ₋
//! ```
//!
//! All amplitudes are normalised to a unit input `a_in = 1` in the clockwise
//! port. The drive enters the mode equations as `−√(κ₁/2)·a_in`.

mod dips;
mod phase;

pub use dips::{find_dips, ResonanceDip, DIP_THRESHOLD};
pub use phase::{group_delay, group_delay_from, phase_shift, unwrap_phases};

use num_complex::Complex64 as C64;

use crate::exec::{map_ordered, ExecPolicy};
use crate::params::DerivedRates;
use crate::units::mhz_to_rad;
use crate::{Error, Result};

/// Smallest |g| for which the DIT detuning is evaluated, 2π·10 kHz.
pub const DIT_G_FLOOR: f64 = 2.0 * std::f64::consts::PI * 1e4;

/// Tolerance on `|(1 − T − R) − L_flux|`.
const BALANCE_TOL: f64 = 1e-6;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Uniform probe-detuning grid, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scan {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Scan {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        let s = Self { min, max, points };
        s.validate()?;
        Ok(s)
    }

    pub fn from_mhz(min: f64, max: f64, points: usize) -> Result<Self> {
        Self::new(mhz_to_rad(min), mhz_to_rad(max), points)
    }

    /// Grid centred on `centre` with half-width `half` (rad/s).
    pub fn around(centre: f64, half: f64, points: usize) -> Result<Self> {
        Self::new(centre - half, centre + half, points)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 || !(self.min < self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::InvalidInput(format!(
                "scan needs min < max and points >= 2, got {}..{} with {} points",
                self.min, self.max, self.points
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.points).map(|k| if k + 1 == self.points { self.max } else { self.min + h * k as f64 }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRequest {
    pub rates: DerivedRates,
    pub delta_ec: f64,
    pub scan: Scan,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub delta_pc: f64,
    pub t: C64,
    pub r: C64,
    pub transmission: f64,
    pub reflection: f64,
    /// Dissipated fraction from flux bookkeeping over κ₀, 2κ_R and γ_s.
    pub loss: f64,
    /// `1 − T − R`; agrees with `loss` to round-off.
    pub loss_balance: f64,
    /// `arg t` in (−π, π]; NaN where |t| ≤ 10⁻¹².
    pub phase: f64,
}

/// Four interfering contributions to the transmitted amplitude: direct
/// passage, anti-symmetric mode, scattering-shifted symmetric mode, and the
/// part of the symmetric-mode output created by the dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentDecomposition {
    pub a1: C64,
    pub a2: C64,
    pub a3: C64,
    pub a4: C64,
}

impl ComponentDecomposition {
    pub fn sum(&self) -> C64 {
        self.a1 + self.a2 + self.a3 + self.a4
    }
}

/// Stationary intracavity amplitudes for unit input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntracavityState {
    pub a_plus: C64,
    pub a_minus: C64,
    pub sigma: C64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub intrinsic: f64,
    pub scatter: f64,
    pub dipole: f64,
}

impl LossBreakdown {
    pub fn total(&self) -> f64 {
        self.intrinsic + self.scatter + self.dipole
    }
}

fn check_rates(r: &DerivedRates) -> Result<()> {
    let all = [r.g_coh, r.kappa_r, r.kappa0, r.kappa1, r.kappa_plus, r.kappa_minus, r.gamma_s, r.g_scat];
    if all.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite rate".into()));
    }
    if [r.kappa_r, r.kappa0, r.kappa1, r.gamma_s].iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidInput("damping rates must be non-negative".into()));
    }
    Ok(())
}

/// Dipole susceptibility term `2G² / [i(Δpc − Δec) − γ_s/2]`.
fn dipole_term(rates: &DerivedRates, delta_pc: f64, delta_ec: f64) -> Result<C64> {
    if rates.g_coh == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let den = I * (delta_pc - delta_ec) - 0.5 * rates.gamma_s;
    if den == C64::new(0.0, 0.0) {
        return Err(Error::Singularity { delta: delta_pc });
    }
    Ok(2.0 * rates.g_coh * rates.g_coh / den)
}

/// Denominator of the bare symmetric mode with the scattering shift only.
fn scattered_denominator(rates: &DerivedRates, delta_pc: f64) -> C64 {
    I * (delta_pc + 2.0 * rates.g_scat) - rates.kappa_plus
}

/// `(D₊, D₋)`.
pub fn denominators(rates: &DerivedRates, delta_pc: f64, delta_ec: f64) -> Result<(C64, C64)> {
    check_rates(rates)?;
    let d_plus = scattered_denominator(rates, delta_pc) + dipole_term(rates, delta_pc, delta_ec)?;
    let d_minus = I * delta_pc - rates.kappa_minus;
    if d_plus == C64::new(0.0, 0.0) || d_minus == C64::new(0.0, 0.0) {
        return Err(Error::Singularity { delta: delta_pc });
    }
    Ok((d_plus, d_minus))
}

/// Clockwise (transmitted) amplitude `t = 1 + (κ₁/2)(1/D₊ + 1/D₋)`.
pub fn transmission_amplitude(rates: &DerivedRates, delta_pc: f64, delta_ec: f64) -> Result<C64> {
    let (dp, dm) = denominators(rates, delta_pc, delta_ec)?;
    Ok(1.0 + 0.5 * rates.kappa1 * (1.0 / dp + 1.0 / dm))
}

/// Counter-clockwise (reflected) amplitude `r = (κ₁/2)(1/D₊ − 1/D₋)`.
pub fn reflection_amplitude(rates: &DerivedRates, delta_pc: f64, delta_ec: f64) -> Result<C64> {
    let (dp, dm) = denominators(rates, delta_pc, delta_ec)?;
    Ok(0.5 * rates.kappa1 * (1.0 / dp - 1.0 / dm))
}

/// Stationary `(a₊, a₋, σ₋)`; the output port then reads
/// `t = 1 + √(κ₁/2)(a₊ + a₋)` and `r = √(κ₁/2)(a₊ − a₋)`.
pub fn intracavity_state(rates: &DerivedRates, delta_pc: f64, delta_ec: f64) -> Result<IntracavityState> {
    let (dp, dm) = denominators(rates, delta_pc, delta_ec)?;
    let feed = (0.5 * rates.kappa1).sqrt();
    let a_plus = feed / dp;
    let a_minus = feed / dm;
    let sigma = if rates.g_coh == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        let den = I * (delta_pc - delta_ec) - 0.5 * rates.gamma_s;
        I * std::f64::consts::SQRT_2 * rates.g_coh * a_plus / den
    };
    Ok(IntracavityState { a_plus, a_minus, sigma })
}

/// Dissipated fractions of the input flux, channel by channel.
pub fn loss_breakdown(rates: &DerivedRates, delta_pc: f64, delta_ec: f64) -> Result<LossBreakdown> {
    let s = intracavity_state(rates, delta_pc, delta_ec)?;
    Ok(LossBreakdown {
        intrinsic: rates.kappa0 * (s.a_plus.norm_sqr() + s.a_minus.norm_sqr()),
        scatter: 2.0 * rates.kappa_r * s.a_plus.norm_sqr(),
        dipole: rates.gamma_s * s.sigma.norm_sqr(),
    })
}

pub fn decompose_components(rates: &DerivedRates, delta_pc: f64, delta_ec: f64) -> Result<ComponentDecomposition> {
    let (dp, dm) = denominators(rates, delta_pc, delta_ec)?;
    let d3 = scattered_denominator(rates, delta_pc);
    let half = 0.5 * rates.kappa1;
    let a4 = if rates.g_coh == 0.0 { C64::new(0.0, 0.0) } else { half * (1.0 / dp - 1.0 / d3) };
    Ok(ComponentDecomposition { a1: C64::new(1.0, 0.0), a2: half / dm, a3: half / d3, a4 })
}

/// Full response at one detuning.
pub fn spectrum_point(rates: &DerivedRates, delta_pc: f64, delta_ec: f64) -> Result<SpectrumPoint> {
    let (dp, dm) = denominators(rates, delta_pc, delta_ec)?;
    let half = 0.5 * rates.kappa1;
    let t = 1.0 + half * (1.0 / dp + 1.0 / dm);
    let r = half * (1.0 / dp - 1.0 / dm);
    let transmission = t.norm_sqr();
    let reflection = r.norm_sqr();
    let loss = loss_breakdown(rates, delta_pc, delta_ec)?.total();
    let loss_balance = 1.0 - transmission - reflection;
    assert!(
        (loss - loss_balance).abs() <= BALANCE_TOL,
        "flux bookkeeping broken at delta_pc = {delta_pc}: {loss} vs {loss_balance}"
    );
    Ok(SpectrumPoint {
        delta_pc,
        t,
        r,
        transmission,
        reflection,
        loss,
        loss_balance,
        phase: phase_shift(t).unwrap_or(f64::NAN),
    })
}

pub fn spectrum_scan(request: &SpectrumRequest) -> Result<Vec<SpectrumPoint>> {
    spectrum_scan_with(request, ExecPolicy::default())
}

pub fn spectrum_scan_with(request: &SpectrumRequest, policy: ExecPolicy) -> Result<Vec<SpectrumPoint>> {
    request.scan.validate()?;
    check_rates(&request.rates)?;
    let grid = request.scan.grid();
    map_ordered(policy, &grid, |&d| spectrum_point(&request.rates, d, request.delta_ec)).into_iter().collect()
}

/// Component decomposition on a scan grid.
pub fn components_scan(request: &SpectrumRequest, policy: ExecPolicy) -> Result<Vec<(f64, ComponentDecomposition)>> {
    request.scan.validate()?;
    let grid = request.scan.grid();
    map_ordered(policy, &grid, |&d| decompose_components(&request.rates, d, request.delta_ec).map(|c| (d, c)))
        .into_iter()
        .collect()
}

/// Taper rate √(κ₀² + 4g²) at which the dipole-free transmission vanishes on
/// the scattering-shifted resonance.
pub fn critical_kappa1(rates: &DerivedRates) -> f64 {
    critical_kappa1_from(rates.kappa0, rates.g_scat)
}

pub(crate) fn critical_kappa1_from(kappa0: f64, g_scat: f64) -> f64 {
    (kappa0 * kappa0 + 4.0 * g_scat * g_scat).sqrt()
}

/// Emitter detuning −g − G²/g that centres the dipole's radiated field on
/// Δpc ≈ −g.
pub fn dit_detuning(rates: &DerivedRates) -> Result<f64> {
    let g = rates.g_scat;
    if !(g.abs() > DIT_G_FLOOR) {
        return Err(Error::DegenerateConfiguration(format!("DIT detuning needs |g| > 2π·10 kHz, got g = {g:e} rad/s")));
    }
    Ok(-g - rates.g_coh * rates.g_coh / g)
}

/// `G > 5·max(κ₊, γ_s)`. The factor 5 is a heuristic reading of "≫".
pub fn strong_coupling_predicate(rates: &DerivedRates) -> bool {
    rates.g_coh > 5.0 * rates.kappa_plus.max(rates.gamma_s)
}

#[cfg(test)]
mod tests;
