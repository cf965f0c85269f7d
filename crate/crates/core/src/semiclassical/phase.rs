use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;

use super::SpectrumPoint;
use crate::{Error, Result};

const AMPLITUDE_FLOOR: f64 = 1e-12;

/// `arg t` in (−π, π].
pub fn phase_shift(t: C64) -> Result<f64> {
    let m = t.norm();
    if !(m > AMPLITUDE_FLOOR) {
        return Err(Error::UndefinedPhase(m));
    }
    let p = t.arg();
    // atan2 returns −π for (−x, −0.0)
    Ok(if p <= -PI { PI } else { p })
}

/// Removes 2π jumps between consecutive samples.
pub fn unwrap_phases(phases: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phases.len());
    let mut offset = 0.0;
    for (k, &p) in phases.iter().enumerate() {
        if k > 0 {
            let d = p - phases[k - 1];
            if d > PI {
                offset -= TAU * ((d + PI) / TAU).floor();
            } else if d < -PI {
                offset += TAU * ((-d + PI) / TAU).floor();
            }
        }
        out.push(p + offset);
    }
    out
}

/// dφ/dΔ at an interior grid index by central difference on the unwrapped
/// phase. With Δ in rad/s the result is in seconds.
pub fn group_delay_from(detunings: &[f64], phases: &[f64], index: usize) -> Result<f64> {
    if detunings.len() != phases.len() {
        return Err(Error::Dimension("detuning and phase lengths differ".into()));
    }
    if index == 0 || index + 1 >= phases.len() {
        return Err(Error::InvalidInput(format!(
            "group delay needs an interior index, got {index} of {}",
            phases.len()
        )));
    }
    if let Some(bad) = phases[index - 1..=index + 1].iter().find(|p| !p.is_finite()) {
        return Err(Error::UndefinedPhase(*bad));
    }
    let unwrapped = unwrap_phases(&phases[..=index + 1]);
    Ok((unwrapped[index + 1] - unwrapped[index - 1]) / (detunings[index + 1] - detunings[index - 1]))
}

pub fn group_delay(spectrum: &[SpectrumPoint], index: usize) -> Result<f64> {
    let d: Vec<f64> = spectrum.iter().map(|p| p.delta_pc).collect();
    let p: Vec<f64> = spectrum.iter().map(|p| p.phase).collect();
    group_delay_from(&d, &p, index)
}
