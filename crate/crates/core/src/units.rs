//! Conversions between angular rates and the MHz labels used at the edges.

use std::f64::consts::TAU;

/// `2π · MHz → rad/s`.
#[inline]
pub fn mhz_to_rad(nu_mhz: f64) -> f64 {
    nu_mhz * TAU * 1e6
}

/// `rad/s → MHz`, i.e. `ω / 2π · 10⁻⁶`.
#[inline]
pub fn rad_to_mhz(omega: f64) -> f64 {
    omega / (TAU * 1e6)
}

#[inline]
pub fn nm(x: f64) -> f64 {
    x * 1e-9
}

#[inline]
pub fn um3(x: f64) -> f64 {
    x * 1e-18
}
