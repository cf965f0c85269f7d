//! CODATA 2018 constants (SI) and the default physical inputs.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// NV zero-phonon-line transition dipole moment, C·m.
pub const NV_DIPOLE_MOMENT: f64 = 2.74e-29;
/// Relative permittivity of diamond, (2.4)².
pub const DIAMOND_PERMITTIVITY: f64 = 2.4 * 2.4;
/// NV zero-phonon-line wavelength, nm.
pub const NV_ZPL_WAVELENGTH_NM: f64 = 637.0;
