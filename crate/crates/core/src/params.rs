//! Fabrication-level inputs to coupling and damping rates.
//!
//! All outputs are angular rates in rad/s. The dipole and scattering
//! couplings follow the point-dipole (Rayleigh) treatment of a sub-wavelength
//! sphere sitting in the evanescent field of the cavity mode.

use std::f64::consts::PI;

use crate::constants::{DIAMOND_PERMITTIVITY, EPSILON_0, HBAR, NV_DIPOLE_MOMENT, NV_ZPL_WAVELENGTH_NM, SPEED_OF_LIGHT};
use crate::semiclassical::dit_detuning;
use crate::units::{mhz_to_rad, nm, um3};
use crate::{Error, Result};

/// How the taper coupling rate κ₁ is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa1Spec {
    /// κ₁ = r·κ₀.
    Ratio(f64),
    /// κ₁ = √(κ₀² + 4g²), the critical point in the presence of mode mixing.
    Critical,
    /// Fixed κ₁ in MHz (ν = κ₁/2π).
    ExplicitMhz(f64),
}

/// How the emitter–cavity detuning Δec = ω_e − ω_c is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaEcSpec {
    ExplicitMhz(f64),
    /// Δec = −g − G²/g, which puts the dipole's radiated field on the
    /// critical-coupling point Δpc ≈ −g.
    DitAuto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub radius_nm: f64,
    pub wavelength_nm: f64,
    pub q0: f64,
    pub kappa1: Kappa1Spec,
    pub vc_um3: f64,
    pub fc: f64,
    pub gamma_s_mhz: f64,
    /// Transition dipole moment, C·m.
    pub mu: f64,
    pub eps_d: f64,
    pub eps_s: f64,
    pub delta_ec: DeltaEcSpec,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            radius_nm: 0.0,
            wavelength_nm: NV_ZPL_WAVELENGTH_NM,
            q0: 1e8,
            kappa1: Kappa1Spec::Ratio(0.5),
            vc_um3: 200.0,
            fc: 0.47,
            gamma_s_mhz: 13.0,
            mu: NV_DIPOLE_MOMENT,
            eps_d: DIAMOND_PERMITTIVITY,
            eps_s: 1.0,
            delta_ec: DeltaEcSpec::ExplicitMhz(0.0),
        }
    }
}

impl SystemConfig {
    pub fn with_radius_nm(mut self, radius_nm: f64) -> Self {
        self.radius_nm = radius_nm;
        self
    }

    pub fn with_q0(mut self, q0: f64) -> Self {
        self.q0 = q0;
        self
    }

    pub fn with_kappa1(mut self, spec: Kappa1Spec) -> Self {
        self.kappa1 = spec;
        self
    }

    pub fn with_delta_ec(mut self, spec: DeltaEcSpec) -> Self {
        self.delta_ec = spec;
        self
    }

    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, what: &str, v: f64) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{what} out of range: {v}")))
            }
        }
        let finite = |x: f64| x.is_finite();
        check(finite(self.radius_nm) && self.radius_nm >= 0.0, "radius_nm", self.radius_nm)?;
        check(finite(self.wavelength_nm) && self.wavelength_nm > 0.0, "wavelength_nm", self.wavelength_nm)?;
        check(finite(self.q0) && self.q0 > 0.0, "q0", self.q0)?;
        check(finite(self.vc_um3) && self.vc_um3 > 0.0, "vc_um3", self.vc_um3)?;
        check(finite(self.fc) && (0.0..=1.0).contains(&self.fc), "fc", self.fc)?;
        check(finite(self.gamma_s_mhz) && self.gamma_s_mhz >= 0.0, "gamma_s_mhz", self.gamma_s_mhz)?;
        check(finite(self.mu) && self.mu >= 0.0, "mu", self.mu)?;
        check(finite(self.eps_d) && self.eps_d > 0.0, "eps_d", self.eps_d)?;
        check(finite(self.eps_s) && self.eps_s > 0.0, "eps_s", self.eps_s)?;
        match self.kappa1 {
            Kappa1Spec::Ratio(r) => check(finite(r) && r >= 0.0, "kappa1 ratio", r)?,
            Kappa1Spec::ExplicitMhz(v) => check(finite(v) && v >= 0.0, "kappa1_mhz", v)?,
            Kappa1Spec::Critical => {}
        }
        if let DeltaEcSpec::ExplicitMhz(v) = self.delta_ec {
            check(finite(v), "delta_ec_mhz", v)?;
        }
        Ok(())
    }

    /// Emitter–cavity detuning Δec in rad/s for these rates.
    pub fn resolve_delta_ec(&self, rates: &DerivedRates) -> Result<f64> {
        match self.delta_ec {
            DeltaEcSpec::ExplicitMhz(v) => Ok(mhz_to_rad(v)),
            DeltaEcSpec::DitAuto => dit_detuning(rates),
        }
    }
}

/// Every rate entering the equations of motion, in rad/s.
///
/// `alpha` is the polarizability volume in m³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    pub omega_c: f64,
    pub alpha: f64,
    /// G: dipole–mode coupling of a single traveling mode.
    pub g_coh: f64,
    /// g: nanocrystal-mediated mode–mode scattering.
    pub g_scat: f64,
    /// κ_R: scattering loss into free space.
    pub kappa_r: f64,
    pub kappa0: f64,
    pub kappa1: f64,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub gamma_s: f64,
}

impl DerivedRates {
    /// Assembles rates from independent parts; κ± are always recomputed.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        omega_c: f64,
        alpha: f64,
        g_coh: f64,
        g_scat: f64,
        kappa_r: f64,
        kappa0: f64,
        kappa1: f64,
        gamma_s: f64,
    ) -> Self {
        let kappa_minus = 0.5 * (kappa0 + kappa1);
        Self {
            omega_c,
            alpha,
            g_coh,
            g_scat,
            kappa_r,
            kappa0,
            kappa1,
            kappa_plus: kappa_r + kappa_minus,
            kappa_minus,
            gamma_s,
        }
    }

    /// Bare-cavity rates (no nanocrystal) from rates given in MHz.
    pub fn bare_cavity_mhz(kappa0: f64, kappa1: f64) -> Self {
        Self::from_parts(0.0, 0.0, 0.0, 0.0, 0.0, mhz_to_rad(kappa0), mhz_to_rad(kappa1), 0.0)
    }

    fn rebuild(self) -> Self {
        Self::from_parts(
            self.omega_c,
            self.alpha,
            self.g_coh,
            self.g_scat,
            self.kappa_r,
            self.kappa0,
            self.kappa1,
            self.gamma_s,
        )
    }

    pub fn with_g_coh(mut self, g_coh: f64) -> Self {
        self.g_coh = g_coh;
        self
    }

    pub fn with_scattering(mut self, g_scat: f64, kappa_r: f64) -> Self {
        self.g_scat = g_scat;
        self.kappa_r = kappa_r;
        self.rebuild()
    }

    pub fn with_kappa1(mut self, kappa1: f64) -> Self {
        self.kappa1 = kappa1;
        self.rebuild()
    }

    pub fn with_gamma_s(mut self, gamma_s: f64) -> Self {
        self.gamma_s = gamma_s;
        self
    }

    /// Largest rate scale; used to size scans and integration steps.
    pub fn max_rate(&self) -> f64 {
        [self.g_coh, self.g_scat, self.kappa_plus, self.kappa_minus, self.gamma_s].into_iter().fold(0.0, f64::max)
    }
}

/// Polarizability volume α = 4πR³(ε_d − ε_s)/(ε_d + 2ε_s) of a dielectric
/// sphere, radius in metres.
pub fn polarizability(radius: f64, eps_d: f64, eps_s: f64) -> Result<f64> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!("radius must be non-negative, got {radius}")));
    }
    let denom = eps_d + 2.0 * eps_s;
    if denom == 0.0 {
        return Err(Error::InvalidInput("eps_d + 2 eps_s vanishes".into()));
    }
    Ok(4.0 * PI * radius.powi(3) * (eps_d - eps_s) / denom)
}

pub fn derive_rates(config: &SystemConfig) -> Result<DerivedRates> {
    config.validate()?;
    let vc = um3(config.vc_um3);
    let eps_s = config.eps_s;
    let omega_c = 2.0 * PI * SPEED_OF_LIGHT / nm(config.wavelength_nm);
    let alpha = polarizability(nm(config.radius_nm), config.eps_d, eps_s)?;
    let fc = config.fc;

    let g_coh = config.mu * (omega_c / (2.0 * HBAR * EPSILON_0 * eps_s * vc)).sqrt() * fc;
    let g_scat = alpha * fc * fc * omega_c / (2.0 * vc);
    let kappa_r =
        alpha * alpha * fc * fc * eps_s.powf(1.5) * omega_c.powi(4) / (6.0 * PI * SPEED_OF_LIGHT.powi(3) * vc);
    let kappa0 = omega_c / config.q0;
    let kappa1 = match config.kappa1 {
        Kappa1Spec::Ratio(r) => r * kappa0,
        Kappa1Spec::Critical => crate::semiclassical::critical_kappa1_from(kappa0, g_scat),
        Kappa1Spec::ExplicitMhz(v) => mhz_to_rad(v),
    };
    let gamma_s = mhz_to_rad(config.gamma_s_mhz);
    Ok(DerivedRates::from_parts(omega_c, alpha, g_coh, g_scat, kappa_r, kappa0, kappa1, gamma_s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusSample {
    pub radius_nm: f64,
    pub rates: DerivedRates,
}

/// Rates on a uniform radius grid `r_min..=r_max` (nm) with `n` points.
pub fn sweep_radius(config: &SystemConfig, r_min_nm: f64, r_max_nm: f64, n: usize) -> Result<Vec<RadiusSample>> {
    if !(r_min_nm >= 0.0 && r_min_nm < r_max_nm && r_max_nm.is_finite()) || n < 2 {
        return Err(Error::InvalidInput(format!(
            "radius sweep needs 0 <= r_min < r_max and n >= 2, got {r_min_nm}..{r_max_nm} with n = {n}"
        )));
    }
    let step = (r_max_nm - r_min_nm) / (n - 1) as f64;
    (0..n)
        .map(|k| {
            let radius_nm = if k == n - 1 { r_max_nm } else { r_min_nm + step * k as f64 };
            let rates = derive_rates(&config.clone().with_radius_nm(radius_nm))?;
            Ok(RadiusSample { radius_nm, rates })
        })
        .collect()
}

/// Coupling regime as a function of nanocrystal size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    /// G dominates: dipole splitting with a scattering-free central dip.
    I,
    /// g comparable to G, κ_R still small: sideward dips shifted.
    II,
    /// κ_R comparable to G: sideward dips washed out.
    III,
}

/// Heuristic thresholds: III when κ_R ≥ G/2, else II when g ≥ G/10.
pub fn classify_region(rates: &DerivedRates) -> Region {
    if rates.kappa_r >= 0.5 * rates.g_coh {
        Region::III
    } else if rates.g_scat.abs() >= 0.1 * rates.g_coh {
        Region::II
    } else {
        Region::I
    }
}
