use std::path::Path;

use clap::{ArgGroup, Args};
use serde_json::{Map, Value};

use wgm_cqed::params::{DeltaEcSpec, Kappa1Spec, SystemConfig};

use crate::CliError;

/// Physical parameters. Any flag left unset falls back to the config file,
/// then to the built-in defaults.
#[derive(Args, Debug, Clone, Default)]
#[command(group(ArgGroup::new("kappa1").args(["kappa1_ratio", "critical", "kappa1_mhz"])))]
#[command(group(ArgGroup::new("detuning").args(["delta_ec_mhz", "dit"])))]
pub struct SystemArgs {
    /// Flat JSON object using the flag names with underscores as keys
    #[arg(long, value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,
    /// Nanocrystal radius
    #[arg(long, allow_hyphen_values = true)]
    pub radius_nm: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub wavelength_nm: Option<f64>,
    /// Intrinsic quality factor
    #[arg(long, allow_hyphen_values = true)]
    pub q0: Option<f64>,
    /// kappa1 = ratio * kappa0
    #[arg(long, allow_hyphen_values = true)]
    pub kappa1_ratio: Option<f64>,
    /// kappa1 = sqrt(kappa0^2 + 4 g^2)
    #[arg(long)]
    pub critical: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa1_mhz: Option<f64>,
    /// Mode volume
    #[arg(long, allow_hyphen_values = true)]
    pub vc_um3: Option<f64>,
    /// Field fraction at the nanocrystal
    #[arg(long, allow_hyphen_values = true)]
    pub fc: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_s_mhz: Option<f64>,
    /// Transition dipole moment in C m
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps_d: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps_s: Option<f64>,
    /// Emitter-cavity detuning
    #[arg(long, allow_hyphen_values = true)]
    pub delta_ec_mhz: Option<f64>,
    /// Detuning for dipole-induced transparency, -g - G^2/g
    #[arg(long)]
    pub dit: bool,
}

/// Keys written by `rates --format json` that are outputs, not inputs.
/// They are skipped so a rates file can be fed straight back in.
const DERIVED_KEYS: &[&str] = &[
    "region",
    "alpha_m3",
    "omega_c_rad_s",
    "omega_c_mhz",
    "G_rad_s",
    "G_mhz",
    "g_rad_s",
    "g_mhz",
    "kappaR_rad_s",
    "kappaR_mhz",
    "kappa0_rad_s",
    "kappa0_mhz",
    "kappa1_rad_s",
    "kappa_plus_rad_s",
    "kappa_plus_mhz",
    "kappa_minus_rad_s",
    "kappa_minus_mhz",
    "gamma_s_rad_s",
    "delta_ec_rad_s",
];

fn number(map: &Map<String, Value>, key: &str) -> Result<Option<f64>, CliError> {
    match map.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => {
            v.as_f64().map(Some).ok_or_else(|| CliError::Usage(format!("config key `{key}` must be a number, got {v}")))
        }
    }
}

fn flag(map: &Map<String, Value>, key: &str) -> Result<bool, CliError> {
    match map.get(key) {
        None | Some(Value::Null) => Ok(false),
        Some(Value::Bool(b)) => Ok(*b),
        Some(v) => Err(CliError::Usage(format!("config key `{key}` must be a boolean, got {v}"))),
    }
}

impl SystemArgs {
    fn from_json(map: &Map<String, Value>) -> Result<Self, CliError> {
        let known = [
            "radius_nm",
            "wavelength_nm",
            "q0",
            "kappa1_ratio",
            "critical",
            "kappa1_mhz",
            "vc_um3",
            "fc",
            "gamma_s_mhz",
            "mu",
            "eps_d",
            "eps_s",
            "delta_ec_mhz",
            "dit",
        ];
        if let Some(k) = map.keys().find(|k| !known.contains(&k.as_str()) && !DERIVED_KEYS.contains(&k.as_str())) {
            return Err(CliError::Usage(format!("unknown config key `{k}`")));
        }
        Ok(Self {
            config: None,
            radius_nm: number(map, "radius_nm")?,
            wavelength_nm: number(map, "wavelength_nm")?,
            q0: number(map, "q0")?,
            kappa1_ratio: number(map, "kappa1_ratio")?,
            critical: flag(map, "critical")?,
            kappa1_mhz: number(map, "kappa1_mhz")?,
            vc_um3: number(map, "vc_um3")?,
            fc: number(map, "fc")?,
            gamma_s_mhz: number(map, "gamma_s_mhz")?,
            mu: number(map, "mu")?,
            eps_d: number(map, "eps_d")?,
            eps_s: number(map, "eps_s")?,
            delta_ec_mhz: number(map, "delta_ec_mhz")?,
            dit: flag(map, "dit")?,
        })
    }

    fn kappa1(&self) -> Option<Kappa1Spec> {
        if self.critical {
            Some(Kappa1Spec::Critical)
        } else if let Some(r) = self.kappa1_ratio {
            Some(Kappa1Spec::Ratio(r))
        } else {
            self.kappa1_mhz.map(Kappa1Spec::ExplicitMhz)
        }
    }

    fn delta_ec(&self) -> Option<DeltaEcSpec> {
        if self.dit {
            Some(DeltaEcSpec::DitAuto)
        } else {
            self.delta_ec_mhz.map(DeltaEcSpec::ExplicitMhz)
        }
    }

    fn apply(&self, c: &mut SystemConfig) {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut c.radius_nm, self.radius_nm);
        set(&mut c.wavelength_nm, self.wavelength_nm);
        set(&mut c.q0, self.q0);
        set(&mut c.vc_um3, self.vc_um3);
        set(&mut c.fc, self.fc);
        set(&mut c.gamma_s_mhz, self.gamma_s_mhz);
        set(&mut c.mu, self.mu);
        set(&mut c.eps_d, self.eps_d);
        set(&mut c.eps_s, self.eps_s);
        if let Some(k) = self.kappa1() {
            c.kappa1 = k;
        }
        if let Some(d) = self.delta_ec() {
            c.delta_ec = d;
        }
    }

    /// Defaults, overlaid by the config file, overlaid by flags; validated.
    pub fn resolve(&self) -> Result<SystemConfig, CliError> {
        let mut cfg = SystemConfig::default();
        if let Some(path) = &self.config {
            load_file(path)?.apply(&mut cfg);
        }
        self.apply(&mut cfg);
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

fn load_file(path: &Path) -> Result<SystemArgs, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    match value {
        Value::Object(map) => SystemArgs::from_json(&map),
        _ => Err(CliError::Usage(format!("config {} must be a JSON object", path.display()))),
    }
}
