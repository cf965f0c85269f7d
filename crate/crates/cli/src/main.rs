//! `wgm-cqed`: rates, spectra and photon statistics for a nanocrystal-hosted
//! NV centre on a microtoroid, written as CSV or JSON.

mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use wgm_cqed::exec::ExecPolicy;
use wgm_cqed::params::{classify_region, derive_rates, sweep_radius, DerivedRates, Kappa1Spec, SystemConfig};
use wgm_cqed::quantum::{g2_scan, predicted_occupation, Cutoffs};
use wgm_cqed::semiclassical::{components_scan, group_delay, spectrum_scan_with, Scan, SpectrumRequest};
use wgm_cqed::units::{mhz_to_rad, rad_to_mhz};
use wgm_cqed::{DeltaEcSpec, Error};

use config::SystemArgs;
use output::{Cell, Table};

const THREADS_ENV: &str = "WGM_CQED_THREADS";
/// Largest predicted mode occupation over the scan for the default g2 drive.
const DEFAULT_G2_OCCUPATION: f64 = 1e-3;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or parameter values. Exit 2.
    Usage(String),
    /// The computation itself failed. Exit 1.
    Runtime(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "wgm-cqed", version, about)]
struct Cli {
    /// Evaluate scans on one thread
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derived coupling and damping rates
    Rates(RatesCmd),
    /// Rates on a grid of nanocrystal radii
    SweepRadius(SweepCmd),
    /// Transmission, reflection and loss over a probe scan
    Spectrum(ScanCmd),
    /// The four-path decomposition of the transmitted amplitude
    Components(ScanCmd),
    /// Steady-state g2(0) from the truncated master equation
    G2(G2Cmd),
    /// Transmission phase and group delay
    Phase(ScanCmd),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write here instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct RatesCmd {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct SweepCmd {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    r_min_nm: f64,
    #[arg(long, default_value_t = 70.0, allow_hyphen_values = true)]
    r_max_nm: f64,
    #[arg(long, default_value_t = 141)]
    points: usize,
    #[command(flatten)]
    out: OutputArgs,
}

/// `min:max:points`, detunings in MHz.
#[derive(Clone, Copy, Debug)]
struct ScanMhz {
    min: f64,
    max: f64,
    points: usize,
}

impl ScanMhz {
    fn to_scan(self) -> Result<Scan, CliError> {
        Ok(Scan::from_mhz(self.min, self.max, self.points)?)
    }
}

fn parse_scan(s: &str) -> Result<ScanMhz, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("expected min:max:points, got `{s}`"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    let min = num(a)?;
    let max = num(b)?;
    let points = n.trim().parse::<usize>().map_err(|e| format!("`{n}`: {e}"))?;
    if !(min.is_finite() && max.is_finite() && min < max && points >= 2) {
        return Err(format!("need finite min < max and points >= 2, got `{s}`"));
    }
    Ok(ScanMhz { min, max, points })
}

#[derive(Args, Debug)]
struct ScanCmd {
    #[command(flatten)]
    system: SystemArgs,
    /// Probe-cavity detuning scan in MHz
    #[arg(long, value_parser = parse_scan, allow_hyphen_values = true, default_value = "-600:600:2401")]
    scan_mhz: ScanMhz,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct G2Cmd {
    #[command(flatten)]
    system: SystemArgs,
    /// Probe-cavity detuning scan in MHz [default: -g +/- 200 MHz, 21 points]
    #[arg(long, value_parser = parse_scan, allow_hyphen_values = true)]
    scan_mhz: Option<ScanMhz>,
    /// Input amplitude, |drive|^2 in photons/s [default: largest predicted occupation 1e-3]
    #[arg(long)]
    drive: Option<f64>,
    #[arg(long, default_value_t = 3)]
    cutoff_plus: usize,
    #[arg(long, default_value_t = 3)]
    cutoff_minus: usize,
    /// Re-solve with larger cutoffs until g2 and flux agree
    #[arg(long)]
    check_convergence: bool,
    #[command(flatten)]
    out: OutputArgs,
}

struct Context {
    config: SystemConfig,
    rates: DerivedRates,
    delta_ec: f64,
}

fn context(system: &SystemArgs) -> Result<Context, CliError> {
    let config = system.resolve()?;
    let rates = derive_rates(&config)?;
    let delta_ec = config.resolve_delta_ec(&rates)?;
    Ok(Context { config, rates, delta_ec })
}

fn rates_json(ctx: &Context) -> Map<String, Value> {
    let c = &ctx.config;
    let r = &ctx.rates;
    let mut m = Map::new();
    m.insert("radius_nm".into(), json!(c.radius_nm));
    m.insert("wavelength_nm".into(), json!(c.wavelength_nm));
    m.insert("q0".into(), json!(c.q0));
    m.insert("vc_um3".into(), json!(c.vc_um3));
    m.insert("fc".into(), json!(c.fc));
    m.insert("mu".into(), json!(c.mu));
    m.insert("eps_d".into(), json!(c.eps_d));
    m.insert("eps_s".into(), json!(c.eps_s));
    m.insert("critical".into(), json!(c.kappa1 == Kappa1Spec::Critical));
    if let Kappa1Spec::Ratio(x) = c.kappa1 {
        m.insert("kappa1_ratio".into(), json!(x));
    }
    m.insert("dit".into(), json!(c.delta_ec == DeltaEcSpec::DitAuto));
    m.insert("alpha_m3".into(), json!(r.alpha));
    let pairs = [
        ("omega_c", r.omega_c),
        ("G", r.g_coh),
        ("g", r.g_scat),
        ("kappaR", r.kappa_r),
        ("kappa0", r.kappa0),
        ("kappa1", r.kappa1),
        ("kappa_plus", r.kappa_plus),
        ("kappa_minus", r.kappa_minus),
        ("gamma_s", r.gamma_s),
        ("delta_ec", ctx.delta_ec),
    ];
    for (name, v) in pairs {
        m.insert(format!("{name}_rad_s"), json!(v));
        m.insert(format!("{name}_mhz"), json!(rad_to_mhz(v)));
    }
    m.insert("region".into(), json!(format!("{:?}", classify_region(r))));
    m
}

fn run_rates(cmd: &RatesCmd) -> Result<String, CliError> {
    let m = rates_json(&context(&cmd.system)?);
    Ok(match cmd.out.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Value::Object(m)).unwrap();
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("key,value\n");
            for (k, v) in &m {
                let cell = match v {
                    Value::Number(n) => output::fmt_num(n.as_f64().unwrap()),
                    Value::String(t) => t.clone(),
                    other => other.to_string(),
                };
                s.push_str(&format!("{k},{cell}\n"));
            }
            s
        }
    })
}

fn run_sweep(cmd: &SweepCmd) -> Result<Table, CliError> {
    let config = cmd.system.resolve()?;
    let mut t = Table::new(&["radius_nm", "G_mhz", "g_mhz", "gamma_s_mhz", "kappa0_mhz", "kappa1_mhz", "kappaR_mhz"]);
    for s in sweep_radius(&config, cmd.r_min_nm, cmd.r_max_nm, cmd.points)? {
        let r = s.rates;
        let row = [s.radius_nm]
            .into_iter()
            .chain([r.g_coh, r.g_scat, r.gamma_s, r.kappa0, r.kappa1, r.kappa_r].map(rad_to_mhz))
            .map(Cell::Num)
            .collect();
        t.push(row);
    }
    Ok(t)
}

fn request(cmd: &ScanCmd) -> Result<SpectrumRequest, CliError> {
    let ctx = context(&cmd.system)?;
    Ok(SpectrumRequest { rates: ctx.rates, delta_ec: ctx.delta_ec, scan: cmd.scan_mhz.to_scan()? })
}

fn run_spectrum(cmd: &ScanCmd, policy: ExecPolicy) -> Result<Table, CliError> {
    let spec = spectrum_scan_with(&request(cmd)?, policy)?;
    let mut t = Table::new(&["delta_pc_mhz", "transmission", "reflection", "loss", "phase_rad"]);
    for p in spec {
        t.push([rad_to_mhz(p.delta_pc), p.transmission, p.reflection, p.loss, p.phase].map(Cell::Num).to_vec());
    }
    Ok(t)
}

fn run_components(cmd: &ScanCmd, policy: ExecPolicy) -> Result<Table, CliError> {
    let rows = components_scan(&request(cmd)?, policy)?;
    let mut t = Table::new(&["delta_pc_mhz", "re_a1", "im_a1", "re_a2", "im_a2", "re_a3", "im_a3", "re_a4", "im_a4"]);
    for (d, c) in rows {
        t.push(
            [rad_to_mhz(d), c.a1.re, c.a1.im, c.a2.re, c.a2.im, c.a3.re, c.a3.im, c.a4.re, c.a4.im]
                .map(Cell::Num)
                .to_vec(),
        );
    }
    Ok(t)
}

fn run_phase(cmd: &ScanCmd, policy: ExecPolicy) -> Result<Table, CliError> {
    let spec = spectrum_scan_with(&request(cmd)?, policy)?;
    let mut t = Table::new(&["delta_pc_mhz", "transmission", "phase_rad", "group_delay_s"]);
    for (k, p) in spec.iter().enumerate() {
        // endpoints and points next to a transmission zero have no delay
        let delay = group_delay(&spec, k).unwrap_or(f64::NAN);
        t.push([rad_to_mhz(p.delta_pc), p.transmission, p.phase, delay].map(Cell::Num).to_vec());
    }
    Ok(t)
}

fn run_g2(cmd: &G2Cmd, policy: ExecPolicy) -> Result<Table, CliError> {
    let ctx = context(&cmd.system)?;
    let scan = match cmd.scan_mhz {
        Some(s) => s.to_scan()?,
        None => Scan::around(-ctx.rates.g_scat, mhz_to_rad(200.0), 21)?,
    };
    let drive = match cmd.drive {
        Some(d) if d.is_finite() && d >= 0.0 => d,
        Some(d) => return Err(CliError::Usage(format!("drive must be finite and non-negative, got {d}"))),
        None => {
            let mut worst: f64 = 0.0;
            for d in scan.grid() {
                let (np, nm) = predicted_occupation(&ctx.rates, d, ctx.delta_ec, 1.0)?;
                worst = worst.max(np).max(nm);
            }
            if worst <= 0.0 {
                return Err(CliError::Runtime("the taper does not drive the cavity (kappa1 = 0)".into()));
            }
            (DEFAULT_G2_OCCUPATION / worst).sqrt()
        }
    };
    let cutoffs = Cutoffs::new(cmd.cutoff_plus, cmd.cutoff_minus);
    let points = g2_scan(&ctx.rates, ctx.delta_ec, &scan, drive, cutoffs, cmd.check_convergence, policy)?;
    let mut t = Table::new(&["delta_pc_mhz", "g2_zero", "out_flux", "n_plus", "n_minus", "converged"]);
    for p in points {
        let d = Cell::Num(rad_to_mhz(p.delta_pc));
        match p.result {
            Ok(r) => t.push(vec![
                d,
                Cell::Num(r.g2_zero),
                Cell::Num(r.out_flux),
                Cell::Num(r.n_plus),
                Cell::Num(r.n_minus),
                Cell::Bool(r.converged),
            ]),
            Err(e) => {
                eprintln!("warning: {:.6} MHz: {e}", rad_to_mhz(p.delta_pc));
                let nan = Cell::Num(f64::NAN);
                t.push(vec![d, nan, nan, nan, nan, Cell::Bool(false)]);
            }
        }
    }
    Ok(t)
}

fn configure_threads() -> Result<ExecPolicy, CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(ExecPolicy::Parallel);
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(if n == 1 { ExecPolicy::Sequential } else { ExecPolicy::Parallel })
}

fn emit(out: &OutputArgs, body: String) -> Result<(), CliError> {
    match &out.output {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes()).map_err(|e| CliError::Runtime(e.to_string()))
        }
    }
}

fn render(out: &OutputArgs, t: Table) -> String {
    match out.format.unwrap_or(Format::Csv) {
        Format::Csv => t.to_csv(),
        Format::Json => t.to_json(),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut policy = configure_threads()?;
    if cli.sequential {
        policy = ExecPolicy::Sequential;
    }
    match &cli.command {
        Command::Rates(c) => emit(&c.out, run_rates(c)?),
        Command::SweepRadius(c) => emit(&c.out, render(&c.out, run_sweep(c)?)),
        Command::Spectrum(c) => emit(&c.out, render(&c.out, run_spectrum(c, policy)?)),
        Command::Components(c) => emit(&c.out, render(&c.out, run_components(c, policy)?)),
        Command::G2(c) => emit(&c.out, render(&c.out, run_g2(c, policy)?)),
        Command::Phase(c) => emit(&c.out, render(&c.out, run_phase(c, policy)?)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
