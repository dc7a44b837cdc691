//! Command-line experiment harness.
//!
//! Commands: waveform | scan | refine | omega-sweep | oracle | confirm.
//! Every option can come from a flat `key = value` config file (--config)
//! and be overridden by its command-line flag. Every output file embeds the
//! full run configuration and code version in `#`-prefixed header lines, so
//! rerunning with an identical config and seed reproduces the bytes.
//!
//! Exit codes: 0 success, 1 invalid config, 2 numerical failure, 3 I/O
//! failure.

use crate::cdt::{
    self, scan_records_csv, sor_csv, zero_report_text, Confirmation, ScanSetup, ZeroMethod,
    ZeroReport,
};
use crate::driving::{field_csv, rescaled_phase, sample_field, DrivingSpec, PhaseProfile};
use crate::floquet::SimConfig;
use crate::measurement::{MeasureMode, ShotModel, RNG_NAME};
use crate::specfun::{oracle_xi, oracle_zero, KernelConfig};
use crate::{Error, Target};
use clap::Parser;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

const WAVEFORM_SAMPLES: usize = 2001;

/// Fully resolved run parameters; serialized into every output header.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RunConfig {
    pub target: Target,
    pub e_start: f64,
    pub e_end: f64,
    pub e_step: f64,
    pub omega: f64,
    pub periods: usize,
    /// Absent means exact probabilities (the default).
    pub shots: Option<ShotModel>,
    pub out_dir: PathBuf,
    /// Lab tunneling frequency in Hz; reporting only.
    pub j_lab_hz: f64,
    /// omega-sweep only.
    pub omegas: Vec<f64>,
    /// refine / omega-sweep only.
    pub method: ZeroMethod,
}

impl RunConfig {
    pub fn mode(&self) -> MeasureMode {
        match self.shots {
            Some(model) => MeasureMode::Shots(model),
            None => MeasureMode::Exact,
        }
    }

    fn setup(&self) -> ScanSetup {
        ScanSetup {
            target: self.target,
            omega: self.omega,
            mode: self.mode(),
            kernel: KernelConfig::default(),
            sim: SimConfig { periods: self.periods, ..SimConfig::default() },
        }
    }
}

/// Partially specified options from one source (config file or flags).
#[derive(Debug, Default, Clone)]
struct Overrides {
    target: Option<String>,
    e_start: Option<f64>,
    e_end: Option<f64>,
    e_step: Option<f64>,
    omega: Option<f64>,
    periods: Option<usize>,
    shots: Option<u64>,
    fidelity: Option<f64>,
    seed: Option<u64>,
    exact: Option<bool>,
    out: Option<PathBuf>,
    j_lab_hz: Option<f64>,
    omegas: Option<String>,
    method: Option<String>,
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T, Error>
where
    T::Err: std::fmt::Display,
{
    raw.parse()
        .map_err(|e| Error::InvalidInput(format!("config key '{key}': bad value '{raw}': {e}")))
}

impl Overrides {
    /// Flat `key = value` file; '#' starts a comment, blank lines ignored.
    fn from_file(path: &Path) -> Result<Overrides, Error> {
        let text = std::fs::read_to_string(path)?;
        let mut o = Overrides::default();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidInput(format!(
                    "{}:{}: expected 'key = value', got '{line}'",
                    path.display(),
                    idx + 1
                ))
            })?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "target" => o.target = Some(value.to_string()),
                "e_start" => o.e_start = Some(parse_value(&key, value)?),
                "e_end" => o.e_end = Some(parse_value(&key, value)?),
                "e_step" => o.e_step = Some(parse_value(&key, value)?),
                "omega" => o.omega = Some(parse_value(&key, value)?),
                "periods" => o.periods = Some(parse_value(&key, value)?),
                "shots" => o.shots = Some(parse_value(&key, value)?),
                "fidelity" => o.fidelity = Some(parse_value(&key, value)?),
                "seed" => o.seed = Some(parse_value(&key, value)?),
                "exact" => o.exact = Some(parse_value(&key, value)?),
                "out" => o.out = Some(PathBuf::from(value)),
                "j_lab_hz" => o.j_lab_hz = Some(parse_value(&key, value)?),
                "omegas" => o.omegas = Some(value.to_string()),
                "method" => o.method = Some(value.to_string()),
                other => {
                    return Err(Error::InvalidInput(format!(
                        "{}:{}: unknown config key '{other}'",
                        path.display(),
                        idx + 1
                    )))
                }
            }
        }
        Ok(o)
    }

    /// Field-wise overlay: values in `self` win over `base`.
    fn layered_over(self, base: Overrides) -> Overrides {
        Overrides {
            target: self.target.or(base.target),
            e_start: self.e_start.or(base.e_start),
            e_end: self.e_end.or(base.e_end),
            e_step: self.e_step.or(base.e_step),
            omega: self.omega.or(base.omega),
            periods: self.periods.or(base.periods),
            shots: self.shots.or(base.shots),
            fidelity: self.fidelity.or(base.fidelity),
            seed: self.seed.or(base.seed),
            exact: self.exact.or(base.exact),
            out: self.out.or(base.out),
            j_lab_hz: self.j_lab_hz.or(base.j_lab_hz),
            omegas: self.omegas.or(base.omegas),
            method: self.method.or(base.method),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Waveform,
    Scan,
    Refine,
    OmegaSweep,
    Oracle,
    Confirm,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Waveform => "waveform",
            Kind::Scan => "scan",
            Kind::Refine => "refine",
            Kind::OmegaSweep => "omega-sweep",
            Kind::Oracle => "oracle",
            Kind::Confirm => "confirm",
        }
    }

    /// (e_start, e_end, e_step, omega, periods, target)
    fn defaults(self) -> (f64, f64, f64, f64, usize, &'static str) {
        match self {
            Kind::Waveform => (4.0, 4.0, 1.0, 1.0, 20, "riemann"),
            Kind::Scan => (10.0, 18.0, 1.0, 8.0, 20, "riemann"),
            Kind::Refine => (13.5, 14.5, 0.1, 8.0, 30, "riemann"),
            Kind::OmegaSweep => (8.5, 9.5, 0.1, 8.0, 30, "polya"),
            Kind::Oracle => (0.0, 30.0, 1.0, 8.0, 20, "riemann"),
            Kind::Confirm => (f64::NAN, f64::NAN, 1.0, 8.0, 20, "riemann"),
        }
    }
}

fn parse_method(raw: &str) -> Result<ZeroMethod, Error> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "sor" | "sor-sign-change" => Ok(ZeroMethod::SorSignChange),
        "quasi-min" | "quasi-energy-minimum" => Ok(ZeroMethod::QuasiEnergyMinimum),
        other => Err(Error::InvalidInput(format!(
            "unknown method '{other}' (expected sor-sign-change or quasi-energy-minimum)"
        ))),
    }
}

fn parse_omegas(raw: &str) -> Result<Vec<f64>, Error> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidInput(format!("bad omega '{}': {e}", s.trim())))
        })
        .collect()
}

fn finalize(kind: Kind, o: Overrides) -> Result<RunConfig, Error> {
    let (d_start, d_end, d_step, d_omega, d_periods, d_target) = kind.defaults();
    let target = Target::from_str(o.target.as_deref().unwrap_or(d_target))?;
    let e_start = match (o.e_start, kind) {
        (None, Kind::Confirm) => {
            return Err(Error::InvalidInput(
                "confirm requires --e-start (the drive parameter E)".into(),
            ))
        }
        (v, _) => v.unwrap_or(d_start),
    };
    let e_end = o.e_end.unwrap_or(if kind == Kind::Confirm { e_start } else { d_end });
    let shots = if o.exact == Some(true) {
        None
    } else {
        o.shots.map(|repetitions| ShotModel {
            repetitions,
            readout_fidelity: o.fidelity.unwrap_or(0.995),
            seed: o.seed.unwrap_or(0),
        })
    };
    let j_lab_hz = o.j_lab_hz.unwrap_or(4000.0);
    if !(j_lab_hz > 0.0) {
        return Err(Error::InvalidInput(format!("j_lab_hz must be > 0, got {j_lab_hz}")));
    }
    Ok(RunConfig {
        target,
        e_start,
        e_end,
        e_step: o.e_step.unwrap_or(d_step),
        omega: o.omega.unwrap_or(d_omega),
        periods: o.periods.unwrap_or(d_periods),
        shots,
        out_dir: o.out.unwrap_or_else(|| PathBuf::from("out")),
        j_lab_hz,
        omegas: match o.omegas.as_deref() {
            Some(raw) => parse_omegas(raw)?,
            None => Vec::new(),
        },
        method: match o.method.as_deref() {
            Some(raw) => parse_method(raw)?,
            None => ZeroMethod::SorSignChange,
        },
    })
}

/// `#`-prefixed header block carried by every output file.
fn config_header(cfg: &RunConfig, kind: Kind) -> String {
    let mut h = String::new();
    let _ = writeln!(h, "# command = {}", kind.name());
    let _ = writeln!(h, "# version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(h, "# target = {}", cfg.target.name());
    let _ = writeln!(h, "# e_start = {}", cfg.e_start);
    let _ = writeln!(h, "# e_end = {}", cfg.e_end);
    let _ = writeln!(h, "# e_step = {}", cfg.e_step);
    let _ = writeln!(h, "# omega = {}", cfg.omega);
    let _ = writeln!(h, "# periods = {}", cfg.periods);
    match &cfg.shots {
        Some(m) => {
            let _ = writeln!(h, "# mode = shots");
            let _ = writeln!(h, "# shots = {}", m.repetitions);
            let _ = writeln!(h, "# fidelity = {}", m.readout_fidelity);
            let _ = writeln!(h, "# seed = {}", m.seed);
            let _ = writeln!(h, "# rng = {RNG_NAME}");
        }
        None => {
            let _ = writeln!(h, "# mode = exact");
        }
    }
    let _ = writeln!(h, "# j_lab_hz = {}", cfg.j_lab_hz);
    if kind == Kind::OmegaSweep {
        let list: Vec<String> = cfg.omegas.iter().map(|w| w.to_string()).collect();
        let _ = writeln!(h, "# omegas = {}", list.join(","));
    }
    if matches!(kind, Kind::Refine | Kind::OmegaSweep) {
        let _ = writeln!(h, "# method = {}", cfg.method.name());
    }
    h
}

fn write_output(dir: &Path, name: &str, content: &str) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), fmt)
}

fn cmd_waveform(cfg: &RunConfig) -> Result<(), Error> {
    let spec = DrivingSpec::new(cfg.target, cfg.e_start, cfg.omega, KernelConfig::default())?;
    let profile = PhaseProfile::new(spec)?;
    let samples = sample_field(&profile, cfg.omega, WAVEFORM_SAMPLES)?;
    let header = config_header(cfg, Kind::Waveform);

    let field_body = field_csv(&samples);
    write_output(&cfg.out_dir, "waveform_field.csv", &format!("{header}{field_body}"))?;

    let mut phase_body = String::from("t,phase\n");
    for s in &samples {
        let f = rescaled_phase(&profile, s.t, cfg.omega)?;
        let _ = writeln!(phase_body, "{},{}", fmt(s.t), fmt(f));
    }
    write_output(&cfg.out_dir, "waveform_phase.csv", &format!("{header}{phase_body}"))
}

fn cmd_scan(cfg: &RunConfig) -> Result<(), Error> {
    let records = cdt::scan(&cfg.setup(), cfg.e_start, cfg.e_end, cfg.e_step)?;
    let header = config_header(cfg, Kind::Scan);
    write_output(&cfg.out_dir, "scan_records.csv", &format!("{header}{}", scan_records_csv(&records)))?;
    write_output(&cfg.out_dir, "sor.csv", &format!("{header}{}", sor_csv(&records)))?;
    let sors: Vec<f64> = records.iter().map(|r| r.sor).collect();
    for i in crate::roots::sign_changes(&sors) {
        println!("SOR sign change between E = {} and E = {}", records[i].e, records[i + 1].e);
    }
    Ok(())
}

fn zero_report_json_with_config(cfg: &RunConfig, report: &ZeroReport) -> Result<String, Error> {
    #[derive(serde::Serialize)]
    struct Envelope<'a> {
        config: &'a RunConfig,
        report: &'a ZeroReport,
    }
    serde_json::to_string_pretty(&Envelope { config: cfg, report })
        .map_err(|e| Error::Numerical(format!("report serialization: {e}")))
}

fn cmd_refine(cfg: &RunConfig) -> Result<(), Error> {
    let (report, records) =
        cdt::refine(&cfg.setup(), cfg.e_start, cfg.e_end, cfg.e_step, cfg.method)?;
    let header = config_header(cfg, Kind::Refine);
    write_output(&cfg.out_dir, "refine_records.csv", &format!("{header}{}", scan_records_csv(&records)))?;
    write_output(&cfg.out_dir, "zero_report.txt", &format!("{header}{}", zero_report_text(&report)))?;
    write_output(&cfg.out_dir, "zero_report.json", &zero_report_json_with_config(cfg, &report)?)?;
    match (&report.failure, report.refined_estimate) {
        (None, Some(est)) => println!("refined zero estimate: {est}"),
        (Some(msg), _) => println!("refine failed: {msg}"),
        _ => {}
    }
    Ok(())
}

fn cmd_omega_sweep(cfg: &RunConfig) -> Result<(), Error> {
    if cfg.omegas.len() < 2 {
        return Err(Error::InvalidInput(
            "omega-sweep needs at least two omegas (--omegas w1,w2,...)".into(),
        ));
    }
    let header = config_header(cfg, Kind::OmegaSweep);
    let mut body =
        String::from("omega,refined_estimate,bracket_low,bracket_high,oracle_zero,failure\n");
    let mut reports: Vec<ZeroReport> = Vec::new();
    for &omega in &cfg.omegas {
        let mut setup = cfg.setup();
        setup.omega = omega;
        let report = match cdt::refine(&setup, cfg.e_start, cfg.e_end, cfg.e_step, cfg.method) {
            Ok((report, _)) => report,
            // per-omega failure: record it, keep sweeping
            Err(e) => ZeroReport {
                target: cfg.target,
                omega,
                method: cfg.method,
                bracket: None,
                refined_estimate: None,
                oracle_zero: None,
                oracle_deviation: None,
                failure: Some(e.to_string()),
            },
        };
        let _ = writeln!(
            body,
            "{},{},{},{},{},{}",
            fmt(omega),
            fmt_opt(report.refined_estimate),
            fmt_opt(report.bracket.map(|b| b.0)),
            fmt_opt(report.bracket.map(|b| b.1)),
            fmt_opt(report.oracle_zero),
            report
                .failure
                .as_deref()
                .map(|m| format!("\"{}\"", m.replace('"', "\"\"")))
                .unwrap_or_default(),
        );
        reports.push(report);
    }
    write_output(&cfg.out_dir, "omega_sweep.csv", &format!("{header}{body}"))?;
    #[derive(serde::Serialize)]
    struct Envelope<'a> {
        config: &'a RunConfig,
        reports: &'a [ZeroReport],
    }
    let json = serde_json::to_string_pretty(&Envelope { config: cfg, reports: &reports })
        .map_err(|e| Error::Numerical(format!("sweep serialization: {e}")))?;
    write_output(&cfg.out_dir, "omega_sweep.json", &json)
}

fn cmd_oracle(cfg: &RunConfig) -> Result<(), Error> {
    let kernel = KernelConfig::full_range();
    let header = config_header(cfg, Kind::Oracle);
    let mut table = String::from("e,value,est_error\n");
    let mut roots = String::from("bracket_low,bracket_high,root\n");
    // an empty range yields empty tables rather than an error
    if cfg.e_end >= cfg.e_start {
        let grid = cdt::uniform_grid(cfg.e_start, cfg.e_end, cfg.e_step)?;
        let mut values = Vec::with_capacity(grid.len());
        for &e in &grid {
            let v = oracle_xi(cfg.target, e, &kernel)?;
            let _ = writeln!(table, "{},{},{}", fmt(e), fmt(v.value), fmt(v.est_error));
            values.push(v.value);
        }
        for i in crate::roots::sign_changes(&values) {
            let root = oracle_zero(cfg.target, grid[i], grid[i + 1], &kernel)?;
            let _ = writeln!(roots, "{},{},{}", fmt(grid[i]), fmt(grid[i + 1]), fmt(root));
            println!("oracle root {root} in [{}, {}]", grid[i], grid[i + 1]);
        }
    }
    write_output(&cfg.out_dir, "oracle.csv", &format!("{header}{table}"))?;
    write_output(&cfg.out_dir, "oracle_roots.csv", &format!("{header}{roots}"))
}

fn confirm_csv(c: &Confirmation, j_lab_hz: f64) -> String {
    let mut body = String::new();
    let _ = writeln!(body, "# confirmed = {}", c.confirmed);
    let _ = writeln!(body, "# max_deviation = {}", fmt(c.max_deviation));
    body.push_str("m,p0,p_plus,p_i,std_err_0,std_err_plus,std_err_i,lab_time_ms\n");
    for p in &c.series {
        let lab_ms = p.m as f64 * 1e3 / j_lab_hz;
        let _ = writeln!(
            body,
            "{},{},{},{},{},{},{},{}",
            p.m,
            fmt(p.p0),
            fmt(p.p_plus),
            fmt(p.p_i),
            fmt(p.std_err_0),
            fmt(p.std_err_plus),
            fmt(p.std_err_i),
            fmt(lab_ms),
        );
    }
    body
}

fn cmd_confirm(cfg: &RunConfig) -> Result<(), Error> {
    let c = cdt::confirm_cdt(&cfg.setup(), cfg.e_start)?;
    let header = config_header(cfg, Kind::Confirm);
    write_output(&cfg.out_dir, "confirm.csv", &format!("{header}{}", confirm_csv(&c, cfg.j_lab_hz)))?;
    println!(
        "confirmed = {} (max basis deviation {} vs threshold {})",
        c.confirmed,
        c.max_deviation,
        cdt::CONFIRM_THRESHOLD
    );
    Ok(())
}

#[derive(Debug, clap::Args, Default, Clone)]
struct CommonArgs {
    /// Flat key = value config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// riemann | polya
    #[arg(long)]
    target: Option<String>,
    /// Grid start; also the single E for waveform and confirm
    #[arg(long)]
    e_start: Option<f64>,
    /// Grid end (inclusive)
    #[arg(long)]
    e_end: Option<f64>,
    /// Grid step
    #[arg(long)]
    e_step: Option<f64>,
    /// Compression factor (>= 1)
    #[arg(long)]
    omega: Option<f64>,
    /// Stroboscopic periods per grid point
    #[arg(long)]
    periods: Option<usize>,
    /// Sample probabilities with this many shots per point
    #[arg(long, conflicts_with = "exact")]
    shots: Option<u64>,
    /// Readout fidelity in (0.5, 1] for shot mode
    #[arg(long)]
    fidelity: Option<f64>,
    /// Base RNG seed for shot mode
    #[arg(long)]
    seed: Option<u64>,
    /// Force exact probabilities (the default unless shots are configured)
    #[arg(long)]
    exact: bool,
    /// Output directory, created on demand
    #[arg(long)]
    out: Option<PathBuf>,
    /// Lab tunneling frequency in Hz (reporting only)
    #[arg(long)]
    j_lab_hz: Option<f64>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            target: self.target.clone(),
            e_start: self.e_start,
            e_end: self.e_end,
            e_step: self.e_step,
            omega: self.omega,
            periods: self.periods,
            shots: self.shots,
            fidelity: self.fidelity,
            seed: self.seed,
            exact: self.exact.then_some(true),
            out: self.out.clone(),
            j_lab_hz: self.j_lab_hz,
            omegas: None,
            method: None,
        }
    }
}

#[derive(Debug, clap::Args)]
struct RefineArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// sor-sign-change (default) | quasi-energy-minimum
    #[arg(long)]
    method: Option<String>,
}

#[derive(Debug, clap::Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated compression factors, at least two
    #[arg(long)]
    omegas: Option<String>,
    /// sor-sign-change (default) | quasi-energy-minimum
    #[arg(long)]
    method: Option<String>,
}

#[derive(Debug, clap::Subcommand)]
enum Command {
    /// Emit one period of the drive field and accumulated phase
    Waveform(CommonArgs),
    /// Coarse SOR scan over an E grid
    Scan(CommonArgs),
    /// Fine scan plus zero bracketing and refinement
    Refine(RefineArgs),
    /// Repeat the fine refine across several omegas
    OmegaSweep(SweepArgs),
    /// Tabulate the transform oracle and bracket its roots
    Oracle(CommonArgs),
    /// Check that all three basis populations stay frozen at one E
    Confirm(CommonArgs),
}

#[derive(Debug, clap::Parser)]
#[command(
    name = "zetadrive",
    version,
    about = "Drive a two-level system so its dynamics freeze at the zeros of the Riemann Xi (or Polya Xi*) function"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn merged(common: &CommonArgs, method: Option<String>, omegas: Option<String>) -> Result<Overrides, Error> {
    let mut flags = common.overrides();
    flags.method = method;
    flags.omegas = omegas;
    Ok(match &common.config {
        Some(path) => flags.layered_over(Overrides::from_file(path)?),
        None => flags,
    })
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Waveform(a) => cmd_waveform(&finalize(Kind::Waveform, merged(&a, None, None)?)?),
        Command::Scan(a) => cmd_scan(&finalize(Kind::Scan, merged(&a, None, None)?)?),
        Command::Refine(a) => {
            cmd_refine(&finalize(Kind::Refine, merged(&a.common, a.method, None)?)?)
        }
        Command::OmegaSweep(a) => {
            cmd_omega_sweep(&finalize(Kind::OmegaSweep, merged(&a.common, a.method, a.omegas)?)?)
        }
        Command::Oracle(a) => cmd_oracle(&finalize(Kind::Oracle, merged(&a, None, None)?)?),
        Command::Confirm(a) => cmd_confirm(&finalize(Kind::Confirm, merged(&a, None, None)?)?),
    }
}

/// Parses std::env::args and runs the requested command; returns the
/// process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
