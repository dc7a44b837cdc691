//! Crossing detection: scan the drive parameter E, summarize each point by
//! the sum-over-residuals statistic, bracket its sign change, refine, and
//! cross-check the estimate against the transform oracle.
//!
//! The SOR statistic S(E) = sum_m (P_+(m) - 1/2) vanishes when the
//! stroboscopic evolution is frozen, i.e. at a quasi-energy crossing. Scans
//! work on uniform E grids; every grid point is an independent work item, so
//! evaluation is parallel with deterministic assembly by grid index.

use crate::driving::{DrivingSpec, PhaseProfile};
use crate::floquet::{monodromy_and_series, QubitState, SimConfig, StroboPoint};
use crate::measurement::{derive_seed, observe, MeasureMode};
use crate::roots::interp_zero;
use crate::specfun::{oracle_zero, KernelConfig};
use crate::{Error, Target};
use rayon::prelude::*;

/// A basis population may drift at most this far from its own m = 0 value
/// for a crossing to count as confirmed; an order of magnitude above the
/// default shot-noise floor (~0.0025 at 40,000 repetitions).
pub const CONFIRM_THRESHOLD: f64 = 0.02;

/// One stroboscopic data point of the measured |+> population.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SeriesPoint {
    pub m: usize,
    pub prob: f64,
    pub std_err: f64,
}

/// One grid point of a scan. `sor` is recomputable from `p_plus_series`
/// (exact equality) and `sor_err` is the sum of the per-point std errors.
/// Per-point engine failures are attached here; the scan continues.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ScanRecord {
    pub e: f64,
    pub sor: f64,
    pub sor_err: f64,
    pub p_plus_series: Vec<SeriesPoint>,
    pub quasi_energy: f64,
    pub failure: Option<String>,
}

/// Everything a scan needs besides the grid itself. Periods come from
/// `sim.periods`.
#[derive(Debug, Clone, Copy)]
pub struct ScanSetup {
    pub target: Target,
    pub omega: f64,
    pub mode: MeasureMode,
    pub kernel: KernelConfig,
    pub sim: SimConfig,
}

impl ScanSetup {
    pub fn validate(&self) -> Result<(), Error> {
        if !self.omega.is_finite() || self.omega < 1.0 {
            return Err(Error::InvalidInput(format!("omega must be >= 1, got {}", self.omega)));
        }
        self.kernel.validate()?;
        self.sim.validate()?;
        if let MeasureMode::Shots(model) = self.mode {
            model.validate()?;
        }
        Ok(())
    }
}

/// Sum over residuals of a measured series: sum_m (P_+(m) - 1/2).
pub fn sor(series: &[SeriesPoint]) -> f64 {
    assert!(!series.is_empty(), "SOR of an empty series");
    series.iter().map(|p| p.prob - 0.5).sum()
}

pub(crate) fn uniform_grid(e_start: f64, e_end: f64, e_step: f64) -> Result<Vec<f64>, Error> {
    if !e_start.is_finite() || !e_end.is_finite() || !e_step.is_finite() {
        return Err(Error::InvalidInput("non-finite E grid bounds".into()));
    }
    if e_step <= 0.0 {
        return Err(Error::InvalidInput(format!("e_step must be > 0, got {e_step}")));
    }
    if e_end < e_start {
        return Err(Error::InvalidInput(format!("empty E range [{e_start}, {e_end}]")));
    }
    // half-ulp guard so 13.5..14.5 step 0.1 lands on all 11 points
    let n = ((e_end - e_start) / e_step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| e_start + k as f64 * e_step).collect())
}

fn measured_series(
    strobo: &[StroboPoint],
    mode: &MeasureMode,
    record_salt: u64,
) -> Result<Vec<SeriesPoint>, Error> {
    match mode {
        MeasureMode::Exact => Ok(strobo
            .iter()
            .map(|p| SeriesPoint { m: p.m, prob: p.p_plus, std_err: 0.0 })
            .collect()),
        MeasureMode::Shots(model) => {
            let record_seed = derive_seed(model.seed, record_salt);
            strobo
                .iter()
                .map(|p| {
                    let point_model = model.with_seed(derive_seed(record_seed, p.m as u64));
                    let (prob, std_err) = observe(p.p_plus, &point_model)?;
                    Ok(SeriesPoint { m: p.m, prob, std_err })
                })
                .collect()
        }
    }
}

fn scan_one(setup: &ScanSetup, e: f64, record_salt: u64) -> ScanRecord {
    let run = || -> Result<(f64, Vec<SeriesPoint>), Error> {
        let spec = DrivingSpec::new(setup.target, e, setup.omega, setup.kernel)?;
        let profile = PhaseProfile::new(spec)?;
        let (mono, strobo) =
            monodromy_and_series(&profile, setup.omega, &setup.sim, QubitState::ket0())?;
        let series = measured_series(&strobo, &setup.mode, record_salt)?;
        Ok((mono.quasi_pair.0, series))
    };
    match run() {
        Ok((quasi_energy, series)) => {
            let s = sor(&series);
            let sor_err = series.iter().map(|p| p.std_err).sum();
            ScanRecord { e, sor: s, sor_err, p_plus_series: series, quasi_energy, failure: None }
        }
        Err(err) => ScanRecord {
            e,
            sor: f64::NAN,
            sor_err: f64::NAN,
            p_plus_series: Vec::new(),
            quasi_energy: f64::NAN,
            failure: Some(err.to_string()),
        },
    }
}

/// Evaluates the SOR statistic on the inclusive uniform grid
/// e_start, e_start + e_step, ..., e_end. Grid points run in parallel;
/// results are assembled in grid order and per-point failures are attached
/// to their records rather than aborting the scan.
pub fn scan(
    setup: &ScanSetup,
    e_start: f64,
    e_end: f64,
    e_step: f64,
) -> Result<Vec<ScanRecord>, Error> {
    setup.validate()?;
    let grid = uniform_grid(e_start, e_end, e_step)?;
    Ok((0..grid.len())
        .into_par_iter()
        .map(|k| scan_one(setup, grid[k], k as u64))
        .collect())
}

/// How a zero estimate was extracted from a fine scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroMethod {
    /// Linear interpolation between the two grid points straddling the SOR
    /// sign change.
    SorSignChange,
    /// Grid argmin of the monodromy |eps_+|; noise-free in exact mode.
    QuasiEnergyMinimum,
}

impl ZeroMethod {
    pub fn name(&self) -> &'static str {
        match self {
            ZeroMethod::SorSignChange => "sor-sign-change",
            ZeroMethod::QuasiEnergyMinimum => "quasi-energy-minimum",
        }
    }
}

/// Outcome of a fine scan: the bracket, the interpolated estimate, and the
/// transform oracle's zero over the same window for comparison. On failure
/// (no sign change), `bracket`/`refined_estimate` are absent and `failure`
/// carries a suggestion.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ZeroReport {
    pub target: Target,
    pub omega: f64,
    pub method: ZeroMethod,
    pub bracket: Option<(f64, f64)>,
    pub refined_estimate: Option<f64>,
    pub oracle_zero: Option<f64>,
    pub oracle_deviation: Option<f64>,
    pub failure: Option<String>,
}

fn report_from_records(
    setup: &ScanSetup,
    records: &[ScanRecord],
    e_start: f64,
    e_end: f64,
    method: ZeroMethod,
) -> ZeroReport {
    // the oracle is the full-range transform, independent of the scan data
    let oracle_cfg = KernelConfig { upper_cutoff: KernelConfig::full_range().upper_cutoff, ..setup.kernel };
    let oracle = oracle_zero(setup.target, e_start, e_end, &oracle_cfg).ok();

    let mut bracket = None;
    let mut refined = None;
    let mut failure = None;
    match method {
        ZeroMethod::SorSignChange => {
            for pair in records.windows(2) {
                let (a, b) = (&pair[0], &pair[1]);
                if a.sor.is_finite() && b.sor.is_finite() && a.sor * b.sor <= 0.0 && a.sor != b.sor
                {
                    bracket = Some((a.e, b.e));
                    refined = Some(interp_zero(a.e, b.e, a.sor, b.sor));
                    break;
                }
            }
            if bracket.is_none() {
                failure = Some(format!(
                    "no SOR sign change in [{e_start}, {e_end}]; increase periods or shot count, or widen the window"
                ));
            }
        }
        ZeroMethod::QuasiEnergyMinimum => {
            let finite: Vec<&ScanRecord> =
                records.iter().filter(|r| r.quasi_energy.is_finite()).collect();
            if finite.len() < 2 {
                failure = Some("too few valid grid points to bracket a quasi-energy minimum".into());
            } else {
                let mut best = 0;
                for (i, r) in finite.iter().enumerate() {
                    if r.quasi_energy.abs() < finite[best].quasi_energy.abs() {
                        best = i;
                    }
                }
                let lo = if best == 0 { 0 } else { best - 1 };
                let hi = (best + 1).min(finite.len() - 1);
                bracket = Some((finite[lo].e, finite[hi].e));
                refined = Some(finite[best].e);
            }
        }
    }
    let oracle_deviation = match (refined, oracle) {
        (Some(r), Some(o)) => Some((r - o).abs()),
        _ => None,
    };
    ZeroReport {
        target: setup.target,
        omega: setup.omega,
        method,
        bracket,
        refined_estimate: refined,
        oracle_zero: oracle,
        oracle_deviation,
        failure,
    }
}

/// Fine scan plus zero extraction. Returns the report together with the
/// underlying records so callers can persist both.
pub fn refine(
    setup: &ScanSetup,
    e_start: f64,
    e_end: f64,
    e_step: f64,
    method: ZeroMethod,
) -> Result<(ZeroReport, Vec<ScanRecord>), Error> {
    let records = scan(setup, e_start, e_end, e_step)?;
    let report = report_from_records(setup, &records, e_start, e_end, method);
    Ok((report, records))
}

/// Stroboscopic populations in all three measurement bases after m periods,
/// with per-basis standard errors (zero in exact mode).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct BasisPoint {
    pub m: usize,
    pub p0: f64,
    pub p_plus: f64,
    pub p_i: f64,
    pub std_err_0: f64,
    pub std_err_plus: f64,
    pub std_err_i: f64,
}

/// Confirmation verdict plus the three-basis series (m = 0 included).
#[derive(Debug, Clone, serde::Serialize)]
pub struct Confirmation {
    pub e: f64,
    pub omega: f64,
    pub confirmed: bool,
    pub max_deviation: f64,
    pub series: Vec<BasisPoint>,
}

/// Largest drift of any basis population from its own m = 0 value.
pub fn max_basis_deviation(series: &[BasisPoint]) -> f64 {
    assert!(!series.is_empty(), "deviation of an empty series");
    let base = series[0];
    series
        .iter()
        .map(|p| {
            (p.p0 - base.p0)
                .abs()
                .max((p.p_plus - base.p_plus).abs())
                .max((p.p_i - base.p_i).abs())
        })
        .fold(0.0, f64::max)
}

fn measure_basis_point(
    m: usize,
    exact: (f64, f64, f64),
    mode: &MeasureMode,
) -> Result<BasisPoint, Error> {
    let (p0, p_plus, p_i) = exact;
    match mode {
        MeasureMode::Exact => Ok(BasisPoint {
            m,
            p0,
            p_plus,
            p_i,
            std_err_0: 0.0,
            std_err_plus: 0.0,
            std_err_i: 0.0,
        }),
        MeasureMode::Shots(model) => {
            let point_seed = derive_seed(model.seed, m as u64);
            let sample = |basis: u64, p: f64| -> Result<(f64, f64), Error> {
                observe(p, &model.with_seed(derive_seed(point_seed, basis)))
            };
            let (p0, std_err_0) = sample(0, p0)?;
            let (p_plus, std_err_plus) = sample(1, p_plus)?;
            let (p_i, std_err_i) = sample(2, p_i)?;
            Ok(BasisPoint { m, p0, p_plus, p_i, std_err_0, std_err_plus, std_err_i })
        }
    }
}

/// Drives at a single E and checks that every basis population stays
/// constant: true iff max_m |P_b(m) - P_b(0)| <= CONFIRM_THRESHOLD for all
/// b in {|0>, |+>, |i>}.
pub fn confirm_cdt(setup: &ScanSetup, e: f64) -> Result<Confirmation, Error> {
    setup.validate()?;
    let spec = DrivingSpec::new(setup.target, e, setup.omega, setup.kernel)?;
    let profile = PhaseProfile::new(spec)?;
    let initial = QubitState::ket0();
    let (_, strobo) = monodromy_and_series(&profile, setup.omega, &setup.sim, initial)?;
    let mut series = Vec::with_capacity(strobo.len() + 1);
    series.push(measure_basis_point(0, (initial.p0(), initial.p_plus(), initial.p_i()), &setup.mode)?);
    for p in &strobo {
        series.push(measure_basis_point(p.m, (p.p0, p.p_plus, p.p_i), &setup.mode)?);
    }
    let max_deviation = max_basis_deviation(&series);
    Ok(Confirmation {
        e,
        omega: setup.omega,
        confirmed: max_deviation <= CONFIRM_THRESHOLD,
        max_deviation,
        series,
    })
}

fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

/// CSV body: one row per grid point, m-indexed P_+ columns, and a final
/// quoted failure column (empty when the record is clean).
pub fn scan_records_csv(records: &[ScanRecord]) -> String {
    let width = records.iter().map(|r| r.p_plus_series.len()).max().unwrap_or(0);
    let mut out = String::from("e,sor,sor_err,quasi_energy");
    for m in 1..=width {
        out.push_str(&format!(",p_plus_m{m}"));
    }
    out.push_str(",failure\n");
    for r in records {
        out.push_str(&fmt(r.e));
        out.push(',');
        out.push_str(&fmt(r.sor));
        out.push(',');
        out.push_str(&fmt(r.sor_err));
        out.push(',');
        out.push_str(&fmt(r.quasi_energy));
        for m in 0..width {
            out.push(',');
            match r.p_plus_series.get(m) {
                Some(p) => out.push_str(&fmt(p.prob)),
                None => out.push_str("nan"),
            }
        }
        out.push(',');
        if let Some(msg) = &r.failure {
            out.push('"');
            out.push_str(&msg.replace('"', "\"\""));
            out.push('"');
        }
        out.push('\n');
    }
    out
}

/// CSV body of the plot-ready SOR curve: e, sor, sor_err.
pub fn sor_csv(records: &[ScanRecord]) -> String {
    let mut out = String::from("e,sor,sor_err\n");
    for r in records {
        out.push_str(&format!("{},{},{}\n", fmt(r.e), fmt(r.sor), fmt(r.sor_err)));
    }
    out
}

/// Flat key = value rendering of a ZeroReport (absent fields print "none").
pub fn zero_report_text(report: &ZeroReport) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), fmt);
    let mut out = String::new();
    out.push_str(&format!("target = {}\n", report.target.name()));
    out.push_str(&format!("omega = {}\n", fmt(report.omega)));
    out.push_str(&format!("method = {}\n", report.method.name()));
    out.push_str(&format!("bracket_low = {}\n", opt(report.bracket.map(|b| b.0))));
    out.push_str(&format!("bracket_high = {}\n", opt(report.bracket.map(|b| b.1))));
    out.push_str(&format!("refined_estimate = {}\n", opt(report.refined_estimate)));
    out.push_str(&format!("oracle_zero = {}\n", opt(report.oracle_zero)));
    out.push_str(&format!("oracle_deviation = {}\n", opt(report.oracle_deviation)));
    out.push_str(&format!(
        "failure = {}\n",
        report.failure.as_deref().unwrap_or("none")
    ));
    out
}

/// JSON rendering of a ZeroReport (schema documented in the README).
pub fn zero_report_json(report: &ZeroReport) -> Result<String, Error> {
    serde_json::to_string_pretty(report)
        .map_err(|e| Error::Numerical(format!("report serialization: {e}")))
}
