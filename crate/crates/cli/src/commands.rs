use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use hbt_core::bench::{mean_intensity, BenchConfig, Detector, DetectorTraces};
use hbt_core::correlate::{g2, CorrelationKind, CorrelationResult};
use hbt_core::io::{read_detector_traces, write_detector_traces};
use hbt_core::oracle::{
    predict, predict_g2_cross, predict_g2_self, solid_angle_of_setup, term_audit,
};
use hbt_core::pipeline::simulate;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};

pub const SWEEP_COLUMNS: &str = "phi34_rad,tau_s,g2_cross,g2_cross_err,g2_self3,g2_self3_err,\
g2_self4,g2_self4_err,i3_mean,i4_mean,oracle_g2_cross,oracle_g2_self";

pub const ANALYZE_COLUMNS: &str = "phi34_rad,tau_s,g2_cross,g2_cross_err,g2_self3,g2_self3_err,\
g2_self4,g2_self4_err,i3_mean,i4_mean";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Core(hbt_core::Error),
}

impl From<hbt_core::Error> for CliError {
    fn from(e: hbt_core::Error) -> Self {
        match e {
            hbt_core::Error::Io(io) => CliError::Io(io),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    /// 2 for usage or configuration problems, 3 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Estimate with its batch-means error, averaged over repeats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

impl Estimate {
    const MISSING: Estimate = Estimate {
        value: f64::NAN,
        err: f64::NAN,
    };

    fn combine(results: &[CorrelationResult]) -> Estimate {
        let n = results.len() as f64;
        let value = results.iter().map(|r| r.value).sum::<f64>() / n;
        let err = results
            .iter()
            .map(|r| r.std_error.powi(2))
            .sum::<f64>()
            .sqrt()
            / n;
        Estimate { value, err }
    }
}

/// One grid point of a sweep or analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub phi34: f64,
    pub tau: f64,
    pub g2_cross: Estimate,
    pub g2_self3: Estimate,
    pub g2_self4: Estimate,
    pub i3_mean: f64,
    pub i4_mean: f64,
    /// (cross, self) closed-form predictions; absent for offline analysis.
    pub oracle: Option<(f64, f64)>,
}

impl Row {
    fn write_csv(&self, out: &mut String) {
        write!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            self.phi34,
            self.tau,
            self.g2_cross.value,
            self.g2_cross.err,
            self.g2_self3.value,
            self.g2_self3.err,
            self.g2_self4.value,
            self.g2_self4.err,
            self.i3_mean,
            self.i4_mean
        )
        .unwrap();
        if let Some((cross, selfc)) = self.oracle {
            write!(out, ",{cross},{selfc}").unwrap();
        }
        out.push('\n');
    }
}

/// Estimates every requested correlation kind at every delay for several
/// independent realisations of the same setting.
fn evaluate(
    realisations: &[DetectorTraces],
    phi34: f64,
    taus: &[f64],
    kinds: &[CorrelationKind],
) -> CliResult<Vec<Row>> {
    let n = realisations.len() as f64;
    let mut i3_mean = 0.0;
    let mut i4_mean = 0.0;
    for t in realisations {
        i3_mean += mean_intensity(t, Detector::D3)? / n;
        i4_mean += mean_intensity(t, Detector::D4)? / n;
    }
    taus.iter()
        .map(|&tau| {
            let estimate = |kind: CorrelationKind| -> CliResult<Estimate> {
                if !kinds.contains(&kind) {
                    return Ok(Estimate::MISSING);
                }
                let results = realisations
                    .iter()
                    .map(|t| g2(t, kind, tau))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Estimate::combine(&results))
            };
            Ok(Row {
                phi34,
                tau,
                g2_cross: estimate(CorrelationKind::Cross)?,
                g2_self3: estimate(CorrelationKind::Self3)?,
                g2_self4: estimate(CorrelationKind::Self4)?,
                i3_mean,
                i4_mean,
                oracle: None,
            })
        })
        .collect()
}

/// Seed of repeat `r`: the configured seed advanced by `r`.
pub fn repeat_seed(seed: u64, repeat: u32) -> u64 {
    seed.wrapping_add(u64::from(repeat))
}

fn simulate_point(config: &RunConfig, bench: &BenchConfig, seed: u64) -> CliResult<DetectorTraces> {
    Ok(simulate(
        &config.source,
        bench,
        config.sim.duration,
        config.sim.dt,
        seed,
    )?)
}

/// Single (φ₃, φ₄, φ_D) realisation for the configured seed, as a trace file.
pub fn cmd_simulate<W: Write>(config: &RunConfig, out: W) -> CliResult<()> {
    config.validate()?;
    let traces = simulate_point(config, &config.bench, config.sim.seed)?;
    let mut attributes = BTreeMap::new();
    attributes.insert("phi3".to_string(), config.bench.phi3.to_string());
    attributes.insert("phi4".to_string(), config.bench.phi4.to_string());
    attributes.insert("phi_d".to_string(), config.bench.phi_d.to_string());
    attributes.insert("seed".to_string(), config.sim.seed.to_string());
    write_detector_traces(out, &traces, &attributes)?;
    Ok(())
}

/// Runs the φ₃₄ × τ sweep. Rows are ordered φ₃₄-major regardless of how many
/// worker threads evaluate the grid.
pub fn run_sweep(config: &RunConfig, workers: usize) -> CliResult<Vec<Row>> {
    config.validate()?;
    let phis = config.sweep.phi34_grid();
    let taus = config.sweep.tau_grid();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;

    let per_phi: Vec<CliResult<Vec<Row>>> = pool.install(|| {
        phis.par_iter()
            .map(|&phi34| {
                let bench = BenchConfig {
                    phi4: config.bench.phi3 + phi34,
                    ..config.bench
                };
                let realisations = (0..config.sim.repeats)
                    .map(|r| simulate_point(config, &bench, repeat_seed(config.sim.seed, r)))
                    .collect::<CliResult<Vec<_>>>()?;
                let mut rows = evaluate(&realisations, phi34, &taus, &CorrelationKind::ALL)?;
                let omega = solid_angle_of_setup(bench.phi3, bench.phi4)?;
                for row in &mut rows {
                    row.oracle = Some((
                        predict_g2_cross(bench.phi_d, omega),
                        predict_g2_self(bench.phi_d),
                    ));
                }
                Ok(rows)
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(phis.len() * taus.len());
    for r in per_phi {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn format_rows(columns: &str, rows: &[Row]) -> String {
    let mut out = format!("# {columns}\n");
    for row in rows {
        row.write_csv(&mut out);
    }
    out
}

pub fn cmd_sweep<W: Write>(config: &RunConfig, workers: usize, mut out: W) -> CliResult<()> {
    let rows = run_sweep(config, workers)?;
    out.write_all(format_rows(SWEEP_COLUMNS, &rows).as_bytes())?;
    Ok(())
}

/// Estimates correlations from a recorded trace file.
///
/// φ₃₄ is taken from `phi3`/`phi4` header attributes when present, NaN otherwise.
pub fn run_analyze<R: BufRead>(
    input: R,
    taus: &[f64],
    kinds: &[CorrelationKind],
) -> CliResult<Vec<Row>> {
    if taus.is_empty() {
        return Err(CliError::Usage("no delays requested".into()));
    }
    let file = read_detector_traces(input)?;
    let attr = |k: &str| file.attributes.get(k).and_then(|v| v.parse::<f64>().ok());
    let phi34 = match (attr("phi3"), attr("phi4")) {
        (Some(p3), Some(p4)) => p4 - p3,
        _ => f64::NAN,
    };
    evaluate(std::slice::from_ref(&file.traces), phi34, taus, kinds)
}

pub fn cmd_analyze<R: BufRead, W: Write>(
    input: R,
    taus: &[f64],
    kinds: &[CorrelationKind],
    mut out: W,
) -> CliResult<()> {
    let rows = run_analyze(input, taus, kinds)?;
    out.write_all(format_rows(ANALYZE_COLUMNS, &rows).as_bytes())?;
    Ok(())
}

/// Closed-form report for one polariser setting, including the term audit.
pub fn predict_report(phi3: f64, phi4: f64, phi_d: f64) -> CliResult<String> {
    let p = predict(phi3, phi4, phi_d, 1.0, 1.0)?;
    let ledger = term_audit(phi3, phi4, phi_d)?;
    let mut s = String::new();
    writeln!(s, "phi3_rad = {phi3}").unwrap();
    writeln!(s, "phi4_rad = {phi4}").unwrap();
    writeln!(s, "phi_d_rad = {phi_d}").unwrap();
    writeln!(s, "omega_sr = {}", p.omega).unwrap();
    writeln!(s, "phi_g_rad = {}", p.phi_g).unwrap();
    writeln!(s, "g2_cross_0 = {}", p.g2_cross_zero_tau).unwrap();
    writeln!(s, "g2_self_0 = {}", p.g2_self_zero_tau).unwrap();
    // Normalised by ⟨I₁⟩ + ⟨I₂⟩ = 2.
    writeln!(s, "intensity_fraction = {}", p.intensity_i / 2.0).unwrap();
    writeln!(s, "# term audit: j,k,l,m,chain,re,im").unwrap();
    for t in &ledger.terms {
        let [j, k, l, m] = t.sources;
        writeln!(
            s,
            "{j},{k},{l},{m},{},{},{}",
            t.chain, t.coefficient.re, t.coefficient.im
        )
        .unwrap();
    }
    writeln!(s, "zero_terms = {}", ledger.zero_count()).unwrap();
    writeln!(s, "survivor_sum = {}", ledger.sum().re).unwrap();
    Ok(s)
}

pub fn cmd_predict<W: Write>(phi3: f64, phi4: f64, phi_d: f64, mut out: W) -> CliResult<()> {
    out.write_all(predict_report(phi3, phi4, phi_d)?.as_bytes())?;
    Ok(())
}
