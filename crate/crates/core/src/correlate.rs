//! Normalised intensity correlations with batch-means error bars.
//!
//! Every estimate is `⟨x(t)·y(t+τ)⟩ / (⟨x(t)⟩·⟨y(t+τ)⟩)` with all three
//! averages taken over the same overlap window of `N − k` samples, `k = τ/dt`.
//! Delays must sit on the sample grid and nothing wraps around.

use std::fmt;
use std::str::FromStr;

use crate::bench::{Detector, DetectorTraces};
use crate::{Error, Result};

/// Number of equal batches the overlap window is split into for error bars.
pub const BATCHES: usize = 20;

/// Relative tolerance for a delay to count as lying on the sample grid.
const GRID_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub value: f64,
    /// Delay, seconds.
    pub tau: f64,
    /// Length of the overlap window in samples.
    pub n_samples: usize,
    pub std_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationKind {
    Cross,
    Self3,
    Self4,
}

impl CorrelationKind {
    pub const ALL: [CorrelationKind; 3] = [
        CorrelationKind::Cross,
        CorrelationKind::Self3,
        CorrelationKind::Self4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CorrelationKind::Cross => "cross",
            CorrelationKind::Self3 => "self3",
            CorrelationKind::Self4 => "self4",
        }
    }
}

impl fmt::Display for CorrelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorrelationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cross" => Ok(CorrelationKind::Cross),
            "self3" => Ok(CorrelationKind::Self3),
            "self4" => Ok(CorrelationKind::Self4),
            other => Err(Error::InvalidArgument(format!(
                "unknown correlation kind '{other}' (expected cross, self3 or self4)"
            ))),
        }
    }
}

/// Converts a delay into a whole number of samples.
pub fn delay_to_lag(tau: f64, dt: f64) -> Result<isize> {
    if !tau.is_finite() {
        return Err(Error::InvalidArgument(format!("delay {tau} is not finite")));
    }
    let k = (tau / dt).round();
    if (tau - k * dt).abs() > GRID_TOLERANCE * dt {
        return Err(Error::OffGridDelay { tau, dt });
    }
    Ok(k as isize)
}

/// ⟨x·y⟩ / (⟨x⟩⟨y⟩) over equal-length slices.
///
/// Evaluated as `1 + cov(x, y) / (⟨x⟩⟨y⟩)` on data shifted by the first
/// sample, so constant inputs give exactly 1.
fn normalized_product(x: &[f64], y: &[f64]) -> Result<f64> {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let (x0, y0) = (x[0], y[0]);
    let (mut sx, mut sy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - x0, b - y0);
        sx += da;
        sy += db;
        sxy += da * db;
    }
    let (mdx, mdy) = (sx / n, sy / n);
    let cov = sxy / n - mdx * mdy;
    let norm = (x0 + mdx) * (y0 + mdy);
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::InsufficientData(
            "mean intensity is zero over the averaging window".into(),
        ));
    }
    Ok(1.0 + cov / norm)
}

/// Correlates `x(t)` with `y(t + lag·dt)`; `lag` may be negative.
pub fn g2_between(x: &[f64], y: &[f64], lag: isize, dt: f64) -> Result<CorrelationResult> {
    if x.len() != y.len() {
        return Err(Error::IncompatibleTraces(format!(
            "series differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    let shift = lag.unsigned_abs();
    let tau = lag as f64 * dt;
    if shift > n / 2 {
        return Err(Error::InsufficientOverlap { tau, len: n });
    }
    let (xs, ys) = if lag >= 0 {
        (&x[..n - shift], &y[shift..])
    } else {
        (&x[shift..], &y[..n - shift])
    };
    let m = xs.len();
    if m < BATCHES {
        return Err(Error::InsufficientData(format!(
            "overlap window of {m} samples cannot be split into {BATCHES} batches"
        )));
    }

    let value = normalized_product(xs, ys)?;
    let batch_values = (0..BATCHES)
        .map(|j| {
            let (lo, hi) = (j * m / BATCHES, (j + 1) * m / BATCHES);
            normalized_product(&xs[lo..hi], &ys[lo..hi])
        })
        .collect::<Result<Vec<_>>>()?;
    let b = BATCHES as f64;
    let mean = batch_values.iter().sum::<f64>() / b;
    let var = batch_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1.0);

    Ok(CorrelationResult {
        value,
        tau,
        n_samples: m,
        std_error: (var / b).sqrt(),
    })
}

fn lag_for(traces: &DetectorTraces, tau: f64) -> Result<isize> {
    if tau < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "delay {tau} must be non-negative"
        )));
    }
    let lag = delay_to_lag(tau, traces.dt)?;
    if tau > traces.len() as f64 * traces.dt / 2.0 {
        return Err(Error::InsufficientOverlap {
            tau,
            len: traces.len(),
        });
    }
    Ok(lag)
}

/// Cross correlation ⟨I₃(t)I₄(t+τ)⟩ / (⟨I₃⟩⟨I₄⟩).
pub fn g2_cross(traces: &DetectorTraces, tau: f64) -> Result<CorrelationResult> {
    let lag = lag_for(traces, tau)?;
    g2_between(&traces.i3, &traces.i4, lag, traces.dt)
}

/// Self correlation ⟨Iᵢ(t)Iᵢ(t+τ)⟩ / ⟨Iᵢ⟩².
pub fn g2_self(traces: &DetectorTraces, which: Detector, tau: f64) -> Result<CorrelationResult> {
    let lag = lag_for(traces, tau)?;
    let s = traces.series(which);
    g2_between(s, s, lag, traces.dt)
}

pub fn g2(traces: &DetectorTraces, kind: CorrelationKind, tau: f64) -> Result<CorrelationResult> {
    match kind {
        CorrelationKind::Cross => g2_cross(traces, tau),
        CorrelationKind::Self3 => g2_self(traces, Detector::D3, tau),
        CorrelationKind::Self4 => g2_self(traces, Detector::D4, tau),
    }
}

pub fn g2_delay_scan(
    traces: &DetectorTraces,
    kind: CorrelationKind,
    taus: &[f64],
) -> Result<Vec<CorrelationResult>> {
    taus.iter().map(|&tau| g2(traces, kind, tau)).collect()
}
