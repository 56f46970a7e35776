//! Phase-noise-only classical light.
//!
//! The field has a fixed modulus and a piecewise-constant phase. Each phase
//! plateau lasts for a dwell time drawn from an exponential density with scale
//! `t_c`, renormalised on `[t_min, t_max]`; at the end of a plateau the phase
//! advances by an increment drawn uniformly from the circle.

use std::f64::consts::TAU;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::C64;
use crate::{Error, Result};

/// Stream index used for source 1 by [`crate::pipeline`].
pub const SOURCE_1_STREAM: u64 = 1;
/// Stream index used for source 2 by [`crate::pipeline`].
pub const SOURCE_2_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseNoiseConfig {
    /// Coherence time (scale of the dwell-time exponential), seconds.
    pub t_c: f64,
    /// Shortest allowed dwell, seconds.
    pub t_min: f64,
    /// Longest allowed dwell, seconds.
    pub t_max: f64,
    /// Field modulus, arbitrary units.
    pub amplitude: f64,
    pub seed: u64,
}

impl Default for PhaseNoiseConfig {
    /// 10 µs coherence time with dwells restricted to 1–100 µs.
    fn default() -> Self {
        PhaseNoiseConfig {
            t_c: 10e-6,
            t_min: 1e-6,
            t_max: 100e-6,
            amplitude: 1.0,
            seed: 0,
        }
    }
}

impl PhaseNoiseConfig {
    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.t_c, self.t_min, self.t_max, self.amplitude]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidArgument(
                "source parameters must be finite".into(),
            ));
        }
        if !(0.0 < self.t_min && self.t_min < self.t_c && self.t_c < self.t_max) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < t_min < t_c < t_max, got t_min={}, t_c={}, t_max={}",
                self.t_min, self.t_c, self.t_max
            )));
        }
        if self.amplitude <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            )));
        }
        Ok(())
    }
}

/// Deterministic split of one master seed into independent streams.
///
/// Stream `s` of seed `x` is ChaCha8 keyed by `seed_from_u64(x)` with its
/// stream counter set to `s`; distinct streams never share keystream blocks.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Inverse CDF of the truncated exponential dwell distribution.
pub fn sample_dwell(config: &PhaseNoiseConfig, u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::InvalidArgument(format!(
            "uniform variate {u} outside [0, 1)"
        )));
    }
    Ok(dwell_from_uniform(config, u))
}

fn dwell_from_uniform(config: &PhaseNoiseConfig, u: f64) -> f64 {
    let lo = (-config.t_min / config.t_c).exp();
    let hi = (-config.t_max / config.t_c).exp();
    let t = -config.t_c * (lo - u * (lo - hi)).ln();
    t.clamp(config.t_min, config.t_max)
}

/// One phase plateau.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    /// Plateau length, seconds.
    pub dwell: f64,
    /// Phase held during the plateau, radians in [0, 2π).
    pub phase: f64,
}

/// Endless sequence of phase plateaus. The first plateau starts at a uniform
/// random phase; every later one adds a uniform increment.
#[derive(Debug, Clone)]
pub struct PhaseSegments {
    config: PhaseNoiseConfig,
    rng: ChaCha8Rng,
    phase: Option<f64>,
}

impl PhaseSegments {
    pub fn new(config: &PhaseNoiseConfig, stream: u64) -> Result<Self> {
        config.validate()?;
        Ok(PhaseSegments {
            config: *config,
            rng: stream_rng(config.seed, stream),
            phase: None,
        })
    }
}

impl Iterator for PhaseSegments {
    type Item = Segment;

    fn next(&mut self) -> Option<Segment> {
        let jump = TAU * self.rng.random::<f64>();
        let phase = match self.phase {
            None => jump,
            Some(p) => (p + jump).rem_euclid(TAU),
        };
        self.phase = Some(phase);
        let dwell = dwell_from_uniform(&self.config, self.rng.random::<f64>());
        Some(Segment { dwell, phase })
    }
}

/// Uniformly sampled complex field amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTrace {
    pub dt: f64,
    pub samples: Vec<C64>,
}

impl FieldTrace {
    pub fn new(dt: f64, samples: Vec<C64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sample period {dt} must be positive"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InvalidArgument(
                "a field trace needs at least one sample".into(),
            ));
        }
        Ok(FieldTrace { dt, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }

    pub fn intensities(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Samples a phase-noise field on a grid of `round(duration / dt)` points.
///
/// A phase jump falling between two grid points takes effect at the next one.
pub fn generate_trace(
    config: &PhaseNoiseConfig,
    duration: f64,
    dt: f64,
    stream: u64,
) -> Result<FieldTrace> {
    config.validate()?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sample period {dt} must be positive"
        )));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "duration {duration} must be positive"
        )));
    }
    if dt > config.t_min {
        return Err(Error::SamplingTooCoarse {
            dt,
            t_min: config.t_min,
        });
    }
    if dt > config.t_min / 4.0 {
        warn!("sample period {dt} s resolves the shortest dwell with fewer than 4 samples");
    }
    if duration < 100.0 * config.t_c {
        warn!("duration {duration} s spans fewer than 100 coherence times");
    }
    let n = (duration / dt).round() as usize;
    if n == 0 {
        return Err(Error::InvalidArgument(format!(
            "duration {duration} s is shorter than one sample"
        )));
    }

    let mut segments = PhaseSegments::new(config, stream)?;
    let mut current = segments.next().expect("segment stream is endless");
    let mut segment_end = current.dwell;
    let samples = (0..n)
        .map(|k| {
            let t = k as f64 * dt;
            while t >= segment_end {
                current = segments.next().expect("segment stream is endless");
                segment_end += current.dwell;
            }
            C64::from_polar(config.amplitude, current.phase)
        })
        .collect();
    FieldTrace::new(dt, samples)
}

/// Normalised first-order coherence ⟨Ē(t)E(t+τ)⟩ / ⟨|E(t)|²⟩ over the overlap
/// window. `tau` is rounded to the nearest whole number of samples.
pub fn first_order_coherence(trace: &FieldTrace, tau: f64) -> Result<C64> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "delay {tau} must be non-negative"
        )));
    }
    let n = trace.len();
    let lag = (tau / trace.dt).round() as usize;
    if lag > n / 2 {
        return Err(Error::InsufficientOverlap { tau, len: n });
    }
    let head = &trace.samples[..n - lag];
    let tail = &trace.samples[lag..];
    let (mut num, mut den) = (C64::new(0.0, 0.0), 0.0);
    for (a, b) in head.iter().zip(tail) {
        num += a.conj() * b;
        den += a.norm_sqr();
    }
    if den == 0.0 {
        return Err(Error::InsufficientData("field is identically zero".into()));
    }
    Ok(num / den)
}
