//! Run configuration in flat `section.key = value` form.
//!
//! ```text
//! # comment
//! source.t_c = 10e-6
//! bench.phi4 = 90deg
//! sim.seed = 7
//! ```
//!
//! Times are seconds and angles radians; an angle may carry a `deg` suffix.
//! Unset keys take defaults, some of which follow `source.t_c`.

use std::f64::consts::TAU;

use hbt_core::bench::BenchConfig;
use hbt_core::source::PhaseNoiseConfig;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("{field}: {msg}")]
pub struct ConfigError {
    /// Offending key, or `line N` for lines that are not key-value pairs.
    pub field: String,
    pub msg: String,
}

fn config_error(field: impl Into<String>, msg: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub dt: f64,
    pub duration: f64,
    pub seed: u64,
    pub repeats: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub phi34_start: f64,
    pub phi34_end: f64,
    pub phi34_steps: u32,
    pub tau_max: f64,
    pub tau_steps: u32,
}

impl SweepSettings {
    /// Inclusive, evenly spaced relative polariser angles φ₄ − φ₃.
    pub fn phi34_grid(&self) -> Vec<f64> {
        linspace(self.phi34_start, self.phi34_end, self.phi34_steps)
    }

    /// Inclusive, evenly spaced delays from 0 to `tau_max`.
    pub fn tau_grid(&self) -> Vec<f64> {
        linspace(0.0, self.tau_max, self.tau_steps)
    }
}

fn linspace(start: f64, end: f64, steps: u32) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        n => {
            let last = (n - 1) as f64;
            (0..n)
                .map(|i| start + (end - start) * (i as f64 / last))
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub source: PhaseNoiseConfig,
    pub bench: BenchConfig,
    pub sim: SimSettings,
    pub sweep: SweepSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::from_partial(Partial::default()).expect("defaults are consistent")
    }
}

#[derive(Debug, Default)]
struct Partial {
    t_c: Option<f64>,
    t_min: Option<f64>,
    t_max: Option<f64>,
    amplitude: Option<f64>,
    phi3: Option<f64>,
    phi4: Option<f64>,
    phi_d: Option<f64>,
    balance: Option<f64>,
    dt: Option<f64>,
    duration: Option<f64>,
    seed: Option<u64>,
    repeats: Option<u32>,
    phi34_start: Option<f64>,
    phi34_end: Option<f64>,
    phi34_steps: Option<u32>,
    tau_max: Option<f64>,
    tau_steps: Option<u32>,
}

/// Parses a real number, or an angle when `angle` is set (`deg` suffix allowed).
pub fn parse_real(field: &str, text: &str, angle: bool) -> Result<f64, ConfigError> {
    let text = text.trim();
    let (number, scale) = match text.strip_suffix("deg") {
        Some(rest) if angle => (rest.trim_end(), TAU / 360.0),
        _ => (text, 1.0),
    };
    let v: f64 = number
        .parse()
        .map_err(|_| config_error(field, format!("'{text}' is not a number")))?;
    if !v.is_finite() {
        return Err(config_error(field, format!("'{text}' is not finite")));
    }
    Ok(v * scale)
}

fn parse_int<T: std::str::FromStr>(field: &str, text: &str) -> Result<T, ConfigError> {
    text.trim().parse().map_err(|_| {
        config_error(
            field,
            format!("'{}' is not a non-negative integer", text.trim()),
        )
    })
}

fn set<T>(slot: &mut Option<T>, field: &str, value: T) -> Result<(), ConfigError> {
    if slot.is_some() {
        return Err(config_error(field, "set more than once"));
    }
    *slot = Some(value);
    Ok(())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut p = Partial::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(config_error(
                    format!("line {}", idx + 1),
                    "expected 'section.key = value'",
                ));
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "source.t_c" => set(&mut p.t_c, key, parse_real(key, value, false)?)?,
                "source.t_min" => set(&mut p.t_min, key, parse_real(key, value, false)?)?,
                "source.t_max" => set(&mut p.t_max, key, parse_real(key, value, false)?)?,
                "source.amplitude" => set(&mut p.amplitude, key, parse_real(key, value, false)?)?,
                "bench.phi3" => set(&mut p.phi3, key, parse_real(key, value, true)?)?,
                "bench.phi4" => set(&mut p.phi4, key, parse_real(key, value, true)?)?,
                "bench.phi_d" => set(&mut p.phi_d, key, parse_real(key, value, true)?)?,
                "bench.balance" => set(&mut p.balance, key, parse_real(key, value, false)?)?,
                "sim.dt" => set(&mut p.dt, key, parse_real(key, value, false)?)?,
                "sim.duration" => set(&mut p.duration, key, parse_real(key, value, false)?)?,
                "sim.seed" => set(&mut p.seed, key, parse_int(key, value)?)?,
                "sim.repeats" => set(&mut p.repeats, key, parse_int(key, value)?)?,
                "sweep.phi34_start" => set(&mut p.phi34_start, key, parse_real(key, value, true)?)?,
                "sweep.phi34_end" => set(&mut p.phi34_end, key, parse_real(key, value, true)?)?,
                "sweep.phi34_steps" => set(&mut p.phi34_steps, key, parse_int(key, value)?)?,
                "sweep.tau_max" => set(&mut p.tau_max, key, parse_real(key, value, false)?)?,
                "sweep.tau_steps" => set(&mut p.tau_steps, key, parse_int(key, value)?)?,
                other => return Err(config_error(other, "unknown key")),
            }
        }
        RunConfig::from_partial(p)
    }

    fn from_partial(p: Partial) -> Result<RunConfig, ConfigError> {
        let defaults = PhaseNoiseConfig::default();
        let t_c = p.t_c.unwrap_or(defaults.t_c);
        let cfg = RunConfig {
            source: PhaseNoiseConfig {
                t_c,
                t_min: p.t_min.unwrap_or(defaults.t_min),
                t_max: p.t_max.unwrap_or(defaults.t_max),
                amplitude: p.amplitude.unwrap_or(defaults.amplitude),
                seed: 0,
            },
            bench: BenchConfig {
                phi3: p.phi3.unwrap_or(0.0),
                phi4: p.phi4.unwrap_or(0.0),
                phi_d: p.phi_d.unwrap_or(0.0),
                balance: p.balance.unwrap_or(1.0),
            },
            sim: SimSettings {
                dt: p.dt.unwrap_or(t_c / 100.0),
                duration: p.duration.unwrap_or(2000.0 * t_c),
                seed: p.seed.unwrap_or(0),
                repeats: p.repeats.unwrap_or(1),
            },
            sweep: SweepSettings {
                phi34_start: p.phi34_start.unwrap_or(0.0),
                phi34_end: p.phi34_end.unwrap_or(TAU),
                phi34_steps: p.phi34_steps.unwrap_or(13),
                tau_max: p.tau_max.unwrap_or(5.0 * t_c),
                tau_steps: p.tau_steps.unwrap_or(11),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every field; the error names the first offending key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.source;
        for (field, v) in [
            ("source.t_c", s.t_c),
            ("source.t_min", s.t_min),
            ("source.t_max", s.t_max),
        ] {
            if v <= 0.0 {
                return Err(config_error(field, "must be positive"));
            }
        }
        if s.t_min >= s.t_c {
            return Err(config_error("source.t_min", "must be below source.t_c"));
        }
        if s.t_max <= s.t_c {
            return Err(config_error("source.t_max", "must exceed source.t_c"));
        }
        if s.amplitude <= 0.0 {
            return Err(config_error("source.amplitude", "must be positive"));
        }
        if self.bench.balance <= 0.0 {
            return Err(config_error("bench.balance", "must be positive"));
        }
        if self.sim.dt <= 0.0 {
            return Err(config_error("sim.dt", "must be positive"));
        }
        if self.sim.dt > s.t_min {
            return Err(config_error("sim.dt", "must not exceed source.t_min"));
        }
        if self.sim.duration < self.sim.dt {
            return Err(config_error(
                "sim.duration",
                "must cover at least one sample",
            ));
        }
        if self.sim.repeats < 1 {
            return Err(config_error("sim.repeats", "must be at least 1"));
        }
        if self.sweep.phi34_steps < 2 {
            return Err(config_error("sweep.phi34_steps", "must be at least 2"));
        }
        if self.sweep.tau_steps < 1 {
            return Err(config_error("sweep.tau_steps", "must be at least 1"));
        }
        if self.sweep.tau_max < 0.0 {
            return Err(config_error("sweep.tau_max", "must be non-negative"));
        }
        if self.sweep.tau_max > self.sim.duration / 2.0 {
            return Err(config_error(
                "sweep.tau_max",
                "must not exceed half of sim.duration",
            ));
        }
        Ok(())
    }
}
