//! The polarised Mach-Zehnder bench.
//!
//! Source 1 arrives right-circular and source 2 left-circular (the quarter-wave
//! plates are folded into that assignment). The second beam splitter sends
//! both onto detectors 3 and 4, each behind a linear polariser, with
//!
//! ```text
//! Eᵢ = (1/√2) · Pᵢ · (εᵢ · P_L · E₂ · uᵢ₂ + P_R · E₁ · uᵢ₁),   ε₃ = +1, ε₄ = −1
//! ```
//!
//! and `Iᵢ` the squared norm of the two-component field `Eᵢ`.
//!
//! The dynamical phase φ_D is carried by the single factor `u₄₂ = e^{−iφ_D}`
//! (all other `uᵢⱼ = 1`), so that it enters the combination
//! `ū₃₁ u₃₂ ū₄₂ u₄₁ = e^{iφ_D}` probed by the cross correlation.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::linalg::{Mat2, Vec2, C64};
use crate::poincare::{PolarizationState, Projector};
use crate::source::FieldTrace;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    /// Polariser 3 angle, radians.
    pub phi3: f64,
    /// Polariser 4 angle, radians.
    pub phi4: f64,
    /// Dynamical phase, radians.
    pub phi_d: f64,
    /// Mean intensity ratio ⟨I₂⟩/⟨I₁⟩ of the two sources.
    pub balance: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            phi3: 0.0,
            phi4: 0.0,
            phi_d: 0.0,
            balance: 1.0,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if ![self.phi3, self.phi4, self.phi_d]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::InvalidArgument("bench angles must be finite".into()));
        }
        if !(self.balance.is_finite() && self.balance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "balance must be positive, got {}",
                self.balance
            )));
        }
        Ok(())
    }

    pub fn polariser_angle(&self, detector: Detector) -> f64 {
        match detector {
            Detector::D3 => self.phi3,
            Detector::D4 => self.phi4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    D3,
    D4,
}

impl Detector {
    pub fn from_id(id: u32) -> Result<Self> {
        match id {
            3 => Ok(Detector::D3),
            4 => Ok(Detector::D4),
            _ => Err(Error::InvalidArgument(format!("unknown detector id {id}"))),
        }
    }

    pub fn id(self) -> u32 {
        match self {
            Detector::D3 => 3,
            Detector::D4 => 4,
        }
    }

    /// Beam-splitter sign εᵢ on the source-2 path.
    pub fn epsilon(self) -> f64 {
        match self {
            Detector::D3 => 1.0,
            Detector::D4 => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    S1,
    S2,
}

/// Propagation factor `uᵢⱼ` from source `j` to detector `i`.
pub fn propagation_factor(detector: Detector, source: Source, phi_d: f64) -> C64 {
    match (detector, source) {
        (Detector::D4, Source::S2) => C64::from_polar(1.0, -phi_d),
        _ => C64::new(1.0, 0.0),
    }
}

/// Linear map from the scalar source amplitudes (E₁, E₂) to the polarised field
/// at one detector: `Eᵢ = E₁·c₁ + E₂·c₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorArm {
    pub c1: Vec2,
    pub c2: Vec2,
}

impl DetectorArm {
    pub fn new(detector: Detector, config: &BenchConfig) -> Result<Self> {
        let analyser = Projector::linear(config.polariser_angle(detector))?.m;
        Ok(Self::with_analyser(detector, config, analyser))
    }

    /// The same arm with the analysing polariser replaced by `analyser`.
    pub fn with_analyser(detector: Detector, config: &BenchConfig, analyser: Mat2) -> Self {
        let r = PolarizationState::right().as_vec();
        let l = PolarizationState::left().as_vec();
        let bs = C64::new(FRAC_1_SQRT_2, 0.0);
        let eps = C64::new(detector.epsilon(), 0.0);
        let path1 = analyser.apply(&Projector::right().apply(&r));
        let path2 = analyser.apply(&Projector::left().apply(&l));
        DetectorArm {
            c1: path1.scale(bs * propagation_factor(detector, Source::S1, config.phi_d)),
            c2: path2.scale(bs * eps * propagation_factor(detector, Source::S2, config.phi_d)),
        }
    }

    pub fn field(&self, e1: C64, e2: C64) -> Vec2 {
        self.c1.scale(e1) + self.c2.scale(e2)
    }

    pub fn intensity(&self, e1: C64, e2: C64) -> f64 {
        self.field(e1, e2).norm_sqr()
    }
}

/// Intensity time series at the two detectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorTraces {
    pub dt: f64,
    pub i3: Vec<f64>,
    pub i4: Vec<f64>,
}

impl DetectorTraces {
    pub fn new(dt: f64, i3: Vec<f64>, i4: Vec<f64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sample period {dt} must be positive"
            )));
        }
        if i3.len() != i4.len() {
            return Err(Error::IncompatibleTraces(format!(
                "detector series differ in length ({} vs {})",
                i3.len(),
                i4.len()
            )));
        }
        if let Some(bad) = i3
            .iter()
            .chain(&i4)
            .find(|v| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidArgument(format!(
                "intensity {bad} is not a finite non-negative number"
            )));
        }
        Ok(DetectorTraces { dt, i3, i4 })
    }

    pub fn len(&self) -> usize {
        self.i3.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i3.is_empty()
    }

    pub fn series(&self, detector: Detector) -> &[f64] {
        match detector {
            Detector::D3 => &self.i3,
            Detector::D4 => &self.i4,
        }
    }
}

pub fn propagate(e1: &FieldTrace, e2: &FieldTrace, config: &BenchConfig) -> Result<DetectorTraces> {
    config.validate()?;
    let arm3 = DetectorArm::new(Detector::D3, config)?;
    let arm4 = DetectorArm::new(Detector::D4, config)?;
    propagate_arms(e1, e2, &arm3, &arm4)
}

/// [`propagate`] with both analysing polarisers taken out of the beams.
pub fn propagate_without_polarisers(
    e1: &FieldTrace,
    e2: &FieldTrace,
    config: &BenchConfig,
) -> Result<DetectorTraces> {
    config.validate()?;
    let arm3 = DetectorArm::with_analyser(Detector::D3, config, Mat2::IDENTITY);
    let arm4 = DetectorArm::with_analyser(Detector::D4, config, Mat2::IDENTITY);
    propagate_arms(e1, e2, &arm3, &arm4)
}

fn propagate_arms(
    e1: &FieldTrace,
    e2: &FieldTrace,
    arm3: &DetectorArm,
    arm4: &DetectorArm,
) -> Result<DetectorTraces> {
    if e1.dt != e2.dt {
        return Err(Error::IncompatibleTraces(format!(
            "sample periods differ ({} vs {})",
            e1.dt, e2.dt
        )));
    }
    if e1.len() != e2.len() {
        return Err(Error::IncompatibleTraces(format!(
            "sample counts differ ({} vs {})",
            e1.len(),
            e2.len()
        )));
    }
    let (i3, i4) = e1
        .samples
        .iter()
        .zip(&e2.samples)
        .map(|(&a, &b)| (arm3.intensity(a, b), arm4.intensity(a, b)))
        .unzip();
    DetectorTraces::new(e1.dt, i3, i4)
}

/// Time-averaged intensity at one detector.
pub fn mean_intensity(traces: &DetectorTraces, which: Detector) -> Result<f64> {
    let series = traces.series(which);
    if series.is_empty() {
        return Err(Error::InvalidArgument("empty intensity series".into()));
    }
    Ok(series.iter().sum::<f64>() / series.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn constant_trace(value: C64, n: usize) -> FieldTrace {
        FieldTrace::new(1e-7, vec![value; n]).unwrap()
    }

    #[test]
    fn single_source_gives_quarter_intensity() {
        let a = 1.3;
        let e1 = constant_trace(C64::from_polar(a, 0.4), 8);
        let e2 = constant_trace(C64::new(0.0, 0.0), 8);
        for phi4 in [0.0, 0.7, FRAC_PI_2] {
            let cfg = BenchConfig {
                phi4,
                ..Default::default()
            };
            let out = propagate(&e1, &e2, &cfg).unwrap();
            for (&x, &y) in out.i3.iter().zip(&out.i4) {
                assert!((x - a * a / 4.0).abs() < 1e-14);
                assert!((y - a * a / 4.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn detector_swap_flips_interference_sign() {
        let e1 = constant_trace(C64::from_polar(1.0, 0.3), 1);
        let e2 = constant_trace(C64::from_polar(1.0, -0.9), 1);
        let cfg = BenchConfig {
            phi3: 0.2,
            phi4: 0.2,
            ..Default::default()
        };
        let out = propagate(&e1, &e2, &cfg).unwrap();
        // Same polariser angle on both arms: only ε differs, so the interference
        // terms are opposite and the intensities sum to the incoherent total.
        assert!((out.i3[0] + out.i4[0] - 1.0).abs() < 1e-14);
        assert!((out.i3[0] - out.i4[0]).abs() > 1e-3);
    }

    #[test]
    fn rejects_mismatched_traces() {
        let a = constant_trace(C64::new(1.0, 0.0), 4);
        let b = constant_trace(C64::new(1.0, 0.0), 5);
        let c = FieldTrace::new(2e-7, vec![C64::new(1.0, 0.0); 4]).unwrap();
        let cfg = BenchConfig::default();
        assert!(matches!(
            propagate(&a, &b, &cfg),
            Err(Error::IncompatibleTraces(_))
        ));
        assert!(matches!(
            propagate(&a, &c, &cfg),
            Err(Error::IncompatibleTraces(_))
        ));
    }

    #[test]
    fn rejects_non_positive_balance() {
        let cfg = BenchConfig {
            balance: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn detector_ids() {
        assert_eq!(Detector::from_id(3).unwrap(), Detector::D3);
        assert_eq!(Detector::from_id(4).unwrap(), Detector::D4);
        assert!(matches!(
            Detector::from_id(5),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn mean_of_constant_series() {
        let t = DetectorTraces::new(1e-7, vec![0.25; 10], vec![0.75; 10]).unwrap();
        assert_eq!(mean_intensity(&t, Detector::D3).unwrap(), 0.25);
        assert_eq!(mean_intensity(&t, Detector::D4).unwrap(), 0.75);
        let empty = DetectorTraces::new(1e-7, vec![], vec![]).unwrap();
        assert!(mean_intensity(&empty, Detector::D3).is_err());
    }

    #[test]
    fn detector_traces_validate_contents() {
        assert!(DetectorTraces::new(1e-7, vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(DetectorTraces::new(1e-7, vec![-1.0], vec![1.0]).is_err());
        assert!(DetectorTraces::new(0.0, vec![1.0], vec![1.0]).is_err());
    }

    #[test]
    fn dynamical_phase_only_on_source_two_at_detector_four() {
        assert_eq!(
            propagation_factor(Detector::D3, Source::S1, 1.0),
            C64::new(1.0, 0.0)
        );
        assert_eq!(
            propagation_factor(Detector::D3, Source::S2, 1.0),
            C64::new(1.0, 0.0)
        );
        assert_eq!(
            propagation_factor(Detector::D4, Source::S1, 1.0),
            C64::new(1.0, 0.0)
        );
        let u = propagation_factor(Detector::D4, Source::S2, PI / 3.0);
        assert!((u - C64::from_polar(1.0, -PI / 3.0)).norm() < 1e-15);
    }
}
