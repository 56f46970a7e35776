//! Closed-form zero-delay predictions for two balanced, mutually incoherent
//! phase-noise sources, and the bookkeeping linking polariser angles to the
//! solid angle enclosed on the Poincaré sphere.

use std::f64::consts::TAU;

use crate::bench::{propagation_factor, Detector, Source};
use crate::linalg::{Mat2, C64};
use crate::poincare::{wrap, PolarizationState, Projector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub g2_cross_zero_tau: f64,
    pub g2_self_zero_tau: f64,
    /// Mean intensity at either detector, in the units of the source means.
    pub intensity_i: f64,
    /// Solid angle, steradians.
    pub omega: f64,
    /// Geometric phase, radians.
    pub phi_g: f64,
}

/// Ω = 4(φ₄ − φ₃), reduced to (−4π, 4π].
pub fn solid_angle_of_setup(phi3: f64, phi4: f64) -> Result<f64> {
    if !(phi3.is_finite() && phi4.is_finite()) {
        return Err(Error::InvalidArgument(
            "polariser angles must be finite".into(),
        ));
    }
    Ok(wrap(4.0 * (phi4 - phi3), 4.0 * TAU))
}

/// 𝒢²₃₄(0) = 1 − ½cos(φ_D + Ω/2).
pub fn predict_g2_cross(phi_d: f64, omega: f64) -> f64 {
    1.0 - 0.5 * (phi_d + omega / 2.0).cos()
}

/// 𝒢²ᵢᵢ(0) = 1 + ½cos(φ_D).
pub fn predict_g2_self(phi_d: f64) -> f64 {
    1.0 + 0.5 * phi_d.cos()
}

/// ℐ¹ᵢ = (⟨I₁⟩ + ⟨I₂⟩)/4.
pub fn predict_intensity(i1_mean: f64, i2_mean: f64) -> Result<f64> {
    if !(i1_mean >= 0.0 && i2_mean >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mean intensities must be non-negative, got {i1_mean} and {i2_mean}"
        )));
    }
    Ok((i1_mean + i2_mean) / 4.0)
}

pub fn predict(phi3: f64, phi4: f64, phi_d: f64, i1_mean: f64, i2_mean: f64) -> Result<Prediction> {
    if !phi_d.is_finite() {
        return Err(Error::InvalidArgument(
            "dynamical phase must be finite".into(),
        ));
    }
    let omega = solid_angle_of_setup(phi3, phi4)?;
    Ok(Prediction {
        g2_cross_zero_tau: predict_g2_cross(phi_d, omega),
        g2_self_zero_tau: predict_g2_self(phi_d),
        intensity_i: predict_intensity(i1_mean, i2_mean)?,
        omega,
        phi_g: omega / 2.0,
    })
}

/// One of the sixteen terms of ⟨I₃I₄⟩ = ⟨Ē₃E₃·Ē₄E₄⟩ after substituting the
/// bench fields, normalised by ⟨I₃⟩⟨I₄⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditTerm {
    /// Source indices (j, k, l, m) of Ē_j E_k Ē_l E_m.
    pub sources: [u8; 4],
    /// Projector sequence, e.g. `P_R P_3 P_L P_4 P_R`.
    pub chain: String,
    pub coefficient: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermLedger {
    pub terms: Vec<AuditTerm>,
}

impl TermLedger {
    pub fn zero_count(&self) -> usize {
        self.terms
            .iter()
            .filter(|t| t.coefficient == C64::new(0.0, 0.0))
            .count()
    }

    pub fn survivors(&self) -> impl Iterator<Item = &AuditTerm> {
        self.terms
            .iter()
            .filter(|t| t.coefficient != C64::new(0.0, 0.0))
    }

    pub fn sum(&self) -> C64 {
        self.terms.iter().map(|t| t.coefficient).sum()
    }
}

fn source_of(idx: u8) -> Source {
    if idx == 1 {
        Source::S1
    } else {
        Source::S2
    }
}

fn source_state(source: Source) -> (PolarizationState, Projector, &'static str) {
    match source {
        Source::S1 => (PolarizationState::right(), Projector::right(), "P_R"),
        Source::S2 => (PolarizationState::left(), Projector::left(), "P_L"),
    }
}

/// Scalar prefactor (1/√2)·uᵢⱼ·εᵢ^{[j = 2]} of source `j` at detector `i`.
fn prefactor(detector: Detector, source: Source, phi_d: f64) -> C64 {
    let eps = match source {
        Source::S1 => 1.0,
        Source::S2 => detector.epsilon(),
    };
    propagation_factor(detector, source, phi_d) * (eps / 2f64.sqrt())
}

/// ⟨J| P_J · Pᵢ · P_K |K⟩ with the propagation prefactors of both paths.
fn pair_amplitude(detector: Detector, analyser: &Mat2, j: Source, k: Source, phi_d: f64) -> C64 {
    let (sj, pj, _) = source_state(j);
    let (sk, pk, _) = source_state(k);
    let chain = pj.m * *analyser * pk.m;
    let element = sj.as_vec().inner(&chain.apply(&sk.as_vec()));
    prefactor(detector, j, phi_d).conj() * prefactor(detector, k, phi_d) * element
}

/// Time average of Ē_j E_k Ē_l E_m for independent unit-modulus phase-noise
/// sources: 1 when the conjugated and plain indices pair up, 0 otherwise.
fn source_moment(j: u8, k: u8, l: u8, m: u8) -> f64 {
    let mut conj = [j, l];
    let mut plain = [k, m];
    conj.sort_unstable();
    plain.sort_unstable();
    if conj == plain {
        1.0
    } else {
        0.0
    }
}

/// Expands the cross correlation into its sixteen source-index terms.
///
/// Each term's coefficient is the product of projector-chain matrix elements,
/// times the fourth moment of the sources, divided by ⟨I₃⟩⟨I₄⟩. Terms whose
/// source phases do not cancel average to exactly zero.
pub fn term_audit(phi3: f64, phi4: f64, phi_d: f64) -> Result<TermLedger> {
    if !phi_d.is_finite() {
        return Err(Error::InvalidArgument(
            "dynamical phase must be finite".into(),
        ));
    }
    let p3 = Projector::linear(phi3)?.m;
    let p4 = Projector::linear(phi4)?.m;

    let mean_intensity = |detector: Detector, analyser: &Mat2| -> f64 {
        [Source::S1, Source::S2]
            .iter()
            .map(|&s| pair_amplitude(detector, analyser, s, s, phi_d).re)
            .sum()
    };
    let norm = mean_intensity(Detector::D3, &p3) * mean_intensity(Detector::D4, &p4);

    let mut terms = Vec::with_capacity(16);
    for j in 1..=2u8 {
        for k in 1..=2u8 {
            for l in 1..=2u8 {
                for m in 1..=2u8 {
                    let moment = source_moment(j, k, l, m);
                    let coefficient = if moment == 0.0 {
                        C64::new(0.0, 0.0)
                    } else {
                        let a3 =
                            pair_amplitude(Detector::D3, &p3, source_of(j), source_of(k), phi_d);
                        let a4 =
                            pair_amplitude(Detector::D4, &p4, source_of(l), source_of(m), phi_d);
                        a3 * a4 * (moment / norm)
                    };
                    terms.push(AuditTerm {
                        sources: [j, k, l, m],
                        chain: chain_label(j, k, l, m),
                        coefficient,
                    });
                }
            }
        }
    }
    Ok(TermLedger { terms })
}

fn chain_label(j: u8, k: u8, l: u8, m: u8) -> String {
    let name = |i: u8| source_state(source_of(i)).2;
    if k == l {
        // Adjacent P_K P_K collapse, leaving one continuous chain.
        format!("{} P_3 {} P_4 {}", name(j), name(k), name(m))
    } else {
        format!("{} P_3 {} · {} P_4 {}", name(j), name(k), name(l), name(m))
    }
}
