//! Polarisation states in the helicity basis, their projectors, the map onto the
//! Poincaré sphere, and the two routes to the geometric phase of a closed
//! polarisation cycle: the Bargmann invariant of the states, and the signed area
//! of the geodesic polygon their sphere points trace.
//!
//! Conventions: |R⟩ = (1, 0) sits at the north pole, |L⟩ = (0, 1) at the south
//! pole, and the linear state at polariser angle φ sits on the equator at azimuth
//! 2φ. Solid angles are positive when the enclosed region lies to the right of the
//! direction of travel as seen from outside the sphere; with this orientation the
//! geometric phase −arg Π⟨ψₖ|ψₖ₊₁⟩ is exactly half the signed solid angle, and the
//! cycle R → φ₄ → L → φ₃ encloses Ω = 4(φ₄ − φ₃).

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use crate::linalg::{Mat2, Vec2, C64};
use crate::{Error, Result};

/// Tolerance on the unit norm of a state handed to an operation.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Overlaps (or sphere-point separations) below this are treated as a
/// degenerate geodesic.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

/// A pure polarisation state `a_r |R⟩ + a_l |L⟩`, expected to have unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationState {
    pub a_r: C64,
    pub a_l: C64,
}

impl PolarizationState {
    pub fn new(a_r: C64, a_l: C64) -> Self {
        PolarizationState { a_r, a_l }
    }

    /// Scales the amplitudes to unit norm.
    pub fn normalized(a_r: C64, a_l: C64) -> Result<Self> {
        let n = (a_r.norm_sqr() + a_l.norm_sqr()).sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidArgument(
                "cannot normalise a zero or non-finite state".into(),
            ));
        }
        Ok(PolarizationState {
            a_r: a_r / n,
            a_l: a_l / n,
        })
    }

    pub fn right() -> Self {
        PolarizationState::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    pub fn left() -> Self {
        PolarizationState::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a_r.norm_sqr() + self.a_l.norm_sqr()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &PolarizationState) -> C64 {
        self.as_vec().inner(&other.as_vec())
    }

    /// The same ray with an extra global phase e^{iα}.
    pub fn with_global_phase(&self, alpha: f64) -> Self {
        let g = C64::from_polar(1.0, alpha);
        PolarizationState::new(self.a_r * g, self.a_l * g)
    }

    pub fn as_vec(&self) -> Vec2 {
        Vec2::new(self.a_r, self.a_l)
    }

    fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if !n.is_finite() || (n.sqrt() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "polarisation state is not normalised (|ψ|² = {n})"
            )));
        }
        Ok(())
    }
}

/// The linear polarisation state transmitted by a polariser at angle `phi`:
/// (e^{−iφ}|R⟩ + e^{iφ}|L⟩)/√2.
pub fn linear_state(phi: f64) -> Result<PolarizationState> {
    if !phi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "polariser angle {phi} is not finite"
        )));
    }
    Ok(PolarizationState::new(
        C64::from_polar(FRAC_1_SQRT_2, -phi),
        C64::from_polar(FRAC_1_SQRT_2, phi),
    ))
}

/// A rank-one orthogonal projector |K⟩⟨K|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projector {
    pub m: Mat2,
}

impl Projector {
    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn right() -> Self {
        Projector {
            m: PolarizationState::right()
                .as_vec()
                .outer(&PolarizationState::right().as_vec()),
        }
    }

    pub fn left() -> Self {
        Projector {
            m: PolarizationState::left()
                .as_vec()
                .outer(&PolarizationState::left().as_vec()),
        }
    }

    pub fn linear(phi: f64) -> Result<Self> {
        projector_of(&linear_state(phi)?)
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        self.m.apply(v)
    }
}

pub fn projector_of(state: &PolarizationState) -> Result<Projector> {
    state.check_normalized()?;
    let v = state.as_vec();
    Ok(Projector { m: v.outer(&v) })
}

/// A point on the unit Poincaré sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl SpherePoint {
    /// Builds a point from components that must already lie on the unit sphere.
    pub fn new(s1: f64, s2: f64, s3: f64) -> Result<Self> {
        let n = (s1 * s1 + s2 * s2 + s3 * s3).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "({s1}, {s2}, {s3}) is not on the unit sphere"
            )));
        }
        Ok(SpherePoint { s1, s2, s3 })
    }

    /// Projects an arbitrary nonzero direction onto the sphere.
    pub fn from_direction(x: [f64; 3]) -> Result<Self> {
        let n = dot(x, x).sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidArgument(
                "zero or non-finite direction".into(),
            ));
        }
        Ok(SpherePoint {
            s1: x[0] / n,
            s2: x[1] / n,
            s3: x[2] / n,
        })
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.s1, self.s2, self.s3]
    }
}

/// Stokes direction of a state: s3 = |a_R|² − |a_L|², s1 + i·s2 = 2·ā_R·a_L.
pub fn to_sphere(state: &PolarizationState) -> Result<SpherePoint> {
    state.check_normalized()?;
    let c = state.a_r.conj() * state.a_l;
    Ok(SpherePoint {
        s1: 2.0 * c.re,
        s2: 2.0 * c.im,
        s3: state.a_r.norm_sqr() - state.a_l.norm_sqr(),
    })
}

/// Geometric phase of the closed cycle ψ₀ → ψ₁ → … → ψₙ₋₁ → ψ₀, computed as
/// −arg of the Bargmann invariant and reduced to (−π, π].
pub fn pancharatnam_phase(states: &[PolarizationState]) -> Result<f64> {
    let n = states.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "a closed cycle needs at least 3 states, got {n}"
        )));
    }
    for s in states {
        s.check_normalized()?;
    }
    let mut product = C64::new(1.0, 0.0);
    for k in 0..n {
        let next = (k + 1) % n;
        let overlap = states[k].inner(&states[next]);
        let modulus = overlap.norm();
        if modulus <= DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateGeodesic(k, next));
        }
        // Only the phase matters; renormalising keeps long cycles away from underflow.
        product *= overlap / modulus;
    }
    Ok(wrap(-product.arg(), TAU))
}

/// Signed solid angle of the closed geodesic polygon through `vertices`,
/// from the turning-angle form of the angle excess. Reduced to (−2π, 2π].
pub fn polygon_solid_angle(vertices: &[SpherePoint]) -> Result<f64> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "a polygon needs at least 3 vertices, got {n}"
        )));
    }
    let pts: Vec<[f64; 3]> = vertices.iter().map(|p| p.to_array()).collect();
    for k in 0..n {
        let next = (k + 1) % n;
        // |a − b| and |a + b| vanish for coincident and antipodal points respectively.
        let d = sub(pts[k], pts[next]);
        let s = add(pts[k], pts[next]);
        if dot(d, d).sqrt() <= DEGENERACY_THRESHOLD || dot(s, s).sqrt() <= DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateGeodesic(k, next));
        }
    }

    let mut turning = 0.0;
    for k in 0..n {
        let prev = pts[(k + n - 1) % n];
        let here = pts[k];
        let next = pts[(k + 1) % n];
        // Tangent continuing the incoming arc, and tangent of the outgoing arc.
        let incoming = neg(tangent_towards(here, prev));
        let outgoing = tangent_towards(here, next);
        turning += dot(here, cross(incoming, outgoing)).atan2(dot(incoming, outgoing));
    }
    // 2π − Σκ is the area on the left of the path; this module counts the right.
    Ok(wrap(turning - TAU, 2.0 * TAU))
}

fn tangent_towards(at: [f64; 3], to: [f64; 3]) -> [f64; 3] {
    let t = sub(to, scale(at, dot(at, to)));
    let n = dot(t, t).sqrt();
    scale(t, 1.0 / n)
}

/// Reduces `x` into (−period/2, period/2].
pub(crate) fn wrap(x: f64, period: f64) -> f64 {
    let half = period / 2.0;
    let r = (x + half).rem_euclid(period) - half;
    if r <= -half {
        r + period
    } else {
        r
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn neg(a: [f64; 3]) -> [f64; 3] {
    [-a[0], -a[1], -a[2]]
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// The R → φ₄ → L → φ₃ cycle traced by the cross-correlation projector chain.
pub fn setup_cycle(phi3: f64, phi4: f64) -> Result<[PolarizationState; 4]> {
    Ok([
        PolarizationState::right(),
        linear_state(phi4)?,
        PolarizationState::left(),
        linear_state(phi3)?,
    ])
}
