//! Source → bench composition used by the sweep driver and the acceptance suite.

use crate::bench::{propagate, BenchConfig, DetectorTraces};
use crate::source::{generate_trace, PhaseNoiseConfig, SOURCE_1_STREAM, SOURCE_2_STREAM};
use crate::Result;

/// Generates both sources from `seed` and propagates them through the bench.
///
/// Source 1 uses `source.amplitude`; source 2 is scaled by `√balance` so that
/// ⟨I₂⟩/⟨I₁⟩ equals the bench balance. `source.seed` is ignored in favour of
/// `seed`.
pub fn simulate(
    source: &PhaseNoiseConfig,
    bench: &BenchConfig,
    duration: f64,
    dt: f64,
    seed: u64,
) -> Result<DetectorTraces> {
    bench.validate()?;
    let s1 = PhaseNoiseConfig { seed, ..*source };
    let s2 = PhaseNoiseConfig {
        seed,
        amplitude: source.amplitude * bench.balance.sqrt(),
        ..*source
    };
    let e1 = generate_trace(&s1, duration, dt, SOURCE_1_STREAM)?;
    let e2 = generate_trace(&s2, duration, dt, SOURCE_2_STREAM)?;
    propagate(&e1, &e2, bench)
}
