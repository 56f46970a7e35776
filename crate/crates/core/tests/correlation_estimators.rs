use std::f64::consts::FRAC_PI_2;

use hbt_core::bench::{BenchConfig, Detector, DetectorTraces};
use hbt_core::correlate::{
    g2, g2_between, g2_cross, g2_delay_scan, g2_self, CorrelationKind, BATCHES,
};
use hbt_core::pipeline::simulate;
use hbt_core::source::PhaseNoiseConfig;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn default_run(phi34: f64, seed: u64) -> (PhaseNoiseConfig, DetectorTraces) {
    let src = PhaseNoiseConfig::default();
    let bench = BenchConfig {
        phi3: 0.0,
        phi4: phi34,
        ..Default::default()
    };
    let traces = simulate(&src, &bench, 2000.0 * src.t_c, src.t_c / 100.0, seed).unwrap();
    (src, traces)
}

fn white(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| 1.0 + rng.random::<f64>()).collect()
}

#[test]
fn swapped_roles_at_negative_delay_are_the_same_estimate() {
    let (_, t) = default_run(0.4, 3);
    for k in [0isize, 10, 100, 500] {
        let a = g2_between(&t.i3, &t.i4, k, t.dt).unwrap();
        let b = g2_between(&t.i4, &t.i3, -k, t.dt).unwrap();
        assert!((a.value - b.value).abs() <= 2.0 * a.std_error.max(b.std_error) + 1e-15);
        assert!((a.value - b.value).abs() < 1e-12);
    }
}

#[test]
fn cross_correlation_is_symmetric_in_delay_for_stationary_input() {
    let (src, t) = default_run(0.4, 4);
    for m in [1.0, 2.0, 5.0] {
        let k = (m * src.t_c / t.dt).round() as isize;
        let forward = g2_between(&t.i3, &t.i4, k, t.dt).unwrap();
        let backward = g2_between(&t.i3, &t.i4, -k, t.dt).unwrap();
        let tol = 2.0 * forward.std_error.max(backward.std_error);
        assert!(
            (forward.value - backward.value).abs() <= tol,
            "τ = {m} t_c: {} vs {} (tol {tol})",
            forward.value,
            backward.value
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn positive_rescaling_leaves_estimates_unchanged(
        seed in 0u64..1000, c3 in 1e-3f64..1e3, c4 in 1e-3f64..1e3, lag in 0usize..50,
    ) {
        let i3 = white(2000, seed);
        let i4 = white(2000, seed + 7919);
        let base = DetectorTraces::new(1.0, i3.clone(), i4.clone()).unwrap();
        let scaled = DetectorTraces::new(
            1.0,
            i3.iter().map(|v| v * c3).collect(),
            i4.iter().map(|v| v * c4).collect(),
        ).unwrap();
        let tau = lag as f64;
        for kind in CorrelationKind::ALL {
            let a = g2(&base, kind, tau).unwrap();
            let b = g2(&scaled, kind, tau).unwrap();
            prop_assert!((a.value - b.value).abs() < 1e-12);
        }
    }
}

#[test]
fn pure_phase_estimates_stay_in_half_to_three_halves() {
    for (k, phi34) in [0.0, 0.5, FRAC_PI_2, 2.0].into_iter().enumerate() {
        let (src, t) = default_run(phi34, 20 + k as u64);
        let taus: Vec<f64> = (0..=5).map(|m| m as f64 * src.t_c).collect();
        for kind in CorrelationKind::ALL {
            for r in g2_delay_scan(&t, kind, &taus).unwrap() {
                let (lo, hi) = (0.5 - 5.0 * r.std_error, 1.5 + 5.0 * r.std_error);
                assert!(
                    r.value >= lo && r.value <= hi,
                    "{kind} φ34={phi34} τ={}: {}",
                    r.tau,
                    r.value
                );
            }
        }
    }
}

/// Mean std_error over `seeds` white-noise series of length `n`.
fn mean_white_error(n: usize, seeds: u64) -> f64 {
    (0..seeds)
        .map(|s| {
            let x = white(n, 2 * s);
            let y = white(n, 2 * s + 1);
            g2_between(&x, &y, 0, 1.0).unwrap().std_error
        })
        .sum::<f64>()
        / seeds as f64
}

#[test]
fn white_noise_error_falls_as_inverse_root_length() {
    // Fixed batch count: quadrupling the samples per batch halves the error,
    // as does quadrupling the number of equal-size batches.
    let per_batch = 500;
    let e1 = mean_white_error(BATCHES * per_batch, 200);
    let e4 = mean_white_error(4 * BATCHES * per_batch, 200);
    let ratio = e1 / e4;
    assert!((ratio / 2.0 - 1.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn white_noise_error_matches_analytic_standard_error() {
    // x, y iid U(1,2). To first order the ratio ⟨xy⟩/(⟨x⟩⟨y⟩) fluctuates as
    // the mean of (x−μ)(y−μ)/μ², whose variance is σ⁴/μ⁴ per sample.
    let n = 40_000;
    let var: f64 = 1.0 / 12.0;
    let mu: f64 = 1.5;
    let expected = (var * var / mu.powi(4) / n as f64).sqrt();
    let e = mean_white_error(n, 100);
    assert!((e / expected - 1.0).abs() < 0.2, "{e} vs {expected}");
}

#[test]
fn pipeline_cross_correlation_at_quarter_turn() {
    let (src, t) = default_run(FRAC_PI_2, 0);
    let zero = g2_cross(&t, 0.0).unwrap();
    assert!((zero.value - 1.5).abs() <= 3.0 * zero.std_error, "{zero:?}");
    let far = g2_cross(&t, 5.0 * src.t_c).unwrap();
    assert!((far.value - 1.0).abs() <= 3.0 * far.std_error, "{far:?}");
}

#[test]
fn pipeline_self_correlation_is_three_halves() {
    for (k, phi34) in [0.0, 0.7, FRAC_PI_2].into_iter().enumerate() {
        let (_, t) = default_run(phi34, 40 + k as u64);
        for d in [Detector::D3, Detector::D4] {
            let r = g2_self(&t, d, 0.0).unwrap();
            assert!(
                (r.value - 1.5).abs() <= 3.0 * r.std_error,
                "{d:?} φ34={phi34}: {r:?}"
            );
        }
    }
}

#[test]
fn fringe_amplitude_decays_with_delay() {
    let src = PhaseNoiseConfig::default();
    let taus: Vec<f64> = (0..=10).map(|m| m as f64 * 0.5 * src.t_c).collect();
    let mut amp = vec![0.0; taus.len()];
    let seeds = 20;
    for seed in 0..seeds {
        let (_, t) = default_run(FRAC_PI_2, 100 + seed);
        for (a, r) in amp
            .iter_mut()
            .zip(g2_delay_scan(&t, CorrelationKind::Cross, &taus).unwrap())
        {
            *a += (r.value - 1.0).abs() / seeds as f64;
        }
    }
    for w in amp.windows(2) {
        // Noise floor of |mean of 20 estimates − 1| once the fringe is gone.
        assert!(w[1] <= w[0] + 0.01, "{amp:?}");
    }
    assert!(amp[0] > 0.4 && amp[10] < 0.05, "{amp:?}");
}

#[test]
fn constant_traces_scan_to_one() {
    let t = DetectorTraces::new(1e-7, vec![0.3; 1000], vec![2.0; 1000]).unwrap();
    let taus: Vec<f64> = (0..10).map(|k| k as f64 * 1e-7).collect();
    for kind in CorrelationKind::ALL {
        assert!(g2_delay_scan(&t, kind, &taus)
            .unwrap()
            .iter()
            .all(|r| r.value == 1.0));
    }
}
