use std::f64::consts::TAU;

use hbt_core::correlate::g2_between;
use hbt_core::linalg::C64;
use hbt_core::source::{
    first_order_coherence, generate_trace, sample_dwell, PhaseNoiseConfig, PhaseSegments,
    SOURCE_1_STREAM, SOURCE_2_STREAM,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const DRAWS: usize = 1_000_000;

fn config(seed: u64) -> PhaseNoiseConfig {
    PhaseNoiseConfig {
        seed,
        ..Default::default()
    }
}

/// Composite Simpson rule.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Mean of the renormalised truncated exponential by quadrature.
fn truncated_mean_by_quadrature(c: &PhaseNoiseConfig) -> f64 {
    let density = |t: f64| (-t / c.t_c).exp() / c.t_c;
    let z = simpson(density, c.t_min, c.t_max, 20_000);
    simpson(|t| t * density(t), c.t_min, c.t_max, 20_000) / z
}

fn truncated_cdf(c: &PhaseNoiseConfig, t: f64) -> f64 {
    let lo = (-c.t_min / c.t_c).exp();
    let hi = (-c.t_max / c.t_c).exp();
    (lo - (-t / c.t_c).exp()) / (lo - hi)
}

#[test]
fn quadrature_mean_of_default_dwell() {
    // Frozen from the quadrature above: 10 µs scale truncated to [1, 100] µs.
    let c = config(0);
    let m = truncated_mean_by_quadrature(&c);
    assert!((m - 10.995_032_457e-6).abs() < 1e-14, "{m:e}");
    // Closed form of the same mean: t_c + (a e^{-a/t_c} - b e^{-b/t_c}) / (e^{-a/t_c} - e^{-b/t_c}).
    let (ea, eb) = ((-c.t_min / c.t_c).exp(), (-c.t_max / c.t_c).exp());
    let closed = c.t_c + (c.t_min * ea - c.t_max * eb) / (ea - eb);
    assert!((m - closed).abs() < 1e-15);
}

#[test]
fn dwell_sample_mean_matches_analytic_mean() {
    let c = config(101);
    let target = truncated_mean_by_quadrature(&c);
    let mean = PhaseSegments::new(&c, SOURCE_1_STREAM)
        .unwrap()
        .take(DRAWS)
        .map(|s| s.dwell)
        .sum::<f64>()
        / DRAWS as f64;
    assert!(
        ((mean - target) / target).abs() < 0.005,
        "{mean} vs {target}"
    );
}

#[test]
fn inverse_cdf_is_monotone_and_bounded() {
    let c = config(0);
    let mut prev = 0.0;
    for i in 0..1000 {
        let u = i as f64 / 1000.0;
        let t = sample_dwell(&c, u).unwrap();
        assert!(t >= c.t_min && t <= c.t_max);
        assert!(t >= prev);
        assert!((truncated_cdf(&c, t) - u).abs() < 1e-12);
        prev = t;
    }
}

pub fn dwell_chi_square(seed: u64) -> (f64, f64) {
    let c = config(seed);
    let bins = 50;
    let mut counts = vec![0usize; bins];
    for s in PhaseSegments::new(&c, SOURCE_1_STREAM).unwrap().take(DRAWS) {
        let b = ((truncated_cdf(&c, s.dwell) * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let expected = DRAWS as f64 / bins as f64;
    let chi2 = counts
        .iter()
        .map(|&n| (n as f64 - expected).powi(2) / expected)
        .sum();
    let critical = ChiSquared::new((bins - 1) as f64)
        .unwrap()
        .inverse_cdf(0.999);
    (chi2, critical)
}

#[test]
fn dwell_histogram_chi_square() {
    let (chi2, critical) = dwell_chi_square(7);
    assert!(chi2 < critical, "chi2 {chi2} >= {critical}");
}

#[test]
fn jump_phases_are_uniform() {
    let n = 100_000;
    let mut phases: Vec<f64> = PhaseSegments::new(&config(9), SOURCE_2_STREAM)
        .unwrap()
        .take(n)
        .map(|s| s.phase / TAU)
        .collect();
    phases.sort_by(f64::total_cmp);
    let ks = phases
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n as f64 - x).max(x - i as f64 / n as f64))
        .fold(0.0, f64::max);
    assert!(ks < 0.01, "KS statistic {ks}");
}

#[test]
fn intensity_is_constant() {
    let trace = generate_trace(&config(4), 0.02, 1e-7, SOURCE_1_STREAM).unwrap();
    let i = trace.intensities();
    let mean = i.iter().sum::<f64>() / i.len() as f64;
    let sd = (i.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / i.len() as f64).sqrt();
    assert!(sd / mean < 1e-12);
    let g = g2_between(&i, &i, 500, trace.dt).unwrap();
    assert!((g.value - 1.0).abs() < 1e-12);
}

#[test]
fn coherence_is_lost_after_five_coherence_times() {
    let c = config(0);
    let trace = generate_trace(&c, 2000.0 * c.t_c, c.t_c / 100.0, SOURCE_1_STREAM).unwrap();
    let g = first_order_coherence(&trace, 5.0 * c.t_c).unwrap();
    assert!(g.norm() < 0.05, "|g1(5 t_c)| = {}", g.norm());
}

#[test]
fn coherence_decays_monotonically_on_average() {
    let c = config(0);
    let taus: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5 * c.t_c).collect();
    let seeds = 50;
    let mut avg = vec![0.0; taus.len()];
    for seed in 0..seeds {
        let cfg = config(seed);
        let trace = generate_trace(&cfg, 500.0 * c.t_c, c.t_c / 100.0, SOURCE_1_STREAM).unwrap();
        for (a, &tau) in avg.iter_mut().zip(&taus) {
            *a += first_order_coherence(&trace, tau).unwrap().norm() / seeds as f64;
        }
    }
    assert!((avg[0] - 1.0).abs() < 1e-12);
    for w in avg.windows(2) {
        assert!(w[1] <= w[0], "{avg:?}");
    }
}

/// |⟨Ē₁E₂⟩| / A² between two independent sources.
fn mutual_coherence(seed: u64, duration: f64) -> f64 {
    let c = config(seed);
    let e1 = generate_trace(&c, duration, c.t_c / 100.0, SOURCE_1_STREAM).unwrap();
    let e2 = generate_trace(&c, duration, c.t_c / 100.0, SOURCE_2_STREAM).unwrap();
    let sum: C64 = e1
        .samples
        .iter()
        .zip(&e2.samples)
        .map(|(a, b)| a.conj() * b)
        .sum();
    (sum / e1.len() as f64).norm()
}

#[test]
fn independent_sources_become_incoherent() {
    let seeds = 20;
    let t_c = config(0).t_c;
    let short: f64 = (0..seeds)
        .map(|s| mutual_coherence(s, 125.0 * t_c))
        .sum::<f64>()
        / seeds as f64;
    let long: f64 = (0..seeds)
        .map(|s| mutual_coherence(s, 2000.0 * t_c))
        .sum::<f64>()
        / seeds as f64;
    eprintln!("mean |<E1* E2>|: 125 t_c -> {short:.4}, 2000 t_c -> {long:.4}");
    // 16× longer traces: the mean modulus should shrink roughly 4×.
    assert!(long < short / 2.5, "{short} -> {long}");
    assert!(long < 0.02, "mean modulus at 2000 t_c: {long}");
}
