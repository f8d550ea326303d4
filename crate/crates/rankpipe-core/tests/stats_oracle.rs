//! Paired t-test checked against an independent quadrature of the Student-t
//! density, plus the antisymmetry property.

use proptest::prelude::*;
use rankpipe_core::paired_t_test;

/// Composite-Simpson integral of the unnormalized t density
/// (1 + x^2/df)^(-(df+1)/2); the normalizing constant cancels in the ratio.
fn simpson_integral(df: f64, a: f64, b: f64, steps: usize) -> f64 {
    let g = |x: f64| (1.0 + x * x / df).powf(-(df + 1.0) / 2.0);
    let h = (b - a) / steps as f64;
    let mut sum = g(a) + g(b);
    for i in 1..steps {
        let x = a + i as f64 * h;
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * g(x);
    }
    sum * h / 3.0
}

/// Two-sided p-value via direct quadrature: 2 * tail / whole.
fn quadrature_p(t: f64, df: f64) -> f64 {
    let limit = 2000.0;
    let tail = simpson_integral(df, t.abs(), limit, 400_000);
    let half = simpson_integral(df, 0.0, limit, 400_000);
    tail / half
}

#[test]
fn textbook_five_difference_fixture() {
    // Differences [0.1, -0.05, 0.2, 0.0, 0.15] against zero.
    // Hand computation: mean = 0.08, sample variance = 0.01075,
    // t = 0.08 / sqrt(0.01075 / 5) = 1.725163...
    let a = [0.1, -0.05, 0.2, 0.0, 0.15];
    let b = [0.0; 5];
    let r = paired_t_test(&a, &b).unwrap();

    let mean = 0.08;
    let var = 0.010750000000000001;
    let t_hand = mean / (var / 5.0f64).sqrt();
    assert!((r.t - t_hand).abs() < 1e-6, "{} vs {}", r.t, t_hand);

    let p_oracle = quadrature_p(t_hand, 4.0);
    assert!((r.p - p_oracle).abs() < 1e-6, "{} vs {}", r.p, p_oracle);
}

#[test]
fn identical_runs() {
    let a = [0.3, 0.5, 0.7];
    let r = paired_t_test(&a, &a).unwrap();
    assert_eq!(r.t, 0.0);
    assert_eq!(r.p, 1.0);
}

#[test]
fn constant_difference_p_zero() {
    let a = [2.0, 3.0, 4.0, 5.0];
    let b = [1.0, 2.0, 3.0, 4.0];
    let r = paired_t_test(&a, &b).unwrap();
    assert_eq!(r.p, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn antisymmetry(pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..30)) {
        let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let fwd = paired_t_test(&a, &b).unwrap();
        let rev = paired_t_test(&b, &a).unwrap();
        prop_assert!((fwd.t + rev.t).abs() < 1e-9 || (fwd.t.is_infinite() && rev.t.is_infinite()));
        prop_assert!((fwd.p - rev.p).abs() < 1e-9);
    }
}
