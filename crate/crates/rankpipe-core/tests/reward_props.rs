//! Invariance and monotonicity properties of max-min reward normalization.

use proptest::prelude::*;
use rankpipe_core::reward::{filter_by_threshold, normalize_rewards, weight, Normalized};
use rankpipe_core::Normalized::Values;

fn rewards() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 2..16)
}

fn rank(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    order
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn shift_scale_invariant(r in rewards(), a in 0.1f64..10.0, b in -50.0f64..50.0) {
        let transformed: Vec<f64> = r.iter().map(|x| a * x + b).collect();
        match (normalize_rewards(&r).unwrap(), normalize_rewards(&transformed).unwrap()) {
            (Values(x), Values(y)) => {
                for (u, v) in x.iter().zip(&y) {
                    prop_assert!((u - v).abs() < 1e-12);
                }
            }
            (Normalized::Degenerate, Normalized::Degenerate) => {}
            _ => prop_assert!(false, "degeneracy not preserved"),
        }
    }

    #[test]
    fn order_preserved_and_bounds(r in rewards()) {
        if let Values(n) = normalize_rewards(&r).unwrap() {
            prop_assert_eq!(rank(&r), rank(&n));
            let min = n.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = n.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(min, 0.0);
            prop_assert_eq!(max, 1.0);
        }
    }

    #[test]
    fn kept_weights_bounded(r in rewards(), tau in 0.0f64..1.0, m in 1u32..6) {
        if let Values(n) = normalize_rewards(&r).unwrap() {
            let kept = filter_by_threshold(&n, tau);
            // The max sample (normalized 1.0) always survives.
            prop_assert!(!kept.is_empty());
            for &(_, rbar) in &kept {
                let w = weight(rbar, m);
                prop_assert!(w >= tau.powi(m as i32) - 1e-12);
                prop_assert!(w <= 1.0);
            }
        }
    }

    #[test]
    fn weighting_monotone(r1 in 0.0f64..1.0, r2 in 0.0f64..1.0, m in 1u32..6) {
        if r1 < r2 {
            prop_assert!(weight(r1, m) < weight(r2, m));
        }
    }
}
