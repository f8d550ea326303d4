//! Dense search against a brute-force dot-product sort, plus insertion-order
//! invariance.

use proptest::prelude::*;
use rankpipe_core::EmbeddingStore;

fn store_case() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    (
        prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 4), 1..6),
        prop::collection::vec(-5.0f64..5.0, 4),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_brute_force((vectors, query) in store_case()) {
        let mut store = EmbeddingStore::new(4);
        for (i, v) in vectors.iter().enumerate() {
            store.insert(format!("d{i}"), v.clone()).unwrap();
        }
        let hits = store.search(&query, vectors.len()).unwrap();

        let mut expected: Vec<(String, f64)> = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| {
                (format!("d{i}"), v.iter().zip(&query).map(|(a, b)| a * b).sum())
            })
            .collect();
        expected.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));

        prop_assert_eq!(hits.len(), expected.len());
        for (h, (id, score)) in hits.iter().zip(&expected) {
            prop_assert_eq!(&h.doc_id, id);
            prop_assert!((h.score - score).abs() < 1e-12);
        }
    }

    #[test]
    fn insertion_order_invariant((vectors, query) in store_case()) {
        let mut fwd = EmbeddingStore::new(4);
        let mut rev = EmbeddingStore::new(4);
        for (i, v) in vectors.iter().enumerate() {
            fwd.insert(format!("d{i}"), v.clone()).unwrap();
        }
        for (i, v) in vectors.iter().enumerate().rev() {
            rev.insert(format!("d{i}"), v.clone()).unwrap();
        }
        prop_assert_eq!(fwd.search(&query, 3).unwrap(), rev.search(&query, 3).unwrap());
    }
}
