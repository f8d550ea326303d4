//! Hybrid-scoring properties: label dominance under large alpha and strict
//! monotonicity of the combined score.

use proptest::prelude::*;
use rankpipe_core::{combined_score, sort_scored, ScoredDoc};

fn candidates() -> impl Strategy<Value = Vec<(f64, u8)>> {
    prop::collection::vec((0.0f64..50.0, 0u8..=2), 2..30)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn label_dominates_with_alpha_100(cands in candidates()) {
        let alpha = 100.0;
        let mut docs: Vec<ScoredDoc> = cands
            .iter()
            .enumerate()
            .map(|(i, &(score, label))| ScoredDoc {
                doc_id: format!("d{i:03}"),
                retrieval_score: score,
                label,
                combined_score: combined_score(score, label, alpha).unwrap(),
                explanation: String::new(),
                parse_ok: true,
            })
            .collect();
        sort_scored(&mut docs);
        for pair in docs.windows(2) {
            let (hi, lo) = (&pair[0], &pair[1]);
            // Lexicographic by (label desc, retrieval score desc).
            prop_assert!(
                hi.label > lo.label
                    || (hi.label == lo.label && hi.retrieval_score >= lo.retrieval_score),
                "violation: {:?} before {:?}", hi, lo
            );
        }
    }

    #[test]
    fn combined_score_strictly_increasing(score in 0.0f64..50.0, label in 0u8..=1, alpha in 1.0f64..200.0) {
        let base = combined_score(score, label, alpha).unwrap();
        prop_assert!(combined_score(score + 0.5, label, alpha).unwrap() > base);
        prop_assert!(combined_score(score, label + 1, alpha).unwrap() > base);
    }
}
