//! nDCG@k with linear gains.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

fn dcg<'a, I>(gains: I) -> f64
where
    I: IntoIterator<Item = u32>,
{
    gains
        .into_iter()
        .enumerate()
        .map(|(i, g)| g as f64 / libm::log2((i + 2) as f64))
        .sum()
}

/// DCG = sum gain(doc_i) / log2(i + 1) over the first min(k, n) positions,
/// normalized by the ideal DCG from gains sorted descending. Returns 0 when
/// every gain is 0.
pub fn ndcg_at_k(ranking: &[String], gains: &BTreeMap<String, u32>, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let actual = dcg(
        ranking
            .iter()
            .take(k)
            .map(|d| gains.get(d).copied().unwrap_or(0)),
    );
    let mut sorted: Vec<u32> = gains.values().copied().collect();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let ideal = dcg(sorted.into_iter().take(k));
    if ideal == 0.0 {
        0.0
    } else {
        actual / ideal
    }
}
