//! Context-budget truncation with a word-count token approximation.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

pub const TRUNCATION_MARKER: &str = "…[truncated]";

/// Keeps the head of `text` so that the approximate token count
/// (whitespace-delimited words × 1.3, rounded up) fits `budget_tokens`.
/// Appends the truncation marker to the last kept word when cut, and is
/// idempotent.
pub fn truncate_to_budget(text: &str, budget_tokens: usize) -> String {
    let words: Vec<&str> = text.split_whitespace().collect();
    // ceil(len * 13 / 10) <= budget  <=>  len * 13 <= budget * 10
    if words.len() * 13 <= budget_tokens * 10 {
        return text.to_string();
    }
    let keep = (budget_tokens * 10 / 13).max(1);
    if keep >= words.len() {
        return text.to_string();
    }
    let mut out = words[..keep].join(" ");
    out.push_str(TRUNCATION_MARKER);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn fitting_text_unchanged() {
        let text = vec!["w"; 10].join(" ");
        assert_eq!(truncate_to_budget(&text, 100), text);
    }

    #[test]
    fn long_text_keeps_head() {
        let text = (0..1000).map(|i| alloc::format!("w{i}")).collect::<Vec<_>>().join(" ");
        let out = truncate_to_budget(&text, 130);
        assert!(out.ends_with(TRUNCATION_MARKER));
        // 130 * 10 / 13 = 100 words kept.
        assert_eq!(out.split_whitespace().count(), 100);
        assert!(out.starts_with("w0 w1 "));
    }

    #[test]
    fn budget_one_keeps_first_word() {
        let out = truncate_to_budget("alpha beta gamma", 1);
        assert_eq!(out, alloc::format!("alpha{TRUNCATION_MARKER}"));
    }

    #[test]
    fn idempotent() {
        let text = (0..50).map(|i| alloc::format!("w{i}")).collect::<Vec<_>>().join(" ");
        let once = truncate_to_budget(&text, 13);
        let twice = truncate_to_budget(&once, 13);
        assert_eq!(once, twice);
        let again = truncate_to_budget(&truncate_to_budget("a b c", 1), 1);
        assert_eq!(again, truncate_to_budget("a b c", 1));
    }
}
