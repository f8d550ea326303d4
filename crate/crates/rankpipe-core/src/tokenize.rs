//! Deterministic tokenizer shared by indexing and search.

use alloc::string::String;
use alloc::vec::Vec;

/// Lowercases and splits on any non-alphanumeric character, dropping empty
/// terms. No stemming, no stopwords.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}
