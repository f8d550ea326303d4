//! Max-min reward normalization, threshold selection, and power weighting for
//! the rejection-sampling refinement loop.
//!
//! Within one (query, document) sample group: R̄ = (R - min) / (max - min),
//! samples with R̄ >= tau are kept, and each kept sample is weighted R̄^m.

use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub enum RewardError {
    /// Normalization needs at least two rewards to have any spread.
    TooFewRewards(usize),
}

impl core::fmt::Display for RewardError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RewardError::TooFewRewards(n) => {
                write!(f, "max-min normalization needs >= 2 rewards, got {n}")
            }
        }
    }
}

/// Outcome of max-min normalization. A group where every reward is equal
/// carries no preference signal and is marked degenerate.
#[derive(Debug, Clone, PartialEq)]
pub enum Normalized {
    Values(Vec<f64>),
    Degenerate,
}

/// Maps each reward to (r - min) / (max - min).
pub fn normalize_rewards(rewards: &[f64]) -> Result<Normalized, RewardError> {
    if rewards.len() < 2 {
        return Err(RewardError::TooFewRewards(rewards.len()));
    }
    let min = rewards.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = rewards.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return Ok(Normalized::Degenerate);
    }
    let span = max - min;
    Ok(Normalized::Values(rewards.iter().map(|r| (r - min) / span).collect()))
}

/// Indices (and normalized rewards) of samples passing the threshold.
/// The maximum always survives since its normalized reward is 1.
pub fn filter_by_threshold(normalized: &[f64], tau: f64) -> Vec<(usize, f64)> {
    normalized
        .iter()
        .enumerate()
        .filter(|&(_, &r)| r >= tau)
        .map(|(i, &r)| (i, r))
        .collect()
}

/// Training weight for a kept sample: R̄^m.
pub fn weight(normalized_reward: f64, m: u32) -> f64 {
    libm::pow(normalized_reward, m as f64)
}
