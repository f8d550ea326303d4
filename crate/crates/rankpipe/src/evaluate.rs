//! nDCG@k evaluation of run files against qrels, per-domain and overall
//! aggregation, and paired significance tests between runs.
//!
//! The overall figure is the unweighted mean of per-domain means.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rankpipe_core::ndcg::ndcg_at_k;
use rankpipe_core::stats::{paired_t_test, StatsError, TTestResult};

use crate::model::{Qrels, RunEntry};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("query {qid} has no domain mapping")]
    UnknownDomain { qid: String },
    #[error("query {qid} appears in the run but not in the qrels")]
    MissingQrels { qid: String },
    #[error("t-test: {0}")]
    Stats(StatsError),
    #[error("runs share fewer than 2 queries")]
    TooFewCommonQueries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_query: BTreeMap<String, f64>,
    pub per_domain: BTreeMap<String, f64>,
    pub overall: f64,
    pub k: usize,
    /// Queries present in the qrels but absent from the run (scored 0).
    pub missing_from_run: usize,
}

/// Groups run entries by query id, preserving rank order.
fn rankings_by_query(run: &[RunEntry]) -> BTreeMap<String, Vec<String>> {
    let mut by_query: BTreeMap<String, Vec<(u32, String)>> = BTreeMap::new();
    for e in run {
        by_query.entry(e.qid.clone()).or_default().push((e.rank, e.docid.clone()));
    }
    by_query
        .into_iter()
        .map(|(qid, mut docs)| {
            docs.sort_by_key(|(rank, _)| *rank);
            (qid, docs.into_iter().map(|(_, d)| d).collect())
        })
        .collect()
}

/// Per-query nDCG@k for a run; queries in the qrels but missing from the run
/// score 0.
pub fn per_query_ndcg(
    run: &[RunEntry],
    qrels: &Qrels,
    k: usize,
) -> Result<(BTreeMap<String, f64>, usize), EvalError> {
    let rankings = rankings_by_query(run);
    for qid in rankings.keys() {
        if qrels.gains(qid).is_none() {
            return Err(EvalError::MissingQrels { qid: qid.clone() });
        }
    }
    let mut per_query = BTreeMap::new();
    let mut missing = 0;
    for qid in qrels.query_ids() {
        let gains = qrels.gains(qid).expect("iterating qrels keys");
        let score = match rankings.get(qid) {
            Some(ranking) => ndcg_at_k(ranking, gains, k),
            None => {
                missing += 1;
                log::warn!("query {qid} missing from run, scored 0");
                0.0
            }
        };
        per_query.insert(qid.clone(), score);
    }
    Ok((per_query, missing))
}

pub fn evaluate_run(
    run: &[RunEntry],
    qrels: &Qrels,
    query_domains: &HashMap<String, String>,
    k: usize,
) -> Result<EvalReport, EvalError> {
    let (per_query, missing_from_run) = per_query_ndcg(run, qrels, k)?;

    let mut domain_scores: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (qid, score) in &per_query {
        let domain = query_domains
            .get(qid)
            .ok_or_else(|| EvalError::UnknownDomain { qid: qid.clone() })?;
        domain_scores.entry(domain.clone()).or_default().push(*score);
    }
    let per_domain: BTreeMap<String, f64> = domain_scores
        .into_iter()
        .map(|(d, scores)| {
            let mean = scores.iter().sum::<f64>() / scores.len() as f64;
            (d, mean)
        })
        .collect();
    let overall = if per_domain.is_empty() {
        0.0
    } else {
        per_domain.values().sum::<f64>() / per_domain.len() as f64
    };
    Ok(EvalReport { per_query, per_domain, overall, k, missing_from_run })
}

/// Paired t-test over the queries both score maps share.
pub fn compare_runs(
    scores_a: &BTreeMap<String, f64>,
    scores_b: &BTreeMap<String, f64>,
) -> Result<TTestResult, EvalError> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (qid, &score) in scores_a {
        if let Some(&other) = scores_b.get(qid) {
            a.push(score);
            b.push(other);
        }
    }
    if a.len() < 2 {
        return Err(EvalError::TooFewCommonQueries);
    }
    paired_t_test(&a, &b).map_err(EvalError::Stats)
}

/// Aligned-column text rendering of a report.
pub fn render_table(report: &EvalReport) -> String {
    let mut out = String::new();
    let width = report
        .per_domain
        .keys()
        .map(|d| d.len())
        .chain(["domain".len()])
        .max()
        .unwrap_or(6);
    out.push_str(&format!("{:<width$}  nDCG@{}\n", "domain", report.k));
    for (domain, mean) in &report.per_domain {
        out.push_str(&format!("{domain:<width$}  {mean:.4}\n"));
    }
    out.push_str(&format!("{:<width$}  {:.4}\n", "overall", report.overall));
    out
}
