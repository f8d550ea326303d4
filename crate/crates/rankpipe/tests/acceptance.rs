//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line. Oracles here are independent of the implementation under
//! test (brute-force scorers, closed-form hand computations, scripted
//! backends).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use rankpipe::datagen::{
    emit_synth_dataset, generate_synth, DatagenManifest, FixtureFetcher, FixtureSearchClient,
    SearchResult, SeedPair,
};
use rankpipe::gateway::{MockBackend, PromptLibrary};
use rankpipe::model::{Corpus, Document, Query};
use rankpipe::refine::{run_iteration, MockRewardClient, RefineConfig, RefinePair};
use rankpipe::reranker::{rerank, RerankConfig};
use rankpipe::substream;
use rankpipe_core::ndcg::ndcg_at_k;
use rankpipe_core::reward::{filter_by_threshold, weight};
use rankpipe_core::tokenize::tokenize;
use rankpipe_core::{
    combined_score, normalize_rewards, paired_t_test, sort_scored, Bm25Index, Bm25Params,
    Normalized, ScoredDoc,
};

const BUDGET: usize = 4096;

fn pass(n: u32, what: &str) {
    println!("criterion {n} ({what}): PASS");
}

// ---------------------------------------------------------------------------
// criterion 1: BM25 oracle

/// Brute-force Okapi scoring straight from the formula, no inverted index.
fn brute_force_bm25(docs: &[(String, String)], query: &str, k1: f64, b: f64) -> Vec<(String, f64)> {
    let n = docs.len() as f64;
    let token_docs: Vec<Vec<String>> = docs.iter().map(|(_, t)| tokenize(t)).collect();
    let avgdl = token_docs.iter().map(|t| t.len() as f64).sum::<f64>() / n;
    let mut out = Vec::new();
    for (i, (id, _)) in docs.iter().enumerate() {
        let dl = token_docs[i].len() as f64;
        let mut score = 0.0;
        for term in &tokenize(query) {
            let df = token_docs.iter().filter(|t| t.iter().any(|x| x == term)).count() as f64;
            let tf = token_docs[i].iter().filter(|t| *t == term).count() as f64;
            if df == 0.0 || tf == 0.0 {
                continue;
            }
            let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
            score += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * dl / avgdl));
        }
        if score > 0.0 {
            out.push((id.clone(), score));
        }
    }
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    out
}

#[test]
fn criterion_1_bm25_oracle() {
    let start = Instant::now();

    // Hand-derived fixture: d1="a b", d2="b c", d3="c c c", query "c".
    let idf = 1.6f64.ln();
    let avgdl = 7.0 / 3.0;
    let d2 = idf * 2.2 / (1.0 + 1.2 * (0.25 + 0.75 * 2.0 / avgdl));
    let d3 = idf * (3.0 * 2.2) / (3.0 + 1.2 * (0.25 + 0.75 * 3.0 / avgdl));
    let idx = Bm25Index::build(
        [("d1", "a b"), ("d2", "b c"), ("d3", "c c c")],
        Bm25Params { k1: 1.2, b: 0.75 },
    );
    let hits = idx.search("c", 10);
    assert_eq!(hits.len(), 2);
    assert_eq!(hits[0].doc_id, "d3");
    assert!((hits[0].score - d3).abs() < 1e-6);
    assert_eq!(hits[1].doc_id, "d2");
    assert!((hits[1].score - d2).abs() < 1e-6);

    let vocab = ["red", "green", "blue", "cyan", "teal", "gold", "gray", "pink"];
    let mut rng = StdRng::seed_from_u64(101);
    for _ in 0..50 {
        let n_docs = rng.gen_range(1..=20);
        let docs: Vec<(String, String)> = (0..n_docs)
            .map(|i| {
                let len = rng.gen_range(1..10);
                let text: Vec<&str> =
                    (0..len).map(|_| vocab[rng.gen_range(0..vocab.len())]).collect();
                (format!("doc{i:03}"), text.join(" "))
            })
            .collect();
        let q_len = rng.gen_range(1..4);
        let query: Vec<&str> = (0..q_len).map(|_| vocab[rng.gen_range(0..vocab.len())]).collect();
        let query = query.join(" ");

        let refs: Vec<(&str, &str)> = docs.iter().map(|(i, t)| (i.as_str(), t.as_str())).collect();
        let idx = Bm25Index::build(refs.into_iter(), Bm25Params::default());
        let hits = idx.search(&query, docs.len());
        let expected = brute_force_bm25(&docs, &query, 1.2, 0.75);
        assert_eq!(hits.len(), expected.len());
        for (h, (id, score)) in hits.iter().zip(&expected) {
            assert_eq!(&h.doc_id, id);
            assert!((h.score - score).abs() < 1e-9);
        }
    }

    assert!(start.elapsed().as_secs_f64() < 1.0, "runtime budget");
    pass(1, "bm25 oracle");
}

// ---------------------------------------------------------------------------
// criterion 2: nDCG oracle

fn brute_force_ndcg(ranking: &[String], gains: &BTreeMap<String, u32>, k: usize) -> f64 {
    let dcg: f64 = ranking
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, d)| {
            gains.get(d).copied().unwrap_or(0) as f64 / ((i + 2) as f64).log2()
        })
        .sum();
    let mut ideal: Vec<u32> = gains.values().copied().collect();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg: f64 = ideal
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, g)| *g as f64 / ((i + 2) as f64).log2())
        .sum();
    if idcg == 0.0 {
        0.0
    } else {
        dcg / idcg
    }
}

#[test]
fn criterion_2_ndcg_oracle() {
    let start = Instant::now();

    let ranking = vec!["d2".to_string(), "d1".to_string()];
    let gains: BTreeMap<String, u32> = [("d1".to_string(), 1)].into();
    assert!((ndcg_at_k(&ranking, &gains, 10) - 0.63093).abs() < 1e-5);

    let mut rng = StdRng::seed_from_u64(202);
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let ids: Vec<String> = (0..n).map(|i| format!("d{i}")).collect();
        let gains: BTreeMap<String, u32> =
            ids.iter().map(|d| (d.clone(), rng.gen_range(0..=2u32))).collect();
        let mut ranking = ids.clone();
        for i in (1..ranking.len()).rev() {
            ranking.swap(i, rng.gen_range(0..=i));
        }
        let k = rng.gen_range(1..=10);
        let got = ndcg_at_k(&ranking, &gains, k);
        let want = brute_force_ndcg(&ranking, &gains, k);
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    assert!(start.elapsed().as_secs_f64() < 1.0, "runtime budget");
    pass(2, "ndcg oracle");
}

// ---------------------------------------------------------------------------
// criterion 3: hybrid-scoring dominance

#[test]
fn criterion_3_hybrid_dominance() {
    let mut rng = StdRng::seed_from_u64(303);
    for _ in 0..500 {
        let n = rng.gen_range(2..=20);
        let mut docs: Vec<ScoredDoc> = (0..n)
            .map(|i| {
                let retrieval: f64 = rng.gen_range(0.0..50.0);
                let label: u8 = rng.gen_range(0..=2);
                ScoredDoc {
                    doc_id: format!("d{i}"),
                    retrieval_score: retrieval,
                    label,
                    combined_score: combined_score(retrieval, label, 100.0).unwrap(),
                    explanation: String::new(),
                    parse_ok: true,
                }
            })
            .collect();
        sort_scored(&mut docs);
        for w in docs.windows(2) {
            let ordered = w[0].label > w[1].label
                || (w[0].label == w[1].label && w[0].retrieval_score >= w[1].retrieval_score);
            assert!(ordered, "ordering must be (label desc, retrieval desc)");
        }
    }
    pass(3, "hybrid dominance");
}

// ---------------------------------------------------------------------------
// criterion 4: reward normalization, filtering, weighting

#[test]
fn criterion_4_reward_pipeline_exactness() {
    let Normalized::Values(v) = normalize_rewards(&[2.0, 4.0, 6.0]).unwrap() else {
        panic!("non-degenerate input");
    };
    assert_eq!(v, vec![0.0, 0.5, 1.0]);

    let mut rng = StdRng::seed_from_u64(404);
    for _ in 0..1000 {
        let n = rng.gen_range(2..=10);
        let base: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let shift: f64 = rng.gen_range(-50.0..50.0);
        let scale: f64 = rng.gen_range(0.1..10.0);
        let moved: Vec<f64> = base.iter().map(|r| r * scale + shift).collect();
        match (normalize_rewards(&base).unwrap(), normalize_rewards(&moved).unwrap()) {
            (Normalized::Values(a), Normalized::Values(b)) => {
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-12, "shift/scale invariance");
                }
            }
            (Normalized::Degenerate, Normalized::Degenerate) => {}
            _ => panic!("degeneracy must be invariant too"),
        }

        if let Normalized::Values(a) = normalize_rewards(&base).unwrap() {
            let kept = filter_by_threshold(&a, 0.85);
            for (i, r) in &a.iter().enumerate().collect::<Vec<_>>() {
                assert_eq!(kept.iter().any(|(j, _)| j == i), **r >= 0.85);
            }
            for (_, r) in &kept {
                assert!((weight(*r, 3) - r * r * r).abs() < 1e-12);
            }
        }
    }

    assert!(matches!(normalize_rewards(&[3.0, 3.0, 3.0]).unwrap(), Normalized::Degenerate));
    pass(4, "reward normalization and weighting");
}

// ---------------------------------------------------------------------------
// criterion 5: generation record-count law + determinism

fn datagen_fixture_run() -> (Vec<u8>, DatagenManifest) {
    let prompts = PromptLibrary::default();
    let links: Vec<usize> = (0..20).map(|i| i % 3).collect();
    let seeds: Vec<SeedPair> = (0..20)
        .map(|i| {
            let mut answer = format!("Seed answer {i}.");
            for j in 0..links[i] {
                answer.push_str(&format!(" See http://example.com/a{i}x{j} here."));
            }
            SeedPair {
                source_id: format!("s{i}"),
                community: format!("c{}", i % 4),
                query: format!("question {i} about a mechanism"),
                answer,
            }
        })
        .collect();

    let mut fetcher = FixtureFetcher::new();
    let mut search = FixtureSearchClient::new();
    let mut backend = MockBackend::new().with_default("Judged relevant on inspection.\nRelevance: 1");
    for (i, s) in seeds.iter().enumerate() {
        let mut linked_texts = Vec::new();
        for j in 0..links[i] {
            let text = format!("Linked text {i}/{j}.");
            fetcher.insert(format!("http://example.com/a{i}x{j}"), text.clone());
            linked_texts.push(text);
        }
        let completion = if i % 2 == 0 {
            format!("1. follow-up question {i}")
        } else {
            "none".to_string()
        };
        let messages = prompts
            .render_related_queries_prompt(&s.query, &s.answer, &linked_texts, BUDGET)
            .unwrap();
        backend.insert(&messages, vec![completion]);
        search.insert(
            format!("follow-up question {i}"),
            vec![SearchResult {
                url: format!("http://web.example.com/{i}"),
                title: format!("page {i}"),
                snippet: String::new(),
                fetched_text: Some(format!("Web page text {i}.")),
            }],
        );
    }

    let mut manifest = DatagenManifest { seeds: seeds.len(), ..Default::default() };
    let mut rng = substream(42, "datagen");
    let mut records = Vec::new();
    for (i, s) in seeds.iter().enumerate() {
        let before = (manifest.annotated, manifest.websearch_ok);
        let rs = generate_synth(
            s, &backend, &prompts, &search, &fetcher, &mut rng, &mut manifest, "teacher", BUDGET,
        )
        .unwrap();
        let annotated_linked =
            (manifest.annotated - before.0) - (manifest.websearch_ok - before.1);
        let websearch_bit = manifest.websearch_ok - before.1;
        assert_eq!(rs.len(), annotated_linked + websearch_bit, "record-count law, seed {i}");
        records.extend(rs);
    }
    let out = tempfile::NamedTempFile::new().unwrap();
    let mut shuffle = substream(42, "shuffle");
    emit_synth_dataset(&records, out.path(), &mut shuffle).unwrap();
    let reloaded = rankpipe::datagen::load_synth_dataset(out.path()).unwrap();
    assert_eq!(reloaded.len(), records.len(), "dataset round-trips");
    (std::fs::read(out.path()).unwrap(), manifest)
}

#[test]
fn criterion_5_generation_record_count_law() {
    let (bytes_a, manifest_a) = datagen_fixture_run();
    let (bytes_b, manifest_b) = datagen_fixture_run();
    assert_eq!(bytes_a, bytes_b, "byte-identical across reruns");
    assert_eq!(manifest_a, manifest_b);
    pass(5, "generation record-count law");
}

// ---------------------------------------------------------------------------
// criterion 6: refinement end-to-end fixture

#[test]
fn criterion_6_refinement_fixture() {
    let prompts = PromptLibrary::default();
    let config = RefineConfig::default();
    assert_eq!((config.k, config.m), (8, 3));
    assert!((config.tau - 0.85).abs() < 1e-12);

    let pairs: Vec<RefinePair> = (0..3)
        .map(|p| RefinePair {
            qid: format!("q{p}"),
            query: format!("query {p}"),
            docid: format!("d{p}"),
            doc_text: format!("document text {p}"),
        })
        .collect();
    let mut backend = MockBackend::new();
    let mut rewards = MockRewardClient::new();
    for (p, pair) in pairs.iter().enumerate() {
        let prompt =
            prompts.render_rerank_prompt(&pair.query, &pair.doc_text, None, BUDGET).unwrap();
        let samples: Vec<String> =
            (1..=8).map(|i| format!("Group {p} sample {i}.\nRelevance: 2")).collect();
        for (i, s) in samples.iter().enumerate() {
            rewards.insert(s.clone(), (i + 1) as f64);
        }
        backend.insert(&prompt, samples);
    }

    let out = tempfile::NamedTempFile::new().unwrap();
    let report =
        run_iteration(&pairs, &backend, &rewards, &prompts, &config, 1, out.path(), BUDGET)
            .unwrap();
    assert_eq!(report.pairs, 3);
    assert_eq!(report.degenerate, 0);
    assert_eq!(report.kept_examples, 6, "exactly 2 per group");

    let content = std::fs::read_to_string(out.path()).unwrap();
    let rows: Vec<serde_json::Value> =
        content.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let w7 = (6.0_f64 / 7.0).powi(3);
    assert!((w7 - 0.6297).abs() < 1e-4, "hand-derived weight value");
    for chunk in rows.chunks(2) {
        assert!((chunk[0]["weight"].as_f64().unwrap() - w7).abs() < 1e-9);
        assert!((chunk[1]["weight"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
    pass(6, "refinement fixture");
}

// ---------------------------------------------------------------------------
// shared 20-query / 200-doc fixture for criteria 7 and 9

struct EvalFixture {
    corpus: Vec<Document>,
    queries: Vec<Query>,
    /// qid -> docid -> gain
    qrels: BTreeMap<String, BTreeMap<String, u32>>,
    /// Mock labels per (query index, doc text variant): (common-doc label, relevant-doc label).
    labels: Vec<(u8, u8)>,
}

/// 20 queries, 10 docs each. Docs 0..9 of group i share one text containing
/// the query's second term; doc 9 lacks it, so BM25 ranks the (only) relevant
/// doc last. The mock reranker agrees with the qrels on 90% of the 200 pairs:
/// labels for the first two query groups are inverted.
fn eval_fixture() -> EvalFixture {
    let mut corpus = Vec::new();
    let mut queries = Vec::new();
    let mut qrels = BTreeMap::new();
    let mut labels = Vec::new();
    for i in 0..20 {
        queries.push(Query {
            id: format!("q{i:02}"),
            text: format!("topic{i:02} alpha"),
            domain: if i < 10 { "bio".into() } else { "econ".into() },
        });
        for j in 0..10 {
            let text = if j < 9 {
                format!("topic{i:02} alpha pad pad pad pad")
            } else {
                format!("topic{i:02} beta pad pad pad pad")
            };
            corpus.push(Document {
                id: format!("d{i:02}_{j}"),
                title: None,
                text,
                domain: None,
            });
        }
        qrels.insert(
            format!("q{i:02}"),
            [(format!("d{i:02}_9"), 2u32)].into_iter().collect(),
        );
        // Flip the first two groups: 20 of 200 pairs disagree with the qrels.
        labels.push(if i < 2 { (2, 0) } else { (0, 2) });
    }
    EvalFixture { corpus, queries, qrels, labels }
}

fn fixture_mock(fixture: &EvalFixture, prompts: &PromptLibrary) -> MockBackend {
    let mut backend = MockBackend::new();
    for (i, query) in fixture.queries.iter().enumerate() {
        let (common_label, relevant_label) = fixture.labels[i];
        let common_text = format!("topic{i:02} alpha pad pad pad pad");
        let relevant_text = format!("topic{i:02} beta pad pad pad pad");
        for (text, label) in [(common_text, common_label), (relevant_text, relevant_label)] {
            let messages = prompts.render_rerank_prompt(&query.text, &text, None, BUDGET).unwrap();
            backend.insert(&messages, vec![format!("Considered the topic match.\nRelevance: {label}")]);
        }
    }
    backend
}

#[test]
fn criterion_7_rerank_beats_first_stage() {
    let fixture = eval_fixture();
    let prompts = PromptLibrary::default();
    let backend = fixture_mock(&fixture, &prompts);
    let corpus_jsonl: String = fixture
        .corpus
        .iter()
        .map(|d| serde_json::to_string(d).unwrap() + "\n")
        .collect();
    let tmp = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(tmp.path(), corpus_jsonl).unwrap();
    let corpus: Corpus = rankpipe::model::load_corpus(tmp.path()).unwrap();

    let index = Bm25Index::build(
        fixture.corpus.iter().map(|d| (d.id.as_str(), d.text.as_str())),
        Bm25Params::default(),
    );

    let mut bm25_scores = Vec::new();
    let mut rerank_scores = Vec::new();
    for query in &fixture.queries {
        let hits = index.search(&query.text, 10);
        assert_eq!(hits.len(), 10);
        let prefix = format!("d{}_", &query.id[1..]);
        assert!(hits.iter().all(|h| h.doc_id.starts_with(&prefix)), "top 10 is the query's group");

        let gains = &fixture.qrels[&query.id];
        let ranking: Vec<String> = hits.iter().map(|h| h.doc_id.clone()).collect();
        bm25_scores.push(ndcg_at_k(&ranking, gains, 10));

        let scored = rerank(
            &query.id,
            &query.text,
            &hits,
            &corpus,
            &backend,
            &prompts,
            None,
            &RerankConfig::default(),
        )
        .unwrap();
        let ranking: Vec<String> = scored.iter().map(|d| d.doc_id.clone()).collect();
        rerank_scores.push(ndcg_at_k(&ranking, gains, 10));
    }

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (before, after) = (mean(&bm25_scores), mean(&rerank_scores));
    assert!(
        after - before >= 0.1,
        "mean nDCG@10 must improve by >= 0.1 absolute ({before:.4} -> {after:.4})"
    );
    pass(7, "rerank beats first stage");
}

// ---------------------------------------------------------------------------
// criterion 8: paired t-test

#[test]
fn criterion_8_paired_t_test() {
    let a = [0.3, 0.5, 0.7, 0.2, 0.9];
    let same = paired_t_test(&a, &a).unwrap();
    assert_eq!(same.t, 0.0);
    assert_eq!(same.p, 1.0);

    // Textbook fixture: differences 1..5, so t = 3 / (sqrt(2.5)/sqrt(5)) and
    // df = 4. Hand computation via the closed-form regularized incomplete
    // beta I_x(2, 1/2) = 1 - (3/2)sqrt(1-x) + (1/2)(1-x)^(3/2), x = 4/(4+t^2).
    let b: Vec<f64> = a.iter().zip(1..=5).map(|(v, d)| v + d as f64).collect();
    let r = paired_t_test(&b, &a).unwrap();
    let t_expected = 3.0 / ((2.5f64).sqrt() / (5.0f64).sqrt());
    assert!((r.t - t_expected).abs() < 1e-9);
    let x = 4.0 / (4.0 + t_expected * t_expected);
    let p_expected = 1.0 - 1.5 * (1.0 - x).sqrt() + 0.5 * (1.0 - x).powf(1.5);
    assert!((r.p - p_expected).abs() < 1e-6, "{} vs {}", r.p, p_expected);

    let mut rng = StdRng::seed_from_u64(808);
    for _ in 0..100 {
        let n = rng.gen_range(3..=12);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let fwd = paired_t_test(&a, &b).unwrap();
        let rev = paired_t_test(&b, &a).unwrap();
        assert!((fwd.t + rev.t).abs() < 1e-9, "antisymmetry of t");
        assert!((fwd.p - rev.p).abs() < 1e-9, "p symmetric under swap");
    }
    pass(8, "paired t-test");
}

// ---------------------------------------------------------------------------
// criterion 9: CLI determinism

fn sha_tree(dir: &Path) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_file() {
            let name = entry.file_name().to_string_lossy().into_owned();
            out.insert(name, rankpipe::file_sha256(&entry.path()).unwrap());
        }
    }
    out
}

fn run_cli(config: &Path, args: &[&str]) {
    let output = Command::new(env!("CARGO_BIN_EXE_rankpipe"))
        .arg("--config")
        .arg(config)
        .args(args)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "command {args:?} failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn criterion_9_cli_determinism() {
    let start = Instant::now();
    let fixture = eval_fixture();
    let prompts = PromptLibrary::default();
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let out_dir = root.join("out");

    // Corpus, queries, qrels.
    let mut corpus = String::new();
    for d in &fixture.corpus {
        writeln!(corpus, "{}", serde_json::to_string(d).unwrap()).unwrap();
    }
    std::fs::write(root.join("corpus.jsonl"), corpus).unwrap();
    let mut queries = String::new();
    for q in &fixture.queries {
        writeln!(queries, "{}", serde_json::to_string(q).unwrap()).unwrap();
    }
    std::fs::write(root.join("queries.jsonl"), queries).unwrap();
    let mut qrels = String::new();
    for (qid, gains) in &fixture.qrels {
        for (docid, gain) in gains {
            writeln!(qrels, "{qid} 0 {docid} {gain}").unwrap();
        }
    }
    std::fs::write(root.join("qrels.txt"), qrels).unwrap();

    // Student mock: rerank prompts for the eval fixture plus refinement pairs.
    let mut student = fixture_mock(&fixture, &prompts);
    let pairs: Vec<RefinePair> = (0..2)
        .map(|p| RefinePair {
            qid: format!("rq{p}"),
            query: format!("refinement query {p}"),
            docid: format!("rd{p}"),
            doc_text: format!("refinement document {p}"),
        })
        .collect();
    let mut pairs_file = String::new();
    let mut reward_fixture = String::new();
    for (p, pair) in pairs.iter().enumerate() {
        writeln!(pairs_file, "{}", serde_json::to_string(pair).unwrap()).unwrap();
        let prompt =
            prompts.render_rerank_prompt(&pair.query, &pair.doc_text, None, BUDGET).unwrap();
        let samples: Vec<String> =
            (1..=8).map(|i| format!("Pair {p} reasoning {i}.\nRelevance: 1")).collect();
        for (i, s) in samples.iter().enumerate() {
            writeln!(
                reward_fixture,
                "{}",
                serde_json::json!({"output": s, "reward": (i + 1) as f64})
            )
            .unwrap();
        }
        student.insert(&prompt, samples);
    }
    student.save(&root.join("student_mock.jsonl")).unwrap();
    std::fs::write(root.join("pairs.jsonl"), pairs_file).unwrap();
    std::fs::write(root.join("rewards.jsonl"), reward_fixture).unwrap();

    // Teacher mock, seeds, search and fetch fixtures for datagen. Every
    // prompt is scripted explicitly: the saved fixture has no fallback.
    let mut teacher = MockBackend::new();
    let annotation = "The page treats the exact question.\nRelevance: 2";
    let seeds: Vec<SeedPair> = (0..2)
        .map(|i| SeedPair {
            source_id: format!("s{i}"),
            community: "c0".into(),
            query: format!("seed question {i}"),
            answer: format!("An answer citing http://example.com/ref{i} directly."),
        })
        .collect();
    let mut seeds_file = String::new();
    let mut fetch_fixture = String::new();
    let mut search_fixture = String::new();
    for (i, s) in seeds.iter().enumerate() {
        writeln!(
            seeds_file,
            "{}",
            serde_json::json!({
                "id": s.source_id, "community": s.community,
                "query": s.query, "answer": s.answer,
            })
        )
        .unwrap();
        let linked_text = format!("Reference text {i}.");
        writeln!(
            fetch_fixture,
            "{}",
            serde_json::json!({"url": format!("http://example.com/ref{i}"), "text": linked_text})
        )
        .unwrap();
        let messages = prompts
            .render_related_queries_prompt(&s.query, &s.answer, &[linked_text.clone()], BUDGET)
            .unwrap();
        teacher.insert(&messages, vec![format!("1. broader question {i}")]);
        let annotate_linked = prompts.render_teacher_prompt(&s.query, &linked_text, BUDGET).unwrap();
        teacher.insert(&annotate_linked, vec![annotation.to_string()]);
        let annotate_web = prompts
            .render_teacher_prompt(&format!("broader question {i}"), &format!("Found page text {i}."), BUDGET)
            .unwrap();
        teacher.insert(&annotate_web, vec![annotation.to_string()]);
        writeln!(
            search_fixture,
            "{}",
            serde_json::json!({
                "query": format!("broader question {i}"),
                "results": [{
                    "url": format!("http://web.example.com/w{i}"),
                    "title": format!("w{i}"),
                    "snippet": "",
                    "fetched_text": format!("Found page text {i}."),
                }],
            })
        )
        .unwrap();
    }
    teacher.save(&root.join("teacher_mock.jsonl")).unwrap();
    std::fs::write(root.join("seeds.jsonl"), seeds_file).unwrap();
    std::fs::write(root.join("search.jsonl"), search_fixture).unwrap();
    std::fs::write(root.join("fetch.jsonl"), fetch_fixture).unwrap();

    let config_path = root.join("config.toml");
    std::fs::write(
        &config_path,
        format!(
            r#"rng_seed = 42

[paths]
corpus = "{corpus}"
queries = "{queries}"
qrels = "{qrels}"
seeds = "{seeds}"
output_dir = "{out}"

[gateway]
mode = "mock"
mock_fixture = "{student}"
teacher_mock_fixture = "{teacher}"
reward_mode = "mock"
reward_mock_fixture = "{rewards}"

[search]
mode = "fixture"
fixture = "{search}"
fetch_fixture = "{fetch}"

[retrieval]
k = 10
"#,
            corpus = root.join("corpus.jsonl").display(),
            queries = root.join("queries.jsonl").display(),
            qrels = root.join("qrels.txt").display(),
            seeds = root.join("seeds.jsonl").display(),
            out = out_dir.display(),
            student = root.join("student_mock.jsonl").display(),
            teacher = root.join("teacher_mock.jsonl").display(),
            rewards = root.join("rewards.jsonl").display(),
            search = root.join("search.jsonl").display(),
            fetch = root.join("fetch.jsonl").display(),
        ),
    )
    .unwrap();

    let first_stage = out_dir.join("first_stage.run");
    let reranked = out_dir.join("reranked.run");
    let pairs_path = root.join("pairs.jsonl");
    let all_commands: &[Vec<&str>] = &[
        vec!["index"],
        vec!["retrieve"],
        vec!["rerank", first_stage.to_str().unwrap()],
        vec!["datagen", "--limit", "2"],
        vec!["refine", pairs_path.to_str().unwrap()],
        vec!["eval", first_stage.to_str().unwrap(), reranked.to_str().unwrap()],
        vec!["compare", first_stage.to_str().unwrap(), reranked.to_str().unwrap()],
    ];

    for args in all_commands {
        run_cli(&config_path, args);
    }
    let first_pass = sha_tree(&out_dir);
    for args in all_commands {
        run_cli(&config_path, args);
    }
    let second_pass = sha_tree(&out_dir);

    assert_eq!(first_pass, second_pass, "every output file must be byte-identical on rerun");
    assert!(!first_pass.is_empty());
    assert!(first_pass.contains_key("reranked.run"));
    assert!(first_pass.contains_key("synth.jsonl"));
    assert!(first_pass.contains_key("d_1.jsonl"));
    assert!(first_pass.contains_key("d_2.jsonl"));
    assert!(first_pass.contains_key("eval_report.json"));

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "full mock pipeline ran in {elapsed:.1}s, budget 60s");
    pass(9, "cli determinism");
}
