//! Operator CLI wiring the pipeline stages: index, retrieve, rerank, datagen,
//! refine, eval, compare.
//!
//! Exit codes: 0 success, 1 validation error, 2 external-service failure.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use rankpipe::config::{GatewayConfig, PipelineConfig};
use rankpipe::core::{Bm25Index, Bm25Params};
use rankpipe::datagen::{
    self, contamination_filter, load_seeds, normalize_query, round_robin_sample, DatagenManifest,
    Fetcher, FixtureFetcher, FixtureSearchClient, HttpFetcher, HttpSearchClient, SearchClient,
};
use rankpipe::evaluate::{compare_runs, evaluate_run, per_query_ndcg, render_table};
use rankpipe::gateway::{ChatBackend, GatewayError, HttpBackend, MockBackend, PromptLibrary};
use rankpipe::model::{
    load_corpus, load_embeddings, load_qrels, load_queries, load_run, write_run, Corpus, Query,
    RunEntry,
};
use rankpipe::refine::{
    emit_sft_dataset, load_pairs, run_iteration, ChatRewardClient, MockRewardClient, RefineError,
    RewardClient, ScoringEndpointClient,
};
use rankpipe::reranker::{rerank, write_explanations, ExplanationRecord, RerankError};
use rankpipe::{file_sha256, substream};

const INDEX_CACHE_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "rankpipe", version, about = "Retrieve-then-rerank pipeline with distillation and refinement data generation")]
struct Cli {
    /// Pipeline config file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the config rng seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the command's primary output path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and cache the BM25 index.
    Index,
    /// First-stage retrieval to a run file.
    Retrieve(RetrieveArgs),
    /// Rerank a first-stage run with the LLM reranker.
    Rerank(RerankArgs),
    /// Generate the synthetic training dataset from seed pairs.
    Datagen(DatagenArgs),
    /// Run refinement iterations, emitting weighted datasets.
    Refine(RefineArgs),
    /// Evaluate run files against qrels.
    Eval(EvalArgs),
    /// Paired t-test between two runs.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RetrieveArgs {
    /// Candidates per query.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct RerankArgs {
    /// First-stage run file.
    run_in: PathBuf,
    /// Inject per-domain relevance definitions into the prompt.
    #[arg(long)]
    instruct: bool,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct DatagenArgs {
    /// Cap the number of seeds (round-robin sampled).
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct RefineArgs {
    /// JSONL of {"qid","query","docid","doc_text"} pairs.
    pairs: PathBuf,
    /// Run only this iteration (1-based); default runs 1..=T.
    #[arg(long)]
    iter: Option<u32>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    /// Run files to evaluate.
    runs: Vec<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    run_a: PathBuf,
    run_b: PathBuf,
    #[arg(long)]
    k: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify_exit(&e))
        }
    }
}

/// 2 for external-service failures (transport, remote API), 1 otherwise.
fn classify_exit(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(g) = cause.downcast_ref::<GatewayError>() {
            if matches!(g, GatewayError::Transport { .. } | GatewayError::Api { .. }) {
                return 2;
            }
        }
        if let Some(r) = cause.downcast_ref::<RerankError>() {
            if let RerankError::Gateway { source, .. } = r {
                if matches!(source, GatewayError::Transport { .. } | GatewayError::Api { .. }) {
                    return 2;
                }
            }
        }
        if matches!(
            cause.downcast_ref::<datagen::DatagenError>(),
            Some(datagen::DatagenError::SearchFailed { .. } | datagen::DatagenError::FetchFailed { .. })
        ) {
            return 2;
        }
        if matches!(cause.downcast_ref::<RefineError>(), Some(RefineError::Reward { .. })) {
            return 2;
        }
    }
    1
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.rng_seed = seed;
    }
    std::fs::create_dir_all(&config.paths.output_dir)
        .with_context(|| format!("creating output dir {}", config.paths.output_dir.display()))?;

    match cli.command {
        Command::Index => cmd_index(&config),
        Command::Retrieve(args) => cmd_retrieve(&config, args, cli.out),
        Command::Rerank(args) => cmd_rerank(&config, args, cli.out),
        Command::Datagen(args) => cmd_datagen(&config, args, cli.out),
        Command::Refine(args) => cmd_refine(&config, args, cli.out),
        Command::Eval(args) => cmd_eval(&config, args, cli.out),
        Command::Compare(args) => cmd_compare(&config, args),
    }
}

// ---------------------------------------------------------------------------
// manifests

#[derive(Serialize)]
struct Manifest {
    command: String,
    version: String,
    config_hash: String,
    inputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counts: Option<serde_json::Value>,
}

fn config_hash(config: &PipelineConfig) -> String {
    use sha2::{Digest, Sha256};
    let canonical = serde_json::to_string(config).expect("config serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

fn write_manifest(
    config: &PipelineConfig,
    command: &str,
    inputs: &[(&str, &Path)],
    counts: Option<serde_json::Value>,
) -> Result<()> {
    let mut hashed = BTreeMap::new();
    for (name, path) in inputs {
        if path.exists() {
            hashed.insert(name.to_string(), file_sha256(path)?);
        }
    }
    let manifest = Manifest {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config_hash(config),
        inputs: hashed,
        counts,
    };
    let path = config.paths.output_dir.join(format!("{command}_manifest.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

// ---------------------------------------------------------------------------
// backends

fn chat_backend(
    gateway: &GatewayConfig,
    model: &str,
    fixture: Option<&PathBuf>,
) -> Result<Box<dyn ChatBackend>> {
    match gateway.mode.as_str() {
        "mock" => {
            let fixture = fixture
                .ok_or_else(|| anyhow!("gateway.mode is \"mock\" but no mock fixture path is configured"))?;
            Ok(Box::new(MockBackend::load(fixture)?))
        }
        "http" => {
            if gateway.base_url.is_empty() {
                bail!("gateway.base_url must be set for http mode");
            }
            let api_key = std::env::var(&gateway.api_key_env).ok();
            Ok(Box::new(
                HttpBackend::new(&gateway.base_url, model)
                    .with_api_key(api_key)
                    .with_retries(gateway.max_retries, gateway.backoff_ms)
                    .with_max_inflight(gateway.max_inflight),
            ))
        }
        other => bail!("unknown gateway.mode {other:?} (expected \"mock\" or \"http\")"),
    }
}

fn prompt_library(config: &PipelineConfig) -> Result<PromptLibrary> {
    match &config.paths.templates_dir {
        Some(dir) => Ok(PromptLibrary::from_dir(dir)?),
        None => Ok(PromptLibrary::default()),
    }
}

// ---------------------------------------------------------------------------
// index

#[derive(Serialize, Deserialize)]
struct IndexCache {
    version: u32,
    corpus_hash: String,
    index: Bm25Index,
}

fn index_cache_path(config: &PipelineConfig) -> PathBuf {
    config.paths.output_dir.join("bm25_index.json")
}

fn build_index(corpus: &Corpus, config: &PipelineConfig) -> Bm25Index {
    Bm25Index::build(
        corpus.docs().iter().map(|d| (d.id.as_str(), d.text.as_str())),
        Bm25Params { k1: config.retrieval.k1, b: config.retrieval.b },
    )
}

/// Loads the cached index when its corpus hash matches; otherwise rebuilds
/// and rewrites the cache.
fn load_or_build_index(config: &PipelineConfig, corpus: &Corpus, corpus_path: &Path) -> Result<Bm25Index> {
    let cache_path = index_cache_path(config);
    let corpus_hash = file_sha256(corpus_path)?;
    if cache_path.exists() {
        match std::fs::read_to_string(&cache_path)
            .map_err(anyhow::Error::from)
            .and_then(|c| serde_json::from_str::<IndexCache>(&c).map_err(Into::into))
        {
            Ok(cache) if cache.version == INDEX_CACHE_VERSION && cache.corpus_hash == corpus_hash => {
                println!("cache hit: {}", cache_path.display());
                return Ok(cache.index);
            }
            Ok(_) => log::warn!("index cache stale, rebuilding"),
            Err(e) => log::warn!("index cache corrupted ({e}), rebuilding"),
        }
    }
    let index = build_index(corpus, config);
    let cache = IndexCache { version: INDEX_CACHE_VERSION, corpus_hash, index: index.clone() };
    std::fs::write(&cache_path, serde_json::to_string(&cache)?)?;
    Ok(index)
}

fn cmd_index(config: &PipelineConfig) -> Result<()> {
    let corpus_path = config.require("paths.corpus", &config.paths.corpus)?;
    let corpus = load_corpus(&corpus_path)?;
    let index = load_or_build_index(config, &corpus, &corpus_path)?;
    println!(
        "indexed {} docs, avgdl {:.2}, cache {}",
        index.doc_count(),
        index.avgdl(),
        index_cache_path(config).display()
    );
    write_manifest(config, "index", &[("corpus", &corpus_path)], None)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// retrieve

fn results_to_entries(
    qid: &str,
    results: &[rankpipe::core::RetrievalResult],
    tag: &str,
) -> Vec<RunEntry> {
    results
        .iter()
        .map(|r| RunEntry {
            qid: qid.to_string(),
            docid: r.doc_id.clone(),
            rank: r.rank,
            score: r.score,
            tag: tag.to_string(),
        })
        .collect()
}

fn cmd_retrieve(config: &PipelineConfig, args: RetrieveArgs, out: Option<PathBuf>) -> Result<()> {
    let queries_path = config.require("paths.queries", &config.paths.queries)?;
    let queries = load_queries(&queries_path)?;
    let k = args.k.unwrap_or(config.retrieval.k);
    let out_path = out.unwrap_or_else(|| config.paths.output_dir.join("first_stage.run"));

    let mut entries = Vec::new();
    let mut inputs: Vec<(&str, PathBuf)> = vec![("queries", queries_path.clone())];
    match config.retrieval.mode.as_str() {
        "bm25" => {
            let corpus_path = config.require("paths.corpus", &config.paths.corpus)?;
            let corpus = load_corpus(&corpus_path)?;
            let index = load_or_build_index(config, &corpus, &corpus_path)?;
            for query in &queries {
                entries.extend(results_to_entries(&query.id, &index.search(&query.text, k), "bm25"));
            }
            inputs.push(("corpus", corpus_path));
        }
        "dense" => {
            let emb_path = config.require("paths.embeddings", &config.paths.embeddings)?;
            let query_emb_path =
                config.require("paths.query_embeddings", &config.paths.query_embeddings)?;
            let store = load_embeddings(&emb_path)?;
            let query_store = load_embeddings(&query_emb_path)?;
            for query in &queries {
                let vector = query_store
                    .get(&query.id)
                    .ok_or_else(|| anyhow!("no query embedding for {}", query.id))?;
                let results = store.search(vector, k).map_err(|e| anyhow!("{e}"))?;
                entries.extend(results_to_entries(&query.id, &results, "dense"));
            }
            inputs.push(("embeddings", emb_path));
            inputs.push(("query_embeddings", query_emb_path));
        }
        other => bail!("unknown retrieval.mode {other:?} (expected \"bm25\" or \"dense\")"),
    }

    write_run(&entries, &out_path)?;
    println!("wrote {} entries to {}", entries.len(), out_path.display());
    let input_refs: Vec<(&str, &Path)> = inputs.iter().map(|(n, p)| (*n, p.as_path())).collect();
    write_manifest(config, "retrieve", &input_refs, None)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// rerank

fn cmd_rerank(config: &PipelineConfig, args: RerankArgs, out: Option<PathBuf>) -> Result<()> {
    let corpus_path = config.require("paths.corpus", &config.paths.corpus)?;
    let queries_path = config.require("paths.queries", &config.paths.queries)?;
    let corpus = load_corpus(&corpus_path)?;
    let queries: HashMap<String, Query> =
        load_queries(&queries_path)?.into_iter().map(|q| (q.id.clone(), q)).collect();
    let run_in = load_run(&args.run_in)?;

    let mut rerank_config = config.rerank.clone();
    if let Some(alpha) = args.alpha {
        rerank_config.alpha = alpha;
    }
    if let Some(k) = args.k {
        rerank_config.candidates = k;
    }

    let backend = chat_backend(&config.gateway, &config.gateway.student_model, config.gateway.mock_fixture.as_ref())?;
    let prompts = prompt_library(config)?;

    // Group the incoming run by query, rank order preserved.
    let mut by_query: BTreeMap<String, Vec<&RunEntry>> = BTreeMap::new();
    for e in &run_in {
        by_query.entry(e.qid.clone()).or_default().push(e);
    }

    let out_path = out.unwrap_or_else(|| config.paths.output_dir.join("reranked.run"));
    let expl_path = out_path.with_extension("explanations.jsonl");
    let mut entries = Vec::new();
    let mut explanations = Vec::new();

    for (qid, candidates) in &by_query {
        let query = queries
            .get(qid)
            .ok_or_else(|| anyhow!("run references query {qid} missing from the query file"))?;
        let definition = if args.instruct {
            let def = config.relevance_definitions.get(&query.domain).ok_or_else(|| {
                anyhow!("--instruct set but no relevance definition configured for domain {:?}", query.domain)
            })?;
            Some(def.as_str())
        } else {
            None
        };
        let retrieval: Vec<rankpipe::core::RetrievalResult> = candidates
            .iter()
            .map(|e| rankpipe::core::RetrievalResult {
                doc_id: e.docid.clone(),
                score: e.score,
                rank: e.rank,
            })
            .collect();
        let scored = rerank(
            qid,
            &query.text,
            &retrieval,
            &corpus,
            backend.as_ref(),
            &prompts,
            definition,
            &rerank_config,
        )?;
        for (i, doc) in scored.iter().enumerate() {
            entries.push(RunEntry {
                qid: qid.clone(),
                docid: doc.doc_id.clone(),
                rank: (i + 1) as u32,
                score: doc.combined_score,
                tag: "interank".to_string(),
            });
            explanations.push(ExplanationRecord {
                qid: qid.clone(),
                docid: doc.doc_id.clone(),
                label: doc.label,
                parse_ok: doc.parse_ok,
                explanation: doc.explanation.clone(),
            });
        }
    }

    write_run(&entries, &out_path)?;
    write_explanations(&explanations, &expl_path)?;
    println!("wrote {} entries to {}", entries.len(), out_path.display());
    write_manifest(
        config,
        "rerank",
        &[("corpus", &corpus_path), ("queries", &queries_path), ("run_in", &args.run_in)],
        None,
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// datagen

fn cmd_datagen(config: &PipelineConfig, args: DatagenArgs, out: Option<PathBuf>) -> Result<()> {
    let seeds_path = config.require("paths.seeds", &config.paths.seeds)?;

    // Fail before any work if live search is configured without credentials.
    let search: Box<dyn SearchClient> = match config.search.mode.as_str() {
        "fixture" => {
            let fixture = config.search.fixture.as_ref().ok_or_else(|| {
                anyhow!("search.mode is \"fixture\" but search.fixture is not set")
            })?;
            Box::new(FixtureSearchClient::load(fixture)?)
        }
        "http" => {
            let key = std::env::var(&config.search.api_key_env).map_err(|_| {
                anyhow!("live search requires the {} environment variable", config.search.api_key_env)
            })?;
            Box::new(HttpSearchClient::new(&config.search.base_url, key))
        }
        other => bail!("unknown search.mode {other:?}"),
    };
    let fetcher: Box<dyn Fetcher> = match &config.search.fetch_fixture {
        Some(path) => Box::new(FixtureFetcher::load(path)?),
        None => Box::new(HttpFetcher::new()),
    };

    let teacher_fixture = config
        .gateway
        .teacher_mock_fixture
        .as_ref()
        .or(config.gateway.mock_fixture.as_ref());
    let backend = chat_backend(&config.gateway, &config.gateway.teacher_model, teacher_fixture)?;
    let prompts = prompt_library(config)?;

    let seeds = load_seeds(&seeds_path)?;
    let exclusion: HashSet<String> = match &config.paths.exclusion {
        Some(path) => std::fs::read_to_string(path)
            .with_context(|| format!("reading exclusion file {}", path.display()))?
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(normalize_query)
            .collect(),
        None => HashSet::new(),
    };
    let (seeds, dropped) = contamination_filter(seeds, &exclusion);

    let mut sample_rng = substream(config.rng_seed, "datagen-sample");
    let seeds = match args.limit {
        Some(n) => round_robin_sample(&seeds, n, &mut sample_rng),
        None => seeds,
    };

    let mut manifest = DatagenManifest { seeds: seeds.len(), ..Default::default() };
    let mut rng = substream(config.rng_seed, "datagen");
    let mut records = Vec::new();
    for seed in &seeds {
        records.extend(datagen::generate_synth(
            seed,
            backend.as_ref(),
            &prompts,
            search.as_ref(),
            fetcher.as_ref(),
            &mut rng,
            &mut manifest,
            &config.gateway.teacher_model,
            config.rerank.doc_token_budget,
        )?);
    }

    let out_path = out.unwrap_or_else(|| config.paths.output_dir.join("synth.jsonl"));
    let mut shuffle_rng = substream(config.rng_seed, "shuffle");
    datagen::emit_synth_dataset(&records, &out_path, &mut shuffle_rng)?;

    let sft_path = config.paths.output_dir.join("sft.jsonl");
    emit_sft_dataset(&records, &prompts, &sft_path, config.rerank.doc_token_budget)?;

    println!(
        "wrote {} records to {} (contamination-dropped {dropped})",
        records.len(),
        out_path.display()
    );
    write_manifest(
        config,
        "datagen",
        &[("seeds", &seeds_path)],
        Some(serde_json::json!({
            "seeds": manifest.seeds,
            "linked_found": manifest.linked_found,
            "fetched": manifest.fetched,
            "annotated": manifest.annotated,
            "skipped": manifest.skipped,
            "websearch_ok": manifest.websearch_ok,
            "contamination_dropped": dropped,
        })),
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// refine

fn reward_client<'a>(
    config: &'a PipelineConfig,
    backend: &'a dyn ChatBackend,
    prompts: &'a PromptLibrary,
) -> Result<Box<dyn RewardClient + 'a>> {
    match config.gateway.reward_mode.as_str() {
        "mock" => {
            let fixture = config.gateway.reward_mock_fixture.as_ref().ok_or_else(|| {
                anyhow!("gateway.reward_mode is \"mock\" but reward_mock_fixture is not set")
            })?;
            Ok(Box::new(MockRewardClient::load(fixture)?))
        }
        "endpoint" => {
            let url = config.gateway.reward_endpoint.as_ref().ok_or_else(|| {
                anyhow!("gateway.reward_mode is \"endpoint\" but reward_endpoint is not set")
            })?;
            Ok(Box::new(ScoringEndpointClient::new(url)))
        }
        "chat" => Ok(Box::new(ChatRewardClient::new(backend, prompts, config.rerank.doc_token_budget))),
        other => bail!("unknown gateway.reward_mode {other:?}"),
    }
}

fn cmd_refine(config: &PipelineConfig, args: RefineArgs, out: Option<PathBuf>) -> Result<()> {
    let pairs = load_pairs(&args.pairs)?;
    let mut refine_config = config.refine.clone();
    if let Some(tau) = args.tau {
        refine_config.tau = tau;
    }
    if let Some(m) = args.m {
        refine_config.m = m;
    }
    if let Some(k) = args.k {
        refine_config.k = k;
    }
    refine_config.validate()?;

    let backend = chat_backend(&config.gateway, &config.gateway.student_model, config.gateway.mock_fixture.as_ref())?;
    let prompts = prompt_library(config)?;
    let rewards = reward_client(config, backend.as_ref(), &prompts)?;

    let iterations: Vec<u32> = match args.iter {
        Some(t) => vec![t],
        None => (1..=refine_config.iterations).collect(),
    };
    for t in iterations {
        let out_path = match (&out, args.iter) {
            (Some(path), Some(_)) => path.clone(),
            _ => config.paths.output_dir.join(format!("d_{t}.jsonl")),
        };
        let report = run_iteration(
            &pairs,
            backend.as_ref(),
            rewards.as_ref(),
            &prompts,
            &refine_config,
            t,
            &out_path,
            config.rerank.doc_token_budget,
        )?;
        println!(
            "iteration {t}: {} pairs, {} degenerate, {} kept, mean weight {:.4} -> {}",
            report.pairs,
            report.degenerate,
            report.kept_examples,
            report.mean_weight,
            out_path.display()
        );
        let manifest_path = config.paths.output_dir.join(format!("refine_manifest_{t}.json"));
        std::fs::write(&manifest_path, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    write_manifest(config, "refine", &[("pairs", &args.pairs)], None)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// eval / compare

fn query_domains(config: &PipelineConfig) -> Result<(PathBuf, HashMap<String, String>)> {
    let queries_path = config.require("paths.queries", &config.paths.queries)?;
    let map = load_queries(&queries_path)?
        .into_iter()
        .map(|q| (q.id, q.domain))
        .collect();
    Ok((queries_path, map))
}

fn cmd_eval(config: &PipelineConfig, args: EvalArgs, out: Option<PathBuf>) -> Result<()> {
    if args.runs.is_empty() {
        bail!("eval needs at least one run file");
    }
    let qrels_path = config.require("paths.qrels", &config.paths.qrels)?;
    let qrels = load_qrels(&qrels_path)?;
    let (queries_path, domains) = query_domains(config)?;
    let k = args.k.unwrap_or(10);

    let mut reports = BTreeMap::new();
    for run_path in &args.runs {
        let run = load_run(run_path)?;
        let report = evaluate_run(&run, &qrels, &domains, k)?;
        println!("== {}", run_path.display());
        print!("{}", render_table(&report));
        reports.insert(run_path.display().to_string(), report);
    }

    let out_path = out.unwrap_or_else(|| config.paths.output_dir.join("eval_report.json"));
    std::fs::write(&out_path, serde_json::to_string_pretty(&reports)? + "\n")?;
    write_manifest(config, "eval", &[("qrels", &qrels_path), ("queries", &queries_path)], None)?;
    Ok(())
}

fn cmd_compare(config: &PipelineConfig, args: CompareArgs) -> Result<()> {
    let qrels_path = config.require("paths.qrels", &config.paths.qrels)?;
    let qrels = load_qrels(&qrels_path)?;
    let k = args.k.unwrap_or(10);

    let run_a = load_run(&args.run_a)?;
    let run_b = load_run(&args.run_b)?;
    let (scores_a, _) = per_query_ndcg(&run_a, &qrels, k)?;
    let (scores_b, _) = per_query_ndcg(&run_b, &qrels, k)?;
    let result = compare_runs(&scores_a, &scores_b)?;

    println!(
        "t={:.6} n={} mean_diff={:.6}",
        result.t, result.n, result.mean_difference
    );
    println!("p={}", result.p);
    println!("{}", if result.p < 0.05 { "PASS (p < 0.05)" } else { "FAIL (p >= 0.05)" });
    Ok(())
}
