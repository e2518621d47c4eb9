//! `rei`: build, query, benchmark, tune, and inspect n-gram bit-vector
//! indexes over line-oriented logs.
//!
//! stdout carries only data (line ids, CSV, tables, metric values);
//! every diagnostic, timing, and summary goes to stderr so output can be
//! piped.

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rei::baselines::{SignatureConfig, DEFAULT_SIGNATURE_SEED};
use rei::bench::{sweep, BenchConfig, IndexKind, SweepAxes};
use rei::grams::{
    bigram_in_trigram_overlap, intersection_percentage, select_grams, selectivity,
    zipf_trigram_anomaly_probability, EnglishRanking, Strategy, ZipfParams,
};
use rei::tuner::{parse_budget, tune, TunerConfig};
use rei::{
    build_index, deserialize, load_corpus, load_queries, query_indexed, serialize, Corpus,
    GramDictionary, IndexConfig, RegexMatcher, Workload,
};

#[derive(Parser)]
#[command(name = "rei", version, about = "Regex-prefiltering n-gram index for log search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select grams, build a bit-vector index, and write it to a file.
    Build(BuildArgs),
    /// Answer one regex through an index file; prints matching line ids.
    Query(QueryArgs),
    /// Sweep index configurations and emit one CSV row per config.
    Bench(BenchArgs),
    /// Recommend (k, m) under a size budget; prints the ranked table.
    Tune(TuneArgs),
    /// Print gram statistics and the analytical anomaly probability.
    Stats(StatsArgs),
}

fn positive(s: &str) -> Result<usize, String> {
    let value: usize = s.parse().map_err(|e| format!("{e}"))?;
    if value == 0 {
        return Err("must be at least 1".to_string());
    }
    Ok(value)
}

fn budget_bits(s: &str) -> Result<u64, String> {
    parse_budget(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct BuildArgs {
    /// Log file, one record per line.
    #[arg(long)]
    logs: PathBuf,
    /// Query file, one regex per line; required unless --strategy english.
    #[arg(long)]
    queries: Option<PathBuf>,
    /// Replacement English bigram ranking (gram TAB count per line,
    /// non-increasing counts); only meaningful with --strategy english.
    #[arg(long)]
    english_ranking: Option<PathBuf>,
    /// Gram length.
    #[arg(long, default_value_t = 3, value_parser = positive)]
    n: usize,
    /// Dictionary size; shrinks if fewer grams exist.
    #[arg(long, default_value_t = 64, value_parser = positive)]
    k: usize,
    /// Lines per group.
    #[arg(long, default_value_t = 1, value_parser = positive)]
    m: usize,
    /// Selection strategy: freq, bene, incr_bene, or english.
    #[arg(long, default_value_t = Strategy::Freq, value_parser = Strategy::from_str)]
    strategy: Strategy,
    /// Condition incr_bene on the previous pick only.
    #[arg(long)]
    pairwise: bool,
    /// Build group vectors on all cores.
    #[arg(long)]
    parallel: bool,
    /// Output index file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    /// Index file written by `rei build`.
    #[arg(long)]
    index: PathBuf,
    /// The log file the index was built from.
    #[arg(long)]
    logs: PathBuf,
    /// Regex to answer.
    #[arg(long)]
    pattern: String,
}

#[derive(Args)]
struct BenchArgs {
    /// Log file, one record per line.
    #[arg(long)]
    logs: PathBuf,
    /// Query file, one regex per line.
    #[arg(long)]
    queries: PathBuf,
    /// Index kinds to sweep: bitvector, inverted, signature, none.
    #[arg(long, value_delimiter = ',', required = true, value_parser = IndexKind::from_str)]
    kinds: Vec<IndexKind>,
    /// Gram lengths to sweep.
    #[arg(long, value_delimiter = ',', default_value = "3", value_parser = positive)]
    n: Vec<usize>,
    /// Dictionary sizes to sweep.
    #[arg(long, value_delimiter = ',', default_value = "64", value_parser = positive)]
    k: Vec<usize>,
    /// Granularities to sweep.
    #[arg(long, value_delimiter = ',', default_value = "1", value_parser = positive)]
    m: Vec<usize>,
    /// Selection strategy for every configuration.
    #[arg(long, default_value_t = Strategy::Freq, value_parser = Strategy::from_str)]
    strategy: Strategy,
    /// Condition incr_bene on the previous pick only.
    #[arg(long)]
    pairwise: bool,
    /// Timed repetitions of the query set per configuration (>= 3).
    #[arg(long, default_value_t = 10, value_parser = positive)]
    runs: usize,
    /// Signature width in bits (64 or 128).
    #[arg(long, default_value_t = 64)]
    sig_w: usize,
    /// Hash functions per gram signature (1..=4).
    #[arg(long, default_value_t = 1)]
    sig_h: usize,
    /// Signature hash seed.
    #[arg(long, default_value_t = DEFAULT_SIGNATURE_SEED)]
    sig_seed: u64,
}

#[derive(Args)]
struct TuneArgs {
    /// Log file, one record per line.
    #[arg(long)]
    logs: PathBuf,
    /// Query file, one regex per line.
    #[arg(long)]
    queries: PathBuf,
    /// Gram length.
    #[arg(long, default_value_t = 3, value_parser = positive)]
    n: usize,
    /// Index size budget: bare bits, or a number with B/KB/MB/GB suffix.
    #[arg(long, value_parser = budget_bits)]
    budget: u64,
    /// Candidate granularities.
    #[arg(long, value_delimiter = ',', default_value = "1,8,32,64,128,256,512", value_parser = positive)]
    granularities: Vec<usize>,
    /// Cap on the dictionary size.
    #[arg(long, value_parser = positive)]
    max_k: Option<usize>,
    /// Estimate block containment from this many leading blocks only.
    #[arg(long, value_parser = positive)]
    sample_blocks: Option<usize>,
}

#[derive(Args)]
struct StatsArgs {
    /// Log file for corpus-dependent metrics.
    #[arg(long)]
    logs: Option<PathBuf>,
    /// Query file for selection-dependent metrics.
    #[arg(long)]
    queries: Option<PathBuf>,
    /// Gram length for --compare.
    #[arg(long, default_value_t = 3, value_parser = positive)]
    n: usize,
    /// Dictionary size for --compare and --overlap.
    #[arg(long, default_value_t = 64, value_parser = positive)]
    k: usize,
    /// Print the fraction of lines lacking this gram (needs --logs).
    #[arg(long)]
    gram: Option<String>,
    /// Print the gram agreement of two strategies, e.g. freq,bene
    /// (needs --logs and --queries).
    #[arg(long, value_delimiter = ',', value_parser = Strategy::from_str)]
    compare: Option<Vec<Strategy>>,
    /// Print how many top-k bigrams survive inside the top-k trigrams
    /// (needs --logs and --queries).
    #[arg(long)]
    overlap: bool,
    /// Zipf alphabet size for the anomaly probability.
    #[arg(long, requires = "zipf_a")]
    zipf_d: Option<u32>,
    /// Zipf exponent for the anomaly probability.
    #[arg(long, requires = "zipf_d")]
    zipf_a: Option<f64>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Build(args) => cmd_build(args),
        Command::Query(args) => cmd_query(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Tune(args) => cmd_tune(args),
        Command::Stats(args) => cmd_stats(args),
    }
}

/// Loads the workload named by --logs/--queries with the given
/// granularity.
fn load_workload(logs: &PathBuf, queries: &PathBuf, m: usize) -> Result<Workload> {
    let corpus = load_corpus(logs, m).with_context(|| format!("loading {}", logs.display()))?;
    let patterns =
        load_queries(queries).with_context(|| format!("loading {}", queries.display()))?;
    Ok(Workload::new(corpus, patterns))
}

fn cmd_build(args: BuildArgs) -> Result<()> {
    let corpus = load_corpus(&args.logs, args.m)
        .with_context(|| format!("loading {}", args.logs.display()))?;
    eprintln!(
        "loaded {} lines in {} groups of {}",
        corpus.len(),
        corpus.num_groups(),
        args.m
    );

    let selection_start = Instant::now();
    let (dictionary, corpus) = select_dictionary(&args, corpus)?;
    let selection_secs = selection_start.elapsed().as_secs_f64();
    if dictionary.is_empty() {
        bail!("the query set yields no grams of length {}; nothing to index", args.n);
    }
    eprintln!(
        "selected {} grams ({}) in {selection_secs:.3}s",
        dictionary.len(),
        args.strategy
    );

    let config = IndexConfig::new(args.n, dictionary.len(), args.m)?;
    let build_start = Instant::now();
    let index = if args.parallel {
        rei::build_index_parallel(&corpus, &dictionary, config)?
    } else {
        build_index(&corpus, &dictionary, config)?
    };
    eprintln!("built index in {:.3}s", build_start.elapsed().as_secs_f64());

    serialize(&index, &args.out).with_context(|| format!("writing {}", args.out.display()))?;
    let bytes = std::fs::metadata(&args.out)?.len();
    eprintln!("wrote {} ({bytes} bytes)", args.out.display());
    Ok(())
}

/// Resolves the dictionary for `build`, enforcing the per-strategy query
/// file requirement.
fn select_dictionary(args: &BuildArgs, corpus: Corpus) -> Result<(GramDictionary, Corpus)> {
    if args.strategy == Strategy::English {
        if args.queries.is_some() {
            eprintln!("note: --queries is ignored with --strategy english");
        }
        let dictionary = match &args.english_ranking {
            Some(path) => EnglishRanking::from_path(path)
                .with_context(|| format!("loading {}", path.display()))?
                .top(args.k)?,
            None => rei::grams::english_grams(args.k)?,
        };
        return Ok((dictionary, corpus));
    }
    let queries_path = args
        .queries
        .as_ref()
        .with_context(|| format!("--strategy {} requires --queries", args.strategy))?;
    let patterns = load_queries(queries_path)
        .with_context(|| format!("loading {}", queries_path.display()))?;
    let workload = Workload::new(corpus, patterns);
    let dictionary = select_grams(&workload, args.n, args.k, args.strategy, args.pairwise)?;
    Ok((dictionary, workload.corpus))
}

fn cmd_query(args: QueryArgs) -> Result<()> {
    let index =
        deserialize(&args.index).with_context(|| format!("reading {}", args.index.display()))?;
    let corpus = load_corpus(&args.logs, index.config().m)
        .with_context(|| format!("loading {}", args.logs.display()))?;
    if index.num_lines() != corpus.len() {
        bail!(
            "index covers {} lines but {} has {}",
            index.num_lines(),
            args.logs.display(),
            corpus.len()
        );
    }
    if index.corpus_digest() != corpus.digest() {
        bail!(
            "{} does not match the corpus the index was built from (content digest differs)",
            args.logs.display()
        );
    }

    let result = query_indexed(&index, &corpus, &args.pattern, &RegexMatcher)?;
    let mut stdout = String::with_capacity(result.matching_ids.len() * 8);
    for id in &result.matching_ids {
        stdout.push_str(&id.to_string());
        stdout.push('\n');
    }
    print!("{stdout}");
    eprintln!(
        "groups passed: {}/{}, lines scanned: {}/{}, matches: {}",
        result.groups_passed,
        index.num_groups(),
        result.lines_scanned,
        corpus.len(),
        result.lines_matched
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let workload = load_workload(&args.logs, &args.queries, 1)?;
    let signature = SignatureConfig::new(args.sig_w, args.sig_h, args.sig_seed)?;
    let base = BenchConfig {
        kind: args.kinds[0],
        n: args.n[0],
        k: args.k[0],
        m: args.m[0],
        strategy: args.strategy,
        pairwise: args.pairwise,
        signature,
        runs: args.runs,
    };
    let axes = SweepAxes {
        kinds: args.kinds,
        ns: args.n,
        ks: args.k,
        ms: args.m,
    };
    let report = sweep(&workload, &axes, &base)?;
    print!("{}", report.to_csv());
    for (label, message) in &report.failures {
        eprintln!("failed: {label}: {message}");
    }
    if !report.failures.is_empty() {
        bail!("{} configuration(s) failed", report.failures.len());
    }
    Ok(())
}

fn cmd_tune(args: TuneArgs) -> Result<()> {
    let workload = load_workload(&args.logs, &args.queries, 1)?;
    let mut config = TunerConfig::new(args.budget);
    config.granularities = args.granularities;
    config.max_k = args.max_k;
    config.sample_blocks = args.sample_blocks;
    let report = tune(&workload, args.n, &config)?;
    if let Some(blocks) = report.sample_blocks {
        eprintln!("note: containment probabilities sampled from {blocks} leading blocks per granularity");
    }
    println!("m\tk\tscore\tsize_bits\tstorage_bytes\tefficiency");
    for candidate in &report.ranked {
        println!(
            "{}\t{}\t{:.6e}\t{}\t{}\t{:.6e}",
            candidate.m,
            candidate.k,
            candidate.score,
            candidate.size_bits,
            candidate.storage_bytes,
            candidate.efficiency
        );
    }
    eprintln!(
        "best: k={} m={} ({} bits within budget {})",
        report.best.k, report.best.m, report.best.size_bits, args.budget
    );
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    let mut printed = false;

    if let Some(gram) = &args.gram {
        let logs = args.logs.as_ref().context("--gram requires --logs")?;
        let corpus = load_corpus(logs, 1)?;
        let value = selectivity(gram.as_bytes(), &corpus)?;
        println!("selectivity {value:.6}");
        printed = true;
    }

    if let Some(strategies) = &args.compare {
        if strategies.len() != 2 {
            bail!("--compare takes exactly two strategies, e.g. freq,bene");
        }
        let workload = comparison_workload(&args)?;
        let a = select_grams(&workload, args.n, args.k, strategies[0], false)?;
        let b = select_grams(&workload, args.n, args.k, strategies[1], false)?;
        let value = intersection_percentage(&a, &b)?;
        println!("intersection_percentage {value:.6}");
        printed = true;
    }

    if args.overlap {
        let workload = comparison_workload(&args)?;
        let bigrams = select_grams(&workload, 2, args.k, Strategy::Freq, false)?;
        let trigrams = select_grams(&workload, 3, args.k, Strategy::Freq, false)?;
        let value = bigram_in_trigram_overlap(&bigrams, &trigrams)?;
        println!("bigram_in_trigram_overlap {value:.6}");
        printed = true;
    }

    if let (Some(d), Some(a)) = (args.zipf_d, args.zipf_a) {
        if d < 2 {
            bail!("--zipf-d must be at least 2");
        }
        if !(a.is_finite() && a >= 0.0) {
            bail!("--zipf-a must be finite and non-negative");
        }
        let value = zipf_trigram_anomaly_probability(&ZipfParams::new(d, a));
        println!("zipf_anomaly_probability {value:.6}");
        printed = true;
    }

    if !printed {
        bail!("nothing to compute: pass --gram, --compare, --overlap, or --zipf-d/--zipf-a");
    }
    Ok(())
}

fn comparison_workload(args: &StatsArgs) -> Result<Workload> {
    let logs = args
        .logs
        .as_ref()
        .context("--compare/--overlap require --logs")?;
    let queries = args
        .queries
        .as_ref()
        .context("--compare/--overlap require --queries")?;
    load_workload(logs, queries, 1)
}
