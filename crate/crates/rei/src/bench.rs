//! Benchmark harness: build-time, index-size, match-time, and
//! filter-pass measurements with trimmed-mean timing, emitted as CSV.
//!
//! Correctness comes first: every configuration's indexed results are
//! checked against a full scan before any timing is reported, so a report
//! can never contain a wrong-answer configuration.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::baselines::{
    build_inverted, build_signature, query_inverted, query_signature, SignatureConfig,
};
use crate::corpus::Workload;
use crate::error::BenchError;
use crate::grams::{select_grams, Strategy};
use crate::index::{build_index, index_size_bytes, IndexConfig};
use crate::query::{query_indexed, query_scan, QueryResult, RegexMatcher};

/// Which index answers the queries; `None` is the scan-everything
/// baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndexKind {
    BitVector,
    Inverted,
    Signature,
    None,
}

impl IndexKind {
    pub fn name(self) -> &'static str {
        match self {
            IndexKind::BitVector => "bitvector",
            IndexKind::Inverted => "inverted",
            IndexKind::Signature => "signature",
            IndexKind::None => "none",
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndexKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bitvector" => Ok(IndexKind::BitVector),
            "inverted" => Ok(IndexKind::Inverted),
            "signature" => Ok(IndexKind::Signature),
            "none" => Ok(IndexKind::None),
            other => Err(format!(
                "unknown index kind {other:?} (expected bitvector, inverted, signature, or none)"
            )),
        }
    }
}

/// Mean after dropping exactly one maximum and one minimum sample.
pub fn trimmed_mean(samples: &[Duration]) -> Result<Duration, BenchError> {
    if samples.len() < 3 {
        return Err(BenchError::TooFewSamples {
            got: samples.len(),
        });
    }
    let min = samples.iter().min().expect("non-empty");
    let max = samples.iter().max().expect("non-empty");
    let total: Duration = samples.iter().sum();
    let kept = total - *min - *max;
    Ok(kept / (samples.len() as u32 - 2))
}

/// One benchmark configuration: the index shape plus how its dictionary
/// is selected and how often the query set is timed.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub kind: IndexKind,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub strategy: Strategy,
    pub pairwise: bool,
    pub signature: SignatureConfig,
    /// Timed repetitions of the full query set; at least 3.
    pub runs: usize,
}

impl BenchConfig {
    pub fn new(kind: IndexKind, n: usize, k: usize, m: usize) -> Self {
        BenchConfig {
            kind,
            n,
            k,
            m,
            strategy: Strategy::Freq,
            pairwise: false,
            signature: SignatureConfig::default(),
            runs: 10,
        }
    }
}

/// One measured configuration, one CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub kind: IndexKind,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    /// Selection plus construction, seconds. Zero for the scan baseline.
    pub build_seconds: f64,
    pub index_bytes: u64,
    /// Trimmed-mean seconds for the full query set.
    pub match_seconds: f64,
    /// Mean per-query percentage of lines the filter let through.
    pub pass_percent: f64,
}

/// A full sweep: one record per successful configuration plus the
/// failures that were skipped.
#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    /// (configuration label, error message) of configs that failed.
    pub failures: Vec<(String, String)>,
}

/// Frozen CSV schema; sweeps stay diffable across versions.
pub const CSV_HEADER: &str = "kind,n,k,m,build_s,index_bytes,match_s,pass_pct";

impl BenchRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{},{:.6},{:.4}",
            self.kind,
            self.n,
            self.k,
            self.m,
            self.build_seconds,
            self.index_bytes,
            self.match_seconds,
            self.pass_percent
        )
    }
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for record in &self.records {
            out.push_str(&record.to_csv_row());
            out.push('\n');
        }
        out
    }
}

/// Percentage of lines that survived filtering, averaged per query; an
/// empty corpus filters nothing and counts as 100.
fn mean_pass_percent(per_query: &[QueryResult], total_lines: usize) -> f64 {
    if per_query.is_empty() {
        return 100.0;
    }
    let sum: f64 = per_query
        .iter()
        .map(|r| {
            if total_lines == 0 {
                100.0
            } else {
                r.lines_scanned as f64 / total_lines as f64 * 100.0
            }
        })
        .sum();
    sum / per_query.len() as f64
}

/// Measures one configuration: time selection + build once, verify every
/// query against the scan ground truth, then time `runs` passes of the
/// full query set and keep the trimmed mean.
pub fn run_workload(workload: &Workload, config: &BenchConfig) -> Result<BenchRecord, BenchError> {
    if config.runs < 3 {
        return Err(BenchError::TooFewRuns { got: config.runs });
    }
    let matcher = RegexMatcher;

    // Ground truth, untimed: the scan results define correctness.
    let truth: Vec<QueryResult> = workload
        .queries
        .iter()
        .map(|q| query_scan(&workload.corpus, q, &matcher))
        .collect::<Result<_, _>>()?;

    if config.kind == IndexKind::None {
        let mut samples = Vec::with_capacity(config.runs);
        for _ in 0..config.runs {
            let start = Instant::now();
            for pattern in &workload.queries {
                query_scan(&workload.corpus, pattern, &matcher)?;
            }
            samples.push(start.elapsed());
        }
        return Ok(BenchRecord {
            kind: IndexKind::None,
            n: 0,
            k: 0,
            m: 1,
            build_seconds: 0.0,
            index_bytes: 0,
            match_seconds: trimmed_mean(&samples)?.as_secs_f64(),
            pass_percent: 100.0,
        });
    }

    let corpus = workload.corpus.with_granularity(config.m).map_err(|e| {
        BenchError::Index(crate::error::IndexError::InvalidConfig {
            message: e.to_string(),
        })
    })?;
    let regrouped = Workload::new(corpus, workload.queries.clone());

    // Build phase, timed: gram selection plus index construction. The
    // dictionary may come back smaller than k when fewer grams exist.
    let build_start = Instant::now();
    let dictionary = select_grams(
        &regrouped,
        config.n,
        config.k,
        config.strategy,
        config.pairwise,
    )?;
    let index_config = IndexConfig::new(config.n, dictionary.len(), config.m)?;

    enum Built {
        BitVector(crate::index::BitVectorIndex),
        Inverted(crate::baselines::InvertedIndex),
        Signature(crate::baselines::SignatureIndex),
    }
    let built = match config.kind {
        IndexKind::BitVector => {
            Built::BitVector(build_index(&regrouped.corpus, &dictionary, index_config)?)
        }
        IndexKind::Inverted => {
            Built::Inverted(build_inverted(&regrouped.corpus, &dictionary, index_config)?)
        }
        IndexKind::Signature => Built::Signature(build_signature(
            &regrouped.corpus,
            &dictionary,
            index_config,
            config.signature,
        )?),
        IndexKind::None => unreachable!("handled above"),
    };
    let build_seconds = build_start.elapsed().as_secs_f64();

    let run_query = |pattern: &str| -> Result<QueryResult, BenchError> {
        let result = match &built {
            Built::BitVector(idx) => query_indexed(idx, &regrouped.corpus, pattern, &matcher)?,
            Built::Inverted(idx) => query_inverted(idx, &regrouped.corpus, pattern, &matcher)?,
            Built::Signature(idx) => query_signature(idx, &regrouped.corpus, pattern, &matcher)?,
        };
        Ok(result)
    };

    // Correctness gate: indexed ids must equal the scan's before any
    // timing is believed.
    let mut per_query = Vec::with_capacity(workload.queries.len());
    for (pattern, expected) in workload.queries.iter().zip(&truth) {
        let result = run_query(pattern)?;
        if result.matching_ids != expected.matching_ids {
            return Err(BenchError::ResultMismatch {
                pattern: pattern.clone(),
            });
        }
        per_query.push(result);
    }

    let mut samples = Vec::with_capacity(config.runs);
    for _ in 0..config.runs {
        let start = Instant::now();
        for pattern in &workload.queries {
            run_query(pattern)?;
        }
        samples.push(start.elapsed());
    }

    let index_bytes = match &built {
        Built::BitVector(_) => {
            index_size_bytes(regrouped.corpus.len(), index_config.k, config.m) as u64
        }
        Built::Inverted(idx) => idx.min_required_bytes() as u64,
        Built::Signature(idx) => idx.size_bytes() as u64,
    };

    Ok(BenchRecord {
        kind: config.kind,
        n: config.n,
        k: index_config.k,
        m: config.m,
        build_seconds,
        index_bytes,
        match_seconds: trimmed_mean(&samples)?.as_secs_f64(),
        pass_percent: mean_pass_percent(&per_query, regrouped.corpus.len()),
    })
}

/// The configuration grid a sweep covers.
#[derive(Clone, Debug)]
pub struct SweepAxes {
    pub kinds: Vec<IndexKind>,
    pub ns: Vec<usize>,
    pub ks: Vec<usize>,
    pub ms: Vec<usize>,
}

/// Runs the cross-product of the axes. The scan baseline ignores n, k,
/// and m, so it collapses to a single configuration; exact duplicates run
/// once. A failing configuration is recorded and the sweep continues.
pub fn sweep(
    workload: &Workload,
    axes: &SweepAxes,
    base: &BenchConfig,
) -> Result<BenchReport, BenchError> {
    let check = |values: &[usize], axis: &'static str| {
        if values.is_empty() {
            Err(BenchError::EmptyAxis { axis })
        } else {
            Ok(())
        }
    };
    if axes.kinds.is_empty() {
        return Err(BenchError::EmptyAxis { axis: "kind" });
    }
    check(&axes.ns, "n")?;
    check(&axes.ks, "k")?;
    check(&axes.ms, "m")?;

    let mut report = BenchReport::default();
    let mut seen: HashSet<(IndexKind, usize, usize, usize)> = HashSet::new();
    for &kind in &axes.kinds {
        for &n in &axes.ns {
            for &k in &axes.ks {
                for &m in &axes.ms {
                    // The scan baseline has one canonical shape.
                    let key = if kind == IndexKind::None {
                        (kind, 0, 0, 1)
                    } else {
                        (kind, n, k, m)
                    };
                    if !seen.insert(key) {
                        continue;
                    }
                    let config = BenchConfig {
                        kind,
                        n,
                        k,
                        m,
                        ..base.clone()
                    };
                    let label = format!("kind={kind} n={n} k={k} m={m}");
                    match run_workload(workload, &config) {
                        Ok(record) => report.records.push(record),
                        Err(err) => report.failures.push((label, err.to_string())),
                    }
                }
            }
        }
    }
    Ok(report)
}
