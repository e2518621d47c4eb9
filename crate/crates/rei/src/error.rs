//! Error types, one enum per subsystem.

use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::grams::Gram;

/// Errors from corpus and query-file loading.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("granularity must be at least 1")]
    ZeroGranularity,
    #[error("invalid regex on line {line}: {message}")]
    InvalidQuery { line: usize, message: String },
}

/// Errors from gram selection and dictionary construction.
#[derive(Debug, Error)]
pub enum SelectError {
    #[error("query set is empty: nothing to select from")]
    EmptyQuerySet,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k = {k} exceeds ranking table size {table_size}")]
    KExceedsTable { k: usize, table_size: usize },
    #[error("invalid regex {pattern:?}: {message}")]
    InvalidRegex { pattern: String, message: String },
    #[error("duplicate gram {gram} in dictionary")]
    DuplicateGram { gram: Gram },
    #[error("invalid ranking file line {line}: {message}")]
    InvalidRanking { line: usize, message: String },
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Errors from gram statistics operations.
#[derive(Debug, Error)]
pub enum StatsError {
    #[error("dictionary sizes differ: {a} vs {b}")]
    SizeMismatch { a: usize, b: usize },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("bigram dictionary is empty")]
    EmptyDictionary,
}

/// Errors from index construction and (de)serialization.
#[derive(Debug, Error)]
pub enum IndexError {
    #[error("invalid index config: {message}")]
    InvalidConfig { message: String },
    #[error("dictionary has {dictionary_len} grams but config.k is {k}")]
    DictionarySizeMismatch { dictionary_len: usize, k: usize },
    #[error("corpus granularity {corpus_m} does not match config.m {m}")]
    GranularityMismatch { corpus_m: usize, m: usize },
    #[error("signature width must be 64 or 128, got {w}")]
    InvalidSignatureWidth { w: usize },
    #[error("signature hash bits must be in 1..=4, got {h}")]
    InvalidHashBits { h: usize },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic {found:?}, expected \"REI1\"")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported index version {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("truncated index file: {message}")]
    Truncated { message: String },
    #[error("corrupt index file: {message}")]
    Corrupt { message: String },
}

/// Errors from query evaluation.
#[derive(Debug, Error)]
pub enum QueryError {
    #[error("invalid regex {pattern:?}: {message}")]
    InvalidRegex { pattern: String, message: String },
    #[error("mask width {mask_k} does not match index k {index_k}")]
    MaskMismatch { mask_k: usize, index_k: usize },
    #[error("index was built from a different corpus: index has {index_lines} lines at m={index_m}, corpus has {corpus_lines} at m={corpus_m}")]
    CorpusMismatch {
        index_lines: u64,
        index_m: usize,
        corpus_lines: u64,
        corpus_m: usize,
    },
    #[error("matcher failure: {message}")]
    Matcher { message: String },
}

/// Errors from the (k, m) tuner.
#[derive(Debug, Error)]
pub enum TuneError {
    #[error("query set is empty: nothing to model")]
    EmptyQuerySet,
    #[error("corpus is empty: nothing to model")]
    EmptyCorpus,
    #[error("queries yield no candidate grams")]
    NoCandidateGrams,
    #[error("no candidate granularities given")]
    EmptyGranularities,
    #[error("granularity must be at least 1")]
    ZeroGranularity,
    #[error("no probability entry for gram {gram} at m={m}")]
    MissingProbability { gram: Gram, m: usize },
    #[error("budget of {budget_bits} bits cannot fit k=1 at any candidate granularity")]
    BudgetTooSmall { budget_bits: u64 },
    #[error("invalid budget {input:?}: {message}")]
    InvalidBudget { input: String, message: String },
    #[error(transparent)]
    Select(#[from] SelectError),
}

/// Errors from the benchmark harness.
#[derive(Debug, Error)]
pub enum BenchError {
    #[error("trimmed mean needs at least 3 samples, got {got}")]
    TooFewSamples { got: usize },
    #[error("benchmark needs at least 3 runs, got {got}")]
    TooFewRuns { got: usize },
    #[error("empty sweep axis: {axis}")]
    EmptyAxis { axis: &'static str },
    #[error("indexed results for {pattern:?} disagree with the full scan")]
    ResultMismatch { pattern: String },
    #[error(transparent)]
    Select(#[from] SelectError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Query(#[from] QueryError),
}
