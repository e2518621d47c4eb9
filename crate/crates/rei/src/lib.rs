//! # rei
//!
//! A regex-prefiltering index for line-oriented log corpora.
//!
//! Log searches are dominated by running a regex engine over every line.
//! Most lines cannot possibly match: a regex like `error: \d+ at vmID=` can
//! only match lines that contain the literals `"error: "` and `" at vmID="`,
//! and therefore every n-gram of those literals. `rei` exploits this by
//! building one k-bit vector per group of `m` consecutive lines, where bit
//! `i` records whether the i-th selected gram occurs anywhere in the group.
//! At query time the regex's required literals are turned into a bitmask and
//! a group is handed to the exact matcher only when it contains every indexed
//! gram the query needs. Absence of a required gram is proof of a non-match,
//! so filtering never drops a matching line.
//!
//! The crate provides:
//!
//! - [`corpus`]: loading and grouping of log lines and query workloads.
//! - [`grams`]: n-gram generation, conservative literal extraction from
//!   regexes, the four gram-selection strategies (frequency, benefit,
//!   incremental benefit, English bigrams), and gram statistics.
//! - [`index`]: the bit-vector index itself plus a bit-exact file format.
//! - [`query`]: mask construction, group filtering, and exact matching
//!   through a pluggable [`query::ExactMatcher`].
//! - [`baselines`]: a posting-list inverted index and superimposed-coding
//!   signature files over the same gram sets, for comparison.
//! - [`tuner`]: a size-budgeted estimator that picks `(k, m)` by expected
//!   filtering effectiveness per bit.
//! - [`bench`]: trimmed-mean timing harness emitting a fixed CSV schema.
//!
//! All gram handling is byte-oriented: lines are opaque byte strings and a
//! gram is a short byte string, so non-UTF-8 log data is fine.

pub mod baselines;
pub mod bench;
mod bits;
pub mod corpus;
mod error;
pub mod grams;
pub mod index;
pub mod query;
pub mod tuner;

pub use corpus::{load_corpus, load_queries, Corpus, LogLine, Workload};
pub use error::{BenchError, CorpusError, IndexError, QueryError, SelectError, StatsError, TuneError};
pub use grams::{generate_ngrams, Gram, GramCounts, GramDictionary, LiteralSet};
pub use index::{
    build_index, build_index_parallel, deserialize, index_size_bytes, serialize, BitVectorIndex,
    IndexConfig,
};
pub use query::{make_mask, query_indexed, query_scan, ExactMatcher, QueryMask, QueryResult, RegexMatcher};
