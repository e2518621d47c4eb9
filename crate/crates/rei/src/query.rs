//! Query evaluation: mask the query against the index, skip groups that
//! provably cannot match, and run an exact matcher on the rest.
//!
//! The index can only prove absence. A group passes the filter when every
//! indexed gram required by the query is present in the group; passing
//! groups still need exact matching, and skipped groups are guaranteed to
//! contain no match, so the result ids always equal a full scan's.

use crate::bits::{get_bit, words_for};
use crate::corpus::Corpus;
use crate::error::{QueryError, SelectError};
use crate::grams::{query_grams, GramDictionary};
use crate::index::BitVectorIndex;

/// A query's k-bit filter mask. Bit i is 1 when dictionary gram i is NOT
/// required by the query ("don't care"); 0 when the query requires it.
/// Padding bits are 1 so a group passes iff (vector OR mask) is all ones
/// word for word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryMask {
    words: Vec<u64>,
    k: usize,
}

impl QueryMask {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Mask bit i; 1 means "not required by this query".
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.k, "bit {i} out of range for k={}", self.k);
        get_bit(&self.words, i)
    }
}

/// Builds the filter mask of `pattern` against a dictionary: bit i is
/// cleared iff dictionary gram i occurs among the pattern's length-n
/// literal grams. A pattern with no extractable literals yields an
/// all-ones mask, which filters nothing.
pub fn make_mask(
    pattern: &str,
    dictionary: &GramDictionary,
    n: usize,
) -> Result<QueryMask, QueryError> {
    let grams = query_grams(pattern, n).map_err(|e| match e {
        SelectError::InvalidRegex { pattern, message } => {
            QueryError::InvalidRegex { pattern, message }
        }
        other => QueryError::Matcher {
            message: other.to_string(),
        },
    })?;
    let k = dictionary.len();
    let mut words = vec![!0u64; words_for(k)];
    for (gram, offset) in dictionary.iter() {
        if grams.contains(gram) {
            words[offset / 64] &= !(1u64 << (offset % 64));
        }
    }
    Ok(QueryMask { words, k })
}

/// Group ids whose bit-vector ORed with the mask is all ones, ascending.
/// Such groups contain every indexed gram the query requires; all other
/// groups cannot match.
pub fn filter_groups(
    index: &BitVectorIndex,
    mask: &QueryMask,
) -> Result<Vec<usize>, QueryError> {
    if mask.k != index.config().k {
        return Err(QueryError::MaskMismatch {
            mask_k: mask.k,
            index_k: index.config().k,
        });
    }
    let mut passing = Vec::new();
    for j in 0..index.num_groups() {
        let all_ones = index
            .group_words(j)
            .iter()
            .zip(&mask.words)
            .all(|(&v, &m)| v | m == !0);
        if all_ones {
            passing.push(j);
        }
    }
    Ok(passing)
}

/// A compiled pattern: reports whether it matches anywhere in a byte
/// string.
pub struct CompiledPattern(Box<dyn Fn(&[u8]) -> bool + Send + Sync>);

impl CompiledPattern {
    pub fn new(f: impl Fn(&[u8]) -> bool + Send + Sync + 'static) -> Self {
        CompiledPattern(Box::new(f))
    }

    pub fn is_match(&self, text: &[u8]) -> bool {
        (self.0)(text)
    }
}

/// The exact-matching seam. The index only prefilters; whatever engine is
/// plugged in here defines ground truth, and the correctness guarantee is
/// that indexed results equal that engine run over every line.
pub trait ExactMatcher {
    fn compile(&self, pattern: &str) -> Result<CompiledPattern, QueryError>;
}

/// The default matcher: the `regex` crate over raw bytes.
#[derive(Clone, Copy, Debug, Default)]
pub struct RegexMatcher;

impl ExactMatcher for RegexMatcher {
    fn compile(&self, pattern: &str) -> Result<CompiledPattern, QueryError> {
        let re = regex::bytes::Regex::new(pattern).map_err(|e| QueryError::InvalidRegex {
            pattern: pattern.to_string(),
            message: e.to_string(),
        })?;
        Ok(CompiledPattern::new(move |text| re.is_match(text)))
    }
}

/// Outcome of one query: the matching line ids plus filter-effectiveness
/// counters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryResult {
    /// Ids of matching lines, ascending.
    pub matching_ids: Vec<u64>,
    /// Groups that survived the filter (every group, for a full scan).
    pub groups_passed: usize,
    /// Lines the exact matcher ran on.
    pub lines_scanned: usize,
    /// Always equals `matching_ids.len()`.
    pub lines_matched: usize,
}

fn check_corpus(index: &BitVectorIndex, corpus: &Corpus) -> Result<(), QueryError> {
    if index.num_lines() != corpus.len() || index.config().m != corpus.granularity() {
        return Err(QueryError::CorpusMismatch {
            index_lines: index.num_lines() as u64,
            index_m: index.config().m,
            corpus_lines: corpus.len() as u64,
            corpus_m: corpus.granularity(),
        });
    }
    Ok(())
}

/// Answers `pattern` through the index: mask, filter, then exact-match
/// only the lines of passing groups. Result ids equal [`query_scan`] on
/// the same corpus; the counters say how much scanning the filter saved.
pub fn query_indexed(
    index: &BitVectorIndex,
    corpus: &Corpus,
    pattern: &str,
    matcher: &dyn ExactMatcher,
) -> Result<QueryResult, QueryError> {
    check_corpus(index, corpus)?;
    let mask = make_mask(pattern, index.dictionary(), index.config().n)?;
    let passing = filter_groups(index, &mask)?;
    let compiled = matcher.compile(pattern)?;
    let mut matching_ids = Vec::new();
    let mut lines_scanned = 0;
    for &group in &passing {
        for line in corpus.group_lines(group) {
            lines_scanned += 1;
            if compiled.is_match(&line.text) {
                matching_ids.push(line.id);
            }
        }
    }
    Ok(QueryResult {
        lines_matched: matching_ids.len(),
        matching_ids,
        groups_passed: passing.len(),
        lines_scanned,
    })
}

/// Answers `pattern` by running the matcher on every line: the
/// ground-truth baseline the index is measured against.
pub fn query_scan(
    corpus: &Corpus,
    pattern: &str,
    matcher: &dyn ExactMatcher,
) -> Result<QueryResult, QueryError> {
    let compiled = matcher.compile(pattern)?;
    let matching_ids: Vec<u64> = corpus
        .lines()
        .iter()
        .filter(|line| compiled.is_match(&line.text))
        .map(|line| line.id)
        .collect();
    Ok(QueryResult {
        lines_matched: matching_ids.len(),
        matching_ids,
        groups_passed: corpus.num_groups(),
        lines_scanned: corpus.len(),
    })
}
