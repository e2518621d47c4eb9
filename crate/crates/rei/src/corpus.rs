//! Loading, representing, and grouping line-oriented log data and query
//! workloads.
//!
//! A [`Corpus`] is an ordered sequence of byte-string lines plus a grouping
//! granularity `m`: group `j` covers line ids `[j*m, min((j+1)*m, len))`.
//! Lines are opaque bytes; no character decoding happens here, so binary
//! garbage inside a log file is preserved as-is.

use std::fs;
use std::ops::Range;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::CorpusError;

/// A single log line: its zero-based ordinal and raw content with the line
/// terminator stripped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogLine {
    pub id: u64,
    pub text: Vec<u8>,
}

/// An immutable, grouped log corpus.
#[derive(Debug, Clone)]
pub struct Corpus {
    lines: Vec<LogLine>,
    granularity: usize,
}

impl Corpus {
    /// Builds a corpus from raw line contents (no terminators) at the given
    /// granularity. Line ids follow input order.
    pub fn new(lines: Vec<Vec<u8>>, granularity: usize) -> Result<Self, CorpusError> {
        if granularity == 0 {
            return Err(CorpusError::ZeroGranularity);
        }
        let lines = lines
            .into_iter()
            .enumerate()
            .map(|(id, text)| LogLine { id: id as u64, text })
            .collect();
        Ok(Corpus { lines, granularity })
    }

    /// Loads a newline-delimited file. A trailing final line without a
    /// newline is still a line; a trailing `\r` (CRLF input) is stripped.
    pub fn load(path: &Path, granularity: usize) -> Result<Self, CorpusError> {
        if granularity == 0 {
            return Err(CorpusError::ZeroGranularity);
        }
        let bytes = fs::read(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self::from_bytes(&bytes, granularity))
    }

    fn from_bytes(bytes: &[u8], granularity: usize) -> Self {
        let mut lines = Vec::new();
        let mut id = 0u64;
        for mut record in bytes.split(|&b| b == b'\n') {
            if let [head @ .., b'\r'] = record {
                record = head;
            }
            lines.push(LogLine {
                id,
                text: record.to_vec(),
            });
            id += 1;
        }
        // A trailing newline produces one empty final record, not a line.
        if bytes.is_empty() || bytes.ends_with(b"\n") {
            lines.pop();
        }
        Corpus { lines, granularity }
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn granularity(&self) -> usize {
        self.granularity
    }

    /// Number of line groups: `ceil(len / granularity)`.
    pub fn num_groups(&self) -> usize {
        self.lines.len().div_ceil(self.granularity)
    }

    pub fn lines(&self) -> &[LogLine] {
        &self.lines
    }

    pub fn line(&self, id: u64) -> &LogLine {
        &self.lines[id as usize]
    }

    /// Line-id range of group `j`.
    pub fn group_range(&self, group: usize) -> Range<usize> {
        let start = group * self.granularity;
        let end = ((group + 1) * self.granularity).min(self.lines.len());
        start..end
    }

    /// The lines of group `j`, in id order.
    pub fn group_lines(&self, group: usize) -> &[LogLine] {
        &self.lines[self.group_range(group)]
    }

    /// SHA-256 over line contents joined with `\n`. Identifies corpus
    /// content independently of how it was loaded, so an index file can
    /// refuse a corpus it was not built from.
    pub fn digest(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        for line in &self.lines {
            hasher.update(&line.text);
            hasher.update(b"\n");
        }
        hasher.finalize().into()
    }

    /// Rewraps the same lines at a different granularity.
    pub fn with_granularity(&self, granularity: usize) -> Result<Self, CorpusError> {
        if granularity == 0 {
            return Err(CorpusError::ZeroGranularity);
        }
        Ok(Corpus {
            lines: self.lines.clone(),
            granularity,
        })
    }
}

/// A corpus paired with the regex query set run against it.
#[derive(Debug, Clone)]
pub struct Workload {
    pub corpus: Corpus,
    pub queries: Vec<String>,
}

impl Workload {
    pub fn new(corpus: Corpus, queries: Vec<String>) -> Self {
        Workload { corpus, queries }
    }
}

/// Loads a log file at the given granularity. See [`Corpus::load`].
pub fn load_corpus(path: &Path, granularity: usize) -> Result<Corpus, CorpusError> {
    Corpus::load(path, granularity)
}

/// Loads a query file: one regex pattern per line, in file order. Every
/// pattern is syntax-checked; the first invalid one is reported with its
/// 1-based line number.
pub fn load_queries(path: &Path) -> Result<Vec<String>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let queries: Vec<String> = text.lines().map(str::to_owned).collect();
    for (i, pattern) in queries.iter().enumerate() {
        if let Err(err) = regex::bytes::Regex::new(pattern) {
            return Err(CorpusError::InvalidQuery {
                line: i + 1,
                message: err.to_string(),
            });
        }
    }
    Ok(queries)
}
