//! N-gram generation, regex literal extraction, gram selection, and gram
//! statistics.
//!
//! A [`Gram`] is a short byte string. For a corpus string of length `>= n`
//! the grams are its overlapping length-n substrings; a shorter non-empty
//! string yields itself as its only gram, so no text is ever invisible to
//! the index.

mod literals;
mod select;
mod stats;

use std::borrow::Borrow;
use std::collections::HashMap;
use std::fmt;

use crate::error::SelectError;

pub use literals::{extract_literals, LiteralSet};
pub use select::{
    compute_cover, english_grams, query_grams, select_bene, select_freq, select_grams,
    select_incr_bene, select_incr_bene_pairwise, EnglishRanking, SelectionStats, Strategy,
};
pub use stats::{
    bigram_in_trigram_overlap, intersection_percentage, selectivity,
    zipf_trigram_anomaly_probability, ZipfParams,
};

/// A gram: an owned short byte string. Ordering is ascending byte
/// (lexicographic) order, which is the tie-break order used everywhere.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gram(Box<[u8]>);

impl Gram {
    pub fn new(bytes: impl Into<Box<[u8]>>) -> Self {
        Gram(bytes.into())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<&[u8]> for Gram {
    fn from(bytes: &[u8]) -> Self {
        Gram(bytes.into())
    }
}

impl From<&str> for Gram {
    fn from(s: &str) -> Self {
        Gram(s.as_bytes().into())
    }
}

impl From<Vec<u8>> for Gram {
    fn from(bytes: Vec<u8>) -> Self {
        Gram(bytes.into())
    }
}

impl Borrow<[u8]> for Gram {
    fn borrow(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for Gram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.escape_ascii())
    }
}

impl fmt::Debug for Gram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gram(\"{}\")", self.0.escape_ascii())
    }
}

/// Distinct grams of one string with their occurrence counts.
pub type GramCounts = HashMap<Gram, usize>;

/// Generates the grams of `s` for gram length `n`.
///
/// For `|s| > n` this is one entry per distinct length-n substring with its
/// count over all `|s| - n + 1` window positions. A non-empty string no
/// longer than `n` yields itself with count 1; the empty string yields
/// nothing.
pub fn generate_ngrams(s: &[u8], n: usize) -> GramCounts {
    assert!(n >= 1, "gram length must be at least 1");
    let mut counts = GramCounts::new();
    if s.is_empty() {
        return counts;
    }
    if s.len() <= n {
        counts.insert(Gram::from(s), 1);
        return counts;
    }
    for window in s.windows(n) {
        *counts.entry(Gram::from(window)).or_insert(0) += 1;
    }
    counts
}

/// The ordered set of indexed grams: a bijection between k grams and bit
/// offsets `0..k`, in selection rank order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramDictionary {
    grams: Vec<Gram>,
    offsets: HashMap<Gram, u32>,
}

impl GramDictionary {
    /// Builds a dictionary from grams in rank order; gram `i` gets offset
    /// `i`. Duplicates are rejected.
    pub fn from_ranked(grams: impl IntoIterator<Item = Gram>) -> Result<Self, SelectError> {
        let grams: Vec<Gram> = grams.into_iter().collect();
        let mut offsets = HashMap::with_capacity(grams.len());
        for (i, gram) in grams.iter().enumerate() {
            if offsets.insert(gram.clone(), i as u32).is_some() {
                return Err(SelectError::DuplicateGram { gram: gram.clone() });
            }
        }
        Ok(GramDictionary { grams, offsets })
    }

    pub fn len(&self) -> usize {
        self.grams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grams.is_empty()
    }

    /// The bit offset of `gram`, if indexed.
    pub fn offset_of(&self, gram: &[u8]) -> Option<usize> {
        self.offsets.get(gram).map(|&off| off as usize)
    }

    pub fn contains(&self, gram: &[u8]) -> bool {
        self.offsets.contains_key(gram)
    }

    /// Grams in offset order.
    pub fn grams(&self) -> &[Gram] {
        &self.grams
    }

    /// `(gram, offset)` pairs in offset order.
    pub fn iter(&self) -> impl Iterator<Item = (&Gram, usize)> {
        self.grams.iter().enumerate().map(|(i, g)| (g, i))
    }
}

/// Whether `needle` occurs in `haystack` as a contiguous byte substring.
/// The empty needle occurs in everything.
pub(crate) fn contains_bytes(haystack: &[u8], needle: &[u8]) -> bool {
    memchr::memmem::find(haystack, needle).is_some()
}
