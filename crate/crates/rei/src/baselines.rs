//! Reference indexes the bit-vector design is benchmarked against: a
//! posting-list inverted index and superimposed-coding signature files.
//!
//! Both share the bit-vector index's notion of gram presence (built from
//! the same per-group presence bits), so all three structures filter from
//! identical information and their results must agree line for line.

use crate::bits::{get_bit, words_for};
use crate::corpus::Corpus;
use crate::error::{IndexError, QueryError, SelectError};
use crate::grams::{query_grams, Gram, GramDictionary};
use crate::index::{group_presence, IndexConfig};
use crate::query::{ExactMatcher, QueryResult};

/// Seed for signature hashing; fixed so signatures are reproducible
/// across runs and machines ("rei_sig!" as bytes).
pub const DEFAULT_SIGNATURE_SEED: u64 = 0x7265_695f_7369_6721;

/// Seeded 64-bit hash: FNV-1a with the offset basis perturbed by the
/// seed, then a splitmix64 finalizer to spread entropy into the low bits
/// used for modulo bucketing.
pub(crate) fn hash64(bytes: &[u8], seed: u64) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET ^ seed;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(PRIME);
    }
    let mut z = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A posting-list index: for each dictionary gram, the ascending,
/// duplicate-free list of group ids containing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvertedIndex {
    config: IndexConfig,
    dictionary: GramDictionary,
    postings: Vec<Vec<u32>>,
    num_groups: usize,
    num_lines: usize,
}

impl InvertedIndex {
    pub fn config(&self) -> IndexConfig {
        self.config
    }

    pub fn dictionary(&self) -> &GramDictionary {
        &self.dictionary
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    pub fn num_lines(&self) -> usize {
        self.num_lines
    }

    /// Posting list of the gram at `offset`, ascending group ids.
    pub fn postings(&self, offset: usize) -> &[u32] {
        &self.postings[offset]
    }

    /// Minimum bytes to hold the actual index data: key bytes plus 4
    /// bytes per posting entry. No padding or container overhead counted.
    pub fn min_required_bytes(&self) -> usize {
        let keys: usize = self.dictionary.grams().iter().map(Gram::len).sum();
        let entries: usize = self.postings.iter().map(Vec::len).sum();
        keys + entries * 4
    }
}

fn check_inputs(
    corpus: &Corpus,
    dictionary: &GramDictionary,
    config: IndexConfig,
) -> Result<(), IndexError> {
    if dictionary.len() != config.k {
        return Err(IndexError::DictionarySizeMismatch {
            dictionary_len: dictionary.len(),
            k: config.k,
        });
    }
    if corpus.granularity() != config.m {
        return Err(IndexError::GranularityMismatch {
            corpus_m: corpus.granularity(),
            m: config.m,
        });
    }
    Ok(())
}

/// Builds posting lists from the same presence bits the bit-vector index
/// uses: gram g's postings are exactly the groups whose bit for g is 1.
pub fn build_inverted(
    corpus: &Corpus,
    dictionary: &GramDictionary,
    config: IndexConfig,
) -> Result<InvertedIndex, IndexError> {
    check_inputs(corpus, dictionary, config)?;
    let num_groups = corpus.num_groups();
    if u32::try_from(num_groups).is_err() {
        return Err(IndexError::InvalidConfig {
            message: format!("{num_groups} groups exceed 32-bit posting ids"),
        });
    }
    let wpg = words_for(config.k);
    let mut postings = vec![Vec::new(); config.k];
    let mut words = vec![0u64; wpg];
    for j in 0..num_groups {
        words.fill(0);
        group_presence(corpus, dictionary, config.n, j, &mut words);
        for (offset, list) in postings.iter_mut().enumerate() {
            if get_bit(&words, offset) {
                list.push(j as u32);
            }
        }
    }
    Ok(InvertedIndex {
        config,
        dictionary: dictionary.clone(),
        postings,
        num_groups,
        num_lines: corpus.len(),
    })
}

/// Ascending merge intersection of two sorted lists.
fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn map_gram_error(e: SelectError) -> QueryError {
    match e {
        SelectError::InvalidRegex { pattern, message } => {
            QueryError::InvalidRegex { pattern, message }
        }
        other => QueryError::Matcher {
            message: other.to_string(),
        },
    }
}

fn check_corpus(
    num_lines: usize,
    m: usize,
    corpus: &Corpus,
) -> Result<(), QueryError> {
    if num_lines != corpus.len() || m != corpus.granularity() {
        return Err(QueryError::CorpusMismatch {
            index_lines: num_lines as u64,
            index_m: m,
            corpus_lines: corpus.len() as u64,
            corpus_m: corpus.granularity(),
        });
    }
    Ok(())
}

fn scan_groups(
    corpus: &Corpus,
    groups: impl IntoIterator<Item = usize>,
    pattern: &str,
    matcher: &dyn ExactMatcher,
) -> Result<QueryResult, QueryError> {
    let compiled = matcher.compile(pattern)?;
    let mut matching_ids = Vec::new();
    let mut lines_scanned = 0;
    let mut groups_passed = 0;
    for group in groups {
        groups_passed += 1;
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
        groups_passed,
        lines_scanned,
    })
}

/// Answers `pattern` through the inverted index: intersect the posting
/// lists of the query's indexed grams, then exact-match the candidate
/// groups. When the query has no indexed gram, every group is a
/// candidate. Result ids equal a full scan's.
pub fn query_inverted(
    index: &InvertedIndex,
    corpus: &Corpus,
    pattern: &str,
    matcher: &dyn ExactMatcher,
) -> Result<QueryResult, QueryError> {
    check_corpus(index.num_lines, index.config.m, corpus)?;
    let grams = query_grams(pattern, index.config.n).map_err(map_gram_error)?;
    let mut indexed = grams
        .iter()
        .filter_map(|g| index.dictionary.offset_of(g.as_bytes()));
    let candidates: Vec<usize> = match indexed.next() {
        None => (0..index.num_groups).collect(),
        Some(first) => {
            let mut acc = index.postings[first].clone();
            for offset in indexed {
                acc = intersect(&acc, &index.postings[offset]);
            }
            acc.into_iter().map(|g| g as usize).collect()
        }
    };
    scan_groups(corpus, candidates, pattern, matcher)
}

/// Signature shape: width in bits, hash bits per gram, and the hash seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignatureConfig {
    /// Signature width in bits; 64 or 128.
    pub w: usize,
    /// Bit positions set per gram; 1 to 4.
    pub h: usize,
    pub seed: u64,
}

impl Default for SignatureConfig {
    fn default() -> Self {
        SignatureConfig {
            w: 64,
            h: 1,
            seed: DEFAULT_SIGNATURE_SEED,
        }
    }
}

impl SignatureConfig {
    pub fn new(w: usize, h: usize, seed: u64) -> Result<Self, IndexError> {
        if w != 64 && w != 128 {
            return Err(IndexError::InvalidSignatureWidth { w });
        }
        if !(1..=4).contains(&h) {
            return Err(IndexError::InvalidHashBits { h });
        }
        Ok(SignatureConfig { w, h, seed })
    }

    fn words(self) -> usize {
        self.w / 64
    }
}

/// A superimposed-coding signature file: per group, the OR of the hash
/// signatures of the dictionary grams occurring in the group. Lossy where
/// the bit-vector index is exact: distinct grams may share bit positions,
/// so filtering can only be weaker, never unsound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureIndex {
    config: IndexConfig,
    sig: SignatureConfig,
    dictionary: GramDictionary,
    gram_signatures: Vec<Vec<u64>>,
    words: Vec<u64>,
    num_groups: usize,
    num_lines: usize,
}

impl SignatureIndex {
    pub fn config(&self) -> IndexConfig {
        self.config
    }

    pub fn signature_config(&self) -> SignatureConfig {
        self.sig
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    pub fn num_lines(&self) -> usize {
        self.num_lines
    }

    /// Signature words of group `j`.
    pub fn group_signature(&self, j: usize) -> &[u64] {
        let w = self.sig.words();
        &self.words[j * w..(j + 1) * w]
    }

    /// Total signature bytes: one w-bit signature per group.
    pub fn size_bytes(&self) -> usize {
        self.num_groups * self.sig.w / 8
    }
}

/// The signature of one gram: h bit positions from independently seeded
/// hash evaluations. Positions may collide, so a signature has between 1
/// and h bits set.
fn gram_signature(gram: &[u8], sig: SignatureConfig) -> Vec<u64> {
    let mut words = vec![0u64; sig.words()];
    for i in 0..sig.h {
        // Independent evaluations by seed variation, stride chosen to
        // decorrelate consecutive seeds.
        let seed = sig.seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(i as u64));
        let pos = (hash64(gram, seed) % sig.w as u64) as usize;
        words[pos / 64] |= 1u64 << (pos % 64);
    }
    words
}

/// Builds the signature file over the same per-group gram presences as
/// the bit-vector index.
pub fn build_signature(
    corpus: &Corpus,
    dictionary: &GramDictionary,
    config: IndexConfig,
    sig: SignatureConfig,
) -> Result<SignatureIndex, IndexError> {
    SignatureConfig::new(sig.w, sig.h, sig.seed)?;
    check_inputs(corpus, dictionary, config)?;
    let gram_signatures: Vec<Vec<u64>> = dictionary
        .grams()
        .iter()
        .map(|g| gram_signature(g.as_bytes(), sig))
        .collect();
    let num_groups = corpus.num_groups();
    let sig_words = sig.words();
    let mut words = vec![0u64; num_groups * sig_words];
    let wpg = words_for(config.k);
    let mut presence = vec![0u64; wpg];
    for j in 0..num_groups {
        presence.fill(0);
        group_presence(corpus, dictionary, config.n, j, &mut presence);
        let group = &mut words[j * sig_words..(j + 1) * sig_words];
        for (offset, gram_sig) in gram_signatures.iter().enumerate() {
            if get_bit(&presence, offset) {
                for (w, bits) in group.iter_mut().zip(gram_sig) {
                    *w |= bits;
                }
            }
        }
    }
    Ok(SignatureIndex {
        config,
        sig,
        dictionary: dictionary.clone(),
        gram_signatures,
        words,
        num_groups,
        num_lines: corpus.len(),
    })
}

/// Answers `pattern` through the signature file: a group is a candidate
/// iff its signature contains every bit of the query signature (the OR of
/// the indexed query grams' signatures). An empty query signature passes
/// everything. Result ids equal a full scan's.
pub fn query_signature(
    index: &SignatureIndex,
    corpus: &Corpus,
    pattern: &str,
    matcher: &dyn ExactMatcher,
) -> Result<QueryResult, QueryError> {
    check_corpus(index.num_lines, index.config.m, corpus)?;
    let grams = query_grams(pattern, index.config.n).map_err(map_gram_error)?;
    let mut query_sig = vec![0u64; index.sig.words()];
    for gram in &grams {
        if let Some(offset) = index.dictionary.offset_of(gram.as_bytes()) {
            for (w, bits) in query_sig.iter_mut().zip(&index.gram_signatures[offset]) {
                *w |= bits;
            }
        }
    }
    let candidates = (0..index.num_groups).filter(|&j| {
        index
            .group_signature(j)
            .iter()
            .zip(&query_sig)
            .all(|(&g, &q)| g & q == q)
    });
    scan_groups(corpus, candidates, pattern, matcher)
}
