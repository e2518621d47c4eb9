//! The bit-vector index: one k-bit presence vector per line group, plus a
//! bit-exact file format.
//!
//! Bit i of a group's vector is 1 iff dictionary gram i occurs as a
//! substring of at least one line in the group. A query can then skip the
//! whole group when some gram required by the query has a 0 bit: the gram
//! is provably absent from every line of the group.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::bits::{set_bit, tail_mask, words_for};
use crate::corpus::Corpus;
use crate::error::IndexError;
use crate::grams::{contains_bytes, Gram, GramDictionary};

/// Index shape: gram length n, dictionary size k, granularity m (lines per
/// group).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexConfig {
    pub n: usize,
    pub k: usize,
    pub m: usize,
}

impl IndexConfig {
    pub fn new(n: usize, k: usize, m: usize) -> Result<Self, IndexError> {
        let check = |value: usize, name: &str| {
            if value == 0 {
                return Err(IndexError::InvalidConfig {
                    message: format!("{name} must be at least 1"),
                });
            }
            if u32::try_from(value).is_err() && (name == "n" || name == "k") {
                return Err(IndexError::InvalidConfig {
                    message: format!("{name} too large for the file format"),
                });
            }
            Ok(())
        };
        check(n, "n")?;
        check(k, "k")?;
        check(m, "m")?;
        Ok(IndexConfig { n, k, m })
    }
}

/// Serialized-size law: groups × words-per-group × 8, with k padded to
/// whole 64-bit words. The padding is why all k up to 64 cost the same.
pub fn index_size_bytes(num_lines: usize, k: usize, m: usize) -> usize {
    assert!(k >= 1 && m >= 1, "k and m must be at least 1");
    num_lines.div_ceil(m) * words_for(k) * 8
}

/// An immutable bit-vector index over a corpus. Holds the config and
/// dictionary it was built with plus identity of the source corpus (line
/// count and content digest) so a mismatched corpus is detectable at query
/// time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitVectorIndex {
    config: IndexConfig,
    dictionary: GramDictionary,
    words: Vec<u64>,
    num_groups: usize,
    num_lines: usize,
    corpus_digest: [u8; 32],
}

impl BitVectorIndex {
    pub fn config(&self) -> IndexConfig {
        self.config
    }

    pub fn dictionary(&self) -> &GramDictionary {
        &self.dictionary
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    /// Line count of the corpus the index was built from.
    pub fn num_lines(&self) -> usize {
        self.num_lines
    }

    /// SHA-256 digest of the source corpus content.
    pub fn corpus_digest(&self) -> [u8; 32] {
        self.corpus_digest
    }

    pub fn words_per_group(&self) -> usize {
        words_for(self.config.k)
    }

    /// The k-bit vector of group `j`, as words.
    pub fn group_words(&self, j: usize) -> &[u64] {
        let wpg = self.words_per_group();
        &self.words[j * wpg..(j + 1) * wpg]
    }
}

/// Presence tables for one dictionary: grams of length exactly n can be
/// found by sliding a window over the line, everything else needs a
/// substring scan.
struct PresenceTables<'a> {
    n: usize,
    windowed: HashMap<&'a [u8], usize>,
    scanned: Vec<(usize, &'a Gram)>,
}

impl<'a> PresenceTables<'a> {
    fn new(dictionary: &'a GramDictionary, n: usize) -> Self {
        let mut windowed = HashMap::new();
        let mut scanned = Vec::new();
        for (gram, offset) in dictionary.iter() {
            if gram.len() == n {
                windowed.insert(gram.as_bytes(), offset);
            } else {
                scanned.push((offset, gram));
            }
        }
        PresenceTables {
            n,
            windowed,
            scanned,
        }
    }

    /// ORs the presence bits of one line into `words`.
    fn mark_line(&self, text: &[u8], words: &mut [u64]) {
        let positions = text.len().saturating_sub(self.n - 1);
        if !self.windowed.is_empty() {
            if positions < self.windowed.len() {
                // Fewer windows than grams: probe the dictionary per window.
                for window in text.windows(self.n) {
                    if let Some(&offset) = self.windowed.get(window) {
                        set_bit(words, offset);
                    }
                }
            } else {
                for (window, &offset) in &self.windowed {
                    if contains_bytes(text, window) {
                        set_bit(words, offset);
                    }
                }
            }
        }
        for &(offset, gram) in &self.scanned {
            if contains_bytes(text, gram.as_bytes()) {
                set_bit(words, offset);
            }
        }
    }
}

/// Per-group presence words for any group-indexed structure; the inverted
/// and signature baselines reuse this so all three indexes agree on what
/// "gram present in group" means.
pub(crate) fn group_presence(
    corpus: &Corpus,
    dictionary: &GramDictionary,
    n: usize,
    group: usize,
    words: &mut [u64],
) {
    let tables = PresenceTables::new(dictionary, n);
    for line in corpus.group_lines(group) {
        tables.mark_line(&line.text, words);
    }
}

fn check_build_inputs(
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

/// Builds the index in one pass over the corpus: time and space linear in
/// k times the line count.
pub fn build_index(
    corpus: &Corpus,
    dictionary: &GramDictionary,
    config: IndexConfig,
) -> Result<BitVectorIndex, IndexError> {
    check_build_inputs(corpus, dictionary, config)?;
    let wpg = words_for(config.k);
    let num_groups = corpus.num_groups();
    let mut words = vec![0u64; num_groups * wpg];
    let tables = PresenceTables::new(dictionary, config.n);
    for (j, chunk) in words.chunks_mut(wpg).enumerate() {
        for line in corpus.group_lines(j) {
            tables.mark_line(&line.text, chunk);
        }
    }
    Ok(BitVectorIndex {
        config,
        dictionary: dictionary.clone(),
        words,
        num_groups,
        num_lines: corpus.len(),
        corpus_digest: corpus.digest(),
    })
}

/// [`build_index`] with groups processed in parallel. The output is
/// byte-identical to the single-threaded build: groups are disjoint and
/// each is computed independently.
pub fn build_index_parallel(
    corpus: &Corpus,
    dictionary: &GramDictionary,
    config: IndexConfig,
) -> Result<BitVectorIndex, IndexError> {
    use rayon::prelude::*;
    check_build_inputs(corpus, dictionary, config)?;
    let wpg = words_for(config.k);
    let num_groups = corpus.num_groups();
    let mut words = vec![0u64; num_groups * wpg];
    let tables = PresenceTables::new(dictionary, config.n);
    words
        .par_chunks_mut(wpg)
        .enumerate()
        .for_each(|(j, chunk)| {
            for line in corpus.group_lines(j) {
                tables.mark_line(&line.text, chunk);
            }
        });
    Ok(BitVectorIndex {
        config,
        dictionary: dictionary.clone(),
        words,
        num_groups,
        num_lines: corpus.len(),
        corpus_digest: corpus.digest(),
    })
}

const MAGIC: [u8; 4] = *b"REI1";
const VERSION: u32 = 1;

impl BitVectorIndex {
    /// Encodes the index in the file format: little-endian, magic "REI1",
    /// version, n, k (32-bit), m, group count, line count, corpus digest,
    /// the dictionary as (16-bit length, bytes) records in offset order,
    /// then the group vectors as 64-bit words.
    pub fn to_bytes(&self) -> Vec<u8> {
        let dict_bytes: usize = self
            .dictionary
            .grams()
            .iter()
            .map(|g| 2 + g.len())
            .sum();
        let payload = self.words.len() * 8;
        let mut out = Vec::with_capacity(4 + 4 + 4 + 4 + 8 + 8 + 8 + 32 + dict_bytes + payload);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.config.n as u32).to_le_bytes());
        out.extend_from_slice(&(self.config.k as u32).to_le_bytes());
        out.extend_from_slice(&(self.config.m as u64).to_le_bytes());
        out.extend_from_slice(&(self.num_groups as u64).to_le_bytes());
        out.extend_from_slice(&(self.num_lines as u64).to_le_bytes());
        out.extend_from_slice(&self.corpus_digest);
        for gram in self.dictionary.grams() {
            let len = u16::try_from(gram.len()).expect("gram length fits the format");
            out.extend_from_slice(&len.to_le_bytes());
            out.extend_from_slice(gram.as_bytes());
        }
        for word in &self.words {
            out.extend_from_slice(&word.to_le_bytes());
        }
        out
    }

    /// Decodes an index written by [`BitVectorIndex::to_bytes`],
    /// validating magic, version, config, dictionary, payload length, and
    /// the all-zero padding invariant.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, IndexError> {
        let mut r = Reader { bytes, pos: 0 };
        let magic = r.array::<4>("magic")?;
        if magic != MAGIC {
            return Err(IndexError::BadMagic { found: magic });
        }
        let version = r.u32("version")?;
        if version != VERSION {
            return Err(IndexError::VersionMismatch {
                found: version,
                expected: VERSION,
            });
        }
        let n = r.u32("n")? as usize;
        let k = r.u32("k")? as usize;
        let m = usize::try_from(r.u64("m")?).map_err(|_| corrupt("m overflows"))?;
        let num_groups =
            usize::try_from(r.u64("group count")?).map_err(|_| corrupt("group count overflows"))?;
        let num_lines =
            usize::try_from(r.u64("line count")?).map_err(|_| corrupt("line count overflows"))?;
        let corpus_digest = r.array::<32>("corpus digest")?;
        let config = IndexConfig::new(n, k, m).map_err(|e| corrupt(&e.to_string()))?;
        if num_groups != num_lines.div_ceil(m) {
            return Err(corrupt("group count disagrees with line count and m"));
        }

        let mut grams = Vec::with_capacity(k);
        for i in 0..k {
            let len = r.u16(&format!("dictionary entry {i} length"))? as usize;
            let bytes = r.slice(len, &format!("dictionary entry {i}"))?;
            grams.push(Gram::from(bytes));
        }
        let dictionary =
            GramDictionary::from_ranked(grams).map_err(|e| corrupt(&e.to_string()))?;

        let wpg = words_for(k);
        let word_count = num_groups
            .checked_mul(wpg)
            .ok_or_else(|| corrupt("vector payload overflows"))?;
        let mut words = Vec::with_capacity(word_count);
        let tail = tail_mask(k);
        for _ in 0..word_count {
            words.push(u64::from_le_bytes(
                r.slice(8, "vector payload")?.try_into().expect("8 bytes"),
            ));
        }
        for group in 0..num_groups {
            if words[group * wpg + wpg - 1] & !tail != 0 {
                return Err(corrupt("nonzero padding bits"));
            }
        }
        if r.pos != bytes.len() {
            return Err(corrupt("trailing bytes after vector payload"));
        }
        Ok(BitVectorIndex {
            config,
            dictionary,
            words,
            num_groups,
            num_lines,
            corpus_digest,
        })
    }
}

fn corrupt(message: &str) -> IndexError {
    IndexError::Corrupt {
        message: message.to_string(),
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn slice(&mut self, len: usize, what: &str) -> Result<&'a [u8], IndexError> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&end| end <= self.bytes.len())
            .ok_or_else(|| IndexError::Truncated {
                message: format!("file ends inside {what}"),
            })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self, what: &str) -> Result<[u8; N], IndexError> {
        Ok(self.slice(N, what)?.try_into().expect("length checked"))
    }

    fn u16(&mut self, what: &str) -> Result<u16, IndexError> {
        Ok(u16::from_le_bytes(self.array::<2>(what)?))
    }

    fn u32(&mut self, what: &str) -> Result<u32, IndexError> {
        Ok(u32::from_le_bytes(self.array::<4>(what)?))
    }

    fn u64(&mut self, what: &str) -> Result<u64, IndexError> {
        Ok(u64::from_le_bytes(self.array::<8>(what)?))
    }
}

/// Writes the index to a file. See [`BitVectorIndex::to_bytes`].
pub fn serialize(index: &BitVectorIndex, path: &Path) -> Result<(), IndexError> {
    fs::write(path, index.to_bytes())?;
    Ok(())
}

/// Reads an index file. See [`BitVectorIndex::from_bytes`].
pub fn deserialize(path: &Path) -> Result<BitVectorIndex, IndexError> {
    BitVectorIndex::from_bytes(&fs::read(path)?)
}
