//! Gram statistics: dictionary agreement, gram selectivity, and the
//! analytical anomaly-probability model for trigram-over-bigram filtering.

use crate::corpus::Corpus;
use crate::error::StatsError;

use super::{contains_bytes, GramDictionary};

/// The fraction of A's grams that also appear in B. Used to compare the
/// dictionaries different selection strategies produce, so both must have
/// the same size; two empty dictionaries are identical and score 1.
pub fn intersection_percentage(
    a: &GramDictionary,
    b: &GramDictionary,
) -> Result<f64, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::SizeMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    if a.is_empty() {
        return Ok(1.0);
    }
    let common = a
        .grams()
        .iter()
        .filter(|g| b.contains(g.as_bytes()))
        .count();
    Ok(common as f64 / a.len() as f64)
}

/// The fraction of corpus lines that do NOT contain `g` as a substring:
/// the fraction of lines a filter on `g` can skip.
pub fn selectivity(g: &[u8], corpus: &Corpus) -> Result<f64, StatsError> {
    if corpus.is_empty() {
        return Err(StatsError::EmptyCorpus);
    }
    let lacking = corpus
        .lines()
        .iter()
        .filter(|line| !contains_bytes(&line.text, g))
        .count();
    Ok(lacking as f64 / corpus.len() as f64)
}

/// The fraction of bigrams that occur as a substring of at least one
/// trigram in the trigram dictionary. High overlap means the trigram
/// dictionary retains the bigrams' filtering signal.
pub fn bigram_in_trigram_overlap(
    bigrams: &GramDictionary,
    trigrams: &GramDictionary,
) -> Result<f64, StatsError> {
    if bigrams.is_empty() {
        return Err(StatsError::EmptyDictionary);
    }
    let covered = bigrams
        .grams()
        .iter()
        .filter(|b| {
            trigrams
                .grams()
                .iter()
                .any(|t| contains_bytes(t.as_bytes(), b.as_bytes()))
        })
        .count();
    Ok(covered as f64 / bigrams.len() as f64)
}

/// Parameters of a Zipf-distributed alphabet: `d` symbols where symbol i
/// has probability `i^(-a) / H`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZipfParams {
    pub d: u32,
    pub a: f64,
    /// Normalization constant Σ_{i=1..d} i^(−a); always positive.
    pub h: f64,
}

impl ZipfParams {
    pub fn new(d: u32, a: f64) -> Self {
        assert!(d >= 1, "alphabet size must be at least 1");
        assert!(a >= 0.0 && a.is_finite(), "exponent must be finite and >= 0");
        let h = (1..=d).map(|i| f64::from(i).powf(-a)).sum();
        ZipfParams { d, a, h }
    }

    /// Probability of symbol i (1-based rank).
    fn p(&self, i: u32) -> f64 {
        f64::from(i).powf(-self.a) / self.h
    }
}

/// The probability that a random trigram disagrees with bigram filtering
/// in the adversarial pattern: the first symbol outranked by both later
/// symbols. Under a Zipf alphabet this is
/// Σ_{i=1}^{d−1} p(i) · (Σ_{j=i+1}^{d} p(j))², which stays low for
/// natural-text parameters, the analytical case for preferring bigrams.
pub fn zipf_trigram_anomaly_probability(params: &ZipfParams) -> f64 {
    assert!(params.d >= 2, "anomaly requires at least two symbols");
    // Running suffix sum: tail(i) = Σ_{j>i} p(j).
    let mut tail = 0.0;
    let mut total = 0.0;
    for i in (1..=params.d).rev() {
        if i < params.d {
            // tail now covers j in i+1..=d.
            total += params.p(i) * tail * tail;
        }
        tail += params.p(i);
    }
    total
}
