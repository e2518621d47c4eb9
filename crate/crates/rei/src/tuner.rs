//! The (k, m) tuner: estimate how well each configuration would filter
//! the workload and pick the best one that fits a size budget.
//!
//! The model needs only two probabilities per candidate gram g: p_Q(g),
//! the fraction of queries containing g, and p_{L,m}(g), the fraction of
//! m-line blocks containing g. A gram filters a (query, block) pair when
//! the query needs it and the block lacks it, which happens with
//! probability p_Q·(1−p_L); one minus the product of the complements over
//! the indexed grams estimates the fraction of pairs filtered by at least
//! one gram.

use std::collections::{BTreeMap, HashMap};

use crate::corpus::Workload;
use crate::error::TuneError;
use crate::grams::{query_grams, Gram};
use crate::index::index_size_bytes;

/// Default candidate granularities swept by [`tune`].
pub const DEFAULT_GRANULARITIES: [usize; 7] = [1, 8, 32, 64, 128, 256, 512];

/// The tuner's size accounting: k bits per block, unpadded. Deliberately
/// smaller than the storage format's padded bytes; [`tune`] reports both.
pub fn index_size_bits(k: usize, m: usize, num_lines: usize) -> u64 {
    assert!(k >= 1 && m >= 1, "k and m must be at least 1");
    k as u64 * num_lines.div_ceil(m) as u64
}

/// Parses a size budget: a bare number is bits, a `B`/`bytes` suffix is
/// bytes, and `KB`/`MB`/`GB` are powers of 1024 bytes. Suffixes are
/// case-insensitive.
pub fn parse_budget(input: &str) -> Result<u64, TuneError> {
    let invalid = |message: &str| TuneError::InvalidBudget {
        input: input.to_string(),
        message: message.to_string(),
    };
    let trimmed = input.trim();
    let split = trimmed
        .find(|c: char| !c.is_ascii_digit())
        .unwrap_or(trimmed.len());
    let (digits, suffix) = trimmed.split_at(split);
    if digits.is_empty() {
        return Err(invalid("expected a number"));
    }
    let value: u64 = digits
        .parse()
        .map_err(|_| invalid("number out of range"))?;
    let bytes_factor: Option<u64> = match suffix.trim().to_ascii_lowercase().as_str() {
        "" => None,
        "b" | "bytes" => Some(1),
        "kb" => Some(1024),
        "mb" => Some(1024 * 1024),
        "gb" => Some(1024 * 1024 * 1024),
        _ => return Err(invalid("unknown suffix (expected B, bytes, KB, MB, or GB)")),
    };
    match bytes_factor {
        None => Ok(value),
        Some(factor) => value
            .checked_mul(factor)
            .and_then(|b| b.checked_mul(8))
            .ok_or_else(|| invalid("budget overflows")),
    }
}

/// Per-granularity containment probabilities.
#[derive(Clone, Debug)]
struct GranularityModel {
    n_blocks: usize,
    /// Blocks actually measured; fewer than `n_blocks` when sampling.
    measured_blocks: usize,
    p_l: Vec<f64>,
}

/// The filtering-effectiveness model of one workload: candidate grams in
/// frequency rank order with their query-containment and per-granularity
/// block-containment probabilities.
#[derive(Clone, Debug)]
pub struct TunerModel {
    num_queries: usize,
    num_lines: usize,
    candidates: Vec<Gram>,
    slots: HashMap<Gram, usize>,
    p_q: Vec<f64>,
    per_m: BTreeMap<usize, GranularityModel>,
    sample_blocks: Option<usize>,
}

impl TunerModel {
    /// Builds the model: one pass over the queries for p_Q, one pass over
    /// the corpus per granularity for p_{L,m}. With `sample_blocks` set,
    /// only the first that many blocks are measured per granularity (the
    /// estimate degrades gracefully; score and size still use the true
    /// block count).
    pub fn build(
        workload: &Workload,
        n: usize,
        granularities: &[usize],
        sample_blocks: Option<usize>,
    ) -> Result<Self, TuneError> {
        if workload.queries.is_empty() {
            return Err(TuneError::EmptyQuerySet);
        }
        if workload.corpus.is_empty() {
            return Err(TuneError::EmptyCorpus);
        }
        if granularities.is_empty() {
            return Err(TuneError::EmptyGranularities);
        }
        if granularities.contains(&0) {
            return Err(TuneError::ZeroGranularity);
        }

        let mut freq: HashMap<Gram, usize> = HashMap::new();
        for pattern in &workload.queries {
            for gram in query_grams(pattern, n)? {
                *freq.entry(gram).or_insert(0) += 1;
            }
        }
        if freq.is_empty() {
            return Err(TuneError::NoCandidateGrams);
        }
        let mut ranked: Vec<(Gram, usize)> = freq.into_iter().collect();
        ranked.sort_unstable_by(|(ga, ca), (gb, cb)| cb.cmp(ca).then_with(|| ga.cmp(gb)));

        let num_queries = workload.queries.len();
        let num_lines = workload.corpus.len();
        let candidates: Vec<Gram> = ranked.iter().map(|(g, _)| g.clone()).collect();
        let p_q: Vec<f64> = ranked
            .iter()
            .map(|&(_, count)| count as f64 / num_queries as f64)
            .collect();
        let slots: HashMap<Gram, usize> = candidates
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i))
            .collect();
        let byte_slots: HashMap<&[u8], usize> = candidates
            .iter()
            .enumerate()
            .map(|(i, g)| (g.as_bytes(), i))
            .collect();

        let mut per_m = BTreeMap::new();
        for &m in granularities {
            if per_m.contains_key(&m) {
                continue;
            }
            let n_blocks = num_lines.div_ceil(m);
            let measured_blocks = sample_blocks
                .map_or(n_blocks, |limit| limit.min(n_blocks))
                .max(1);
            let mut containing = vec![0usize; candidates.len()];
            let mut seen = vec![false; candidates.len()];
            for block in workload
                .corpus
                .lines()
                .chunks(m)
                .take(measured_blocks)
            {
                seen.fill(false);
                for line in block {
                    if line.text.len() < n {
                        continue;
                    }
                    for window in line.text.windows(n) {
                        if let Some(&slot) = byte_slots.get(window) {
                            seen[slot] = true;
                        }
                    }
                }
                for (slot, &hit) in seen.iter().enumerate() {
                    if hit {
                        containing[slot] += 1;
                    }
                }
            }
            let p_l = containing
                .iter()
                .map(|&c| c as f64 / measured_blocks as f64)
                .collect();
            per_m.insert(
                m,
                GranularityModel {
                    n_blocks,
                    measured_blocks,
                    p_l,
                },
            );
        }
        Ok(TunerModel {
            num_queries,
            num_lines,
            candidates,
            slots,
            p_q,
            per_m,
            sample_blocks,
        })
    }

    pub fn num_queries(&self) -> usize {
        self.num_queries
    }

    pub fn num_lines(&self) -> usize {
        self.num_lines
    }

    /// Candidate grams in frequency rank order (the list tune draws its
    /// top-k prefixes from).
    pub fn candidates(&self) -> &[Gram] {
        &self.candidates
    }

    /// Fraction of queries containing `gram`.
    pub fn p_q(&self, gram: &Gram) -> Option<f64> {
        self.slots.get(gram).map(|&slot| self.p_q[slot])
    }

    /// Fraction of m-line blocks containing `gram`.
    pub fn p_l(&self, gram: &Gram, m: usize) -> Option<f64> {
        let gm = self.per_m.get(&m)?;
        self.slots.get(gram).map(|&slot| gm.p_l[slot])
    }

    /// True block count at granularity m (never the sampled count).
    pub fn n_blocks(&self, m: usize) -> Option<usize> {
        self.per_m.get(&m).map(|gm| gm.n_blocks)
    }

    /// Blocks measured at granularity m; less than the block count when
    /// sampling was requested.
    pub fn measured_blocks(&self, m: usize) -> Option<usize> {
        self.per_m.get(&m).map(|gm| gm.measured_blocks)
    }

    pub fn sample_blocks(&self) -> Option<usize> {
        self.sample_blocks
    }
}

/// Expected number of (query, block) pairs filtered by indexing `grams`
/// at granularity m:
/// |Q| · N_blocks · (1 − ∏ (1 − p_Q(g)·(1 − p_{L,m}(g)))).
/// The empty list scores 0; order of the list never matters.
pub fn estimate_score(model: &TunerModel, grams: &[Gram], m: usize) -> Result<f64, TuneError> {
    let mut product = 1.0;
    for gram in grams {
        let p_q = model
            .p_q(gram)
            .ok_or_else(|| TuneError::MissingProbability {
                gram: gram.clone(),
                m,
            })?;
        let p_l = model
            .p_l(gram, m)
            .ok_or_else(|| TuneError::MissingProbability {
                gram: gram.clone(),
                m,
            })?;
        product *= 1.0 - p_q * (1.0 - p_l);
    }
    let n_blocks = model
        .n_blocks(m)
        .unwrap_or_else(|| model.num_lines.div_ceil(m));
    Ok(model.num_queries as f64 * n_blocks as f64 * (1.0 - product))
}

/// Tuning constraints: the bit budget, the granularities to sweep, and an
/// optional cap on k (defaults to the candidate count).
#[derive(Clone, Debug)]
pub struct TunerConfig {
    pub budget_bits: u64,
    pub granularities: Vec<usize>,
    pub max_k: Option<usize>,
    /// Measure only this many leading blocks per granularity.
    pub sample_blocks: Option<usize>,
}

impl TunerConfig {
    pub fn new(budget_bits: u64) -> Self {
        TunerConfig {
            budget_bits,
            granularities: DEFAULT_GRANULARITIES.to_vec(),
            max_k: None,
            sample_blocks: None,
        }
    }
}

/// One evaluated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct TuneCandidate {
    pub m: usize,
    /// Largest k fitting the budget at this m.
    pub k: usize,
    pub score: f64,
    /// Tuner accounting: k bits per block, unpadded.
    pub size_bits: u64,
    /// What the index file would actually take, padded to 64-bit words.
    pub storage_bytes: u64,
    /// Filtering per bit: score / size_bits.
    pub efficiency: f64,
}

/// The tuning outcome: every feasible candidate ranked by efficiency,
/// best first.
#[derive(Clone, Debug)]
pub struct TuneReport {
    pub best: TuneCandidate,
    pub ranked: Vec<TuneCandidate>,
    /// Echoes the sampling request so a sampled run is never mistaken for
    /// an exact one.
    pub sample_blocks: Option<usize>,
}

/// Picks the (k, m) with the highest estimated filtering per bit under
/// the budget: for each candidate m, binary-search the largest feasible
/// k, score it, and rank by efficiency with ties to smaller m, then
/// larger k.
pub fn tune(workload: &Workload, n: usize, config: &TunerConfig) -> Result<TuneReport, TuneError> {
    let model = TunerModel::build(workload, n, &config.granularities, config.sample_blocks)?;
    tune_with_model(&model, config)
}

/// [`tune`] over a prebuilt model.
pub fn tune_with_model(model: &TunerModel, config: &TunerConfig) -> Result<TuneReport, TuneError> {
    if config.granularities.is_empty() {
        return Err(TuneError::EmptyGranularities);
    }
    let k_cap = config
        .max_k
        .map_or(model.candidates.len(), |cap| cap.min(model.candidates.len()));
    let mut ranked = Vec::new();
    for &m in model.per_m.keys() {
        if !config.granularities.contains(&m) {
            continue;
        }
        let fits = |k: usize| index_size_bits(k, m, model.num_lines) <= config.budget_bits;
        if k_cap == 0 || !fits(1) {
            continue;
        }
        // Size grows monotonically in k, so binary search the boundary:
        // lo always fits, hi never does.
        let mut lo = 1;
        let mut hi = k_cap + 1;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fits(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let k = lo;
        let score = estimate_score(model, &model.candidates[..k], m)?;
        let size_bits = index_size_bits(k, m, model.num_lines);
        ranked.push(TuneCandidate {
            m,
            k,
            score,
            size_bits,
            storage_bytes: index_size_bytes(model.num_lines, k, m) as u64,
            efficiency: score / size_bits as f64,
        });
    }
    if ranked.is_empty() {
        return Err(TuneError::BudgetTooSmall {
            budget_bits: config.budget_bits,
        });
    }
    ranked.sort_by(|a, b| {
        b.efficiency
            .total_cmp(&a.efficiency)
            .then_with(|| a.m.cmp(&b.m))
            .then_with(|| b.k.cmp(&a.k))
    });
    Ok(TuneReport {
        best: ranked[0].clone(),
        ranked,
        sample_blocks: model.sample_blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Corpus;
    use crate::grams::contains_bytes;

    fn workload(lines: &[&str], queries: &[&str]) -> Workload {
        let corpus =
            Corpus::new(lines.iter().map(|l| l.as_bytes().to_vec()).collect(), 1).unwrap();
        Workload::new(corpus, queries.iter().map(|q| q.to_string()).collect())
    }

    #[test]
    fn size_bits_is_k_per_block() {
        assert_eq!(index_size_bits(64, 1, 100), 6400);
        assert_eq!(index_size_bits(83, 1, 101_876_733), 8_455_768_839);
        assert_eq!(index_size_bits(5, 1000, 100), 5);
        assert_eq!(index_size_bits(7, 3, 10), 7 * 4);
    }

    #[test]
    fn budget_parsing_units() {
        assert_eq!(parse_budget("4096").unwrap(), 4096);
        assert_eq!(parse_budget("512B").unwrap(), 4096);
        assert_eq!(parse_budget("512 bytes").unwrap(), 4096);
        assert_eq!(parse_budget("1KB").unwrap(), 8192);
        assert_eq!(parse_budget("1kb").unwrap(), 8192);
        assert_eq!(parse_budget("2MB").unwrap(), 2 * 1024 * 1024 * 8);
        assert_eq!(parse_budget("1GB").unwrap(), 1024u64.pow(3) * 8);
        assert!(parse_budget("").is_err());
        assert!(parse_budget("12XB").is_err());
        assert!(parse_budget("KB").is_err());
        assert!(parse_budget("999999999999999999999").is_err());
    }

    #[test]
    fn model_probabilities_match_brute_force() {
        let lines = ["abcd", "xbcx", "zzzz", "abab", "bcbc", "qqqq"];
        let w = workload(&lines, &["abc", "bcd", "zz"]);
        let model = TunerModel::build(&w, 2, &[1, 2, 3, 6], None).unwrap();
        for gram in model.candidates() {
            let freq = w
                .queries
                .iter()
                .filter(|q| contains_bytes(q.as_bytes(), gram.as_bytes()))
                .count();
            assert_eq!(
                model.p_q(gram).unwrap(),
                freq as f64 / w.queries.len() as f64,
                "p_q {gram}"
            );
            for m in [1usize, 2, 3, 6] {
                let n_blocks = lines.len().div_ceil(m);
                let containing = (0..n_blocks)
                    .filter(|&j| {
                        lines[j * m..((j + 1) * m).min(lines.len())]
                            .iter()
                            .any(|l| contains_bytes(l.as_bytes(), gram.as_bytes()))
                    })
                    .count();
                assert_eq!(
                    model.p_l(gram, m).unwrap(),
                    containing as f64 / n_blocks as f64,
                    "p_l {gram} m={m}"
                );
            }
        }
    }

    #[test]
    fn block_containment_is_monotone_under_nesting() {
        // Containment fraction is monotone only when blocks nest exactly:
        // each granularity divides the next and the line count, so every
        // coarse block is a union of fine blocks with no ragged tail. With
        // unrelated granularities boundary effects can make it dip.
        let lines: Vec<String> = (0..24)
            .map(|i| match i % 5 {
                0 => format!("ab {i}"),
                1 => format!("cd {i}"),
                _ => format!("zz {i}"),
            })
            .collect();
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let w = workload(&refs, &["ab", "cd", "xy"]);
        let model = TunerModel::build(&w, 2, &[1, 2, 4, 8, 24], None).unwrap();
        for gram in model.candidates() {
            let mut last = 0.0;
            for m in [1usize, 2, 4, 8, 24] {
                let p = model.p_l(gram, m).unwrap();
                assert!(p >= last, "{gram} m={m}: {p} < {last}");
                last = p;
            }
        }
    }

    #[test]
    fn score_of_empty_gram_list_is_zero() {
        let w = workload(&["ab"], &["ab"]);
        let model = TunerModel::build(&w, 2, &[1], None).unwrap();
        assert_eq!(estimate_score(&model, &[], 1).unwrap(), 0.0);
    }

    #[test]
    fn score_of_perfect_filter_is_all_pairs() {
        // One query containing "ab"; no line contains it: p_Q=1, p_L=0.
        let w = workload(&["xx", "yy", "zz"], &["ab"]);
        let model = TunerModel::build(&w, 2, &[1], None).unwrap();
        let score = estimate_score(&model, &[Gram::from("ab")], 1).unwrap();
        assert_eq!(score, 3.0);
    }

    #[test]
    fn score_matches_direct_formula() {
        let w = workload(&["abcd", "cdef", "gggg", "abab"], &["abcd", "cd"]);
        let model = TunerModel::build(&w, 2, &[2], None).unwrap();
        let grams = model.candidates().to_vec();
        let score = estimate_score(&model, &grams, 2).unwrap();
        let mut product = 1.0;
        for g in &grams {
            product *= 1.0 - model.p_q(g).unwrap() * (1.0 - model.p_l(g, 2).unwrap());
        }
        let direct = 2.0 * 2.0 * (1.0 - product);
        assert!((score - direct).abs() <= 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn score_is_order_invariant() {
        let w = workload(&["abcd", "cdef", "gggg"], &["abcd", "cdef"]);
        let model = TunerModel::build(&w, 2, &[1], None).unwrap();
        let mut grams = model.candidates().to_vec();
        let forward = estimate_score(&model, &grams, 1).unwrap();
        grams.reverse();
        let backward = estimate_score(&model, &grams, 1).unwrap();
        assert!((forward - backward).abs() < 1e-12);
    }

    #[test]
    fn score_is_monotone_in_k() {
        let w = workload(&["abcd", "cdef", "gggg", "qqqq"], &["abcd", "cdef", "gg"]);
        let model = TunerModel::build(&w, 2, &[1, 2], None).unwrap();
        for m in [1, 2] {
            let mut last = 0.0;
            for k in 0..=model.candidates().len() {
                let score = estimate_score(&model, &model.candidates()[..k], m).unwrap();
                assert!(score >= last - 1e-12, "k={k} m={m}");
                last = score;
            }
        }
    }

    #[test]
    fn unknown_gram_or_granularity_is_reported() {
        let w = workload(&["ab"], &["ab"]);
        let model = TunerModel::build(&w, 2, &[1], None).unwrap();
        assert!(matches!(
            estimate_score(&model, &[Gram::from("zz")], 1),
            Err(TuneError::MissingProbability { .. })
        ));
        assert!(matches!(
            estimate_score(&model, &[Gram::from("ab")], 99),
            Err(TuneError::MissingProbability { m: 99, .. })
        ));
    }

    #[test]
    fn tune_picks_largest_feasible_k() {
        // 10 lines; budget 45 bits: at m=1 (10 blocks) max k=4; at m=2
        // (5 blocks) max k=9, capped by 6 candidates.
        let lines = ["abcdefg", "hijklmn", "zz", "abcdefg", "hijklmn",
                     "zz", "abcdefg", "zz", "zz", "zz"];
        let queries = ["abc", "bcd", "hij", "ijk", "zz", "efg", "klm"];
        let w = workload(&lines, &queries);
        let mut config = TunerConfig::new(45);
        config.granularities = vec![1, 2];
        let report = tune(&w, 3, &config).unwrap();
        let by_m: BTreeMap<usize, &TuneCandidate> =
            report.ranked.iter().map(|c| (c.m, c)).collect();
        assert_eq!(by_m[&1].k, 4);
        let candidate_count = TunerModel::build(&w, 3, &[1], None)
            .unwrap()
            .candidates()
            .len();
        assert_eq!(by_m[&2].k, candidate_count.min(9));
        for c in &report.ranked {
            assert!(c.size_bits <= 45);
            assert!((c.efficiency - c.score / c.size_bits as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn tune_binary_search_equals_linear_scan() {
        let lines: Vec<String> = (0..37).map(|i| format!("line{i:03}data")).collect();
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let queries = ["line0", "line1", "line2", "data", "ne0", "e00"];
        let w = workload(&refs, &queries);
        for budget in [1u64, 5, 37, 100, 333, 10_000] {
            let mut config = TunerConfig::new(budget);
            config.granularities = vec![1, 4, 16];
            let model = TunerModel::build(&w, 3, &config.granularities, None).unwrap();
            let report = tune_with_model(&model, &config);
            for &m in &config.granularities {
                let linear_max = (1..=model.candidates().len())
                    .filter(|&k| index_size_bits(k, m, w.corpus.len()) <= budget)
                    .max();
                let tuned = report
                    .as_ref()
                    .ok()
                    .and_then(|rep| rep.ranked.iter().find(|c| c.m == m))
                    .map(|c| c.k);
                assert_eq!(tuned, linear_max, "budget={budget} m={m}");
            }
        }
    }

    #[test]
    fn tune_rejects_hopeless_budget() {
        let w = workload(&["abcd"], &["abcd"]);
        let mut config = TunerConfig::new(0);
        config.granularities = vec![1];
        assert!(matches!(
            tune(&w, 2, &config),
            Err(TuneError::BudgetTooSmall { budget_bits: 0 })
        ));
    }

    #[test]
    fn tune_breaks_ties_toward_smaller_m() {
        // A corpus and queries with no overlap at all: every candidate
        // filters everything, so scores saturate and per-bit efficiency
        // is equal whenever k·blocks is equal.
        let w = workload(&["xx", "yy", "zz", "ww"], &["ab"]);
        let mut config = TunerConfig::new(4);
        config.granularities = vec![2, 4];
        let report = tune(&w, 2, &config).unwrap();
        // m=2: 2 blocks, k=1 fits (2 bits). m=4: 1 block, k=1 (1 bit).
        // score m=2: 1·2·p = 2·1 = 2, η = 1; m=4: 1·1·1 = 1, η = 1.
        assert_eq!(report.best.m, 2);
    }

    #[test]
    fn sampling_is_recorded_and_limits_measurement() {
        // "ab" appears only in the last block; sampling the first 2
        // blocks must miss it.
        let lines = ["xx", "yy", "zz", "ab"];
        let w = workload(&lines, &["ab", "xx"]);
        let exact = TunerModel::build(&w, 2, &[1], None).unwrap();
        assert_eq!(exact.p_l(&Gram::from("ab"), 1).unwrap(), 0.25);
        assert_eq!(exact.measured_blocks(1), Some(4));

        let sampled = TunerModel::build(&w, 2, &[1], Some(2)).unwrap();
        assert_eq!(sampled.p_l(&Gram::from("ab"), 1).unwrap(), 0.0);
        assert_eq!(sampled.p_l(&Gram::from("xx"), 1).unwrap(), 0.5);
        assert_eq!(sampled.measured_blocks(1), Some(2));
        assert_eq!(sampled.n_blocks(1), Some(4));
        assert_eq!(sampled.sample_blocks(), Some(2));
    }

    #[test]
    fn model_rejects_degenerate_inputs() {
        let w = workload(&["ab"], &[]);
        assert!(matches!(
            TunerModel::build(&w, 2, &[1], None),
            Err(TuneError::EmptyQuerySet)
        ));
        let w = workload(&[], &["ab"]);
        assert!(matches!(
            TunerModel::build(&w, 2, &[1], None),
            Err(TuneError::EmptyCorpus)
        ));
        let w = workload(&["ab"], &["ab"]);
        assert!(matches!(
            TunerModel::build(&w, 2, &[], None),
            Err(TuneError::EmptyGranularities)
        ));
        assert!(matches!(
            TunerModel::build(&w, 2, &[1, 0], None),
            Err(TuneError::ZeroGranularity)
        ));
        let w = workload(&["ab"], &[r"\d+"]);
        assert!(matches!(
            TunerModel::build(&w, 2, &[1], None),
            Err(TuneError::NoCandidateGrams)
        ));
    }
}
