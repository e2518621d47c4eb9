//! Gram selection strategies: which k grams get a bit in the index.
//!
//! All strategies rank candidate grams and return the top k as a
//! [`GramDictionary`], with ties broken by ascending byte order so a given
//! input always yields the same dictionary. The candidate universe is the
//! union of the queries' gram sets; literals shorter than n contribute no
//! candidates (see [`query_grams`]). When fewer than k candidates exist,
//! all of them are returned and the effective k shrinks.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::corpus::Workload;
use crate::error::SelectError;

use super::{contains_bytes, extract_literals, generate_ngrams, Gram, GramDictionary};

/// How the indexed gram set is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Rank by the number of queries containing the gram.
    Freq,
    /// Rank by individual benefit: how many (query, line) pairs the gram
    /// filters.
    Bene,
    /// Greedy: each pick maximizes benefit conditional on the picks so far.
    IncrBene,
    /// Workload-oblivious: the most frequent English-text bigrams.
    English,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Freq => "freq",
            Strategy::Bene => "bene",
            Strategy::IncrBene => "incr_bene",
            Strategy::English => "english",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "freq" => Ok(Strategy::Freq),
            "bene" => Ok(Strategy::Bene),
            "incr_bene" => Ok(Strategy::IncrBene),
            "english" => Ok(Strategy::English),
            other => Err(format!(
                "unknown strategy {other:?} (expected freq, bene, incr_bene, or english)"
            )),
        }
    }
}

/// Selects the indexed grams for a workload under the given strategy.
///
/// `pairwise` only affects [`Strategy::IncrBene`], switching it to the
/// cheaper variant that conditions each pick on the previous pick alone.
/// [`Strategy::English`] ignores the workload entirely.
pub fn select_grams(
    workload: &Workload,
    n: usize,
    k: usize,
    strategy: Strategy,
    pairwise: bool,
) -> Result<GramDictionary, SelectError> {
    match strategy {
        Strategy::Freq => select_freq(&workload.queries, n, k),
        Strategy::Bene => select_bene(workload, n, k),
        Strategy::IncrBene if pairwise => select_incr_bene_pairwise(workload, n, k),
        Strategy::IncrBene => select_incr_bene(workload, n, k),
        Strategy::English => english_grams(k),
    }
}

/// The gram set of one query: the union of length-n grams over its
/// required literals. Literals shorter than n yield grams shorter than n,
/// which can never be indexed, so they are dropped here; losing them only
/// reduces filtering, never correctness.
pub fn query_grams(pattern: &str, n: usize) -> Result<BTreeSet<Gram>, SelectError> {
    let mut grams = BTreeSet::new();
    for literal in extract_literals(pattern)? {
        grams.extend(
            generate_ngrams(&literal, n)
                .into_keys()
                .filter(|g| g.len() == n),
        );
    }
    Ok(grams)
}

fn check_k(k: usize) -> Result<(), SelectError> {
    if k == 0 {
        return Err(SelectError::ZeroK);
    }
    Ok(())
}

fn check_queries(queries: &[String]) -> Result<(), SelectError> {
    if queries.is_empty() {
        return Err(SelectError::EmptyQuerySet);
    }
    Ok(())
}

/// Selects the k grams contained in the most queries.
///
/// Each gram counts at most once per query. Ranking is descending query
/// count, then ascending byte order; runs in time proportional to the
/// total query text.
pub fn select_freq(queries: &[String], n: usize, k: usize) -> Result<GramDictionary, SelectError> {
    check_k(k)?;
    check_queries(queries)?;
    let mut counts: HashMap<Gram, usize> = HashMap::new();
    for pattern in queries {
        for gram in query_grams(pattern, n)? {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(Gram, usize)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|(ga, ca), (gb, cb)| cb.cmp(ca).then_with(|| ga.cmp(gb)));
    GramDictionary::from_ranked(ranked.into_iter().take(k).map(|(g, _)| g))
}

/// The set of (query index, line id) pairs the gram filters: pairs where
/// the gram occurs in the query's literals but not in the line. A group
/// whose lines all lack the gram is skipped for every such query, so a
/// larger cover means more scanning avoided.
pub fn compute_cover(
    gram: &Gram,
    workload: &Workload,
) -> Result<BTreeSet<(usize, u64)>, SelectError> {
    let mut cover = BTreeSet::new();
    let lacking: Vec<u64> = workload
        .corpus
        .lines()
        .iter()
        .filter(|line| !contains_bytes(&line.text, gram.as_bytes()))
        .map(|line| line.id)
        .collect();
    for (q, pattern) in workload.queries.iter().enumerate() {
        let in_query = extract_literals(pattern)?
            .iter()
            .any(|lit| lit.len() >= gram.len() && contains_bytes(lit, gram.as_bytes()));
        if in_query {
            cover.extend(lacking.iter().map(|&id| (q, id)));
        }
    }
    Ok(cover)
}

/// Shared precomputation for the benefit-based strategies: the candidate
/// grams in byte order, which queries contain each, and which lines
/// contain each (as a bitset over line ids).
struct BenefitTable {
    candidates: Vec<Gram>,
    query_lists: Vec<Vec<usize>>,
    line_bits: Vec<Vec<u64>>,
    num_lines: usize,
    words: usize,
}

impl BenefitTable {
    fn build(workload: &Workload, n: usize) -> Result<Self, SelectError> {
        let mut query_sets = Vec::with_capacity(workload.queries.len());
        let mut universe: BTreeSet<Gram> = BTreeSet::new();
        for pattern in &workload.queries {
            let set = query_grams(pattern, n)?;
            universe.extend(set.iter().cloned());
            query_sets.push(set);
        }
        let candidates: Vec<Gram> = universe.into_iter().collect();
        let slots: HashMap<&Gram, usize> =
            candidates.iter().enumerate().map(|(i, g)| (g, i)).collect();

        let mut query_lists = vec![Vec::new(); candidates.len()];
        for (q, set) in query_sets.iter().enumerate() {
            for gram in set {
                query_lists[slots[gram]].push(q);
            }
        }

        let num_lines = workload.corpus.len();
        let words = num_lines.div_ceil(64);
        let mut line_bits = vec![vec![0u64; words]; candidates.len()];
        for line in workload.corpus.lines() {
            if line.text.len() < n {
                continue;
            }
            // Candidates all have length exactly n, so window lookup finds
            // every contained candidate.
            for window in line.text.windows(n) {
                if let Some(&slot) = slots.get(&Gram::from(window)) {
                    let id = line.id as usize;
                    line_bits[slot][id / 64] |= 1u64 << (id % 64);
                }
            }
        }
        Ok(BenefitTable {
            candidates,
            query_lists,
            line_bits,
            num_lines,
            words,
        })
    }

    /// Lines that do not contain candidate `slot`.
    fn lines_lacking(&self, slot: usize) -> u64 {
        let present: u32 = self.line_bits[slot].iter().map(|w| w.count_ones()).sum();
        self.num_lines as u64 - u64::from(present)
    }

    /// Individual benefit: |queries containing g| × |lines lacking g|.
    fn benefit(&self, slot: usize) -> u64 {
        self.query_lists[slot].len() as u64 * self.lines_lacking(slot)
    }
}

/// Selects the k grams with the largest individual benefit |cover(g)|,
/// descending, ties by ascending byte order.
pub fn select_bene(workload: &Workload, n: usize, k: usize) -> Result<GramDictionary, SelectError> {
    check_k(k)?;
    check_queries(&workload.queries)?;
    let table = BenefitTable::build(workload, n)?;
    let mut order: Vec<usize> = (0..table.candidates.len()).collect();
    // Candidates are already in byte order, so a stable sort by descending
    // benefit leaves ties lexicographic.
    order.sort_by_key(|&slot| std::cmp::Reverse(table.benefit(slot)));
    GramDictionary::from_ranked(
        order
            .into_iter()
            .take(k)
            .map(|slot| table.candidates[slot].clone()),
    )
}

enum Conditioning {
    /// Condition each pick on the union of covers of all picks so far.
    Full,
    /// Condition each pick on the previous pick only.
    Pairwise,
}

/// Greedy benefit selection conditioning on everything picked so far.
///
/// Pick i maximizes |cover(I ∪ {g}) − cover(I)| where I is the selected
/// set and cover(I) is the union of the members' covers. When no remaining
/// gram adds a positive increment, the pick falls back to the largest
/// remaining individual benefit. Ties break by ascending byte order.
/// Quadratic in the candidate count times corpus words; intended for
/// workload-scale inputs, not arbitrary corpora.
pub fn select_incr_bene(
    workload: &Workload,
    n: usize,
    k: usize,
) -> Result<GramDictionary, SelectError> {
    select_incr_impl(workload, n, k, Conditioning::Full)
}

/// The cheaper greedy variant: each pick's increment is conditional on the
/// previous pick alone rather than the whole selected set. Same fallback
/// and tie rules as [`select_incr_bene`].
pub fn select_incr_bene_pairwise(
    workload: &Workload,
    n: usize,
    k: usize,
) -> Result<GramDictionary, SelectError> {
    select_incr_impl(workload, n, k, Conditioning::Pairwise)
}

fn select_incr_impl(
    workload: &Workload,
    n: usize,
    k: usize,
    conditioning: Conditioning,
) -> Result<GramDictionary, SelectError> {
    check_k(k)?;
    check_queries(&workload.queries)?;
    let table = BenefitTable::build(workload, n)?;
    let num_candidates = table.candidates.len();
    let num_queries = workload.queries.len();
    let tail_mask = tail_mask(table.num_lines);

    // covered[q] holds the line ids already covered for query q: a pick g
    // covers (q, l) for every q containing g and every l lacking g.
    let mut covered = vec![vec![0u64; table.words]; num_queries];
    let mut taken = vec![false; num_candidates];
    let mut picks = Vec::with_capacity(k.min(num_candidates));

    while picks.len() < k && picks.len() < num_candidates {
        let mut best: Option<(usize, u64)> = None;
        for slot in 0..num_candidates {
            if taken[slot] {
                continue;
            }
            let mut increment = 0u64;
            for &q in &table.query_lists[slot] {
                // New pairs for q: lines lacking g and not yet covered.
                let newly: u32 = table.line_bits[slot]
                    .iter()
                    .zip(&covered[q])
                    .map(|(&has, &cov)| (has | cov).count_ones())
                    .sum();
                increment += table.num_lines as u64 - u64::from(newly);
            }
            // Strict comparison keeps the byte-order-first candidate on ties.
            if best.map_or(true, |(_, top)| increment > top) {
                best = Some((slot, increment));
            }
        }
        let (slot, increment) = best.expect("candidates remain");
        let slot = if increment > 0 {
            slot
        } else {
            // Nothing filters a new pair; take the best individual gram.
            (0..num_candidates)
                .filter(|&s| !taken[s])
                .max_by(|&a, &b| {
                    table
                        .benefit(a)
                        .cmp(&table.benefit(b))
                        .then_with(|| table.candidates[b].cmp(&table.candidates[a]))
                })
                .expect("candidates remain")
        };
        taken[slot] = true;
        picks.push(table.candidates[slot].clone());

        match conditioning {
            Conditioning::Full => {}
            Conditioning::Pairwise => {
                for words in &mut covered {
                    words.fill(0);
                }
            }
        }
        for &q in &table.query_lists[slot] {
            for (w, (cov, &has)) in covered[q].iter_mut().zip(&table.line_bits[slot]).enumerate() {
                let mask = if w + 1 == table.words { tail_mask } else { !0 };
                *cov |= !has & mask;
            }
        }
    }
    GramDictionary::from_ranked(picks)
}

/// Mask selecting the valid bits of the last word of a `bits`-bit set.
fn tail_mask(bits: usize) -> u64 {
    match bits % 64 {
        0 => !0,
        r => (1u64 << r) - 1,
    }
}

/// A gram frequency ranking: grams with descending counts.
#[derive(Clone, Debug)]
pub struct EnglishRanking {
    entries: Vec<(Gram, u64)>,
}

impl EnglishRanking {
    /// The ranking bundled with the crate: the most frequent bigrams of
    /// English text, from Peter Norvig's public-domain count of the Google
    /// Books corpus, counts in millions of occurrences.
    pub fn bundled() -> &'static EnglishRanking {
        static BUNDLED: OnceLock<EnglishRanking> = OnceLock::new();
        BUNDLED.get_or_init(|| {
            EnglishRanking::parse(include_str!("../../data/english_bigrams.tsv"))
                .expect("bundled ranking is well-formed")
        })
    }

    /// Parses ranking text: one `<bigram>TAB<count>` record per line,
    /// counts non-increasing. The first malformed line is reported with
    /// its 1-based number.
    pub fn parse(text: &str) -> Result<Self, SelectError> {
        let mut entries: Vec<(Gram, u64)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let invalid = |message: String| SelectError::InvalidRanking {
                line: line_no,
                message,
            };
            let (gram, count) = line
                .split_once('\t')
                .ok_or_else(|| invalid("expected <bigram>TAB<count>".to_string()))?;
            if gram.len() != 2 {
                return Err(invalid(format!(
                    "gram must be exactly 2 bytes, got {}",
                    gram.len()
                )));
            }
            let count: u64 = count
                .parse()
                .map_err(|e| invalid(format!("bad count {count:?}: {e}")))?;
            if let Some(&(_, prev)) = entries.last() {
                if count > prev {
                    return Err(invalid(format!(
                        "counts must be non-increasing ({count} follows {prev})"
                    )));
                }
            }
            entries.push((Gram::from(gram), count));
        }
        Ok(EnglishRanking { entries })
    }

    /// Loads a ranking override from a file. See [`EnglishRanking::parse`].
    pub fn from_path(path: &Path) -> Result<Self, SelectError> {
        let text = std::fs::read_to_string(path).map_err(|source| SelectError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        EnglishRanking::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The dictionary of the k highest-ranked grams, offsets in rank order.
    pub fn top(&self, k: usize) -> Result<GramDictionary, SelectError> {
        check_k(k)?;
        if k > self.entries.len() {
            return Err(SelectError::KExceedsTable {
                k,
                table_size: self.entries.len(),
            });
        }
        GramDictionary::from_ranked(self.entries.iter().take(k).map(|(g, _)| g.clone()))
    }
}

/// The k most frequent English-text bigrams from the bundled ranking.
/// Workload-oblivious: a fallback when no query log is available.
pub fn english_grams(k: usize) -> Result<GramDictionary, SelectError> {
    EnglishRanking::bundled().top(k)
}

/// Per-gram workload statistics over the candidate universe.
#[derive(Clone, Debug)]
pub struct SelectionStats {
    /// Number of queries containing the gram; at most the query count.
    pub frequency: BTreeMap<Gram, usize>,
    /// Individual benefit |cover(g)| of each gram.
    pub benefit: BTreeMap<Gram, u64>,
    /// Materialized cover sets, when requested; large for big corpora.
    pub covers: Option<BTreeMap<Gram, BTreeSet<(usize, u64)>>>,
}

impl SelectionStats {
    pub fn compute(
        workload: &Workload,
        n: usize,
        with_covers: bool,
    ) -> Result<Self, SelectError> {
        check_queries(&workload.queries)?;
        let table = BenefitTable::build(workload, n)?;
        let mut frequency = BTreeMap::new();
        let mut benefit = BTreeMap::new();
        for (slot, gram) in table.candidates.iter().enumerate() {
            frequency.insert(gram.clone(), table.query_lists[slot].len());
            benefit.insert(gram.clone(), table.benefit(slot));
        }
        let covers = if with_covers {
            let mut map = BTreeMap::new();
            for gram in &table.candidates {
                map.insert(gram.clone(), compute_cover(gram, workload)?);
            }
            Some(map)
        } else {
            None
        };
        Ok(SelectionStats {
            frequency,
            benefit,
            covers,
        })
    }
}
