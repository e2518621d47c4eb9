//! Shared generators and independent oracles for the integration suites.
//!
//! The oracles recompute every quantity with plain set arithmetic and
//! naive windowed substring checks, so the library's bitset, hash-table,
//! and binary-search machinery is always compared against a second
//! opinion that shares no code with it.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rei::grams::query_grams;
use rei::Gram;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Naive windowed substring test; the oracle-side counterpart of the
/// library's memchr-backed search.
pub fn substring(hay: &[u8], needle: &[u8]) -> bool {
    needle.is_empty() || hay.windows(needle.len()).any(|w| w == needle)
}

const TOKEN_CHARS: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ\
0123456789_.:=/[]()*+?-";

fn random_token(rng: &mut ChaCha8Rng) -> String {
    let len = rng.random_range(3..=8);
    (0..len)
        .map(|_| TOKEN_CHARS[rng.random_range(0..TOKEN_CHARS.len())] as char)
        .collect()
}

/// A printable-ASCII corpus of 1..=max_lines lines built from a small
/// token pool, so grams repeat across lines and selection has real
/// frequency structure. Line 0 is always long enough to donate query
/// literals.
pub fn random_corpus(rng: &mut ChaCha8Rng, max_lines: usize) -> Vec<Vec<u8>> {
    let pool: Vec<String> = (0..rng.random_range(4..=8))
        .map(|_| random_token(rng))
        .collect();
    let num_lines = rng.random_range(1..=max_lines);
    (0..num_lines)
        .map(|i| {
            let mut line = String::new();
            if i == 0 {
                line.push_str(&pool[0]);
                line.push(' ');
                line.push_str(&pool[1 % pool.len()]);
            }
            for _ in 0..rng.random_range(0..=4) {
                if rng.random_bool(0.6) {
                    line.push_str(&pool[rng.random_range(0..pool.len())]);
                } else {
                    line.push_str(&random_token(rng));
                }
                if rng.random_bool(0.5) {
                    line.push(' ');
                }
            }
            line.into_bytes()
        })
        .collect()
}

/// An escaped 4..=8 byte window of a random corpus line, so the pattern
/// is guaranteed to carry at least one literal long enough to index.
pub fn corpus_literal(rng: &mut ChaCha8Rng, lines: &[Vec<u8>]) -> String {
    let candidates: Vec<&Vec<u8>> = lines
        .iter()
        .filter(|l| l.len() >= 4 && l.iter().all(|b| (0x20..=0x7e).contains(b)))
        .collect();
    if candidates.is_empty() {
        return "zzzz".to_string();
    }
    let line = candidates[rng.random_range(0..candidates.len())];
    let len = rng.random_range(4..=8.min(line.len()));
    let start = rng.random_range(0..=line.len() - len);
    regex::escape(std::str::from_utf8(&line[start..start + len]).expect("printable corpus"))
}

/// A valid random pattern whose literals mostly come from the corpus:
/// plain literals, two-factor `.*` joins, digit tails, anchors, and the
/// occasional junk literal that matches nothing.
pub fn random_pattern(rng: &mut ChaCha8Rng, lines: &[Vec<u8>]) -> String {
    match rng.random_range(0..8) {
        0..=2 => corpus_literal(rng, lines),
        3 => format!("{}.*{}", corpus_literal(rng, lines), corpus_literal(rng, lines)),
        4 => format!("{}\\d*", corpus_literal(rng, lines)),
        5 => format!("^{}", corpus_literal(rng, lines)),
        6 => format!("({}|{})", corpus_literal(rng, lines), corpus_literal(rng, lines)),
        _ => (0..rng.random_range(4..8))
            .map(|_| rng.random_range(b'A'..=b'Z') as char)
            .collect(),
    }
}

/// The gram set of each query, as raw byte strings.
pub fn query_gram_sets(queries: &[String], n: usize) -> Vec<BTreeSet<Vec<u8>>> {
    queries
        .iter()
        .map(|q| {
            query_grams(q, n)
                .expect("generated pattern is valid")
                .into_iter()
                .map(|g| g.as_bytes().to_vec())
                .collect()
        })
        .collect()
}

/// Brute-force frequency ranking: count queries per gram, order by
/// descending count then ascending bytes, truncate to k.
pub fn oracle_freq(queries: &[String], n: usize, k: usize) -> Vec<Vec<u8>> {
    let mut counts: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    for set in query_gram_sets(queries, n) {
        for g in set {
            *counts.entry(g).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(Vec<u8>, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked.into_iter().map(|(g, _)| g).collect()
}

/// cover(g) as explicit (query index, line id) pairs: the query needs g
/// and the line lacks it.
pub fn oracle_cover(
    g: &[u8],
    gram_sets: &[BTreeSet<Vec<u8>>],
    lines: &[Vec<u8>],
) -> BTreeSet<(usize, u64)> {
    let mut cover = BTreeSet::new();
    for (qi, set) in gram_sets.iter().enumerate() {
        if !set.contains(g) {
            continue;
        }
        for (li, line) in lines.iter().enumerate() {
            if !substring(line, g) {
                cover.insert((qi, li as u64));
            }
        }
    }
    cover
}

/// Benefit ranking from scratch: |cover(g)| descending, bytes ascending.
pub fn oracle_bene(lines: &[Vec<u8>], queries: &[String], n: usize, k: usize) -> Vec<Vec<u8>> {
    let gram_sets = query_gram_sets(queries, n);
    let candidates: BTreeSet<Vec<u8>> = gram_sets.iter().flatten().cloned().collect();
    let mut ranked: Vec<(Vec<u8>, usize)> = candidates
        .into_iter()
        .map(|g| {
            let benefit = oracle_cover(&g, &gram_sets, lines).len();
            (g, benefit)
        })
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked.into_iter().map(|(g, _)| g).collect()
}

/// Exhaustive greedy oracle: each step recomputes every candidate's
/// marginal cover against the accumulated pair set. Ties keep the
/// lexicographically smallest gram; when nothing new can be covered the
/// highest individual benefit wins, again lex-smallest on ties. The
/// pairwise variant conditions only on the previous pick's cover.
pub fn oracle_incr(
    lines: &[Vec<u8>],
    queries: &[String],
    n: usize,
    k: usize,
    pairwise: bool,
) -> Vec<Vec<u8>> {
    let gram_sets = query_gram_sets(queries, n);
    let candidates: Vec<Vec<u8>> = gram_sets
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let covers: BTreeMap<Vec<u8>, BTreeSet<(usize, u64)>> = candidates
        .iter()
        .map(|g| (g.clone(), oracle_cover(g, &gram_sets, lines)))
        .collect();
    let mut covered: BTreeSet<(usize, u64)> = BTreeSet::new();
    let mut remaining = candidates;
    let mut picked = Vec::new();
    while picked.len() < k && !remaining.is_empty() {
        // Lex iteration with strict > keeps the lex-smallest on ties.
        let mut best = (0usize, 0usize);
        let mut have = false;
        for (i, g) in remaining.iter().enumerate() {
            let incr = covers[g].difference(&covered).count();
            if !have || incr > best.0 {
                best = (incr, i);
                have = true;
            }
        }
        let idx = if best.0 == 0 {
            let mut fallback = (0usize, 0usize);
            let mut have = false;
            for (i, g) in remaining.iter().enumerate() {
                let benefit = covers[g].len();
                if !have || benefit > fallback.0 {
                    fallback = (benefit, i);
                    have = true;
                }
            }
            fallback.1
        } else {
            best.1
        };
        let g = remaining.remove(idx);
        if pairwise {
            covered = covers[&g].clone();
        } else {
            covered.extend(covers[&g].iter().cloned());
        }
        picked.push(g);
    }
    picked
}

/// Direct evaluation of the expected-filtering score from raw counts:
/// |Q| x blocks x (1 - prod over grams of (1 - p_q(1 - p_l))).
pub fn oracle_score(
    lines: &[Vec<u8>],
    queries: &[String],
    n: usize,
    grams: &[Gram],
    m: usize,
) -> f64 {
    let gram_sets = query_gram_sets(queries, n);
    let n_blocks = lines.len().div_ceil(m);
    let mut product = 1.0;
    for g in grams {
        let bytes = g.as_bytes();
        let p_q = gram_sets.iter().filter(|s| s.contains(bytes)).count() as f64
            / queries.len() as f64;
        let containing = (0..n_blocks)
            .filter(|&j| {
                lines[j * m..((j + 1) * m).min(lines.len())]
                    .iter()
                    .any(|l| substring(l, bytes))
            })
            .count();
        let p_l = containing as f64 / n_blocks as f64;
        product *= 1.0 - p_q * (1.0 - p_l);
    }
    queries.len() as f64 * n_blocks as f64 * (1.0 - product)
}

/// Largest k in 1..=k_cap whose unpadded size k x ceil(lines/m) fits the
/// budget, found by linear scan.
pub fn oracle_linear_max_k(
    num_lines: usize,
    m: usize,
    k_cap: usize,
    budget_bits: u64,
) -> Option<usize> {
    (1..=k_cap)
        .take_while(|&k| k as u64 * num_lines.div_ceil(m) as u64 <= budget_bits)
        .last()
}

/// The grams a dictionary holds, in offset order, as raw bytes.
pub fn dictionary_bytes(dictionary: &rei::GramDictionary) -> Vec<Vec<u8>> {
    dictionary
        .grams()
        .iter()
        .map(|g| g.as_bytes().to_vec())
        .collect()
}
