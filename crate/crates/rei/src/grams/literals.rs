//! Extraction of required literals from regex patterns.
//!
//! A required literal of a pattern is a byte string that occurs as a
//! contiguous substring of every string the pattern matches. Grams taken
//! from required literals are therefore safe to filter on: a line (or line
//! group) that lacks such a gram cannot match the pattern.

use regex_syntax::hir::{Hir, HirKind};
use regex_syntax::ParserBuilder;

use crate::error::SelectError;

/// Required literals of one pattern, in left-to-right order.
pub type LiteralSet = Vec<Vec<u8>>;

/// Extracts maximal required literal runs from `pattern`.
///
/// Walks the parsed pattern and accumulates runs of consecutive literal
/// bytes. A construct that can contribute varying bytes (alternation,
/// character class, zero-admitting repetition, case-insensitive span) both
/// ends the current run and contributes nothing itself; its contents are
/// not guaranteed to appear in every match. A repetition with a minimum of
/// one is entered, since its body occurs at least once, but runs do not
/// extend across its boundary. Every returned literal is a substring of
/// every match of the pattern; patterns built entirely from such constructs
/// yield an empty set.
pub fn extract_literals(pattern: &str) -> Result<LiteralSet, SelectError> {
    let hir = ParserBuilder::new()
        .utf8(false)
        .build()
        .parse(pattern)
        .map_err(|e| SelectError::InvalidRegex {
            pattern: pattern.to_string(),
            message: e.to_string(),
        })?;
    let mut literals = Vec::new();
    let mut run = Vec::new();
    collect(&hir, &mut literals, &mut run);
    flush(&mut literals, &mut run);
    Ok(literals)
}

fn flush(literals: &mut LiteralSet, run: &mut Vec<u8>) {
    if !run.is_empty() {
        literals.push(std::mem::take(run));
    }
}

fn collect(hir: &Hir, literals: &mut LiteralSet, run: &mut Vec<u8>) {
    match hir.kind() {
        HirKind::Literal(lit) => run.extend_from_slice(&lit.0),
        HirKind::Concat(parts) => {
            for part in parts {
                collect(part, literals, run);
            }
        }
        HirKind::Capture(cap) => collect(&cap.sub, literals, run),
        // Zero-width assertions and the empty expression contribute no
        // bytes and keep adjacent literals adjacent in every match.
        HirKind::Empty | HirKind::Look(_) => {}
        HirKind::Repetition(rep) if rep.min == 1 && rep.max == Some(1) => {
            // An exactly-once repetition is the same as its body inline.
            collect(&rep.sub, literals, run);
        }
        HirKind::Repetition(rep) if rep.min >= 1 => {
            // The body occurs at least once, but a second iteration would
            // interrupt any run crossing the boundary.
            flush(literals, run);
            collect(&rep.sub, literals, run);
            flush(literals, run);
        }
        // Alternations, classes (including case-insensitive spans, which
        // parse to classes), and zero-admitting repetitions are skipped.
        _ => flush(literals, run),
    }
}
