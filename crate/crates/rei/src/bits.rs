//! Word-level helpers for the k-bit group vectors and masks.
//!
//! Layout, shared by every index and mask in the crate: bit offset i lives
//! in word i/64 (words ascending), at bit position i mod 64, least
//! significant bit first.

/// Number of 64-bit words holding `bits` bits.
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

pub(crate) fn set_bit(words: &mut [u64], i: usize) {
    words[i / 64] |= 1u64 << (i % 64);
}

pub(crate) fn get_bit(words: &[u64], i: usize) -> bool {
    words[i / 64] >> (i % 64) & 1 == 1
}

/// Mask of the valid (low) bit positions in the last word of a `bits`-bit
/// vector; all ones when `bits` is a multiple of 64.
pub(crate) fn tail_mask(bits: usize) -> u64 {
    match bits % 64 {
        0 => !0,
        r => (1u64 << r) - 1,
    }
}
