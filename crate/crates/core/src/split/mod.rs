//! Split index: dictionary matching with at most `k` mismatches.
//!
//! Every word is cut into `k + 1` pieces. A pattern within Hamming distance
//! `k` of a word must agree exactly with at least one of its pieces, so each
//! piece serves as a hash key whose list stores the rest of the word (the
//! "missing" pieces) in a packed byte layout. A query looks up each of its own
//! pieces and verifies the same-length candidates.

mod coding;
mod dictionary;
mod index;

pub use coding::{select_qgrams, SubstitutionTable, DEFAULT_BUDGET};
pub use dictionary::{Dictionary, IngestStats};
pub use dictionary::MAX_WORD_LEN;
pub use index::{BuildStats, Compression, QueryStats, SplitConfig, SplitIndex, DEFAULT_MAX_LOAD_FACTOR, MAX_K};
pub use coding::{FIRST_CODE, MAX_CODES};

use crate::error::{invalid, Result};

/// Size of each of the first `k` pieces of a word of length `len`; the last
/// piece takes the remainder.
///
/// The size is `len / (k + 1)` rounded half up. When that would leave the
/// last piece empty (e.g. `len = 6, k = 3`), the size is rounded down
/// instead.
pub fn piece_size(len: usize, k: usize) -> usize {
    let parts = k + 1;
    let rounded = (2 * len + parts) / (2 * parts);
    if k * rounded < len {
        rounded
    } else {
        len / parts
    }
}

/// Byte range of piece `i` of a word of length `len`.
#[inline]
pub fn piece_range(len: usize, k: usize, size: usize, i: usize) -> std::ops::Range<usize> {
    let start = i * size;
    let end = if i == k { len } else { start + size };
    start..end
}

/// Cuts `word` into `k + 1` nonempty pieces.
pub fn split_word(word: &[u8], k: usize) -> Result<Vec<&[u8]>> {
    if word.len() <= k {
        return Err(invalid(format!(
            "word of length {} cannot hold {} nonempty pieces",
            word.len(),
            k + 1
        )));
    }
    let size = piece_size(word.len(), k);
    Ok((0..=k)
        .map(|i| &word[piece_range(word.len(), k, size, i)])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_examples() {
        assert_eq!(split_word(b"table", 1).unwrap(), [&b"tab"[..], b"le"]);
        assert_eq!(split_word(b"abcdef", 2).unwrap(), [&b"ab"[..], b"cd", b"ef"]);
        // 7 / 3 = 2.33 rounds to 2
        assert_eq!(split_word(b"abcdefg", 2).unwrap(), [&b"ab"[..], b"cd", b"efg"]);
        assert_eq!(split_word(b"left", 1).unwrap(), [&b"le"[..], b"ft"]);
        assert!(split_word(b"a", 1).is_err());
        assert_eq!(split_word(b"ab", 1).unwrap(), [&b"a"[..], b"b"]);
    }

    #[test]
    fn last_piece_never_empty() {
        // 6 / 4 = 1.5 would round to 2 and leave nothing for the last piece
        assert_eq!(split_word(b"abcdef", 3).unwrap(), [&b"a"[..], b"b", b"c", b"def"]);
        for k in 1..8 {
            for len in k + 1..300 {
                let word = vec![b'x'; len];
                let pieces = split_word(&word, k).unwrap();
                assert_eq!(pieces.len(), k + 1);
                assert!(pieces.iter().all(|p| !p.is_empty()), "len {len} k {k}");
                assert_eq!(pieces.iter().map(|p| p.len()).sum::<usize>(), len);
            }
        }
    }
}
