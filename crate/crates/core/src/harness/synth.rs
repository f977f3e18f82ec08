//! Synthetic corpora and dictionaries.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::text::ENGLISH_LETTER_FREQUENCIES;

/// Text drawn i.i.d. from `weights`.
pub fn weighted_text(len: usize, weights: &[(u8, u64)], seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = WeightedIndex::new(weights.iter().map(|w| w.1)).expect("positive weights");
    (0..len).map(|_| weights[dist.sample(&mut rng)].0).collect()
}

/// Uniform text over `ACGT`.
pub fn dna_text(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| b"ACGT"[rng.gen_range(0..4)]).collect()
}

/// Words of English-frequency letters separated by spaces, with a small
/// vocabulary so that substrings repeat the way they do in real prose.
pub fn english_like_text(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab = random_words(2000, 1..=10, &ENGLISH_LETTER_FREQUENCIES, seed ^ 0x5eed);
    // Zipf-like choice: low indices are much more frequent.
    let zipf = WeightedIndex::new((1..=vocab.len()).map(|r| 1.0 / r as f64)).expect("weights");
    let mut out = Vec::with_capacity(len + 16);
    while out.len() < len {
        out.extend_from_slice(&vocab[zipf.sample(&mut rng)]);
        out.push(if rng.gen_ratio(1, 12) { b'\n' } else { b' ' });
    }
    out.truncate(len);
    out
}

/// `count` distinct words with lengths from `lengths` over weighted letters.
pub fn random_words(
    count: usize,
    lengths: std::ops::RangeInclusive<usize>,
    weights: &[(u8, u64)],
    seed: u64,
) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = WeightedIndex::new(weights.iter().map(|w| w.1)).expect("positive weights");
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < count.saturating_mul(50).max(1000) {
        attempts += 1;
        let len = rng.gen_range(lengths.clone());
        let w: Vec<u8> = (0..len).map(|_| weights[dist.sample(&mut rng)].0).collect();
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}
