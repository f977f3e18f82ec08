//! Mean number of symbol comparisons needed to tell two random strings
//! apart, scanning left to right up to the first mismatch.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::text::FrequencyTable;

pub const DEFAULT_LENGTH: usize = 32;

/// Limit of the mean for uniform symbols: `1 + 1 / (sigma - 1)`.
pub fn expected_comparisons(sigma: usize) -> f64 {
    1.0 + 1.0 / (sigma as f64 - 1.0)
}

/// Limit for i.i.d. symbols with the table's probabilities:
/// `1 / (1 - sum p^2)`.
pub fn expected_comparisons_weighted(freq: &FrequencyTable) -> f64 {
    let collide: f64 = freq.symbols().map(|(s, _)| freq.probability(s).powi(2)).sum();
    1.0 / (1.0 - collide)
}

fn comparisons(a: &[u8], b: &[u8]) -> usize {
    match a.iter().zip(b).position(|(x, y)| x != y) {
        Some(i) => i + 1,
        None => a.len(),
    }
}

/// Empirical mean over `pairs` uniform random pairs of `length` symbols.
pub fn avg_comparison_experiment(sigma: usize, pairs: usize, length: usize, seed: u64) -> Result<f64> {
    if sigma < 2 {
        return Err(invalid(format!("alphabet size must be at least 2, got {sigma}")));
    }
    if sigma > 256 || length == 0 || pairs == 0 {
        return Err(invalid("need sigma <= 256, length >= 1 and pairs >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut a, mut b) = (vec![0u8; length], vec![0u8; length]);
    let mut total = 0usize;
    for _ in 0..pairs {
        for i in 0..length {
            a[i] = rng.gen_range(0..sigma) as u8;
            b[i] = rng.gen_range(0..sigma) as u8;
        }
        total += comparisons(&a, &b);
    }
    Ok(total as f64 / pairs as f64)
}

/// Same experiment with symbols drawn from `freq`.
pub fn avg_comparison_weighted(freq: &FrequencyTable, pairs: usize, length: usize, seed: u64) -> Result<f64> {
    let symbols: Vec<(u8, u64)> = freq.symbols().collect();
    if symbols.len() < 2 || length == 0 || pairs == 0 {
        return Err(invalid("need at least two symbols, length >= 1 and pairs >= 1"));
    }
    let dist = WeightedIndex::new(symbols.iter().map(|s| s.1)).map_err(|e| invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut a, mut b) = (vec![0u8; length], vec![0u8; length]);
    let mut total = 0usize;
    for _ in 0..pairs {
        for i in 0..length {
            a[i] = symbols[dist.sample(&mut rng)].0;
            b[i] = symbols[dist.sample(&mut rng)].0;
        }
        total += comparisons(&a, &b);
    }
    Ok(total as f64 / pairs as f64)
}
