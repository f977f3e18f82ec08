use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Generated { seed: u64 },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryWorkload {
    pub queries: Vec<Vec<u8>>,
    /// Index of the dictionary word each generated query was derived from.
    pub sources: Vec<usize>,
    pub provenance: Provenance,
}

impl QueryWorkload {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }
}

/// Samples `count` words uniformly and, for each of `max_errors` rounds,
/// substitutes a uniformly chosen position with probability
/// `per_error_probability`. The replacement is uniform over the dictionary
/// alphabet minus the current symbol and minus the source word's symbol, so
/// a repeated position never reverts to the original.
pub fn generate_noisy_queries<W: AsRef<[u8]>>(
    words: &[W],
    count: usize,
    max_errors: usize,
    per_error_probability: f64,
    seed: u64,
) -> Result<QueryWorkload> {
    if words.is_empty() {
        return Err(invalid("cannot generate queries from an empty dictionary"));
    }
    if !(0.0..=1.0).contains(&per_error_probability) {
        return Err(invalid("error probability must lie in [0, 1]"));
    }
    let mut present = [false; 256];
    for w in words {
        for &b in w.as_ref() {
            present[b as usize] = true;
        }
    }
    let alphabet: Vec<u8> = (0..=255u8).filter(|&b| present[b as usize]).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut queries = Vec::with_capacity(count);
    let mut sources = Vec::with_capacity(count);
    for _ in 0..count {
        let src = rng.gen_range(0..words.len());
        let mut q = words[src].as_ref().to_vec();
        for _ in 0..max_errors {
            if q.is_empty() || alphabet.len() < 2 || !rng.gen_bool(per_error_probability) {
                continue;
            }
            let pos = rng.gen_range(0..q.len());
            let (current, original) = (q[pos], words[src].as_ref()[pos]);
            let choices: Vec<u8> = alphabet.iter().copied().filter(|&c| c != current && c != original).collect();
            if choices.is_empty() {
                continue;
            }
            let pick = choices[rng.gen_range(0..choices.len())];
            q[pos] = pick;
        }
        queries.push(q);
        sources.push(src);
    }
    Ok(QueryWorkload {
        queries,
        sources,
        provenance: Provenance::Generated { seed },
    })
}

/// Patterns for full-text queries: substrings of `text` with lengths drawn
/// from `lengths`, a fraction `absent` of them mutated at one random position
/// so that many no longer occur.
pub fn sample_patterns(text: &[u8], count: usize, lengths: &[usize], absent: f64, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let usable: Vec<usize> = lengths.iter().copied().filter(|&m| m >= 1 && m <= text.len()).collect();
    if usable.is_empty() {
        return Vec::new();
    }
    let mut present = [false; 256];
    for &b in text {
        present[b as usize] = true;
    }
    let alphabet: Vec<u8> = (1..=255u8).filter(|&b| present[b as usize]).collect();
    (0..count)
        .map(|_| {
            let m = usable[rng.gen_range(0..usable.len())];
            let start = rng.gen_range(0..=text.len() - m);
            let mut p = text[start..start + m].to_vec();
            if alphabet.len() > 1 && rng.gen_bool(absent) {
                let pos = rng.gen_range(0..m);
                p[pos] = alphabet[rng.gen_range(0..alphabet.len())];
            }
            p
        })
        .collect()
}
