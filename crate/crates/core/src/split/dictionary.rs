use crate::error::{Error, Result};
use std::collections::HashSet;

/// Longest word the 8-bit list counters can describe.
pub const MAX_WORD_LEN: usize = 255;

/// Deduplicated word list in order of first occurrence.
///
/// Words are 1..=255 bytes of values 1..=127; the upper half of the byte
/// range is reserved for substitution codes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    words: Vec<Vec<u8>>,
}

/// What happened to each candidate word during ingestion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub accepted: usize,
    pub duplicates: usize,
    pub empty: usize,
    pub too_long: usize,
    pub bad_bytes: usize,
}

fn check_word(w: &[u8]) -> std::result::Result<(), &'static str> {
    if w.is_empty() {
        Err("empty")
    } else if w.len() > MAX_WORD_LEN {
        Err("too long")
    } else if w.iter().any(|&b| b == 0 || b >= 128) {
        Err("bad bytes")
    } else {
        Ok(())
    }
}

impl Dictionary {
    /// Strict construction: any invalid word is an error.
    pub fn new<I, W>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = W>,
        W: Into<Vec<u8>>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for w in words {
            let w = w.into();
            if let Err(why) = check_word(&w) {
                return Err(Error::MalformedInput(format!(
                    "word {:?} rejected: {why}",
                    String::from_utf8_lossy(&w)
                )));
            }
            if seen.insert(w.clone()) {
                out.push(w);
            }
        }
        Ok(Self { words: out })
    }

    /// Lenient construction that skips invalid words and counts them.
    pub fn ingest<I, W>(words: I) -> (Self, IngestStats)
    where
        I: IntoIterator<Item = W>,
        W: Into<Vec<u8>>,
    {
        let mut stats = IngestStats::default();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for w in words {
            let w = w.into();
            match check_word(&w) {
                Err("empty") => stats.empty += 1,
                Err("too long") => stats.too_long += 1,
                Err(_) => stats.bad_bytes += 1,
                Ok(()) if seen.insert(w.clone()) => {
                    stats.accepted += 1;
                    out.push(w);
                }
                Ok(()) => stats.duplicates += 1,
            }
        }
        (Self { words: out }, stats)
    }

    pub fn words(&self) -> &[Vec<u8>] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Sum of word lengths.
    pub fn total_len(&self) -> usize {
        self.words.iter().map(Vec::len).sum()
    }
}
