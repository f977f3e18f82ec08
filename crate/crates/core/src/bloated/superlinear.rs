use std::ops::Range;

use super::{CountOutcome, GramDirectory, GramEntry};
use crate::chained::LoadStats;
use crate::envelope::{Reader, Writer};
use crate::error::{invalid, Error, Result};
use crate::hashing::SharedHash;
use crate::suffix::{bwt_forward, bwt_inverse, check_pattern, BwtString, FmIndex, SuffixArray};
use crate::text::Corpus;

pub const DEFAULT_Q_MAX: usize = 128;

/// FM-bloated with every power-of-two gram up to `q_max` preceding every
/// suffix. Space grows with `n log q_max`; a count query takes one LF step
/// per set bit of the pattern length.
pub struct SuperlinearIndex {
    text: Vec<u8>,
    fm: FmIndex,
    q_max: usize,
    directory: GramDirectory,
}

impl SuperlinearIndex {
    pub fn build(corpus: &Corpus, q_max: usize, hasher: SharedHash, max_load_factor: f64) -> Result<Self> {
        if q_max == 0 || !q_max.is_power_of_two() {
            return Err(invalid(format!("q_max = {q_max} is not a power of two")));
        }
        let text = corpus.as_bytes();
        let n = text.len();
        let sa = SuffixArray::build(corpus);
        let isa = sa.inverse();
        let bwt = bwt_forward(corpus, &sa)?;
        let mut directory = GramDirectory::new(hasher, max_load_factor)?;

        let lengths: Vec<usize> = std::iter::successors(Some(1usize), |q| Some(q * 2))
            .take_while(|&q| q <= q_max)
            .collect();
        // T[i-q, i-1] never reaches the terminator since i <= n-1.
        for i in 1..n {
            for &q in lengths.iter().take_while(|&&q| q <= i) {
                let start = i - q;
                let (e, _) = directory.map.get_or_insert_with(
                    &text[start..i],
                    |e| e.key(text),
                    || GramEntry {
                        offset: start as u32,
                        len: q as u32,
                        first_row: u32::MAX,
                        list_start: 0,
                        count: 0,
                    },
                );
                e.count += 1;
                e.first_row = e.first_row.min(isa[start]);
            }
        }
        directory.layout();
        // Visiting rows in order appends to each list in increasing order;
        // list_start serves as the write cursor and is rewound afterwards.
        for row in 0..n {
            let i = sa.get(row);
            for &q in lengths.iter().take_while(|&&q| q <= i) {
                let e = lookup_mut(&mut directory, text, &text[i - q..i]);
                let slot = e.list_start as usize;
                e.list_start += 1;
                directory.pool[slot] = row as u32;
            }
        }
        for e in directory.map.iter_mut() {
            e.list_start -= e.count;
        }

        Ok(Self {
            text: text.to_vec(),
            fm: FmIndex::from_bwt(bwt),
            q_max,
            directory,
        })
    }

    pub fn q_max(&self) -> usize {
        self.q_max
    }

    pub fn corpus_bytes(&self) -> &[u8] {
        &self.text
    }

    pub fn fm(&self) -> &FmIndex {
        &self.fm
    }

    /// Occurrence count of `pattern`.
    pub fn count(&self, pattern: &[u8]) -> Result<usize> {
        Ok(self.count_instrumented(pattern)?.count)
    }

    /// Count together with the number of LF steps taken. The pattern is
    /// consumed right to left, each step taking the longest power-of-two
    /// suffix (at most `q_max`) of what remains.
    pub fn count_instrumented(&self, pattern: &[u8]) -> Result<CountOutcome> {
        check_pattern(pattern)?;
        let mut out = CountOutcome::default();
        if pattern.len() >= self.text.len() {
            return Ok(out);
        }
        let mut rows: Range<usize> = self.fm.full_range();
        let mut remaining = pattern.len();
        while remaining > 0 {
            let q = prev_power_of_two(remaining).min(self.q_max);
            let Some(e) = self.directory.lookup(&self.text, &pattern[remaining - q..remaining]) else {
                return Ok(out);
            };
            rows = self.directory.step(e, rows);
            out.lf_steps += 1;
            if rows.is_empty() {
                return Ok(out);
            }
            remaining -= q;
        }
        out.count = rows.len();
        Ok(out)
    }

    /// Sorted occurrence rows (0-based) of `gram`, if it was extracted.
    pub fn gram_rows(&self, gram: &[u8]) -> Option<&[u32]> {
        self.directory
            .lookup(&self.text, gram)
            .map(|e| self.directory.list(e))
    }

    /// `(gram, first row, occurrence rows)` for every directory entry.
    pub fn directory_entries(&self) -> impl Iterator<Item = (&[u8], usize, &[u32])> + '_ {
        self.directory.entries(&self.text)
    }

    pub fn directory_len(&self) -> usize {
        self.directory.map.len()
    }

    pub fn load_stats(&self) -> LoadStats {
        self.directory.stats()
    }

    pub fn heap_bytes(&self) -> usize {
        self.text.len() + self.fm.heap_bytes() + self.directory.heap_bytes()
    }

    pub fn hash_name(&self) -> &'static str {
        self.directory.map.hasher().name()
    }

    pub fn encode(&self, w: &mut Writer) {
        w.put_u32(self.q_max as u32);
        w.put_bytes(self.fm.bwt());
        self.directory.encode(w);
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let q_max = r.u32()? as usize;
        if q_max == 0 || !q_max.is_power_of_two() {
            return Err(Error::Format(format!("bad q_max {q_max}")));
        }
        let bwt = BwtString::from_bytes(r.bytes()?.to_vec());
        let corpus = bwt_inverse(&bwt).map_err(|e| Error::Format(e.to_string()))?;
        let directory = GramDirectory::decode(r, corpus.len())?;
        Ok(Self {
            text: corpus.as_bytes().to_vec(),
            fm: FmIndex::from_bwt(bwt),
            q_max,
            directory,
        })
    }
}

fn lookup_mut<'a>(dir: &'a mut GramDirectory, text: &[u8], gram: &[u8]) -> &'a mut GramEntry {
    let (e, fresh) = dir
        .map
        .get_or_insert_with(gram, |e| e.key(text), || unreachable!("gram counted in first pass"));
    debug_assert!(!fresh);
    e
}

fn prev_power_of_two(x: usize) -> usize {
    debug_assert!(x > 0);
    1 << (usize::BITS - 1 - x.leading_zeros())
}
