//! FM-bloated: an FM-index whose count table and occurrence lists also cover
//! multi-symbol grams, so backward search can jump over several pattern
//! symbols per LF step.
//!
//! For a gram `g`, the directory keeps the first SA row of suffixes starting
//! with `g` and the sorted list `L_g` of rows whose suffix is preceded by `g`.
//! Given the rows `[s, e)` of suffixes starting with `X`, the rows of `g·X`
//! are `[first + |{r ∈ L_g : r < s}|, first + |{r ∈ L_g : r < e}|)`.

mod linear;
mod superlinear;

pub use linear::{LinearIndex, DEFAULT_ALPHA, DEFAULT_Q};
pub use superlinear::{SuperlinearIndex, DEFAULT_Q_MAX};

use std::ops::Range;

use crate::chained::{ChainedMap, LoadStats};
use crate::envelope::{Reader, Writer};
use crate::error::{Error, Result};
use crate::hashing::{self, SharedHash};

/// Default maximum load factor of the gram directory.
pub const DEFAULT_MAX_LOAD_FACTOR: f64 = 2.81;
/// Lists at least this long are searched by bisection, shorter ones linearly.
pub const BINARY_SEARCH_THRESHOLD: usize = 16;

/// Result of an instrumented count query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountOutcome {
    pub count: usize,
    /// LF steps taken, multi-symbol gram steps counting once.
    pub lf_steps: usize,
}

/// Number of entries `<= row` in a strictly increasing list.
pub fn list_rank(list: &[u32], row: usize) -> usize {
    count_below(list, row.saturating_add(1))
}

/// Number of entries `< bound`.
#[inline]
pub fn count_below(list: &[u32], bound: usize) -> usize {
    if list.len() >= BINARY_SEARCH_THRESHOLD {
        count_below_binary(list, bound)
    } else {
        count_below_linear(list, bound)
    }
}

#[inline]
pub fn count_below_linear(list: &[u32], bound: usize) -> usize {
    list.iter().take_while(|&&r| (r as usize) < bound).count()
}

#[inline]
pub fn count_below_binary(list: &[u32], bound: usize) -> usize {
    list.partition_point(|&r| (r as usize) < bound)
}

/// A gram stored implicitly as `(offset, len)` into the index's text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct GramEntry {
    pub offset: u32,
    pub len: u32,
    pub first_row: u32,
    pub list_start: u32,
    pub count: u32,
}

impl GramEntry {
    #[inline]
    pub fn key<'t>(&self, text: &'t [u8]) -> &'t [u8] {
        &text[self.offset as usize..(self.offset + self.len) as usize]
    }
}

pub(crate) struct GramDirectory {
    pub map: ChainedMap<GramEntry>,
    pub pool: Vec<u32>,
}

impl GramDirectory {
    pub fn new(hasher: SharedHash, max_load_factor: f64) -> Result<Self> {
        Ok(Self {
            map: ChainedMap::new(hasher, max_load_factor)?,
            pool: Vec::new(),
        })
    }

    #[inline]
    pub fn lookup(&self, text: &[u8], gram: &[u8]) -> Option<&GramEntry> {
        self.map.get(gram, |e| e.key(text))
    }

    #[inline]
    pub fn list(&self, e: &GramEntry) -> &[u32] {
        &self.pool[e.list_start as usize..(e.list_start + e.count) as usize]
    }

    /// Rows of `gram·X` from the rows of `X`.
    #[inline]
    pub fn step(&self, e: &GramEntry, rows: Range<usize>) -> Range<usize> {
        let list = self.list(e);
        let first = e.first_row as usize;
        first + count_below(list, rows.start)..first + count_below(list, rows.end)
    }

    /// Assigns contiguous pool slices in bucket order; `count` must be final.
    pub fn layout(&mut self) {
        let mut next = 0u32;
        for e in self.map.iter_mut() {
            e.list_start = next;
            next += e.count;
        }
        self.pool = vec![0; next as usize];
    }

    pub fn entries<'a>(&'a self, text: &'a [u8]) -> impl Iterator<Item = (&'a [u8], usize, &'a [u32])> + 'a {
        self.map
            .iter()
            .map(move |e| (e.key(text), e.first_row as usize, self.list(e)))
    }

    pub fn stats(&self) -> LoadStats {
        self.map.stats()
    }

    pub fn heap_bytes(&self) -> usize {
        let stats = self.map.stats();
        stats.entries * std::mem::size_of::<GramEntry>()
            + stats.buckets * std::mem::size_of::<Vec<GramEntry>>()
            + self.pool.len() * 4
    }

    pub fn encode(&self, w: &mut Writer) {
        w.put_str(self.map.hasher().name());
        w.put_f64(self.map.max_load_factor());
        w.put_u32(self.map.buckets().len() as u32);
        for bucket in self.map.buckets() {
            w.put_u32(bucket.len() as u32);
            for e in bucket {
                for v in [e.offset, e.len, e.first_row, e.list_start, e.count] {
                    w.put_u32(v);
                }
            }
        }
        w.put_u32s(&self.pool);
    }

    /// Reads a directory and checks every entry against `text_len` and the
    /// pool bounds.
    pub fn decode(r: &mut Reader<'_>, text_len: usize) -> Result<Self> {
        let hasher = hashing::by_name(&r.string()?)?;
        let max_load_factor = r.f64()?;
        let nbuckets = r.u32()? as usize;
        let mut buckets = Vec::with_capacity(nbuckets.min(1 << 24));
        for _ in 0..nbuckets {
            let len = r.u32()? as usize;
            let mut bucket = Vec::with_capacity(len.min(1 << 16));
            for _ in 0..len {
                bucket.push(GramEntry {
                    offset: r.u32()?,
                    len: r.u32()?,
                    first_row: r.u32()?,
                    list_start: r.u32()?,
                    count: r.u32()?,
                });
            }
            buckets.push(bucket);
        }
        let pool = r.u32s()?;
        for e in buckets.iter().flatten() {
            let key_ok = (e.offset as u64 + e.len as u64) <= text_len as u64 && e.len > 0;
            let list_ok = (e.list_start as u64 + e.count as u64) <= pool.len() as u64;
            let rows_ok = (e.first_row as u64 + e.count as u64) <= text_len as u64;
            if !(key_ok && list_ok && rows_ok) {
                return Err(Error::Format("gram entry out of bounds".into()));
            }
        }
        if pool.iter().any(|&r| r as usize >= text_len) {
            return Err(Error::Format("occurrence row out of bounds".into()));
        }
        Ok(Self {
            map: ChainedMap::from_buckets(hasher, max_load_factor, buckets)?,
            pool,
        })
    }
}
