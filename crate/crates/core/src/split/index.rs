//! Frozen split index layout.
//!
//! ```text
//! bucket_offsets  u32 per bucket + 1, into bucket_pool
//! bucket_pool     per key: [key_len u8][key bytes][list handle u32 LE]
//! list_pool       per list, starting at its handle:
//!                   k = 1: [boundary u16 LE] entries... [0]
//!                   k > 1: entries... [0]
//! entry           [len u8] ([dec_len u8] if compressed) ([tag u8] if k > 1) [bytes]
//! ```
//!
//! For `k = 1`, entries whose key is the leading piece come first. The
//! boundary is the 1-based ordinal of the first entry whose key is the
//! trailing piece, or 0 when there is none. For `k > 1` the tag is the index
//! of the key piece.

use std::ops::Range;

use super::coding::{select_qgrams, SubstitutionTable, DEFAULT_BUDGET};
use super::dictionary::{Dictionary, MAX_WORD_LEN};
use super::{piece_range, piece_size};
use crate::chained::ChainedMap;
use crate::envelope::{Reader, Writer};
use crate::error::{invalid, Error, Result};
use crate::hashing::{self, SharedHash};

pub const DEFAULT_MAX_LOAD_FACTOR: f64 = 2.0;
/// Tags are stored in one byte.
pub const MAX_K: usize = 254;

#[derive(Debug, Clone, Default)]
pub enum Compression {
    #[default]
    None,
    /// Select a table from the dictionary.
    Select { budget: usize, lengths: Vec<usize> },
    Table(SubstitutionTable),
}

impl Compression {
    pub fn default_select() -> Self {
        Compression::Select {
            budget: DEFAULT_BUDGET,
            lengths: vec![2, 3, 4],
        }
    }
}

#[derive(Clone)]
pub struct SplitConfig {
    pub max_load_factor: f64,
    pub hasher: SharedHash,
    pub compression: Compression,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            max_load_factor: DEFAULT_MAX_LOAD_FACTOR,
            hasher: hashing::default_hash(),
            compression: Compression::None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BuildStats {
    pub words_indexed: usize,
    /// Words with at most `k` symbols, which cannot be cut into `k + 1`
    /// nonempty pieces.
    pub words_skipped: usize,
    pub keys: usize,
    pub entries: usize,
    pub buckets: usize,
    pub load_factor: f64,
    pub max_chain: usize,
    pub list_bytes: usize,
    pub index_bytes: usize,
}

/// Query instrumentation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub lists_probed: usize,
    /// Entries whose counter was read with a view to verification.
    pub entries_inspected: usize,
    /// Entries passed over by counter hops or tag mismatch.
    pub entries_skipped: usize,
    pub length_rejections: usize,
    pub verifications: usize,
    /// `(piece index, key, entries inspected)` per list found.
    pub probes: Vec<(usize, Vec<u8>, usize)>,
}

/// Key stored as a piece of a dictionary word.
struct KeyBuild {
    word: u32,
    start: u8,
    len: u8,
    entries: Vec<(u8, Vec<u8>)>,
}

impl KeyBuild {
    fn key<'d>(&self, words: &'d [Vec<u8>]) -> &'d [u8] {
        let start = self.start as usize;
        &words[self.word as usize][start..start + self.len as usize]
    }
}

pub struct SplitIndex {
    k: usize,
    hasher: SharedHash,
    max_load_factor: f64,
    table: Option<SubstitutionTable>,
    bucket_offsets: Vec<u32>,
    bucket_pool: Vec<u8>,
    list_pool: Vec<u8>,
    stats: BuildStats,
}

/// Word minus piece `i`.
fn missing_piece(word: &[u8], r: &Range<usize>) -> Vec<u8> {
    let mut m = Vec::with_capacity(word.len() - r.len());
    m.extend_from_slice(&word[..r.start]);
    m.extend_from_slice(&word[r.end..]);
    m
}

/// Hamming distance between `missing` and the pattern with `r` removed,
/// giving up once it exceeds `k`.
#[inline]
fn within(missing: &[u8], pattern: &[u8], r: &Range<usize>, k: usize) -> bool {
    let (head, tail) = missing.split_at(r.start);
    let mut errors = 0;
    for (a, b) in head.iter().zip(&pattern[..r.start]).chain(tail.iter().zip(&pattern[r.end..])) {
        if a != b {
            errors += 1;
            if errors > k {
                return false;
            }
        }
    }
    true
}

impl SplitIndex {
    pub fn build(dict: &Dictionary, k: usize, config: &SplitConfig) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        if k > MAX_K {
            return Err(invalid(format!("k = {k} exceeds {MAX_K}")));
        }
        let table = match &config.compression {
            Compression::None => None,
            Compression::Select { budget, lengths } => Some(select_qgrams(dict.words(), *budget, lengths)?),
            Compression::Table(t) => Some(t.clone()),
        };
        if let Some(t) = &table {
            if dict.words().iter().any(|w| w.iter().any(|&b| t.is_code(b))) {
                return Err(Error::UnsupportedAlphabet(
                    "dictionary contains a substitution code byte".into(),
                ));
            }
        }

        let mut map: ChainedMap<KeyBuild> = ChainedMap::new(config.hasher.clone(), config.max_load_factor)?;
        let mut stats = BuildStats::default();
        let words = dict.words();
        for (wi, word) in words.iter().enumerate() {
            if word.len() <= k {
                stats.words_skipped += 1;
                continue;
            }
            stats.words_indexed += 1;
            let size = piece_size(word.len(), k);
            for i in 0..=k {
                let r = piece_range(word.len(), k, size, i);
                let key = &word[r.clone()];
                let (slot, _) = map.get_or_insert_with(
                    key,
                    |e| e.key(words),
                    || KeyBuild {
                        word: wi as u32,
                        start: r.start as u8,
                        len: r.len() as u8,
                        entries: Vec::new(),
                    },
                );
                slot.entries.push((i as u8, missing_piece(word, &r)));
            }
        }
        let load = map.stats();

        let mut bucket_offsets = Vec::with_capacity(load.buckets + 1);
        let mut bucket_pool = Vec::new();
        let mut list_pool = Vec::new();
        let mut coded = Vec::new();
        for bucket in map.into_buckets() {
            bucket_offsets.push(u32::try_from(bucket_pool.len()).map_err(|_| invalid("bucket pool exceeds 4 GiB"))?);
            for mut kb in bucket {
                let handle = u32::try_from(list_pool.len()).map_err(|_| invalid("list pool exceeds 4 GiB"))?;
                let key = kb.key(words);
                bucket_pool.push(key.len() as u8);
                bucket_pool.extend_from_slice(key);
                bucket_pool.extend_from_slice(&handle.to_le_bytes());
                if k == 1 {
                    kb.entries.sort_by_key(|e| e.0);
                    let boundary = match kb.entries.iter().position(|e| e.0 == 1) {
                        Some(p) => u16::try_from(p + 1).map_err(|_| {
                            invalid(format!(
                                "list for key {:?} exceeds the 16-bit boundary",
                                String::from_utf8_lossy(key)
                            ))
                        })?,
                        None => 0,
                    };
                    list_pool.extend_from_slice(&boundary.to_le_bytes());
                }
                for (tag, missing) in &kb.entries {
                    match &table {
                        Some(t) => {
                            coded.clear();
                            t.encode_into(missing, &mut coded);
                            list_pool.push(coded.len() as u8);
                            list_pool.push(missing.len() as u8);
                            if k > 1 {
                                list_pool.push(*tag);
                            }
                            list_pool.extend_from_slice(&coded);
                        }
                        None => {
                            list_pool.push(missing.len() as u8);
                            if k > 1 {
                                list_pool.push(*tag);
                            }
                            list_pool.extend_from_slice(missing);
                        }
                    }
                    stats.entries += 1;
                }
                list_pool.push(0);
                stats.keys += 1;
            }
        }
        bucket_offsets.push(bucket_pool.len() as u32);

        let mut index = Self {
            k,
            hasher: config.hasher.clone(),
            max_load_factor: config.max_load_factor,
            table,
            bucket_offsets,
            bucket_pool,
            list_pool,
            stats,
        };
        index.stats.buckets = load.buckets;
        index.stats.load_factor = load.load_factor;
        index.stats.max_chain = load.max_chain;
        index.stats.list_bytes = index.list_pool.len();
        index.stats.index_bytes = index.index_bytes();
        Ok(index)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn stats(&self) -> &BuildStats {
        &self.stats
    }

    pub fn table(&self) -> Option<&SubstitutionTable> {
        self.table.as_ref()
    }

    pub fn hash_name(&self) -> &'static str {
        self.hasher.name()
    }

    pub fn max_load_factor(&self) -> f64 {
        self.max_load_factor
    }

    pub fn list_bytes(&self) -> usize {
        self.list_pool.len()
    }

    /// Bytes of the frozen structure: bucket directory, keys with handles,
    /// lists and the substitution table.
    pub fn index_bytes(&self) -> usize {
        self.bucket_offsets.len() * 4
            + self.bucket_pool.len()
            + self.list_pool.len()
            + self.table.as_ref().map_or(0, SubstitutionTable::heap_bytes)
    }

    fn find_list(&self, key: &[u8]) -> Option<usize> {
        let nb = self.bucket_offsets.len() - 1;
        let b = (self.hasher.hash(key) as usize) & (nb - 1);
        let bucket = &self.bucket_pool[self.bucket_offsets[b] as usize..self.bucket_offsets[b + 1] as usize];
        let mut at = 0;
        while at < bucket.len() {
            let len = bucket[at] as usize;
            let stored = &bucket[at + 1..at + 1 + len];
            let handle = &bucket[at + 1 + len..at + 5 + len];
            if stored == key {
                return Some(u32::from_le_bytes(handle.try_into().expect("4 bytes")) as usize);
            }
            at += 5 + len;
        }
        None
    }

    #[inline]
    fn header_len(&self) -> usize {
        1 + usize::from(self.table.is_some()) + usize::from(self.k > 1)
    }

    /// Words within Hamming distance `k` of `pattern`, sorted.
    pub fn query(&self, pattern: &[u8], k: usize) -> Result<Vec<Vec<u8>>> {
        self.query_with(pattern, k, None)
    }

    pub fn query_instrumented(&self, pattern: &[u8], k: usize, stats: &mut QueryStats) -> Result<Vec<Vec<u8>>> {
        self.query_with(pattern, k, Some(stats))
    }

    fn query_with(&self, pattern: &[u8], k: usize, mut stats: Option<&mut QueryStats>) -> Result<Vec<Vec<u8>>> {
        if k != self.k {
            return Err(invalid(format!("index was built for k = {}, queried with k = {k}", self.k)));
        }
        let m = pattern.len();
        if m <= k {
            return Err(invalid(format!(
                "pattern of length {m} is shorter than k + 1 = {}",
                k + 1
            )));
        }
        let mut out = Vec::new();
        if m > MAX_WORD_LEN {
            return Ok(out);
        }
        let size = piece_size(m, k);
        let header = self.header_len();
        let mut decoded = Vec::new();
        for i in 0..=k {
            let r = piece_range(m, k, size, i);
            let key = &pattern[r.clone()];
            let Some(handle) = self.find_list(key) else {
                continue;
            };
            let want = (m - r.len()) as u8;
            let mut at = handle;
            let mut ordinal = 1usize;
            // Entries in [first, last) carry role i; 0 means unbounded.
            let (first, last) = if self.k == 1 {
                let b = u16::from_le_bytes([self.list_pool[at], self.list_pool[at + 1]]) as usize;
                at += 2;
                match (i, b) {
                    (0, 0) => (1, 0),
                    (0, b) => (1, b),
                    (_, 0) => (usize::MAX, 0),
                    (_, b) => (b, 0),
                }
            } else {
                (1, 0)
            };
            let mut inspected = 0;
            let mut skipped = 0;
            let mut length_rejections = 0;
            let mut verifications = 0;
            while first != usize::MAX && self.list_pool[at] != 0 {
                if last != 0 && ordinal >= last {
                    break;
                }
                let len = self.list_pool[at] as usize;
                let entry_end = at + header + len;
                let role_ok = ordinal >= first && (self.k == 1 || self.list_pool[at + header - 1] as usize == i);
                if !role_ok {
                    skipped += 1;
                    at = entry_end;
                    ordinal += 1;
                    continue;
                }
                inspected += 1;
                let dec_len = if self.table.is_some() { self.list_pool[at + 1] } else { self.list_pool[at] };
                if dec_len != want {
                    length_rejections += 1;
                } else {
                    let body = &self.list_pool[at + header..entry_end];
                    let missing: &[u8] = match &self.table {
                        Some(t) => {
                            decoded.clear();
                            t.decode_into(body, &mut decoded)?;
                            &decoded
                        }
                        None => body,
                    };
                    verifications += 1;
                    if within(missing, pattern, &r, k) {
                        let mut word = Vec::with_capacity(m);
                        word.extend_from_slice(&missing[..r.start]);
                        word.extend_from_slice(key);
                        word.extend_from_slice(&missing[r.start..]);
                        out.push(word);
                    }
                }
                at = entry_end;
                ordinal += 1;
            }
            if let Some(s) = stats.as_deref_mut() {
                s.lists_probed += 1;
                s.entries_inspected += inspected;
                s.entries_skipped += skipped;
                s.length_rejections += length_rejections;
                s.verifications += verifications;
                s.probes.push((i, key.to_vec(), inspected));
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Every `(key, piece index, missing piece)` in layout order, decoded.
    pub fn entries(&self) -> Result<Vec<(Vec<u8>, usize, Vec<u8>)>> {
        let mut out = Vec::new();
        let header = self.header_len();
        let mut at = 0;
        while at < self.bucket_pool.len() {
            let len = self.bucket_pool[at] as usize;
            let key = &self.bucket_pool[at + 1..at + 1 + len];
            let handle = u32::from_le_bytes(self.bucket_pool[at + 1 + len..at + 5 + len].try_into().expect("4 bytes"));
            at += 5 + len;
            let mut pos = handle as usize;
            let mut boundary = 0;
            if self.k == 1 {
                boundary = u16::from_le_bytes([self.list_pool[pos], self.list_pool[pos + 1]]) as usize;
                pos += 2;
            }
            let mut ordinal = 1;
            while self.list_pool[pos] != 0 {
                let n = self.list_pool[pos] as usize;
                let tag = if self.k == 1 {
                    usize::from(boundary != 0 && ordinal >= boundary)
                } else {
                    self.list_pool[pos + header - 1] as usize
                };
                let body = &self.list_pool[pos + header..pos + header + n];
                let missing = match &self.table {
                    Some(t) => t.decode(body)?,
                    None => body.to_vec(),
                };
                out.push((key.to_vec(), tag, missing));
                pos += header + n;
                ordinal += 1;
            }
        }
        Ok(out)
    }

    /// Rebuilds `key ⊕ missing` for every entry: each indexed word appears
    /// `k + 1` times.
    pub fn reconstruct_all(&self) -> Result<Vec<Vec<u8>>> {
        Ok(self
            .entries()?
            .into_iter()
            .map(|(key, tag, missing)| {
                let len = key.len() + missing.len();
                let start = tag * piece_size(len, self.k);
                let mut w = missing[..start].to_vec();
                w.extend_from_slice(&key);
                w.extend_from_slice(&missing[start..]);
                w
            })
            .collect())
    }

    /// The indexed words, each once, sorted.
    pub fn words(&self) -> Result<Vec<Vec<u8>>> {
        let mut all = self.reconstruct_all()?;
        all.sort_unstable();
        all.dedup();
        Ok(all)
    }

    pub fn encode(&self, w: &mut Writer) {
        w.put_u32(self.k as u32);
        w.put_str(self.hasher.name());
        w.put_f64(self.max_load_factor);
        match &self.table {
            None => w.put_u8(0),
            Some(t) => {
                w.put_u8(1);
                w.put_u32(t.len() as u32);
                for (gram, code) in t.pairs() {
                    w.put_bytes(gram);
                    w.put_u8(*code);
                }
            }
        }
        let s = &self.stats;
        for v in [s.words_indexed, s.words_skipped, s.keys, s.entries, s.buckets, s.max_chain] {
            w.put_u64(v as u64);
        }
        w.put_f64(s.load_factor);
        w.put_u32s(&self.bucket_offsets);
        w.put_bytes(&self.bucket_pool);
        w.put_bytes(&self.list_pool);
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let bad = |m: &str| Error::Format(format!("split index: {m}"));
        let k = r.u32()? as usize;
        if k == 0 || k > MAX_K {
            return Err(bad("k out of range"));
        }
        let hasher = hashing::by_name(&r.string()?)?;
        let max_load_factor = r.f64()?;
        let table = match r.u8()? {
            0 => None,
            1 => {
                let n = r.u32()? as usize;
                let mut pairs = Vec::with_capacity(n.min(256));
                for _ in 0..n {
                    let gram = r.bytes()?.to_vec();
                    pairs.push((gram, r.u8()?));
                }
                Some(SubstitutionTable::new(pairs).map_err(|e| bad(&e.to_string()))?)
            }
            _ => return Err(bad("bad compression flag")),
        };
        let mut stats = BuildStats::default();
        let mut counters = [0usize; 6];
        for c in &mut counters {
            *c = r.u64()? as usize;
        }
        [stats.words_indexed, stats.words_skipped, stats.keys, stats.entries, stats.buckets, stats.max_chain] = counters;
        stats.load_factor = r.f64()?;
        let bucket_offsets = r.u32s()?;
        let bucket_pool = r.bytes()?.to_vec();
        let list_pool = r.bytes()?.to_vec();

        let nb = bucket_offsets.len().checked_sub(1).ok_or_else(|| bad("no buckets"))?;
        if !nb.is_power_of_two()
            || bucket_offsets[0] != 0
            || bucket_offsets.windows(2).any(|w| w[0] > w[1])
            || bucket_offsets[nb] as usize != bucket_pool.len()
        {
            return Err(bad("inconsistent bucket offsets"));
        }
        let index = Self {
            k,
            hasher,
            max_load_factor,
            table,
            bucket_offsets,
            bucket_pool,
            list_pool,
            stats,
        };
        index.validate().map_err(|m| bad(&m))?;
        let mut index = index;
        index.stats.list_bytes = index.list_pool.len();
        index.stats.index_bytes = index.index_bytes();
        Ok(index)
    }

    /// Structural walk of every bucket and list so later queries cannot
    /// index out of bounds.
    fn validate(&self) -> std::result::Result<(), String> {
        let header = self.header_len();
        let mut entries = 0;
        let mut keys = 0;
        for b in 0..self.bucket_offsets.len() - 1 {
            let bucket = &self.bucket_pool[self.bucket_offsets[b] as usize..self.bucket_offsets[b + 1] as usize];
            let mut at = 0;
            while at < bucket.len() {
                let len = bucket[at] as usize;
                if len == 0 || at + 5 + len > bucket.len() {
                    return Err("truncated key".into());
                }
                let key = &bucket[at + 1..at + 1 + len];
                if (self.hasher.hash(key) as usize) & (self.bucket_offsets.len() - 2) != b {
                    return Err("key stored in the wrong bucket".into());
                }
                let handle = u32::from_le_bytes(bucket[at + 1 + len..at + 5 + len].try_into().unwrap()) as usize;
                at += 5 + len;
                keys += 1;
                let mut pos = handle;
                let mut boundary = 0;
                if self.k == 1 {
                    let raw = self.list_pool.get(pos..pos + 2).ok_or("list handle out of bounds")?;
                    boundary = u16::from_le_bytes([raw[0], raw[1]]) as usize;
                    pos += 2;
                }
                let mut count = 0;
                loop {
                    let n = *self.list_pool.get(pos).ok_or("unterminated list")? as usize;
                    if n == 0 {
                        break;
                    }
                    let body_start = pos + header;
                    let body = self.list_pool.get(body_start..body_start + n).ok_or("entry out of bounds")?;
                    if self.k > 1 && self.list_pool[pos + header - 1] as usize > self.k {
                        return Err("tag out of range".into());
                    }
                    if let Some(t) = &self.table {
                        let decoded = t.decode(body).map_err(|e| e.to_string())?;
                        if decoded.len() != self.list_pool[pos + 1] as usize {
                            return Err("decoded length mismatch".into());
                        }
                    }
                    count += 1;
                    pos = body_start + n;
                }
                if boundary > count {
                    return Err("boundary beyond list end".into());
                }
                entries += count;
            }
        }
        if keys != self.stats.keys || entries != self.stats.entries {
            return Err("entry counts disagree with the stored statistics".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn index(words: &[&str], k: usize) -> SplitIndex {
        SplitIndex::build(&Dictionary::new(words.iter().copied()).unwrap(), k, &SplitConfig::default()).unwrap()
    }

    fn strings(v: Vec<Vec<u8>>) -> Vec<String> {
        v.into_iter().map(|w| String::from_utf8(w).unwrap()).collect()
    }

    #[test]
    fn example_lists() {
        let idx = index(&["table", "left", "tablet"], 1);
        let mut le: Vec<(usize, Vec<u8>)> = Vec::new();
        let mut tab: Vec<(usize, Vec<u8>)> = Vec::new();
        for (key, tag, missing) in idx.entries().unwrap() {
            match key.as_slice() {
                b"le" => le.push((tag, missing)),
                b"tab" => tab.push((tag, missing)),
                _ => {}
            }
        }
        // leading-key entries first
        assert_eq!(le, [(0, b"ft".to_vec()), (1, b"tab".to_vec())]);
        assert_eq!(tab, [(0, b"le".to_vec()), (0, b"let".to_vec())]);
        assert_eq!(idx.stats().entries, 6);
    }

    #[test]
    fn example_queries() {
        let idx = index(&["table", "left", "tablet"], 1);
        assert_eq!(strings(idx.query(b"tacle", 1).unwrap()), ["table"]);
        assert_eq!(strings(idx.query(b"left", 1).unwrap()), ["left"]);
        assert!(idx.query(b"taXleX", 1).unwrap().is_empty());
        assert!(idx.query(b"t", 1).is_err());
        assert!(idx.query(b"table", 2).is_err());
    }

    #[test]
    fn empty_dictionary() {
        let idx = index(&[], 2);
        assert!(idx.query(b"anything", 2).unwrap().is_empty());
        assert_eq!(idx.stats().entries, 0);
    }

    #[test]
    fn short_words_are_skipped() {
        let idx = index(&["a", "ab", "abc"], 2);
        assert_eq!(idx.stats().words_skipped, 2);
        assert_eq!(idx.stats().words_indexed, 1);
        assert_eq!(strings(idx.words().unwrap()), ["abc"]);
    }

    #[test]
    fn single_trailing_group_is_reachable() {
        // key "ab" only ever appears as a trailing piece
        let idx = index(&["xab", "yab"], 1);
        assert_eq!(strings(idx.query(b"zab", 1).unwrap()), ["xab", "yab"]);
    }

    #[test]
    fn k_zero_is_rejected() {
        assert!(SplitIndex::build(&Dictionary::default(), 0, &SplitConfig::default()).is_err());
    }

    #[test]
    fn round_trip() {
        let dict = Dictionary::new(["table", "left", "tablet", "cable", "lefty"]).unwrap();
        for k in 1..=3 {
            for compression in [Compression::None, Compression::default_select()] {
                let config = SplitConfig {
                    compression,
                    ..SplitConfig::default()
                };
                let idx = SplitIndex::build(&dict, k, &config).unwrap();
                let mut w = Writer::default();
                idx.encode(&mut w);
                let bytes = w.into_inner();
                let back = SplitIndex::decode(&mut Reader::new(&bytes)).unwrap();
                assert_eq!(back.words().unwrap(), idx.words().unwrap());
                assert_eq!(back.query(b"tabl", k).unwrap(), idx.query(b"tabl", k).unwrap());
                assert_eq!(back.index_bytes(), idx.index_bytes());
            }
        }
    }
}
