//! Index kinds selectable by name at run time, with a uniform query surface
//! and envelope persistence.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::bloated::{self, LinearIndex, SuperlinearIndex};
use crate::envelope::{Envelope, Reader, Writer};
use crate::error::{invalid, Error, Result};
use crate::harness::{
    generate_noisy_queries, load_corpus, load_dictionary, naive_count, naive_hamming_search, sample_patterns,
};
use crate::hashing;
use crate::split::{Compression, Dictionary, SplitConfig, SplitIndex};
use crate::text::Corpus;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryOp {
    Match,
    Count,
    Words,
}

impl QueryOp {
    pub fn name(self) -> &'static str {
        match self {
            QueryOp::Match => "match",
            QueryOp::Count => "count",
            QueryOp::Words => "words",
        }
    }
}

impl FromStr for QueryOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "match" => Ok(QueryOp::Match),
            "count" => Ok(QueryOp::Count),
            "words" => Ok(QueryOp::Words),
            _ => Err(invalid(format!("unknown op {s:?}"))),
        }
    }
}

impl fmt::Display for QueryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Count(usize),
    Match(bool),
    Words(Vec<Vec<u8>>),
}

impl Answer {
    /// One output line: a count, `1`/`0`, or tab-separated words.
    pub fn render(&self) -> String {
        match self {
            Answer::Count(c) => c.to_string(),
            Answer::Match(m) => u8::from(*m).to_string(),
            Answer::Words(w) => w
                .iter()
                .map(|x| String::from_utf8_lossy(x).into_owned())
                .collect::<Vec<_>>()
                .join("\t"),
        }
    }
}

/// What an index was built from, and what oracles replay against.
#[derive(Debug, Clone)]
pub enum Source {
    Corpus(Corpus),
    Words(Vec<Vec<u8>>),
}

/// Build flags; `None` selects the kind's default.
#[derive(Debug, Clone, Default)]
pub struct BuildParams {
    pub k: Option<usize>,
    pub q_max: Option<usize>,
    pub alpha: Option<usize>,
    pub q: Option<usize>,
    pub compress: bool,
    pub max_load_factor: Option<f64>,
    pub hash: Option<String>,
}

impl BuildParams {
    /// Names of the kind-specific flags that were set.
    pub fn specific_flags(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.k.is_some() {
            v.push("k");
        }
        if self.q_max.is_some() {
            v.push("qmax");
        }
        if self.alpha.is_some() {
            v.push("alpha");
        }
        if self.q.is_some() {
            v.push("q");
        }
        if self.compress {
            v.push("compress");
        }
        v
    }
}

pub trait TextIndex: Send + Sync {
    fn kind(&self) -> &'static str;
    fn ops(&self) -> &'static [QueryOp];
    fn default_op(&self) -> QueryOp {
        self.ops()[0]
    }
    fn answer(&self, pattern: &[u8], op: QueryOp) -> Result<Answer>;
    /// Brute-force answer over `source`.
    fn oracle(&self, source: &Source, pattern: &[u8], op: QueryOp) -> Answer;
    /// The indexed data, recovered from the index itself.
    fn source(&self) -> Result<Source>;
    /// Seeded queries suited to this index.
    fn random_queries(&self, source: &Source, count: usize, seed: u64) -> Result<Vec<Vec<u8>>>;
    /// `(name, value)` lines describing the build.
    fn summary(&self) -> Vec<(&'static str, String)>;
    fn index_bytes(&self) -> usize;
    fn envelope(&self) -> Envelope;
}

pub trait IndexKind: Send + Sync {
    fn name(&self) -> &'static str;
    fn magic(&self) -> [u8; 4];
    /// Kind-specific flags this kind accepts (see [`BuildParams::specific_flags`]).
    fn flags(&self) -> &'static [&'static str];
    fn load_source(&self, path: &Path) -> Result<Source>;
    fn build(&self, source: &Source, params: &BuildParams) -> Result<Box<dyn TextIndex>>;
    fn decode(&self, env: &Envelope) -> Result<Box<dyn TextIndex>>;
}

pub struct IndexRegistry {
    kinds: Vec<Box<dyn IndexKind>>,
}

impl Default for IndexRegistry {
    fn default() -> Self {
        Self {
            kinds: vec![Box::new(SplitKind), Box::new(SuperKind), Box::new(LinearKind)],
        }
    }
}

impl IndexRegistry {
    pub fn register(&mut self, kind: Box<dyn IndexKind>) {
        self.kinds.retain(|k| k.name() != kind.name());
        self.kinds.push(kind);
    }

    pub fn get(&self, name: &str) -> Result<&dyn IndexKind> {
        self.kinds
            .iter()
            .find(|k| k.name() == name)
            .map(|k| k.as_ref())
            .ok_or_else(|| invalid(format!("unknown index type {name:?} (known: {})", self.names().join(", "))))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.kinds.iter().map(|k| k.name()).collect()
    }

    pub fn load_bytes(&self, bytes: &[u8]) -> Result<Box<dyn TextIndex>> {
        let env = Envelope::from_bytes(bytes)?;
        let kind = self
            .kinds
            .iter()
            .find(|k| k.magic() == env.magic)
            .ok_or_else(|| Error::Format(format!("unknown magic {:?}", String::from_utf8_lossy(&env.magic))))?;
        kind.decode(&env)
    }

    pub fn load(&self, path: &Path) -> Result<Box<dyn TextIndex>> {
        let bytes = std::fs::read(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.load_bytes(&bytes)
    }
}

fn hasher_for(params: &BuildParams) -> Result<hashing::SharedHash> {
    hashing::by_name(params.hash.as_deref().unwrap_or(hashing::DEFAULT_HASH))
}

fn words_of(source: &Source) -> Result<&[Vec<u8>]> {
    match source {
        Source::Words(w) => Ok(w),
        Source::Corpus(_) => Err(invalid("this index kind is built from a dictionary")),
    }
}

fn corpus_of(source: &Source) -> Result<&Corpus> {
    match source {
        Source::Corpus(c) => Ok(c),
        Source::Words(_) => Err(invalid("this index kind is built from a corpus")),
    }
}

fn format_err(e: Error) -> Error {
    match e {
        Error::Format(_) => e,
        other => Error::Format(other.to_string()),
    }
}

fn mismatch(what: &str) -> Error {
    Error::Format(format!("parameter block disagrees with payload on {what}"))
}

fn fm_answer(count: usize, op: QueryOp) -> Answer {
    match op {
        QueryOp::Match => Answer::Match(count > 0),
        _ => Answer::Count(count),
    }
}

fn fm_oracle(source: &Source, pattern: &[u8], op: QueryOp) -> Answer {
    let count = match source {
        Source::Corpus(c) => naive_count(c.body(), pattern),
        Source::Words(_) => 0,
    };
    fm_answer(count, op)
}

// ---- split ----

pub const SPLIT_MAGIC: [u8; 4] = *b"SPLI";
pub const SUPERLINEAR_MAGIC: [u8; 4] = *b"FMBS";
pub const LINEAR_MAGIC: [u8; 4] = *b"FMBL";

pub struct SplitKind;

pub struct SplitEntry(pub SplitIndex);

impl IndexKind for SplitKind {
    fn name(&self) -> &'static str {
        "split"
    }
    fn magic(&self) -> [u8; 4] {
        SPLIT_MAGIC
    }
    fn flags(&self) -> &'static [&'static str] {
        &["k", "compress"]
    }
    fn load_source(&self, path: &Path) -> Result<Source> {
        let (dict, _) = load_dictionary(path)?;
        Ok(Source::Words(dict.words().to_vec()))
    }
    fn build(&self, source: &Source, params: &BuildParams) -> Result<Box<dyn TextIndex>> {
        let dict = Dictionary::new(words_of(source)?.iter().cloned())?;
        let config = SplitConfig {
            max_load_factor: params.max_load_factor.unwrap_or(crate::split::DEFAULT_MAX_LOAD_FACTOR),
            hasher: hasher_for(params)?,
            compression: if params.compress {
                Compression::default_select()
            } else {
                Compression::None
            },
        };
        let k = params.k.unwrap_or(1);
        Ok(Box::new(SplitEntry(SplitIndex::build(&dict, k, &config)?)))
    }
    fn decode(&self, env: &Envelope) -> Result<Box<dyn TextIndex>> {
        let mut p = Reader::new(&env.params);
        let k = p.u32()? as usize;
        let compressed = p.u8()? != 0;
        let hash = p.string()?;
        p.finish()?;
        let mut r = Reader::new(&env.payload);
        let idx = SplitIndex::decode(&mut r).map_err(format_err)?;
        r.finish()?;
        if idx.k() != k {
            return Err(mismatch("k"));
        }
        if idx.table().is_some() != compressed {
            return Err(mismatch("compression"));
        }
        if idx.hash_name() != hash {
            return Err(mismatch("hash"));
        }
        Ok(Box::new(SplitEntry(idx)))
    }
}

fn split_answer(words: Vec<Vec<u8>>, op: QueryOp) -> Answer {
    match op {
        QueryOp::Match => Answer::Match(!words.is_empty()),
        _ => Answer::Words(words),
    }
}

impl TextIndex for SplitEntry {
    fn kind(&self) -> &'static str {
        "split"
    }
    fn ops(&self) -> &'static [QueryOp] {
        &[QueryOp::Words, QueryOp::Match]
    }
    fn answer(&self, pattern: &[u8], op: QueryOp) -> Result<Answer> {
        if op == QueryOp::Count {
            return Err(invalid("the split index does not support count"));
        }
        Ok(split_answer(self.0.query(pattern, self.0.k())?, op))
    }
    fn oracle(&self, source: &Source, pattern: &[u8], op: QueryOp) -> Answer {
        let words: &[Vec<u8>] = match source {
            Source::Words(w) => w,
            Source::Corpus(_) => &[],
        };
        split_answer(naive_hamming_search(words, pattern, self.0.k()), op)
    }
    fn source(&self) -> Result<Source> {
        Ok(Source::Words(self.0.words()?))
    }
    fn random_queries(&self, source: &Source, count: usize, seed: u64) -> Result<Vec<Vec<u8>>> {
        let words: Vec<&Vec<u8>> = words_of(source)?.iter().filter(|w| w.len() > self.0.k()).collect();
        if words.is_empty() || count == 0 {
            return Ok(Vec::new());
        }
        Ok(generate_noisy_queries(&words, count, 3, 0.5, seed)?.queries)
    }
    fn summary(&self) -> Vec<(&'static str, String)> {
        let s = self.0.stats();
        vec![
            ("type", "split".into()),
            ("k", self.0.k().to_string()),
            ("words", s.words_indexed.to_string()),
            ("skipped_words", s.words_skipped.to_string()),
            ("keys", s.keys.to_string()),
            ("entries", s.entries.to_string()),
            ("buckets", s.buckets.to_string()),
            ("load_factor", format!("{:.3}", s.load_factor)),
            ("max_chain", s.max_chain.to_string()),
            ("compressed", self.0.table().is_some().to_string()),
            ("list_bytes", s.list_bytes.to_string()),
            ("index_bytes", s.index_bytes.to_string()),
            ("hash", self.0.hash_name().into()),
        ]
    }
    fn index_bytes(&self) -> usize {
        self.0.index_bytes()
    }
    fn envelope(&self) -> Envelope {
        let mut p = Writer::default();
        p.put_u32(self.0.k() as u32);
        p.put_u8(u8::from(self.0.table().is_some()));
        p.put_str(self.0.hash_name());
        let mut w = Writer::default();
        self.0.encode(&mut w);
        Envelope::new(SPLIT_MAGIC, p.into_inner(), w.into_inner())
    }
}

// ---- FM-bloated superlinear ----

pub struct SuperKind;

pub struct SuperEntry(pub SuperlinearIndex);

impl IndexKind for SuperKind {
    fn name(&self) -> &'static str {
        "fm-super"
    }
    fn magic(&self) -> [u8; 4] {
        SUPERLINEAR_MAGIC
    }
    fn flags(&self) -> &'static [&'static str] {
        &["qmax"]
    }
    fn load_source(&self, path: &Path) -> Result<Source> {
        Ok(Source::Corpus(load_corpus(path)?))
    }
    fn build(&self, source: &Source, params: &BuildParams) -> Result<Box<dyn TextIndex>> {
        let idx = SuperlinearIndex::build(
            corpus_of(source)?,
            params.q_max.unwrap_or(bloated::DEFAULT_Q_MAX),
            hasher_for(params)?,
            params.max_load_factor.unwrap_or(bloated::DEFAULT_MAX_LOAD_FACTOR),
        )?;
        Ok(Box::new(SuperEntry(idx)))
    }
    fn decode(&self, env: &Envelope) -> Result<Box<dyn TextIndex>> {
        let mut p = Reader::new(&env.params);
        let q_max = p.u32()? as usize;
        let hash = p.string()?;
        p.finish()?;
        let mut r = Reader::new(&env.payload);
        let idx = SuperlinearIndex::decode(&mut r).map_err(format_err)?;
        r.finish()?;
        if idx.q_max() != q_max {
            return Err(mismatch("q_max"));
        }
        if idx.hash_name() != hash {
            return Err(mismatch("hash"));
        }
        Ok(Box::new(SuperEntry(idx)))
    }
}

impl TextIndex for SuperEntry {
    fn kind(&self) -> &'static str {
        "fm-super"
    }
    fn ops(&self) -> &'static [QueryOp] {
        &[QueryOp::Count, QueryOp::Match]
    }
    fn answer(&self, pattern: &[u8], op: QueryOp) -> Result<Answer> {
        if op == QueryOp::Words {
            return Err(invalid("FM indexes do not support words"));
        }
        Ok(fm_answer(self.0.count(pattern)?, op))
    }
    fn oracle(&self, source: &Source, pattern: &[u8], op: QueryOp) -> Answer {
        fm_oracle(source, pattern, op)
    }
    fn source(&self) -> Result<Source> {
        Ok(Source::Corpus(Corpus::from_terminated(self.0.corpus_bytes().to_vec())?))
    }
    fn random_queries(&self, source: &Source, count: usize, seed: u64) -> Result<Vec<Vec<u8>>> {
        let lengths: Vec<usize> = (1..=2 * self.0.q_max().max(32)).collect();
        Ok(sample_patterns(corpus_of(source)?.body(), count, &lengths, 0.3, seed))
    }
    fn summary(&self) -> Vec<(&'static str, String)> {
        let s = self.0.load_stats();
        vec![
            ("type", "fm-super".into()),
            ("n", self.0.corpus_bytes().len().to_string()),
            ("q_max", self.0.q_max().to_string()),
            ("grams", s.entries.to_string()),
            ("buckets", s.buckets.to_string()),
            ("load_factor", format!("{:.3}", s.load_factor)),
            ("max_chain", s.max_chain.to_string()),
            ("index_bytes", self.0.heap_bytes().to_string()),
            ("hash", self.0.hash_name().into()),
        ]
    }
    fn index_bytes(&self) -> usize {
        self.0.heap_bytes()
    }
    fn envelope(&self) -> Envelope {
        let mut p = Writer::default();
        p.put_u32(self.0.q_max() as u32);
        p.put_str(self.0.hash_name());
        let mut w = Writer::default();
        self.0.encode(&mut w);
        Envelope::new(SUPERLINEAR_MAGIC, p.into_inner(), w.into_inner())
    }
}

// ---- FM-bloated linear ----

pub struct LinearKind;

pub struct LinearEntry(pub LinearIndex);

impl IndexKind for LinearKind {
    fn name(&self) -> &'static str {
        "fm-linear"
    }
    fn magic(&self) -> [u8; 4] {
        LINEAR_MAGIC
    }
    fn flags(&self) -> &'static [&'static str] {
        &["alpha", "q"]
    }
    fn load_source(&self, path: &Path) -> Result<Source> {
        Ok(Source::Corpus(load_corpus(path)?))
    }
    fn build(&self, source: &Source, params: &BuildParams) -> Result<Box<dyn TextIndex>> {
        let idx = LinearIndex::build(
            corpus_of(source)?,
            params.alpha.unwrap_or(bloated::DEFAULT_ALPHA),
            params.q.unwrap_or(bloated::DEFAULT_Q),
            hasher_for(params)?,
            params.max_load_factor.unwrap_or(bloated::DEFAULT_MAX_LOAD_FACTOR),
        )?;
        Ok(Box::new(LinearEntry(idx)))
    }
    fn decode(&self, env: &Envelope) -> Result<Box<dyn TextIndex>> {
        let mut p = Reader::new(&env.params);
        let alpha = p.u32()? as usize;
        let q = p.u32()? as usize;
        let hash = p.string()?;
        p.finish()?;
        let mut r = Reader::new(&env.payload);
        let idx = LinearIndex::decode(&mut r).map_err(format_err)?;
        r.finish()?;
        if idx.alpha() != alpha || idx.q() != q {
            return Err(mismatch("alpha/q"));
        }
        if idx.hash_name() != hash {
            return Err(mismatch("hash"));
        }
        Ok(Box::new(LinearEntry(idx)))
    }
}

impl TextIndex for LinearEntry {
    fn kind(&self) -> &'static str {
        "fm-linear"
    }
    fn ops(&self) -> &'static [QueryOp] {
        &[QueryOp::Count, QueryOp::Match]
    }
    /// Patterns shorter than a minimizer window fall back to plain FM steps.
    fn answer(&self, pattern: &[u8], op: QueryOp) -> Result<Answer> {
        if op == QueryOp::Words {
            return Err(invalid("FM indexes do not support words"));
        }
        Ok(fm_answer(self.0.count_or_fallback(pattern)?, op))
    }
    fn oracle(&self, source: &Source, pattern: &[u8], op: QueryOp) -> Answer {
        fm_oracle(source, pattern, op)
    }
    fn source(&self) -> Result<Source> {
        Ok(Source::Corpus(Corpus::from_terminated(self.0.corpus_bytes().to_vec())?))
    }
    fn random_queries(&self, source: &Source, count: usize, seed: u64) -> Result<Vec<Vec<u8>>> {
        let w = self.0.window();
        let lengths: Vec<usize> = (w..=w + 48).collect();
        Ok(sample_patterns(corpus_of(source)?.body(), count, &lengths, 0.3, seed))
    }
    fn summary(&self) -> Vec<(&'static str, String)> {
        let s = self.0.load_stats();
        vec![
            ("type", "fm-linear".into()),
            ("n", self.0.corpus_bytes().len().to_string()),
            ("alpha", self.0.alpha().to_string()),
            ("q", self.0.q().to_string()),
            ("phrases", s.entries.to_string()),
            ("buckets", s.buckets.to_string()),
            ("load_factor", format!("{:.3}", s.load_factor)),
            ("max_chain", s.max_chain.to_string()),
            ("index_bytes", self.0.heap_bytes().to_string()),
            ("hash", self.0.hash_name().into()),
        ]
    }
    fn index_bytes(&self) -> usize {
        self.0.heap_bytes()
    }
    fn envelope(&self) -> Envelope {
        let mut p = Writer::default();
        p.put_u32(self.0.alpha() as u32);
        p.put_u32(self.0.q() as u32);
        p.put_str(self.0.hash_name());
        let mut w = Writer::default();
        self.0.encode(&mut w);
        Envelope::new(LINEAR_MAGIC, p.into_inner(), w.into_inner())
    }
}
