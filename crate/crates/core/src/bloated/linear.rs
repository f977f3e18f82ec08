use super::{CountOutcome, GramDirectory, GramEntry};
use crate::chained::LoadStats;
use crate::envelope::{Reader, Writer};
use crate::error::{invalid, Error, Result};
use crate::hashing::SharedHash;
use crate::suffix::{bwt_forward, bwt_inverse, check_pattern, BwtString, FmIndex, SuffixArray};
use crate::text::{minimizers, phrases, Corpus, TieRule};

pub const DEFAULT_ALPHA: usize = 8;
pub const DEFAULT_Q: usize = 4;

/// FM-bloated restricted to minimizer phrases: a plain FM-index plus, for
/// every distinct phrase of the corpus decomposition, its SA block start and
/// the rows it precedes.
///
/// A pattern spanning at least one minimizer window selects the same interior
/// phrases as the corpus does at each of its occurrences, so those phrases
/// can be consumed as whole LF steps.
pub struct LinearIndex {
    text: Vec<u8>,
    fm: FmIndex,
    alpha: usize,
    q: usize,
    directory: GramDirectory,
}

impl LinearIndex {
    pub fn build(
        corpus: &Corpus,
        alpha: usize,
        q: usize,
        hasher: SharedHash,
        max_load_factor: f64,
    ) -> Result<Self> {
        let body = corpus.body();
        if alpha == 0 || q == 0 {
            return Err(invalid("alpha and q must be at least 1"));
        }
        if body.len() < q + alpha - 1 {
            return Err(invalid(format!(
                "corpus of length {} is shorter than one minimizer window ({})",
                body.len(),
                q + alpha - 1
            )));
        }
        let text = corpus.as_bytes();
        let sa = SuffixArray::build(corpus);
        let isa = sa.inverse();
        let fm = FmIndex::from_bwt(bwt_forward(corpus, &sa)?);
        let set = minimizers(body, alpha, q, TieRule::Leftmost)?;
        let decomposition = phrases(body, &set)?;

        let mut directory = GramDirectory::new(hasher, max_load_factor)?;
        for &(start, end) in &decomposition.ranges {
            let len = end - start + 1;
            let (e, fresh) = directory.map.get_or_insert_with(
                &text[start..=end],
                |e| e.key(text),
                || GramEntry {
                    offset: start as u32,
                    len: len as u32,
                    first_row: 0,
                    list_start: 0,
                    count: 0,
                },
            );
            if fresh {
                let rows = fm.range(&text[start..=end]);
                e.first_row = rows.start as u32;
                e.count = rows.len() as u32;
            }
        }
        directory.layout();
        let entries: Vec<GramEntry> = directory.map.iter().copied().collect();
        for e in entries {
            let first = e.first_row as usize;
            let len = e.len as usize;
            let list = &mut directory.pool[e.list_start as usize..(e.list_start + e.count) as usize];
            for (slot, row) in list.iter_mut().zip(first..) {
                *slot = isa[sa.get(row) + len];
            }
            list.sort_unstable();
        }

        Ok(Self {
            text: text.to_vec(),
            fm,
            alpha,
            q,
            directory,
        })
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn window(&self) -> usize {
        self.q + self.alpha - 1
    }

    pub fn corpus_bytes(&self) -> &[u8] {
        &self.text
    }

    pub fn fm(&self) -> &FmIndex {
        &self.fm
    }

    pub fn count(&self, pattern: &[u8]) -> Result<usize> {
        Ok(self.count_instrumented(pattern)?.count)
    }

    /// Counts with plain FM steps when the pattern is shorter than a window.
    pub fn count_or_fallback(&self, pattern: &[u8]) -> Result<usize> {
        if pattern.len() < self.window() {
            self.fm.count(pattern)
        } else {
            self.count(pattern)
        }
    }

    /// Suffix after the rightmost pattern minimizer char by char, the
    /// phrases between minimizers as single steps, then the prefix before
    /// the leftmost minimizer char by char.
    pub fn count_instrumented(&self, pattern: &[u8]) -> Result<CountOutcome> {
        check_pattern(pattern)?;
        if pattern.len() < self.window() {
            return Err(Error::UnsupportedPattern(format!(
                "pattern of length {} is shorter than the minimizer window {}",
                pattern.len(),
                self.window()
            )));
        }
        let mut out = CountOutcome::default();
        if pattern.len() >= self.text.len() {
            return Ok(out);
        }
        let set = minimizers(pattern, self.alpha, self.q, TieRule::Leftmost)?;
        let pos = set.positions();
        let (first, last) = (pos[0], pos[pos.len() - 1]);

        let mut rows = self.fm.full_range();
        for &c in pattern[last..].iter().rev() {
            rows = self.fm.step(rows, c);
            out.lf_steps += 1;
            if rows.is_empty() {
                return Ok(out);
            }
        }
        for w in pos.windows(2).rev() {
            let phrase = &pattern[w[0]..w[1]];
            rows = if phrase.len() == 1 {
                self.fm.step(rows, phrase[0])
            } else {
                let Some(e) = self.directory.lookup(&self.text, phrase) else {
                    return Ok(out);
                };
                self.directory.step(e, rows)
            };
            out.lf_steps += 1;
            if rows.is_empty() {
                return Ok(out);
            }
        }
        for &c in pattern[..first].iter().rev() {
            rows = self.fm.step(rows, c);
            out.lf_steps += 1;
            if rows.is_empty() {
                return Ok(out);
            }
        }
        out.count = rows.len();
        Ok(out)
    }

    pub fn phrase_rows(&self, phrase: &[u8]) -> Option<&[u32]> {
        self.directory
            .lookup(&self.text, phrase)
            .map(|e| self.directory.list(e))
    }

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
        w.put_u32(self.alpha as u32);
        w.put_u32(self.q as u32);
        w.put_bytes(self.fm.bwt());
        self.directory.encode(w);
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let alpha = r.u32()? as usize;
        let q = r.u32()? as usize;
        if alpha == 0 || q == 0 {
            return Err(Error::Format("alpha and q must be positive".into()));
        }
        let bwt = BwtString::from_bytes(r.bytes()?.to_vec());
        let corpus = bwt_inverse(&bwt).map_err(|e| Error::Format(e.to_string()))?;
        let directory = GramDirectory::decode(r, corpus.len())?;
        Ok(Self {
            text: corpus.as_bytes().to_vec(),
            fm: FmIndex::from_bwt(bwt),
            alpha,
            q,
            directory,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloated::DEFAULT_MAX_LOAD_FACTOR;
    use crate::hashing::default_hash;

    fn build(s: &str, alpha: usize, q: usize) -> LinearIndex {
        LinearIndex::build(
            &Corpus::new(s.as_bytes().to_vec()).unwrap(),
            alpha,
            q,
            default_hash(),
            DEFAULT_MAX_LOAD_FACTOR,
        )
        .unwrap()
    }

    fn naive(text: &[u8], p: &[u8]) -> usize {
        text.windows(p.len()).filter(|w| *w == p).count()
    }

    #[test]
    fn appearance_phrases() {
        let idx = build("appearance", 4, 2);
        let mut keys: Vec<&[u8]> = idx.directory_entries().map(|(k, _, _)| k).collect();
        keys.sort();
        assert_eq!(keys, [&b"appe"[..], b"ar"]);
        // "ar" precedes the suffix "ance$"
        assert_eq!(idx.phrase_rows(b"ar").unwrap().len(), 1);
    }

    #[test]
    fn single_minimizer_corpus() {
        let idx = build("ab", 1, 2);
        assert_eq!(idx.directory_len(), 0);
        assert_eq!(idx.count(b"ab").unwrap(), 1);
        assert_eq!(idx.count_or_fallback(b"a").unwrap(), 1);
    }

    #[test]
    fn short_inputs() {
        let c = Corpus::new(b"abc".to_vec()).unwrap();
        assert!(LinearIndex::build(&c, 3, 2, default_hash(), 2.0).is_err());
        let idx = build("appearance", 4, 2);
        assert!(matches!(idx.count(b"app"), Err(Error::UnsupportedPattern(_))));
    }

    #[test]
    fn whole_corpus_and_absent_phrases() {
        let text = "the cat sat on the mat with the hat";
        let idx = build(text, 3, 2);
        assert_eq!(idx.count(text.as_bytes()).unwrap(), 1);
        assert_eq!(idx.count(b"zzzzzzzz").unwrap(), 0);
        for start in 0..text.len() {
            for end in start + idx.window()..=text.len() {
                let p = &text.as_bytes()[start..end];
                assert_eq!(idx.count(p).unwrap(), naive(text.as_bytes(), p));
            }
        }
    }

    #[test]
    fn phrase_lists_hold_every_occurrence() {
        let text = "acgtacgtaacgttgcaacgt".repeat(5);
        let idx = build(&text, 4, 3);
        for (phrase, _, rows) in idx.directory_entries() {
            assert_eq!(rows.len(), naive(text.as_bytes(), phrase), "{phrase:?}");
            assert!(rows.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
