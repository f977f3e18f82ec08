//! Suffix array, Burrows-Wheeler transform, count table and sampled rank:
//! the plain FM-index that both FM-bloated variants extend.

use std::ops::Range;

use crate::error::{invalid, Error, Result};
use crate::text::Corpus;
use crate::TERMINATOR;

/// Suffix start positions of a corpus in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixArray(Vec<u32>);

impl SuffixArray {
    /// Prefix doubling: suffixes are ranked by their first `h` symbols, then
    /// by pairs of `h`-ranks, until every rank is distinct. The unique
    /// terminator guarantees termination.
    pub fn build(corpus: &Corpus) -> Self {
        let text = corpus.as_bytes();
        let n = text.len();
        let mut sa: Vec<u32> = (0..n as u32).collect();
        let mut rank: Vec<u32> = text.iter().map(|&b| b as u32).collect();
        let mut next = vec![0u32; n];
        let mut h = 1usize;
        loop {
            let key = |i: u32| {
                let i = i as usize;
                let second = if i + h < n { rank[i + h] as u64 + 1 } else { 0 };
                ((rank[i] as u64) << 32) | second
            };
            sa.sort_unstable_by_key(|&i| key(i));
            next[sa[0] as usize] = 0;
            for w in 1..n {
                let bump = (key(sa[w]) != key(sa[w - 1])) as u32;
                next[sa[w] as usize] = next[sa[w - 1] as usize] + bump;
            }
            std::mem::swap(&mut rank, &mut next);
            if rank[sa[n - 1] as usize] as usize == n - 1 {
                break;
            }
            h *= 2;
        }
        Self(sa)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, row: usize) -> usize {
        self.0[row] as usize
    }

    /// The inverse permutation: row of the suffix starting at each position.
    pub fn inverse(&self) -> Vec<u32> {
        let mut isa = vec![0u32; self.0.len()];
        for (row, &pos) in self.0.iter().enumerate() {
            isa[pos as usize] = row as u32;
        }
        isa
    }
}

/// The L column of the BWT matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BwtString(Vec<u8>);

impl BwtString {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    /// Wraps an L column obtained elsewhere, e.g. from a file. Validity is
    /// checked by [`bwt_inverse`].
    pub fn from_bytes(l: Vec<u8>) -> Self {
        Self(l)
    }
}

/// `l[i] = T[(sa[i] + n - 1) mod n]`.
pub fn bwt_forward(corpus: &Corpus, sa: &SuffixArray) -> Result<BwtString> {
    let text = corpus.as_bytes();
    let n = text.len();
    if sa.len() != n {
        return Err(invalid(format!(
            "suffix array of length {} for corpus of length {n}",
            sa.len()
        )));
    }
    Ok(BwtString(
        sa.0.iter()
            .map(|&p| text[(p as usize + n - 1) % n])
            .collect(),
    ))
}

/// Recovers the corpus by walking the LF mapping from the terminator row.
pub fn bwt_inverse(l: &BwtString) -> Result<Corpus> {
    let l = l.as_bytes();
    let n = l.len();
    let terminators = l.iter().filter(|&&b| b == TERMINATOR).count();
    if terminators != 1 {
        return Err(Error::MalformedInput(format!(
            "BWT holds {terminators} terminators, expected exactly one"
        )));
    }
    let mut less = [0usize; 256];
    let mut seen = [0usize; 256];
    for &b in l {
        seen[b as usize] += 1;
    }
    let mut acc = 0;
    for c in 0..256 {
        less[c] = acc;
        acc += seen[c];
    }
    // lf[i] = C[l[i]] + (occurrences of l[i] in l[0..i])
    let mut running = [0usize; 256];
    let lf: Vec<usize> = l
        .iter()
        .map(|&b| {
            let r = less[b as usize] + running[b as usize];
            running[b as usize] += 1;
            r
        })
        .collect();

    let mut text = vec![TERMINATOR; n];
    let mut row = 0usize;
    for j in (0..n - 1).rev() {
        let c = l[row];
        if c == TERMINATOR {
            return Err(Error::MalformedInput(
                "LF walk closed before covering the whole BWT".into(),
            ));
        }
        text[j] = c;
        row = lf[row];
    }
    if l[row] != TERMINATOR {
        return Err(Error::MalformedInput(
            "LF walk did not return to the terminator".into(),
        ));
    }
    Corpus::from_terminated(text)
}

/// `C[c]`: number of corpus symbols strictly smaller than `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    less: [u32; 256],
    present: [bool; 256],
}

impl CountTable {
    pub fn build(symbols: &[u8]) -> Self {
        let mut counts = [0u32; 256];
        for &b in symbols {
            counts[b as usize] += 1;
        }
        let mut less = [0u32; 256];
        let mut acc = 0u32;
        for c in 0..256 {
            less[c] = acc;
            acc += counts[c];
        }
        Self {
            less,
            present: counts.map(|c| c > 0),
        }
    }

    pub fn get(&self, symbol: u8) -> Option<usize> {
        self.present[symbol as usize].then(|| self.less[symbol as usize] as usize)
    }

    /// `(symbol, C[symbol])` for present symbols in symbol order.
    pub fn entries(&self) -> impl Iterator<Item = (u8, usize)> + '_ {
        (0..=255u8).filter_map(move |c| self.get(c).map(|v| (c, v)))
    }
}

/// Sampled cumulative symbol counts over the L column.
#[derive(Debug, Clone)]
pub struct RankIndex {
    codes: [u16; 256],
    sigma: usize,
    samples: Vec<u32>,
}

const RANK_STRIDE: usize = 64;
const ABSENT: u16 = u16::MAX;

impl RankIndex {
    pub fn build(l: &[u8]) -> Self {
        let mut codes = [ABSENT; 256];
        let mut sigma = 0usize;
        for &b in l {
            if codes[b as usize] == ABSENT {
                codes[b as usize] = 0;
            }
        }
        for c in codes.iter_mut().filter(|c| **c != ABSENT) {
            *c = sigma as u16;
            sigma += 1;
        }
        let blocks = l.len() / RANK_STRIDE + 1;
        let mut samples = vec![0u32; blocks * sigma];
        let mut running = vec![0u32; sigma];
        for (i, &b) in l.iter().enumerate() {
            if i % RANK_STRIDE == 0 {
                let block = i / RANK_STRIDE;
                samples[block * sigma..(block + 1) * sigma].copy_from_slice(&running);
            }
            running[codes[b as usize] as usize] += 1;
        }
        if l.len() % RANK_STRIDE == 0 {
            let block = l.len() / RANK_STRIDE;
            samples[block * sigma..(block + 1) * sigma].copy_from_slice(&running);
        }
        Self {
            codes,
            sigma,
            samples,
        }
    }

    /// Occurrences of `symbol` in `l[..end]`.
    #[inline]
    pub fn occ_before(&self, l: &[u8], symbol: u8, end: usize) -> usize {
        let code = self.codes[symbol as usize];
        if code == ABSENT {
            return 0;
        }
        let block = end / RANK_STRIDE;
        let base = self.samples[block * self.sigma + code as usize] as usize;
        base + l[block * RANK_STRIDE..end]
            .iter()
            .filter(|&&b| b == symbol)
            .count()
    }

    pub fn heap_bytes(&self) -> usize {
        self.samples.len() * 4 + 512
    }
}

/// Plain FM-index: L column, count table and rank support.
#[derive(Debug, Clone)]
pub struct FmIndex {
    l: Vec<u8>,
    counts: CountTable,
    rank: RankIndex,
}

impl FmIndex {
    pub fn build(corpus: &Corpus) -> Self {
        let sa = SuffixArray::build(corpus);
        let bwt = bwt_forward(corpus, &sa).expect("suffix array built over corpus");
        Self::from_bwt(bwt)
    }

    pub fn from_bwt(bwt: BwtString) -> Self {
        let l = bwt.into_bytes();
        let counts = CountTable::build(&l);
        let rank = RankIndex::build(&l);
        Self { l, counts, rank }
    }

    pub fn bwt(&self) -> &[u8] {
        &self.l
    }

    pub fn len(&self) -> usize {
        self.l.len()
    }

    pub fn is_empty(&self) -> bool {
        self.l.is_empty()
    }

    pub fn count_table(&self) -> &CountTable {
        &self.counts
    }

    /// Occurrences of `symbol` in `l[0..=i]`; `i = -1` denotes the empty prefix.
    pub fn rank(&self, symbol: u8, i: isize) -> Result<usize> {
        if i < -1 {
            return Err(invalid(format!("rank position {i} below -1")));
        }
        let end = (i + 1) as usize;
        if end > self.l.len() {
            return Err(Error::OutOfRange {
                index: i as usize,
                len: self.l.len(),
            });
        }
        Ok(self.rank.occ_before(&self.l, symbol, end))
    }

    /// All rows.
    pub fn full_range(&self) -> Range<usize> {
        0..self.l.len()
    }

    /// One LF step: rows of suffixes `c·X` given the rows of suffixes `X`.
    /// An empty result means `c·X` does not occur.
    #[inline]
    pub fn step(&self, rows: Range<usize>, c: u8) -> Range<usize> {
        let Some(base) = self.counts.get(c) else {
            return 0..0;
        };
        let s = base + self.rank.occ_before(&self.l, c, rows.start);
        let e = base + self.rank.occ_before(&self.l, c, rows.end);
        s..e
    }

    /// Backward search over `pattern` starting from `rows`, one symbol at a time.
    #[inline]
    pub fn extend(&self, mut rows: Range<usize>, pattern: &[u8]) -> Range<usize> {
        for &c in pattern.iter().rev() {
            rows = self.step(rows, c);
            if rows.is_empty() {
                break;
            }
        }
        rows
    }

    /// SA rows of suffixes prefixed by `pattern`.
    pub fn range(&self, pattern: &[u8]) -> Range<usize> {
        self.extend(self.full_range(), pattern)
    }

    /// Number of (possibly overlapping) occurrences of `pattern`.
    pub fn count(&self, pattern: &[u8]) -> Result<usize> {
        check_pattern(pattern)?;
        Ok(self.range(pattern).len())
    }

    pub fn heap_bytes(&self) -> usize {
        self.l.len() + self.rank.heap_bytes() + std::mem::size_of::<CountTable>()
    }
}

pub(crate) fn check_pattern(pattern: &[u8]) -> Result<()> {
    if pattern.is_empty() {
        return Err(invalid("empty pattern"));
    }
    if pattern.contains(&TERMINATOR) {
        return Err(invalid("pattern contains the terminator"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::render;

    fn corpus(s: &str) -> Corpus {
        Corpus::new(s.trim_end_matches('$').as_bytes().to_vec()).unwrap()
    }

    fn naive_sa(text: &[u8]) -> Vec<u32> {
        let mut sa: Vec<u32> = (0..text.len() as u32).collect();
        sa.sort_by(|&a, &b| text[a as usize..].cmp(&text[b as usize..]));
        sa
    }

    #[test]
    fn banana_suffix_array() {
        let sa = SuffixArray::build(&corpus("banana$"));
        assert_eq!(sa.as_slice(), [6, 5, 3, 1, 0, 4, 2]);
        assert_eq!(SuffixArray::build(&corpus("$")).as_slice(), [0]);
    }

    #[test]
    fn suffix_array_matches_naive_sort() {
        for s in ["mississippi", "aaaaaaaaaa", "abababab", "pattern", "zyxwvu"] {
            let c = corpus(s);
            assert_eq!(SuffixArray::build(&c).as_slice(), naive_sa(c.as_bytes()), "{s}");
        }
    }

    fn rotation_bwt(text: &[u8]) -> Vec<u8> {
        let n = text.len();
        let mut rots: Vec<Vec<u8>> = (0..n)
            .map(|i| text[i..].iter().chain(&text[..i]).copied().collect())
            .collect();
        rots.sort();
        rots.iter().map(|r| r[n - 1]).collect()
    }

    #[test]
    fn bwt_examples() {
        let c = corpus("pattern$");
        let l = bwt_forward(&c, &SuffixArray::build(&c)).unwrap();
        assert_eq!(render(l.as_bytes()), "nptr$eta");

        let c = corpus("$");
        let l = bwt_forward(&c, &SuffixArray::build(&c)).unwrap();
        assert_eq!(render(l.as_bytes()), "$");

        let c = corpus("mississippi$");
        let l = bwt_forward(&c, &SuffixArray::build(&c)).unwrap();
        assert_eq!(l.as_bytes(), rotation_bwt(c.as_bytes()).as_slice());
        assert_eq!(render(l.as_bytes()), "ipssm$pissii");
    }

    #[test]
    fn bwt_length_mismatch() {
        let sa = SuffixArray::build(&corpus("ab"));
        assert!(bwt_forward(&corpus("abc"), &sa).is_err());
    }

    #[test]
    fn inverse_examples() {
        let l = BwtString::from_bytes(b"nptr\0eta".to_vec());
        assert_eq!(render(bwt_inverse(&l).unwrap().as_bytes()), "pattern$");
        let l = BwtString::from_bytes(vec![0]);
        assert_eq!(bwt_inverse(&l).unwrap().as_bytes(), [0]);
    }

    #[test]
    fn inverse_rejects_bad_terminators() {
        assert!(matches!(
            bwt_inverse(&BwtString::from_bytes(b"abc".to_vec())),
            Err(Error::MalformedInput(_))
        ));
        assert!(bwt_inverse(&BwtString::from_bytes(b"a\0b\0".to_vec())).is_err());
        // "ab$" permuted into a column whose LF walk is not a single cycle
        assert!(bwt_inverse(&BwtString::from_bytes(b"\0ab".to_vec())).is_err());
    }

    #[test]
    fn count_tables() {
        let t = |s: &str| {
            CountTable::build(corpus(s).as_bytes())
                .entries()
                .map(|(c, v)| (if c == 0 { '$' } else { c as char }, v))
                .collect::<Vec<_>>()
        };
        assert_eq!(
            t("mississippi$"),
            [('$', 0), ('i', 1), ('m', 5), ('p', 6), ('s', 8)]
        );
        assert_eq!(t("aaaa$"), [('$', 0), ('a', 1)]);
        assert_eq!(t("banana$"), [('$', 0), ('a', 1), ('b', 4), ('n', 5)]);
    }

    #[test]
    fn rank_examples() {
        let fm = FmIndex::build(&corpus("pattern$"));
        assert_eq!(fm.rank(b't', -1).unwrap(), 0);
        assert_eq!(fm.rank(b't', 7).unwrap(), 2);
        assert_eq!(fm.rank(b'z', 7).unwrap(), 0);
        assert!(matches!(fm.rank(b't', 8), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn rank_across_block_boundaries() {
        let raw: Vec<u8> = (0..300u32).map(|i| b"acgt"[(i * 7 % 4) as usize]).collect();
        let fm = FmIndex::build(&Corpus::new(raw).unwrap());
        for c in [b'a', b'c', b'g', b't', 0] {
            let mut scan = 0;
            for i in 0..fm.len() {
                if fm.bwt()[i] == c {
                    scan += 1;
                }
                assert_eq!(fm.rank(c, i as isize).unwrap(), scan);
            }
        }
    }

    #[test]
    fn fm_count_examples() {
        let fm = FmIndex::build(&corpus("banana$"));
        assert_eq!(fm.count(b"a").unwrap(), 3);
        assert_eq!(fm.count(b"ana").unwrap(), 2);
        assert_eq!(fm.count(b"xyz").unwrap(), 0);
        assert_eq!(fm.count(b"banana").unwrap(), 1);
        assert!(fm.count(b"").is_err());
        assert!(fm.count(b"a\0").is_err());
    }
}
