//! Alphabet-level primitives shared by both index families: the terminated
//! corpus, q-gram extraction, (alpha, q)-minimizers, minimizer phrases and
//! zero-order symbol statistics.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::TERMINATOR;

/// An immutable text with the terminator appended exactly once at the end.
#[derive(Clone, PartialEq, Eq)]
pub struct Corpus {
    bytes: Vec<u8>,
}

impl Corpus {
    /// Wraps raw bytes, appending the terminator. Raw input containing the
    /// reserved value 0 is rejected.
    pub fn new(raw: impl Into<Vec<u8>>) -> Result<Self> {
        let mut bytes = raw.into();
        if let Some(pos) = bytes.iter().position(|&b| b == TERMINATOR) {
            return Err(Error::MalformedInput(format!(
                "reserved symbol 0 at offset {pos}"
            )));
        }
        bytes.push(TERMINATOR);
        Ok(Self { bytes })
    }

    /// Accepts bytes that already end with the terminator (and contain it
    /// nowhere else).
    pub fn from_terminated(bytes: Vec<u8>) -> Result<Self> {
        match bytes.iter().position(|&b| b == TERMINATOR) {
            Some(p) if p + 1 == bytes.len() => Ok(Self { bytes }),
            Some(p) => Err(Error::MalformedInput(format!(
                "terminator at offset {p} is not the last symbol"
            ))),
            None => Err(Error::MalformedInput("missing terminator".into())),
        }
    }

    /// All symbols, terminator included.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// The text without its terminator.
    pub fn body(&self) -> &[u8] {
        &self.bytes[..self.bytes.len() - 1]
    }

    /// Length including the terminator; always at least 1.
    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Debug for Corpus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Corpus({:?})", render(&self.bytes))
    }
}

/// Renders bytes for humans, showing the terminator as `$`.
pub fn render(bytes: &[u8]) -> String {
    bytes
        .iter()
        .map(|&b| if b == TERMINATOR { '$' } else { b as char })
        .collect()
}

/// A q-gram by reference: `q` symbols starting at `start` in some owner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QGramRef {
    pub start: usize,
    pub q: usize,
}

impl QGramRef {
    pub fn slice<'a>(&self, owner: &'a [u8]) -> &'a [u8] {
        &owner[self.start..self.start + self.q]
    }
}

/// All overlapping q-grams of `text`, shifted by one symbol.
pub fn extract_qgrams(text: &[u8], q: usize) -> Result<Vec<QGramRef>> {
    if q == 0 || q > text.len() {
        return Err(invalid(format!(
            "q = {q} must lie in 1..={}",
            text.len()
        )));
    }
    Ok((0..=text.len() - q).map(|start| QGramRef { start, q }).collect())
}

/// How equal grams inside one window are resolved.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum TieRule {
    #[default]
    Leftmost,
    Rightmost,
}

/// The (alpha, q)-minimizers of a text, one entry per distinct position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimizerSet {
    pub alpha: usize,
    pub q: usize,
    text_len: usize,
    positions: Vec<usize>,
}

impl MinimizerSet {
    /// Selected positions, strictly increasing.
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// `(position, gram)` pairs taken from `text`, which must be the text the
    /// set was computed over.
    pub fn entries<'a>(&'a self, text: &'a [u8]) -> impl Iterator<Item = (usize, &'a [u8])> + 'a {
        self.positions.iter().map(move |&p| (p, &text[p..p + self.q]))
    }

    pub fn text_len(&self) -> usize {
        self.text_len
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Slides a window of `alpha` consecutive q-grams over `text` and keeps the
/// lexicographically smallest gram of every window.
pub fn minimizers(text: &[u8], alpha: usize, q: usize, tie: TieRule) -> Result<MinimizerSet> {
    if alpha == 0 || q == 0 {
        return Err(invalid("alpha and q must be at least 1"));
    }
    let span = q + alpha - 1;
    if text.len() < span {
        return Err(invalid(format!(
            "text of length {} is shorter than one window ({span})",
            text.len()
        )));
    }
    let gram = |p: usize| &text[p..p + q];
    let beats = |challenger: usize, holder: usize| match tie {
        TieRule::Leftmost => gram(challenger) < gram(holder),
        TieRule::Rightmost => gram(challenger) <= gram(holder),
    };
    let scan = |w: usize| {
        (w + 1..w + alpha).fold(w, |best, p| if beats(p, best) { p } else { best })
    };

    let mut positions: Vec<usize> = Vec::new();
    let mut best = scan(0);
    positions.push(best);
    for w in 1..=text.len() - span {
        if best < w {
            best = scan(w);
        } else if beats(w + alpha - 1, best) {
            best = w + alpha - 1;
        }
        if positions.last() != Some(&best) {
            positions.push(best);
        }
    }
    Ok(MinimizerSet {
        alpha,
        q,
        text_len: text.len(),
        positions,
    })
}

/// The intervals between consecutive minimizer positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhraseDecomposition {
    pub positions: Vec<usize>,
    /// Inclusive `(start, end)` ranges, `positions.len() - 1` of them.
    pub ranges: Vec<(usize, usize)>,
}

impl PhraseDecomposition {
    pub fn phrase<'a>(&self, text: &'a [u8], i: usize) -> &'a [u8] {
        let (s, e) = self.ranges[i];
        &text[s..=e]
    }

    pub fn iter<'a>(&'a self, text: &'a [u8]) -> impl Iterator<Item = &'a [u8]> + 'a {
        self.ranges.iter().map(move |&(s, e)| &text[s..=e])
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }
}

/// Cuts `text` into phrases `text[I[i] .. I[i+1] - 1]`.
pub fn phrases(text: &[u8], set: &MinimizerSet) -> Result<PhraseDecomposition> {
    if set.text_len != text.len() {
        return Err(invalid(format!(
            "minimizers computed over length {}, text has length {}",
            set.text_len,
            text.len()
        )));
    }
    if set.is_empty() {
        return Err(invalid("empty minimizer set"));
    }
    let ranges = set
        .positions
        .windows(2)
        .map(|w| (w[0], w[1] - 1))
        .collect();
    Ok(PhraseDecomposition {
        positions: set.positions.clone(),
        ranges,
    })
}

/// Per-symbol counts over a text or a dictionary.
#[derive(Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: [u64; 256],
    total: u64,
}

impl Default for FrequencyTable {
    fn default() -> Self {
        Self {
            counts: [0; 256],
            total: 0,
        }
    }
}

impl fmt::Debug for FrequencyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.symbols().map(|(s, c)| (s as char, c)))
            .finish()
    }
}

impl FrequencyTable {
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut table = Self::default();
        table.add(bytes);
        table
    }

    pub fn from_words<W: AsRef<[u8]>>(words: &[W]) -> Self {
        let mut table = Self::default();
        for w in words {
            table.add(w.as_ref());
        }
        table
    }

    /// Builds a table from `(symbol, weight)` pairs, e.g. published letter
    /// frequencies scaled to integers.
    pub fn from_weights(weights: &[(u8, u64)]) -> Self {
        let mut table = Self::default();
        for &(s, w) in weights {
            table.counts[s as usize] += w;
            table.total += w;
        }
        table
    }

    pub fn add(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.counts[b as usize] += 1;
        }
        self.total += bytes.len() as u64;
    }

    pub fn count(&self, symbol: u8) -> u64 {
        self.counts[symbol as usize]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Present symbols in byte order with their counts.
    pub fn symbols(&self) -> impl Iterator<Item = (u8, u64)> + '_ {
        (0..=255u8).filter_map(move |s| {
            let c = self.counts[s as usize];
            (c > 0).then_some((s, c))
        })
    }

    pub fn probability(&self, symbol: u8) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.counts[symbol as usize] as f64 / self.total as f64
        }
    }

    /// Present symbols sorted by descending count, ties by byte value.
    pub fn by_frequency(&self) -> Vec<u8> {
        let mut syms: Vec<(u8, u64)> = self.symbols().collect();
        syms.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        syms.into_iter().map(|(s, _)| s).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }
}

/// English letter frequencies in thousandths of a percent.
#[rustfmt::skip]
pub const ENGLISH_LETTER_FREQUENCIES: [(u8, u64); 26] = [
    (b'e', 12702), (b't', 9056), (b'a', 8167), (b'o', 7507), (b'i', 6966),
    (b'n', 6749), (b's', 6327), (b'h', 6094), (b'r', 5987), (b'd', 4253),
    (b'l', 4025), (b'c', 2782), (b'u', 2758), (b'm', 2406), (b'w', 2361),
    (b'f', 2228), (b'g', 2015), (b'y', 1974), (b'p', 1929), (b'b', 1492),
    (b'v', 978), (b'k', 772), (b'j', 153), (b'x', 150), (b'q', 95),
    (b'z', 74),
];

pub fn english_frequencies() -> FrequencyTable {
    FrequencyTable::from_weights(&ENGLISH_LETTER_FREQUENCIES)
}

/// Zero-order Shannon entropy in bits per symbol.
pub fn entropy(freq: &FrequencyTable) -> Result<f64> {
    if freq.is_empty() {
        return Err(invalid("entropy of an empty frequency table"));
    }
    let total = freq.total() as f64;
    let e = freq
        .symbols()
        .map(|(_, c)| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum::<f64>();
    // -0.0 for single-symbol inputs
    Ok(e.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grams(text: &str, q: usize) -> Vec<String> {
        extract_qgrams(text.as_bytes(), q)
            .unwrap()
            .iter()
            .map(|g| String::from_utf8(g.slice(text.as_bytes()).to_vec()).unwrap())
            .collect()
    }

    #[test]
    fn qgrams_of_texting() {
        assert_eq!(grams("texting", 2), ["te", "ex", "xt", "ti", "in", "ng"]);
        assert_eq!(grams("texting", 3), ["tex", "ext", "xti", "tin", "ing"]);
        assert_eq!(grams("texting", 7), ["texting"]);
    }

    #[test]
    fn qgram_bounds() {
        assert!(matches!(
            extract_qgrams(b"abc", 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(extract_qgrams(b"abc", 4).is_err());
    }

    fn mins(text: &str, alpha: usize, q: usize) -> (Vec<usize>, Vec<String>) {
        let set = minimizers(text.as_bytes(), alpha, q, TieRule::Leftmost).unwrap();
        let grams = set
            .entries(text.as_bytes())
            .map(|(_, g)| String::from_utf8(g.to_vec()).unwrap())
            .collect();
        (set.positions().to_vec(), grams)
    }

    #[test]
    fn minimizers_of_worked_examples() {
        assert_eq!(mins("texting", 3, 2), (vec![1, 4], vec!["ex".into(), "in".into()]));
        assert_eq!(
            mins("appearance", 4, 2),
            (vec![0, 4, 6], vec!["ap".into(), "ar".into(), "an".into()])
        );
        assert_eq!(mins("ab", 1, 2), (vec![0], vec!["ab".into()]));
    }

    #[test]
    fn minimizer_ties() {
        let left = minimizers(b"aaaa", 3, 1, TieRule::Leftmost).unwrap();
        assert_eq!(left.positions(), [0, 1]);
        let right = minimizers(b"aaaa", 3, 1, TieRule::Rightmost).unwrap();
        assert_eq!(right.positions(), [2, 3]);
    }

    #[test]
    fn minimizers_reject_short_text() {
        assert!(minimizers(b"abc", 3, 2, TieRule::Leftmost).is_err());
        assert!(minimizers(b"abc", 0, 2, TieRule::Leftmost).is_err());
    }

    #[test]
    fn phrases_of_appearance() {
        let t = b"appearance";
        let set = minimizers(t, 4, 2, TieRule::Leftmost).unwrap();
        let dec = phrases(t, &set).unwrap();
        assert_eq!(dec.ranges, [(0, 3), (4, 5)]);
        let ps: Vec<&[u8]> = dec.iter(t).collect();
        assert_eq!(ps, [&b"appe"[..], b"ar"]);
    }

    #[test]
    fn phrases_of_texting() {
        // T[1..=3] of "texting"
        let t = b"texting";
        let set = minimizers(t, 3, 2, TieRule::Leftmost).unwrap();
        let dec = phrases(t, &set).unwrap();
        assert_eq!(dec.ranges, [(1, 3)]);
        assert_eq!(dec.phrase(t, 0), b"ext");
    }

    #[test]
    fn single_minimizer_has_no_phrases() {
        let set = minimizers(b"ab", 1, 2, TieRule::Leftmost).unwrap();
        assert!(phrases(b"ab", &set).unwrap().is_empty());
    }

    #[test]
    fn phrases_reject_foreign_set() {
        let set = minimizers(b"appearance", 4, 2, TieRule::Leftmost).unwrap();
        assert!(phrases(b"texting", &set).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&FrequencyTable::from_bytes(b"abab")).unwrap(), 1.0);
        assert_eq!(entropy(&FrequencyTable::from_bytes(b"aaaa")).unwrap(), 0.0);
        assert!(entropy(&FrequencyTable::default()).is_err());
        // counts i:4 s:4 p:2 m:1 over 11 symbols
        let direct = -[4.0f64, 4.0, 2.0, 1.0]
            .iter()
            .map(|c| c / 11.0 * (c / 11.0f64).log2())
            .sum::<f64>();
        let e = entropy(&FrequencyTable::from_bytes(b"mississippi")).unwrap();
        assert!((e - direct).abs() < 1e-12);
        assert!((e - 1.823_067_982_273_661).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let t = FrequencyTable::from_bytes(b"the quick brown fox");
        let sum: f64 = t.symbols().map(|(s, _)| t.probability(s)).sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn corpus_validation() {
        let c = Corpus::new(b"banana".to_vec()).unwrap();
        assert_eq!(c.len(), 7);
        assert_eq!(c.as_bytes()[6], TERMINATOR);
        assert_eq!(render(c.as_bytes()), "banana$");
        assert!(Corpus::new(vec![b'a', 0, b'b']).is_err());
        assert_eq!(Corpus::new(Vec::new()).unwrap().len(), 1);
        assert!(Corpus::from_terminated(b"ab".to_vec()).is_err());
        assert!(Corpus::from_terminated(vec![b'a', 0, b'b', 0]).is_err());
    }
}
