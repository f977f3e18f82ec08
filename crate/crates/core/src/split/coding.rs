//! Substitution coding of frequent q-grams by single reserved bytes.

use std::collections::{HashMap, HashSet};

use crate::error::{invalid, Error, Result};

pub const DEFAULT_BUDGET: usize = 100;
/// Size of the code space `128..=255`.
pub const MAX_CODES: usize = 128;
pub const FIRST_CODE: u8 = 128;
const MIN_GRAM: usize = 2;
const MAX_GRAM: usize = 4;
/// Words used to drive the greedy search; final tables are compared on the
/// full dictionary.
const SELECTION_SAMPLE: usize = 20_000;
const GREEDY_TRIES_PER_ROUND: usize = 4;

/// Ordered `(gram, code)` pairs. Encoding tries the longest gram at each
/// position, left to right.
#[derive(Debug, Clone)]
pub struct SubstitutionTable {
    pairs: Vec<(Vec<u8>, u8)>,
    by_len: [HashMap<Vec<u8>, u8>; MAX_GRAM - MIN_GRAM + 1],
    expand: Vec<Option<u16>>,
}

impl Default for SubstitutionTable {
    fn default() -> Self {
        Self::new(Vec::new()).expect("empty table is valid")
    }
}

impl PartialEq for SubstitutionTable {
    fn eq(&self, other: &Self) -> bool {
        self.pairs == other.pairs
    }
}

impl Eq for SubstitutionTable {}

impl SubstitutionTable {
    /// Table with arbitrary code bytes. Codes must not occur inside any gram;
    /// callers choosing codes below 128 must also keep them out of the text.
    pub fn new(pairs: Vec<(Vec<u8>, u8)>) -> Result<Self> {
        if pairs.len() > MAX_CODES {
            return Err(invalid(format!("{} pairs exceed the {MAX_CODES}-code space", pairs.len())));
        }
        let codes: HashSet<u8> = pairs.iter().map(|p| p.1).collect();
        if codes.len() != pairs.len() {
            return Err(invalid("duplicate code byte"));
        }
        let mut by_len: [HashMap<Vec<u8>, u8>; MAX_GRAM - MIN_GRAM + 1] = Default::default();
        let mut expand = vec![None; 256];
        for (i, (gram, code)) in pairs.iter().enumerate() {
            if !(MIN_GRAM..=MAX_GRAM).contains(&gram.len()) {
                return Err(invalid(format!("gram length {} outside 2..=4", gram.len())));
            }
            if gram.iter().any(|b| *b == 0 || codes.contains(b)) {
                return Err(invalid(format!("gram {:?} contains a code byte", String::from_utf8_lossy(gram))));
            }
            if by_len[gram.len() - MIN_GRAM].insert(gram.clone(), *code).is_some() {
                return Err(invalid("duplicate gram"));
            }
            expand[*code as usize] = Some(i as u16);
        }
        Ok(Self { pairs, by_len, expand })
    }

    /// Table assigning codes `128, 129, ...` in order.
    pub fn from_grams(grams: Vec<Vec<u8>>) -> Result<Self> {
        if grams.len() > MAX_CODES {
            return Err(invalid(format!("{} grams exceed the {MAX_CODES}-code space", grams.len())));
        }
        Self::new(grams.into_iter().zip(FIRST_CODE..=u8::MAX).collect())
    }

    pub fn pairs(&self) -> &[(Vec<u8>, u8)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    #[inline]
    pub fn is_code(&self, b: u8) -> bool {
        self.expand[b as usize].is_some()
    }

    /// Bytes taken by the table itself.
    pub fn heap_bytes(&self) -> usize {
        self.pairs.iter().map(|(g, _)| g.len() + 1).sum()
    }

    #[inline]
    fn code_at(&self, word: &[u8], i: usize) -> Option<(u8, usize)> {
        for len in (MIN_GRAM..=MAX_GRAM).rev() {
            if i + len > word.len() {
                continue;
            }
            let map = &self.by_len[len - MIN_GRAM];
            if map.is_empty() {
                continue;
            }
            if let Some(&code) = map.get(&word[i..i + len]) {
                return Some((code, len));
            }
        }
        None
    }

    pub fn encode(&self, word: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(word.len());
        self.encode_into(word, &mut out);
        out
    }

    pub fn encode_into(&self, word: &[u8], out: &mut Vec<u8>) {
        let mut i = 0;
        while i < word.len() {
            match self.code_at(word, i) {
                Some((code, len)) => {
                    out.push(code);
                    i += len;
                }
                None => {
                    out.push(word[i]);
                    i += 1;
                }
            }
        }
    }

    pub fn encoded_len(&self, word: &[u8]) -> usize {
        let (mut i, mut n) = (0, 0);
        while i < word.len() {
            i += self.code_at(word, i).map_or(1, |(_, len)| len);
            n += 1;
        }
        n
    }

    pub fn decode(&self, coded: &[u8]) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(coded.len() * 2);
        self.decode_into(coded, &mut out)?;
        Ok(out)
    }

    /// Appends the decoding of `coded` to `out`.
    pub fn decode_into(&self, coded: &[u8], out: &mut Vec<u8>) -> Result<()> {
        for &b in coded {
            match self.expand[b as usize] {
                Some(i) => out.extend_from_slice(&self.pairs[i as usize].0),
                None if b >= FIRST_CODE => {
                    return Err(Error::MalformedInput(format!("unknown code byte {b}")));
                }
                None => out.push(b),
            }
        }
        Ok(())
    }

    /// Total encoded size of `words`.
    pub fn total_encoded_len<W: AsRef<[u8]>>(&self, words: &[W]) -> usize {
        words.iter().map(|w| self.encoded_len(w.as_ref())).sum()
    }
}

/// Picks at most `budget` grams with lengths from `lengths` that minimise the
/// encoded size of the dictionary.
///
/// Candidates are one frequency table per gram length (the most frequent
/// grams of that length) and a greedy mixed table that adds the gram with the
/// best estimated saving as long as the exact encoded size drops. The
/// smallest candidate wins; earlier candidates win ties.
pub fn select_qgrams<W: AsRef<[u8]>>(words: &[W], budget: usize, lengths: &[usize]) -> Result<SubstitutionTable> {
    if budget > MAX_CODES {
        return Err(invalid(format!("budget {budget} exceeds the {MAX_CODES}-code space")));
    }
    if lengths.is_empty() || lengths.iter().any(|l| !(MIN_GRAM..=MAX_GRAM).contains(l)) {
        return Err(invalid("gram lengths must be a nonempty subset of {2, 3, 4}"));
    }
    if words.iter().any(|w| w.as_ref().iter().any(|&b| b >= FIRST_CODE)) {
        return Err(Error::UnsupportedAlphabet(
            "dictionary already uses byte values >= 128".into(),
        ));
    }
    let mut lengths = lengths.to_vec();
    lengths.sort_unstable();
    lengths.dedup();

    let mut candidates = Vec::new();
    for &len in &lengths {
        candidates.push(frequency_table(words, len, budget)?);
    }
    let stride = words.len().div_ceil(SELECTION_SAMPLE).max(1);
    let sample: Vec<&[u8]> = words.iter().step_by(stride).map(AsRef::as_ref).collect();
    candidates.push(greedy_table(&sample, budget, &lengths)?);

    let mut best: Option<(usize, SubstitutionTable)> = None;
    for table in candidates {
        let size = table.total_encoded_len(words);
        if best.as_ref().is_none_or(|(s, _)| size < *s) {
            best = Some((size, table));
        }
    }
    Ok(best.expect("at least one candidate").1)
}

fn ranked(counts: HashMap<&[u8], usize>, weight: impl Fn(&[u8]) -> usize) -> Vec<(Vec<u8>, usize)> {
    let mut v: Vec<(Vec<u8>, usize)> = counts
        .into_iter()
        .map(|(g, c)| (g.to_vec(), c * weight(g)))
        .collect();
    v.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v
}

fn frequency_table<W: AsRef<[u8]>>(words: &[W], len: usize, budget: usize) -> Result<SubstitutionTable> {
    let mut counts: HashMap<&[u8], usize> = HashMap::new();
    for w in words {
        for g in w.as_ref().windows(len) {
            *counts.entry(g).or_default() += 1;
        }
    }
    let grams = ranked(counts, |_| 1)
        .into_iter()
        .filter(|(_, c)| *c >= 2)
        .take(budget)
        .map(|(g, _)| g)
        .collect();
    SubstitutionTable::from_grams(grams)
}

fn greedy_table(words: &[&[u8]], budget: usize, lengths: &[usize]) -> Result<SubstitutionTable> {
    let mut grams: Vec<Vec<u8>> = Vec::new();
    let mut table = SubstitutionTable::default();
    let mut size = table.total_encoded_len(words);
    let mut rejected: HashSet<Vec<u8>> = HashSet::new();
    let mut coded = Vec::new();

    while grams.len() < budget {
        // Estimate savings from grams still appearing as literals.
        let mut counts: HashMap<&[u8], usize> = HashMap::new();
        for w in words {
            coded.clear();
            table.encode_into(w, &mut coded);
            let (mut pos, mut run_start) = (0, 0);
            for &b in &coded {
                match table.expand[b as usize] {
                    Some(i) => {
                        tally_run(&w[run_start..pos], lengths, &mut counts);
                        pos += table.pairs[i as usize].0.len();
                        run_start = pos;
                    }
                    None => pos += 1,
                }
            }
            tally_run(&w[run_start..pos], lengths, &mut counts);
        }
        let ranked = ranked(counts, |g| g.len() - 1);
        let mut accepted = false;
        let mut tries = 0;
        for (gram, score) in ranked {
            if score == 0 || tries == GREEDY_TRIES_PER_ROUND {
                break;
            }
            if rejected.contains(&gram) {
                continue;
            }
            tries += 1;
            let mut next = grams.clone();
            next.push(gram.clone());
            let trial = SubstitutionTable::from_grams(next.clone())?;
            let trial_size = trial.total_encoded_len(words);
            if trial_size < size {
                grams = next;
                table = trial;
                size = trial_size;
                accepted = true;
                break;
            }
            rejected.insert(gram);
        }
        if !accepted {
            break;
        }
    }
    Ok(table)
}

fn tally_run<'a>(run: &'a [u8], lengths: &[usize], counts: &mut HashMap<&'a [u8], usize>) {
    for &len in lengths {
        for g in run.windows(len) {
            *counts.entry(g).or_default() += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_table() -> SubstitutionTable {
        SubstitutionTable::new(vec![
            (b"com".to_vec(), b'#'),
            (b"re".to_vec(), b'*'),
            (b"co".to_vec(), b'$'),
            (b"om".to_vec(), b'&'),
            (b"sion".to_vec(), b'\\'),
        ])
        .unwrap()
    }

    #[test]
    fn compression_example() {
        let t = example_table();
        assert_eq!(t.encode(b"compression"), b"#p*s\\");
        assert_eq!(t.decode(b"#p*s\\").unwrap(), b"compression");
        assert_eq!(t.encoded_len(b"compression"), 5);
        assert_eq!(t.encode(b"xyz"), b"xyz");
    }

    #[test]
    fn unknown_code_is_malformed() {
        let t = SubstitutionTable::from_grams(vec![b"ab".to_vec()]).unwrap();
        assert_eq!(t.decode(&[128, b'c']).unwrap(), b"abc");
        assert!(matches!(t.decode(&[129]), Err(Error::MalformedInput(_))));
    }

    #[test]
    fn invalid_tables() {
        assert!(SubstitutionTable::from_grams(vec![b"a".to_vec()]).is_err());
        assert!(SubstitutionTable::from_grams(vec![b"abcde".to_vec()]).is_err());
        assert!(SubstitutionTable::from_grams(vec![b"ab".to_vec(), b"ab".to_vec()]).is_err());
        assert!(SubstitutionTable::new(vec![(b"ab".to_vec(), b'a')]).is_err());
        assert!(SubstitutionTable::new(vec![(b"ab".to_vec(), 200), (b"cd".to_vec(), 200)]).is_err());
        assert!(SubstitutionTable::from_grams(vec![b"ab".to_vec(); 129]).is_err());
    }

    #[test]
    fn forced_optimum() {
        let words = [b"aaaa".to_vec()];
        let t = select_qgrams(&words, 1, &[2]).unwrap();
        assert_eq!(t.pairs(), [(b"aa".to_vec(), 128)]);
        assert_eq!(t.total_encoded_len(&words), 2);
    }

    #[test]
    fn selection_rejects_high_bytes_and_bad_args() {
        assert!(matches!(
            select_qgrams(&[vec![200u8, 1]], 10, &[2]),
            Err(Error::UnsupportedAlphabet(_))
        ));
        assert!(select_qgrams(&[b"ab".to_vec()], 129, &[2]).is_err());
        assert!(select_qgrams(&[b"ab".to_vec()], 10, &[5]).is_err());
        assert!(select_qgrams(&[b"ab".to_vec()], 10, &[]).is_err());
    }

    #[test]
    fn selection_beats_every_single_length_baseline() {
        let words: Vec<Vec<u8>> = ["banana", "bandana", "cabana", "anagram", "nanny", "panama", "ananas"]
            .iter()
            .map(|w| w.as_bytes().to_vec())
            .collect();
        let t = select_qgrams(&words, 6, &[2, 3, 4]).unwrap();
        let size = t.total_encoded_len(&words);
        for len in 2..=4 {
            let baseline = frequency_table(&words, len, 6).unwrap();
            assert!(size <= baseline.total_encoded_len(&words));
        }
        for w in &words {
            assert_eq!(&t.decode(&t.encode(w)).unwrap(), w);
        }
    }
}
