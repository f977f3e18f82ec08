/// `{d : |d| = |P| and Ham(d, P) <= k}` by full scan, sorted.
pub fn naive_hamming_search<W: AsRef<[u8]>>(words: &[W], pattern: &[u8], k: usize) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = words
        .iter()
        .map(AsRef::as_ref)
        .filter(|d| d.len() == pattern.len())
        .filter(|d| d.iter().zip(pattern).filter(|(a, b)| a != b).count() <= k)
        .map(<[u8]>::to_vec)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Same contract as [`naive_hamming_search`] written as an index loop, used
/// to cross-check the primary oracle.
pub fn naive_hamming_search_by_index<W: AsRef<[u8]>>(words: &[W], pattern: &[u8], k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for w in words {
        let d = w.as_ref();
        if d.len() != pattern.len() {
            continue;
        }
        let mut mismatches = 0;
        let mut i = 0;
        while i < d.len() {
            if d[i] != pattern[i] {
                mismatches += 1;
            }
            i += 1;
        }
        if mismatches <= k && !out.iter().any(|o: &Vec<u8>| o.as_slice() == d) {
            out.push(d.to_vec());
        }
    }
    out.sort();
    out
}

/// Overlapping occurrences of `pattern` in `text`. An empty pattern
/// counts as absent.
pub fn naive_count(text: &[u8], pattern: &[u8]) -> usize {
    if pattern.is_empty() || pattern.len() > text.len() {
        return 0;
    }
    (0..=text.len() - pattern.len())
        .filter(|&s| &text[s..s + pattern.len()] == pattern)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_examples() {
        assert_eq!(naive_hamming_search(&["abc"], b"abd", 1), [b"abc".to_vec()]);
        assert!(naive_hamming_search(&["abc"], b"abd", 0).is_empty());
        assert!(naive_hamming_search(&["abcd"], b"abd", 3).is_empty());
    }

    #[test]
    fn implementations_agree_exhaustively() {
        fn all_words(alphabet: &[u8], max_len: usize) -> Vec<Vec<u8>> {
            let mut out = vec![Vec::new()];
            let mut frontier = vec![Vec::new()];
            for _ in 0..max_len {
                frontier = frontier
                    .iter()
                    .flat_map(|w: &Vec<u8>| {
                        alphabet.iter().map(move |&c| {
                            let mut x = w.clone();
                            x.push(c);
                            x
                        })
                    })
                    .collect();
                out.extend(frontier.iter().cloned());
            }
            out
        }
        let words = all_words(b"abc", 4);
        let dict: Vec<&Vec<u8>> = words.iter().step_by(7).collect();
        for p in all_words(b"abc", 5).iter().step_by(3) {
            for k in 0..3 {
                assert_eq!(naive_hamming_search(&dict, p, k), naive_hamming_search_by_index(&dict, p, k));
            }
        }
    }

    #[test]
    fn count_examples() {
        assert_eq!(naive_count(b"banana", b"ana"), 2);
        assert_eq!(naive_count(b"banana", b"banana"), 1);
        assert_eq!(naive_count(b"aaaa", b"aa"), 3);
        assert_eq!(naive_count(b"ab", b"abc"), 0);
        assert_eq!(naive_count(b"ab", b""), 0);
    }
}
