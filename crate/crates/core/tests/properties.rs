//! Property checks against brute-force re-implementations.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use textidx::bloated::{LinearIndex, SuperlinearIndex};
use textidx::envelope::Envelope;
use textidx::hashing::default_hash;
use textidx::split::{select_qgrams, Compression, Dictionary, QueryStats, SplitConfig, SplitIndex};
use textidx::harness::{naive_hamming_search, naive_hamming_search_by_index, random_words};
use textidx::text::ENGLISH_LETTER_FREQUENCIES;
use textidx::suffix::{bwt_forward, FmIndex, SuffixArray};
use textidx::text::{extract_qgrams, minimizers, phrases, Corpus, TieRule};

fn naive_suffix_array(t: &[u8]) -> Vec<u32> {
    let mut sa: Vec<u32> = (0..t.len() as u32).collect();
    sa.sort_by(|&a, &b| t[a as usize..].cmp(&t[b as usize..]));
    sa
}

/// Leftmost smallest gram position per window, by direct comparison.
fn window_winners(t: &[u8], alpha: usize, q: usize) -> Vec<usize> {
    let mut winners = Vec::new();
    for w in 0..=t.len() - (q + alpha - 1) {
        let mut best = w;
        for p in w..w + alpha {
            if t[p..p + q] < t[best..best + q] {
                best = p;
            }
        }
        if winners.last() != Some(&best) {
            winners.push(best);
        }
    }
    winners.dedup();
    let mut sorted = winners.clone();
    sorted.sort_unstable();
    sorted.dedup();
    sorted
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn qgram_count_law(text in proptest::collection::vec(1u8..=4, 1..=64), q in 1usize..=64) {
        prop_assume!(q <= text.len());
        let grams = extract_qgrams(&text, q).unwrap();
        prop_assert_eq!(grams.len(), text.len() - q + 1);
        for (i, g) in grams.iter().enumerate() {
            prop_assert_eq!(g.start, i);
            prop_assert_eq!(g.slice(&text), &text[i..i + q]);
        }
    }

    #[test]
    fn minimizer_window_law(
        text in proptest::collection::vec(b'a'..=b'c', 1..=64),
        alpha in 1usize..=6,
        q in 1usize..=4,
    ) {
        prop_assume!(text.len() >= q + alpha - 1);
        let set = minimizers(&text, alpha, q, TieRule::Leftmost).unwrap();
        let expected = window_winners(&text, alpha, q);
        prop_assert_eq!(set.positions(), expected.as_slice());
        prop_assert!(set.positions().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn phrase_coverage(text in proptest::collection::vec(b'a'..=b'd', 4..=64), alpha in 1usize..=5, q in 1usize..=3) {
        prop_assume!(text.len() >= q + alpha - 1);
        let set = minimizers(&text, alpha, q, TieRule::Leftmost).unwrap();
        let dec = phrases(&text, &set).unwrap();
        let pos = set.positions();
        prop_assert_eq!(dec.len(), pos.len() - 1);
        let joined: Vec<u8> = dec.iter(&text).flatten().copied().collect();
        prop_assert_eq!(joined.as_slice(), &text[pos[0]..pos[pos.len() - 1]]);
    }

    #[test]
    fn suffix_array_matches_sort(text in proptest::collection::vec(1u8..=3, 0..=200)) {
        let c = Corpus::new(text).unwrap();
        let sa = SuffixArray::build(&c);
        let expected = naive_suffix_array(c.as_bytes());
        prop_assert_eq!(sa.as_slice(), expected.as_slice());
    }

    #[test]
    fn rank_matches_prefix_count(text in proptest::collection::vec(b'a'..=b'c', 0..=300), probe in 0usize..400) {
        let c = Corpus::new(text).unwrap();
        let sa = SuffixArray::build(&c);
        let bwt = bwt_forward(&c, &sa).unwrap();
        let l = bwt.as_bytes().to_vec();
        let fm = FmIndex::from_bwt(bwt);
        let i = probe % l.len();
        for s in [0u8, b'a', b'b', b'c'] {
            let expected = l[..=i].iter().filter(|&&x| x == s).count();
            prop_assert_eq!(fm.rank(s, i as isize).unwrap(), expected);
        }
    }
}

#[test]
fn shared_minimizer_guarantee() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let alpha = rng.gen_range(1..=6);
        let q = rng.gen_range(1..=4);
        let plen = q + alpha - 1 + rng.gen_range(0..4);
        let sym = |rng: &mut ChaCha8Rng| b"acgt"[rng.gen_range(0..4)];
        let p: Vec<u8> = (0..plen).map(|_| sym(&mut rng)).collect();
        let wrap = |rng: &mut ChaCha8Rng| {
            let mut s: Vec<u8> = (0..rng.gen_range(0..20)).map(|_| sym(rng)).collect();
            s.extend_from_slice(&p);
            s.extend((0..rng.gen_range(0..20)).map(|_| sym(rng)));
            s
        };
        let (s1, s2) = (wrap(&mut rng), wrap(&mut rng));
        let set1 = minimizers(&s1, alpha, q, TieRule::Leftmost).unwrap();
        let m1: Vec<&[u8]> = set1.entries(&s1).map(|e| e.1).collect();
        let m2 = minimizers(&s2, alpha, q, TieRule::Leftmost).unwrap();
        assert!(m2.entries(&s2).any(|(_, g)| m1.contains(&g)), "{s1:?} {s2:?} alpha {alpha} q {q}");
    }
}

fn random_dictionary(rng: &mut ChaCha8Rng, n: usize, alphabet: &[u8], lengths: std::ops::RangeInclusive<usize>) -> Dictionary {
    let words: Vec<Vec<u8>> = (0..n)
        .map(|_| {
            let len = rng.gen_range(lengths.clone());
            (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
        })
        .collect();
    Dictionary::new(words).unwrap()
}

#[test]
fn split_reconstruction_and_entry_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let dict = random_dictionary(&mut rng, 10_000, b"abcdefghijklmnopqrstuvwxyz", 1..=14);
    for k in 1..=3 {
        for compression in [Compression::None, Compression::default_select()] {
            let config = SplitConfig {
                compression,
                ..SplitConfig::default()
            };
            let idx = SplitIndex::build(&dict, k, &config).unwrap();
            let kept: Vec<&Vec<u8>> = dict.words().iter().filter(|w| w.len() > k).collect();
            assert_eq!(idx.stats().words_skipped, dict.len() - kept.len());
            assert_eq!(idx.stats().entries, (k + 1) * kept.len());
            let mut rebuilt = idx.reconstruct_all().unwrap();
            rebuilt.sort();
            let mut expected: Vec<Vec<u8>> = kept.iter().flat_map(|w| std::iter::repeat_n((*w).clone(), k + 1)).collect();
            expected.sort();
            assert_eq!(rebuilt, expected, "k = {k}");
        }
    }
}

#[test]
fn k1_lists_inspect_only_their_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let dict = random_dictionary(&mut rng, 5_000, b"abcd", 2..=8);
    let idx = SplitIndex::build(&dict, 1, &SplitConfig::default()).unwrap();
    let group_size = |key: &[u8], role: usize| {
        dict.words()
            .iter()
            .filter(|w| w.len() >= 2)
            .filter(|w| textidx::split::split_word(w, 1).unwrap()[role] == key)
            .count()
    };
    let mut probes = 0;
    for w in dict.words().iter().step_by(7) {
        let mut stats = QueryStats::default();
        idx.query_instrumented(w, 1, &mut stats).unwrap();
        for (role, key, inspected) in &stats.probes {
            assert!(*inspected <= group_size(key, *role), "{:?}", String::from_utf8_lossy(key));
            probes += 1;
        }
    }
    assert!(probes > 0);
}

#[test]
fn envelope_round_trip_law() {
    let text = textidx::harness::english_like_text(3_000, 2);
    let c = Corpus::new(text.clone()).unwrap();
    let sup = SuperlinearIndex::build(&c, 16, default_hash(), 2.81).unwrap();
    let lin = LinearIndex::build(&c, 4, 3, default_hash(), 2.81).unwrap();
    let mut w = textidx::envelope::Writer::default();
    sup.encode(&mut w);
    let env = Envelope::new(*b"FMBS", vec![], w.into_inner());
    let back = Envelope::from_bytes(&env.to_bytes()).unwrap();
    let sup2 = SuperlinearIndex::decode(&mut textidx::envelope::Reader::new(&back.payload)).unwrap();
    let mut w = textidx::envelope::Writer::default();
    lin.encode(&mut w);
    let bytes = w.into_inner();
    let lin2 = LinearIndex::decode(&mut textidx::envelope::Reader::new(&bytes)).unwrap();
    for start in (0..text.len() - 40).step_by(37) {
        for m in [1, 6, 13, 40] {
            let p = &text[start..start + m];
            assert_eq!(sup.count(p).unwrap(), sup2.count(p).unwrap());
            assert_eq!(lin.count_or_fallback(p).unwrap(), lin2.count_or_fallback(p).unwrap());
        }
    }
}

#[test]
fn dna_selection_shrinks_total() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let reads: Vec<Vec<u8>> = (0..2_000).map(|_| (0..20).map(|_| b"ACGT"[rng.gen_range(0..4)]).collect()).collect();
    let table = select_qgrams(&reads, 100, &[2, 3, 4]).unwrap();
    let raw: usize = reads.iter().map(Vec::len).sum();
    assert!(table.total_encoded_len(&reads) < raw);
}

#[test]
fn english_two_grams_compress_at_least_as_well_as_three_grams() {
    let words = random_words(5_000, 3..=12, &ENGLISH_LETTER_FREQUENCIES, 22);
    let two = select_qgrams(&words, 100, &[2]).unwrap().total_encoded_len(&words);
    let three = select_qgrams(&words, 100, &[3]).unwrap().total_encoded_len(&words);
    assert!(two <= three, "2-grams {two}, 3-grams {three}");
}

#[test]
fn coding_round_trip_on_random_words() {
    let words = random_words(100_000, 1..=24, &ENGLISH_LETTER_FREQUENCIES, 23);
    let table = select_qgrams(&words[..10_000], 100, &[2, 3, 4]).unwrap();
    for w in &words {
        assert_eq!(&table.decode(&table.encode(w)).unwrap(), w);
    }
}

#[test]
fn compressed_and_plain_indexes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let dict = random_dictionary(&mut rng, 3_000, b"etaoinshr", 3..=10);
    let packed = SplitConfig {
        compression: Compression::default_select(),
        ..SplitConfig::default()
    };
    for k in 1..=3 {
        let a = SplitIndex::build(&dict, k, &SplitConfig::default()).unwrap();
        let b = SplitIndex::build(&dict, k, &packed).unwrap();
        for w in dict.words().iter().filter(|w| w.len() > k).step_by(5) {
            let mut q = w.clone();
            q[0] = b'e';
            assert_eq!(a.query(&q, k).unwrap(), b.query(&q, k).unwrap());
        }
    }
}

#[test]
fn oracles_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let dict = random_dictionary(&mut rng, 2_000, b"abc", 1..=6);
    for _ in 0..500 {
        let len = rng.gen_range(1..=6);
        let p: Vec<u8> = (0..len).map(|_| b"abc"[rng.gen_range(0..3)]).collect();
        for k in 0..=3 {
            assert_eq!(
                naive_hamming_search(dict.words(), &p, k),
                naive_hamming_search_by_index(dict.words(), &p, k)
            );
        }
    }
}
