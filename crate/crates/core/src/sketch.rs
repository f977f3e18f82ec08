//! String sketches: fixed-width bit signatures over tracked 1-grams.
//!
//! An occurrence sketch sets one bit per tracked symbol present in the word.
//! A count sketch stores `min(count, 3)` in two bits per tracked symbol. The
//! Hamming weight of two sketches xored, `H_S`, bounds the Hamming distance
//! of equal-length 1-gram occurrence sketched words from below by
//! `ceil(H_S / 2)`: one substitution flips at most two presence bits.

use std::sync::OnceLock;

use crate::error::{invalid, Result};
use crate::text::{english_frequencies, FrequencyTable};

pub const DEFAULT_WIDTH: usize = 2;
pub const MAX_WIDTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SketchMode {
    Occurrence,
    Count,
}

impl SketchMode {
    fn bits_per_gram(self) -> usize {
        match self {
            SketchMode::Occurrence => 1,
            SketchMode::Count => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectionPolicy {
    MostCommon,
    LeastCommon,
    /// Half most common, half least common.
    Mixed,
    Explicit(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SketchConfig {
    mode: SketchMode,
    width: usize,
    grams: Vec<u8>,
    slot: [u8; 256],
}

const UNTRACKED: u8 = u8::MAX;

/// Number of grams a sketch of `width` bytes tracks in `mode`.
pub fn capacity(mode: SketchMode, width: usize) -> usize {
    width * 8 / mode.bits_per_gram()
}

impl SketchConfig {
    /// Tracks `grams` in order; gram 0 owns the most significant bit(s).
    /// Fewer grams than the capacity leave the low bits unused.
    pub fn new(mode: SketchMode, width: usize, grams: Vec<u8>) -> Result<Self> {
        if !(1..=MAX_WIDTH).contains(&width) {
            return Err(invalid(format!("sketch width must be 1..={MAX_WIDTH} bytes, got {width}")));
        }
        let cap = capacity(mode, width);
        if grams.is_empty() || grams.len() > cap {
            return Err(invalid(format!(
                "{} tracked grams for a sketch holding {cap}",
                grams.len()
            )));
        }
        let mut slot = [UNTRACKED; 256];
        for (i, &g) in grams.iter().enumerate() {
            if slot[g as usize] != UNTRACKED {
                return Err(invalid(format!("gram {:?} tracked twice", g as char)));
            }
            slot[g as usize] = i as u8;
        }
        Ok(Self {
            mode,
            width,
            grams,
            slot,
        })
    }

    /// Chooses grams from `freq` according to `policy`, filling the
    /// capacity when enough symbols exist.
    pub fn from_policy(mode: SketchMode, width: usize, policy: &SelectionPolicy, freq: &FrequencyTable) -> Result<Self> {
        let cap = capacity(mode, width);
        let ranked = freq.by_frequency();
        let grams = match policy {
            SelectionPolicy::Explicit(g) => g.clone(),
            SelectionPolicy::MostCommon => ranked.iter().take(cap).copied().collect(),
            SelectionPolicy::LeastCommon => ranked.iter().rev().take(cap).copied().collect(),
            SelectionPolicy::Mixed => {
                let take = cap.min(ranked.len());
                let common = take.div_ceil(2);
                let mut g: Vec<u8> = ranked[..common].to_vec();
                g.extend(ranked[ranked.len() - (take - common)..].iter().rev());
                g
            }
        };
        Self::new(mode, width, grams)
    }

    /// Two-byte occurrence sketch over the 16 most frequent English letters.
    pub fn english_default() -> Self {
        Self::from_policy(
            SketchMode::Occurrence,
            DEFAULT_WIDTH,
            &SelectionPolicy::MostCommon,
            &english_frequencies(),
        )
        .expect("16 letters fit two bytes")
    }

    pub fn mode(&self) -> SketchMode {
        self.mode
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn grams(&self) -> &[u8] {
        &self.grams
    }

    pub fn build(&self, word: &[u8]) -> Sketch {
        build_sketch(word, self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sketch {
    bits: u64,
    width: u8,
    mode: SketchMode,
}

impl Sketch {
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// Bits from most to least significant, `width * 8` characters.
    pub fn to_bit_string(&self) -> String {
        format!("{:0w$b}", self.bits, w = self.width() * 8)
    }
}

pub fn build_sketch(word: &[u8], config: &SketchConfig) -> Sketch {
    let total = config.width * 8;
    let mut bits = 0u64;
    match config.mode {
        SketchMode::Occurrence => {
            for &b in word {
                let s = config.slot[b as usize];
                if s != UNTRACKED {
                    bits |= 1 << (total - 1 - s as usize);
                }
            }
        }
        SketchMode::Count => {
            let mut counts = [0u8; MAX_WIDTH * 4];
            for &b in word {
                let s = config.slot[b as usize];
                if s != UNTRACKED {
                    let c = &mut counts[s as usize];
                    *c = (*c + 1).min(3);
                }
            }
            for (i, &c) in counts[..config.grams.len()].iter().enumerate() {
                bits |= (c as u64) << (total - 2 - 2 * i);
            }
        }
    }
    Sketch {
        bits,
        width: config.width as u8,
        mode: config.mode,
    }
}

/// Hamming weights of every 16-bit value.
pub struct PopcountTable {
    weights: Box<[u8]>,
}

impl PopcountTable {
    fn new() -> Self {
        Self {
            weights: (0..=u16::MAX).map(|v| v.count_ones() as u8).collect(),
        }
    }

    pub fn get() -> &'static PopcountTable {
        static TABLE: OnceLock<PopcountTable> = OnceLock::new();
        TABLE.get_or_init(PopcountTable::new)
    }

    #[inline]
    pub fn weight16(&self, v: u16) -> u32 {
        self.weights[v as usize] as u32
    }

    /// Weight of the low `width` bytes of `v`, one lookup per 16-bit block.
    #[inline]
    pub fn weight(&self, mut v: u64, width: usize) -> u32 {
        let mut w = 0;
        for _ in 0..width.div_ceil(2) {
            w += self.weight16(v as u16);
            v >>= 16;
        }
        w
    }
}

/// `H_S`, the number of differing sketch bits.
pub fn sketch_distance(a: &Sketch, b: &Sketch) -> Result<u32> {
    if a.width != b.width || a.mode != b.mode {
        return Err(invalid("sketches built with different configurations"));
    }
    Ok(PopcountTable::get().weight(a.bits ^ b.bits, a.width()))
}

const LOWER_BOUND: [u8; 65] = {
    let mut t = [0u8; 65];
    let mut h = 0;
    while h < 65 {
        t[h] = h.div_ceil(2) as u8;
        h += 1;
    }
    t
};

/// `ceil(H_S / 2)`.
#[inline]
pub fn hamming_lower_bound(h_s: u32) -> u32 {
    LOWER_BOUND[h_s as usize] as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterOutcome {
    /// Decided from the sketches alone.
    Rejected,
    /// Direct comparison ran; holds whether `Ham <= k`.
    Verified(bool),
}

impl FilterOutcome {
    pub fn matched(self) -> bool {
        matches!(self, FilterOutcome::Verified(true))
    }
}

/// Compares with precomputed sketches of both words.
pub fn compare_sketched(w1: &[u8], s1: &Sketch, w2: &[u8], s2: &Sketch, k: usize) -> Result<FilterOutcome> {
    if w1.len() != w2.len() {
        return Err(invalid(format!(
            "Hamming distance needs equal lengths, got {} and {}",
            w1.len(),
            w2.len()
        )));
    }
    let h_s = sketch_distance(s1, s2)?;
    let reject = match s1.mode {
        SketchMode::Occurrence => hamming_lower_bound(h_s) as usize > k,
        SketchMode::Count => k == 0 && h_s > 0,
    };
    if reject {
        return Ok(FilterOutcome::Rejected);
    }
    let mut errors = 0;
    for (a, b) in w1.iter().zip(w2) {
        if a != b {
            errors += 1;
            if errors > k {
                return Ok(FilterOutcome::Verified(false));
            }
        }
    }
    Ok(FilterOutcome::Verified(true))
}

/// Whether `Ham(w1, w2) <= k`, rejecting early from the sketches when
/// they allow it.
pub fn filtered_compare(w1: &[u8], w2: &[u8], k: usize, config: &SketchConfig) -> Result<bool> {
    let (s1, s2) = (config.build(w1), config.build(w2));
    Ok(compare_sketched(w1, &s1, w2, &s2, k)?.matched())
}
