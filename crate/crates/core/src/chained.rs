//! Hash map with separate chaining where keys are resolved through a caller
//! supplied accessor, so entries may store keys implicitly (e.g. as an offset
//! into a shared text).

use crate::error::{invalid, Result};
use crate::hashing::SharedHash;

const INITIAL_BUCKETS: usize = 16;

pub struct ChainedMap<E> {
    buckets: Vec<Vec<E>>,
    len: usize,
    max_load_factor: f64,
    hasher: SharedHash,
}

/// Occupancy figures reported by builds and benches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadStats {
    pub entries: usize,
    pub buckets: usize,
    pub load_factor: f64,
    pub max_chain: usize,
}

impl<E> ChainedMap<E> {
    pub fn new(hasher: SharedHash, max_load_factor: f64) -> Result<Self> {
        if !(max_load_factor.is_finite() && max_load_factor > 0.0) {
            return Err(invalid(format!(
                "max load factor must be positive, got {max_load_factor}"
            )));
        }
        Ok(Self {
            buckets: (0..INITIAL_BUCKETS).map(|_| Vec::new()).collect(),
            len: 0,
            max_load_factor,
            hasher,
        })
    }

    /// Rebuilds a map from previously exported buckets, keeping their order.
    pub fn from_buckets(hasher: SharedHash, max_load_factor: f64, buckets: Vec<Vec<E>>) -> Result<Self> {
        if !buckets.len().is_power_of_two() {
            return Err(invalid("bucket count must be a power of two"));
        }
        let mut map = Self::new(hasher, max_load_factor)?;
        map.len = buckets.iter().map(Vec::len).sum();
        map.buckets = buckets;
        Ok(map)
    }

    #[inline]
    fn bucket_of(&self, key: &[u8]) -> usize {
        (self.hasher.hash(key) as usize) & (self.buckets.len() - 1)
    }

    #[inline]
    pub fn get<'k>(&self, key: &[u8], key_of: impl Fn(&E) -> &'k [u8]) -> Option<&E> {
        self.buckets[self.bucket_of(key)]
            .iter()
            .find(|e| key_of(e) == key)
    }

    /// Returns the entry for `key`, inserting `make()` when absent. The
    /// boolean is true when a new entry was created.
    pub fn get_or_insert_with<'k>(
        &mut self,
        key: &[u8],
        key_of: impl Fn(&E) -> &'k [u8],
        make: impl FnOnce() -> E,
    ) -> (&mut E, bool) {
        let b = self.bucket_of(key);
        if let Some(i) = self.buckets[b].iter().position(|e| key_of(e) == key) {
            return (&mut self.buckets[b][i], false);
        }
        if (self.len + 1) as f64 > self.max_load_factor * self.buckets.len() as f64 {
            self.grow(&key_of);
        }
        let b = self.bucket_of(key);
        self.buckets[b].push(make());
        self.len += 1;
        (self.buckets[b].last_mut().expect("just pushed"), true)
    }

    fn grow<'k>(&mut self, key_of: &impl Fn(&E) -> &'k [u8]) {
        let doubled = self.buckets.len() * 2;
        let old = std::mem::replace(
            &mut self.buckets,
            (0..doubled).map(|_| Vec::new()).collect(),
        );
        for e in old.into_iter().flatten() {
            let b = self.bucket_of(key_of(&e));
            self.buckets[b].push(e);
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn buckets(&self) -> &[Vec<E>] {
        &self.buckets
    }

    pub fn into_buckets(self) -> Vec<Vec<E>> {
        self.buckets
    }

    pub fn iter(&self) -> impl Iterator<Item = &E> {
        self.buckets.iter().flatten()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut E> {
        self.buckets.iter_mut().flatten()
    }

    pub fn hasher(&self) -> &SharedHash {
        &self.hasher
    }

    pub fn max_load_factor(&self) -> f64 {
        self.max_load_factor
    }

    pub fn stats(&self) -> LoadStats {
        LoadStats {
            entries: self.len,
            buckets: self.buckets.len(),
            load_factor: self.len as f64 / self.buckets.len() as f64,
            max_chain: self.buckets.iter().map(Vec::len).max().unwrap_or(0),
        }
    }
}
