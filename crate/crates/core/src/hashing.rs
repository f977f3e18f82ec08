//! String hash functions selectable by name.
//!
//! Both hash-table backed indexes take their hash as a trait object so the
//! candidate functions can be swapped from the command line. Lookups go
//! through [`HashRegistry`]; [`DEFAULT_HASH`] names the one used when nothing
//! is configured.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};

/// A hash over byte strings.
pub trait StringHash: Send + Sync {
    fn name(&self) -> &'static str;
    fn hash(&self, bytes: &[u8]) -> u64;
}

impl fmt::Debug for dyn StringHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StringHash({})", self.name())
    }
}

pub type SharedHash = Arc<dyn StringHash>;

pub const DEFAULT_HASH: &str = "xxhash";

struct XxHash64;

impl StringHash for XxHash64 {
    fn name(&self) -> &'static str {
        "xxhash"
    }
    fn hash(&self, bytes: &[u8]) -> u64 {
        xxhash_rust::xxh64::xxh64(bytes, 0)
    }
}

struct Xxh3;

impl StringHash for Xxh3 {
    fn name(&self) -> &'static str {
        "xxh3"
    }
    fn hash(&self, bytes: &[u8]) -> u64 {
        xxhash_rust::xxh3::xxh3_64(bytes)
    }
}

struct Murmur3;

impl StringHash for Murmur3 {
    fn name(&self) -> &'static str {
        "murmur3"
    }
    fn hash(&self, bytes: &[u8]) -> u64 {
        murmur3::murmur3_32(&mut std::io::Cursor::new(bytes), 0)
            .expect("reading from memory") as u64
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

struct Fnv1;

impl StringHash for Fnv1 {
    fn name(&self) -> &'static str {
        "fnv1"
    }
    fn hash(&self, bytes: &[u8]) -> u64 {
        bytes
            .iter()
            .fold(FNV_OFFSET, |h, &b| h.wrapping_mul(FNV_PRIME) ^ b as u64)
    }
}

struct Fnv1a;

impl StringHash for Fnv1a {
    fn name(&self) -> &'static str {
        "fnv1a"
    }
    fn hash(&self, bytes: &[u8]) -> u64 {
        bytes
            .iter()
            .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
    }
}

struct Sdbm;

impl StringHash for Sdbm {
    fn name(&self) -> &'static str {
        "sdbm"
    }
    fn hash(&self, bytes: &[u8]) -> u64 {
        bytes.iter().fold(0u64, |h, &b| {
            (b as u64)
                .wrapping_add(h << 6)
                .wrapping_add(h << 16)
                .wrapping_sub(h)
        })
    }
}

/// Paul Hsieh's SuperFastHash.
struct SuperFast;

impl StringHash for SuperFast {
    fn name(&self) -> &'static str {
        "superfast"
    }
    fn hash(&self, data: &[u8]) -> u64 {
        let get16 = |d: &[u8]| u16::from_le_bytes([d[0], d[1]]) as u32;
        let mut hash = data.len() as u32;
        let mut chunks = data.chunks_exact(4);
        for c in &mut chunks {
            hash = hash.wrapping_add(get16(c));
            let tmp = (get16(&c[2..]) << 11) ^ hash;
            hash = (hash << 16) ^ tmp;
            hash = hash.wrapping_add(hash >> 11);
        }
        let rem = chunks.remainder();
        match rem.len() {
            3 => {
                hash = hash.wrapping_add(get16(rem));
                hash ^= hash << 16;
                hash ^= ((rem[2] as i8 as i32) << 18) as u32;
                hash = hash.wrapping_add(hash >> 11);
            }
            2 => {
                hash = hash.wrapping_add(get16(rem));
                hash ^= hash << 11;
                hash = hash.wrapping_add(hash >> 17);
            }
            1 => {
                hash = hash.wrapping_add(rem[0] as i8 as i32 as u32);
                hash ^= hash << 10;
                hash = hash.wrapping_add(hash >> 1);
            }
            _ => {}
        }
        hash ^= hash << 3;
        hash = hash.wrapping_add(hash >> 5);
        hash ^= hash << 4;
        hash = hash.wrapping_add(hash >> 17);
        hash ^= hash << 25;
        hash = hash.wrapping_add(hash >> 6);
        hash as u64
    }
}

/// Name-indexed collection of hash functions.
pub struct HashRegistry {
    entries: Vec<SharedHash>,
}

impl Default for HashRegistry {
    fn default() -> Self {
        Self {
            entries: vec![
                Arc::new(XxHash64),
                Arc::new(Xxh3),
                Arc::new(Murmur3),
                Arc::new(Fnv1),
                Arc::new(Fnv1a),
                Arc::new(Sdbm),
                Arc::new(SuperFast),
            ],
        }
    }
}

impl HashRegistry {
    pub fn register(&mut self, hash: SharedHash) {
        self.entries.retain(|h| h.name() != hash.name());
        self.entries.push(hash);
    }

    pub fn get(&self, name: &str) -> Result<SharedHash> {
        self.entries
            .iter()
            .find(|h| h.name() == name)
            .cloned()
            .ok_or_else(|| {
                invalid(format!(
                    "unknown hash function {name:?} (known: {})",
                    self.names().join(", ")
                ))
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|h| h.name()).collect()
    }
}

/// Resolves a hash from the built-in registry.
pub fn by_name(name: &str) -> Result<SharedHash> {
    HashRegistry::default().get(name)
}

pub fn default_hash() -> SharedHash {
    by_name(DEFAULT_HASH).expect("default hash is registered")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_vectors() {
        let reg = HashRegistry::default();
        // reference values from the public test suites of each function
        assert_eq!(reg.get("fnv1a").unwrap().hash(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(reg.get("fnv1").unwrap().hash(b"a"), 0xaf63bd4c8601b7be);
        assert_eq!(reg.get("xxhash").unwrap().hash(b""), 0xef46db3751d8e999);
        assert_eq!(reg.get("murmur3").unwrap().hash(b""), 0);
        assert_eq!(reg.get("sdbm").unwrap().hash(b"a"), 97);
    }

    #[test]
    fn every_hash_is_deterministic_and_spreads() {
        let reg = HashRegistry::default();
        for name in reg.names() {
            let h = reg.get(name).unwrap();
            assert_eq!(h.name(), name);
            assert_eq!(h.hash(b"table"), h.hash(b"table"));
            let distinct: std::collections::HashSet<u64> = (0..1000u32)
                .map(|i| h.hash(format!("w{i}").as_bytes()))
                .collect();
            assert!(distinct.len() > 990, "{name} collides heavily");
            for len in 0..9 {
                h.hash(&b"abcdefgh"[..len]);
            }
        }
    }

    #[test]
    fn unknown_name() {
        assert!(by_name("md5").is_err());
        assert_eq!(default_hash().name(), DEFAULT_HASH);
    }
}
