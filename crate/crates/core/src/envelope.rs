//! Binary container for persisted indexes.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic      [u8; 4]   per index kind
//! version    u8
//! params     u32 length + bytes
//! payload    u32 length + bytes
//! checksum   u64       xxh64 over every preceding byte
//! ```
//!
//! Parameter blocks and payloads are written with [`Writer`] and read back
//! with [`Reader`]: fixed-width integers and length-prefixed sequences.

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub magic: [u8; 4],
    pub version: u8,
    pub params: Vec<u8>,
    pub payload: Vec<u8>,
}

impl Envelope {
    pub fn new(magic: [u8; 4], params: Vec<u8>, payload: Vec<u8>) -> Self {
        Self {
            magic,
            version: FORMAT_VERSION,
            params,
            payload,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.put_raw(&self.magic);
        w.put_u8(self.version);
        w.put_bytes(&self.params);
        w.put_bytes(&self.payload);
        let sum = xxhash_rust::xxh64::xxh64(w.as_slice(), 0);
        w.put_u64(sum);
        w.into_inner()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 + 1 + 4 + 4 + 8 {
            return Err(Error::Format("file too short for an index envelope".into()));
        }
        let (body, sum) = bytes.split_at(bytes.len() - 8);
        let stored = u64::from_le_bytes(sum.try_into().expect("8 bytes"));
        if xxhash_rust::xxh64::xxh64(body, 0) != stored {
            return Err(Error::Format("checksum mismatch".into()));
        }
        let mut r = Reader::new(body);
        let magic: [u8; 4] = r.raw(4)?.try_into().expect("4 bytes");
        let version = r.u8()?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported format version {version} (expected {FORMAT_VERSION})"
            )));
        }
        let params = r.bytes()?.to_vec();
        let payload = r.bytes()?.to_vec();
        r.finish()?;
        Ok(Self {
            magic,
            version,
            params,
            payload,
        })
    }
}

#[derive(Debug, Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn put_raw(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }
    pub fn put_u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    pub fn put_u16(&mut self, v: u16) {
        self.put_raw(&v.to_le_bytes());
    }
    pub fn put_u32(&mut self, v: u32) {
        self.put_raw(&v.to_le_bytes());
    }
    pub fn put_u64(&mut self, v: u64) {
        self.put_raw(&v.to_le_bytes());
    }
    pub fn put_f64(&mut self, v: f64) {
        self.put_raw(&v.to_le_bytes());
    }
    /// `u32` length followed by the bytes.
    pub fn put_bytes(&mut self, b: &[u8]) {
        self.put_u32(u32::try_from(b.len()).expect("sequence below 4 GiB"));
        self.put_raw(b);
    }
    pub fn put_str(&mut self, s: &str) {
        self.put_bytes(s.as_bytes());
    }
    /// `u32` count followed by the values.
    pub fn put_u32s(&mut self, v: &[u32]) {
        self.put_u32(u32::try_from(v.len()).expect("sequence below 4 GiB"));
        self.buf.reserve(v.len() * 4);
        for &x in v {
            self.put_u32(x);
        }
    }
    pub fn as_slice(&self) -> &[u8] {
        &self.buf
    }
    pub fn into_inner(self) -> Vec<u8> {
        self.buf
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn raw(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Format(format!("truncated at byte {}", self.pos)))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.raw(1)?[0])
    }
    pub fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.raw(2)?.try_into().expect("2 bytes")))
    }
    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.raw(4)?.try_into().expect("4 bytes")))
    }
    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.raw(8)?.try_into().expect("8 bytes")))
    }
    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.raw(8)?.try_into().expect("8 bytes")))
    }
    pub fn bytes(&mut self) -> Result<&'a [u8]> {
        let n = self.u32()? as usize;
        self.raw(n)
    }
    pub fn string(&mut self) -> Result<String> {
        String::from_utf8(self.bytes()?.to_vec())
            .map_err(|_| Error::Format("string is not UTF-8".into()))
    }
    pub fn u32s(&mut self) -> Result<Vec<u32>> {
        let n = self.u32()? as usize;
        let raw = self.raw(n.checked_mul(4).ok_or_else(|| Error::Format("length overflow".into()))?)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect())
    }
    /// Fails unless every byte was consumed.
    pub fn finish(&self) -> Result<()> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(Error::Format(format!(
                "{} trailing bytes",
                self.buf.len() - self.pos
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_round_trip() {
        let env = Envelope::new(*b"TEST", vec![1, 2, 3], vec![9; 100]);
        let bytes = env.to_bytes();
        assert_eq!(&bytes[..4], b"TEST");
        assert_eq!(bytes[4], FORMAT_VERSION);
        assert_eq!(Envelope::from_bytes(&bytes).unwrap(), env);
    }

    #[test]
    fn corrupted_envelopes_are_rejected() {
        let bytes = Envelope::new(*b"TEST", vec![], vec![7; 10]).to_bytes();
        for i in 0..bytes.len() {
            let mut bad = bytes.clone();
            bad[i] ^= 0x10;
            assert!(Envelope::from_bytes(&bad).is_err(), "flip at {i} accepted");
        }
        assert!(Envelope::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn version_is_checked() {
        let mut env = Envelope::new(*b"TEST", vec![], vec![]);
        env.version = 9;
        let err = Envelope::from_bytes(&env.to_bytes()).unwrap_err();
        assert!(err.to_string().contains("version"));
    }

    #[test]
    fn reader_matches_writer() {
        let mut w = Writer::default();
        w.put_u8(7);
        w.put_u16(0xBEEF);
        w.put_u32(123_456);
        w.put_u64(u64::MAX - 1);
        w.put_f64(2.81);
        w.put_str("xxhash");
        w.put_u32s(&[3, 1, 4]);
        let buf = w.into_inner();
        let mut r = Reader::new(&buf);
        assert_eq!(r.u8().unwrap(), 7);
        assert_eq!(r.u16().unwrap(), 0xBEEF);
        assert_eq!(r.u32().unwrap(), 123_456);
        assert_eq!(r.u64().unwrap(), u64::MAX - 1);
        assert_eq!(r.f64().unwrap(), 2.81);
        assert_eq!(r.string().unwrap(), "xxhash");
        assert_eq!(r.u32s().unwrap(), [3, 1, 4]);
        r.finish().unwrap();
        assert!(r.u8().is_err());
    }
}
