use std::path::{Path, PathBuf};

use super::workload::{Provenance, QueryWorkload};
use crate::error::{Error, Result};
use crate::split::{Dictionary, IngestStats};
use crate::text::Corpus;

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn lines(bytes: &[u8]) -> impl Iterator<Item = &[u8]> {
    bytes.split(|&b| b == b'\n').map(|l| l.strip_suffix(b"\r").unwrap_or(l))
}

/// Newline-separated tokens of printable, non-space ASCII. Blank lines are
/// delimiters; other lines with bytes outside `0x21..=0x7E` are rejected and
/// counted.
pub fn parse_dictionary(bytes: &[u8]) -> (Dictionary, IngestStats) {
    let mut bad = 0;
    let tokens: Vec<&[u8]> = lines(bytes)
        .filter(|l| !l.is_empty())
        .filter(|l| {
            let ok = l.iter().all(|b| (0x21..=0x7E).contains(b));
            bad += usize::from(!ok);
            ok
        })
        .collect();
    let (dict, mut stats) = Dictionary::ingest(tokens.into_iter().map(<[u8]>::to_vec));
    stats.bad_bytes += bad;
    (dict, stats)
}

pub fn load_dictionary(path: impl AsRef<Path>) -> Result<(Dictionary, IngestStats)> {
    Ok(parse_dictionary(&read(path.as_ref())?))
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    Corpus::new(read(path)?).map_err(|e| Error::MalformedInput(format!("{}: {e}", path.display())))
}

/// One query per nonblank line; for `wrong->right` lines only the left side.
pub fn parse_queries(bytes: &[u8], origin: PathBuf) -> QueryWorkload {
    let queries = lines(bytes)
        .map(|l| match l.windows(2).position(|w| w == b"->") {
            Some(p) => l[..p].trim_ascii(),
            None => l,
        })
        .filter(|l| !l.is_empty())
        .map(<[u8]>::to_vec)
        .collect();
    QueryWorkload {
        queries,
        sources: Vec::new(),
        provenance: Provenance::File(origin),
    }
}

pub fn load_queries(path: impl AsRef<Path>) -> Result<QueryWorkload> {
    let path = path.as_ref();
    Ok(parse_queries(&read(path)?, path.to_path_buf()))
}

/// `(wrong, right)` pairs of a misspelling list; a right side may list
/// several comma-separated corrections, of which the first is kept.
pub fn load_misspellings(path: impl AsRef<Path>) -> Result<Vec<(Vec<u8>, Vec<u8>)>> {
    let bytes = read(path.as_ref())?;
    Ok(lines(&bytes)
        .filter_map(|l| {
            let p = l.windows(2).position(|w| w == b"->")?;
            let right = l[p + 2..].split(|&b| b == b',').next()?.trim_ascii();
            Some((l[..p].trim_ascii().to_vec(), right.to_vec()))
        })
        .filter(|(w, r)| !w.is_empty() && !r.is_empty())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dictionary_parsing() {
        let (d, s) = parse_dictionary(b"a\nb\na\n");
        assert_eq!(d.words(), [b"a".to_vec(), b"b".to_vec()]);
        assert_eq!(s.duplicates, 1);
        let (d, s) = parse_dictionary(b"ok\r\ntwo words\n\xc3\xa9\n\n");
        assert_eq!(d.words(), [b"ok".to_vec()]);
        assert_eq!(s.bad_bytes, 2);
        let long = vec![b'x'; 300];
        let (d, s) = parse_dictionary(&long);
        assert!(d.is_empty());
        assert_eq!(s.too_long, 1);
        assert!(parse_dictionary(b"").0.is_empty());
    }

    #[test]
    fn query_parsing() {
        let w = parse_queries(b"teh->the\nabc\n\nrecieve -> receive\n", PathBuf::from("q"));
        assert_eq!(w.queries, [b"teh".to_vec(), b"abc".to_vec(), b"recieve".to_vec()]);
    }

    #[test]
    fn missing_files_name_the_path() {
        let err = load_corpus("/nonexistent/corpus.txt").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/corpus.txt"));
    }
}
