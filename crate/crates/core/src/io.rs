//! Text formats: the "H3 v1" hypergraph format and plain cycle files.
//!
//! H3 v1: first line `n m`, then `m` whitespace-separated triples `a b c`
//! (0-indexed, any order, duplicates ignored). The writer emits canonical
//! sorted triples in lexicographic order, so output is byte-reproducible.

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph3, Triple};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

pub fn read_h3<R: Read>(reader: R) -> Result<Hypergraph3> {
    let mut tokens = Vec::new();
    for line in BufReader::new(reader).lines() {
        let line = line?;
        for tok in line.split_whitespace() {
            tokens.push(tok.to_string());
        }
    }
    let mut it = tokens.iter();
    let n: usize = next_num(&mut it, "n")?;
    let m: usize = next_num(&mut it, "m")?;
    let mut triples: Vec<Triple> = Vec::with_capacity(m);
    for i in 0..m {
        let a = next_num(&mut it, &format!("triple {i}"))?;
        let b = next_num(&mut it, &format!("triple {i}"))?;
        let c = next_num(&mut it, &format!("triple {i}"))?;
        triples.push([a, b, c]);
    }
    if it.next().is_some() {
        return Err(Error::Parse("trailing tokens after last triple".into()));
    }
    Hypergraph3::build_from_triples(n, triples)
}

fn next_num<'a, T: std::str::FromStr, I: Iterator<Item = &'a String>>(
    it: &mut I,
    what: &str,
) -> Result<T> {
    let tok = it.next().ok_or_else(|| Error::Parse(format!("missing token for {what}")))?;
    tok.parse().map_err(|_| Error::Parse(format!("bad number {tok:?} for {what}")))
}

pub fn read_h3_file<P: AsRef<Path>>(path: P) -> Result<Hypergraph3> {
    read_h3(std::fs::File::open(path)?)
}

pub fn write_h3<W: Write>(h: &Hypergraph3, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", h.n_ids(), h.edge_count())?;
    for &[a, b, c] in h.edges() {
        writeln!(w, "{a} {b} {c}")?;
    }
    Ok(())
}

pub fn write_h3_file<P: AsRef<Path>>(h: &Hypergraph3, path: P) -> Result<()> {
    write_h3(h, std::fs::File::create(path)?)
}

pub fn h3_to_string(h: &Hypergraph3) -> String {
    let mut buf = Vec::new();
    write_h3(h, &mut buf).expect("write to vec");
    String::from_utf8(buf).expect("ascii")
}

/// A cycle/path file is one whitespace-separated vertex sequence.
pub fn read_sequence<R: Read>(reader: R) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for line in BufReader::new(reader).lines() {
        for tok in line?.split_whitespace() {
            out.push(
                tok.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad vertex {tok:?} in sequence")))?,
            );
        }
    }
    Ok(out)
}

pub fn read_sequence_file<P: AsRef<Path>>(path: P) -> Result<Vec<u32>> {
    read_sequence(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_dedup() {
        let h = Hypergraph3::complete(5);
        let s = h3_to_string(&h);
        let h2 = read_h3(s.as_bytes()).unwrap();
        assert_eq!(h.edges(), h2.edges());
        assert_eq!(h3_to_string(&h2), s);

        let dup = "4 3\n0 1 2\n2 1 0\n1 2 3\n";
        let h3 = read_h3(dup.as_bytes()).unwrap();
        assert_eq!(h3.edge_count(), 2);
    }

    #[test]
    fn parse_errors() {
        assert!(read_h3("3".as_bytes()).is_err());
        assert!(read_h3("3 1\n0 1".as_bytes()).is_err());
        assert!(read_h3("3 1\n0 1 x".as_bytes()).is_err());
        assert!(read_h3("3 1\n0 1 2\n7".as_bytes()).is_err());
        assert!(read_h3("3 1\n0 1 3".as_bytes()).is_err());
    }
}
