//! Graph and LE-list file formats.
//!
//! Text graphs use the `AdjacencyGraph` layout: the header line, `n`, `m`,
//! `n` offsets and `m` targets, one integer per line. Loading canonicalizes
//! neighbor lists (sorted, deduplicated, loop-free), so writing a loaded
//! graph yields the canonical form of the input.
//!
//! Binary graphs (all integers little-endian):
//!
//! ```text
//! "CGR1"  flags:u32 (bit 0 = symmetric)  n:u64  m:u64
//! offsets: n x u64   targets: m x u32
//! ```
//!
//! Binary LE-lists:
//!
//! ```text
//! "LEL1"  n:u64
//! per vertex: len:u32 then len x (source:u32, distance:u32)
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Csr, Graph, VertexId, MAX_VERTICES};

pub const TEXT_HEADER: &str = "AdjacencyGraph";
pub const BINARY_MAGIC: &[u8; 4] = b"CGR1";
pub const LELIST_MAGIC: &[u8; 4] = b"LEL1";
const FLAG_SYMMETRIC: u32 = 1;

/// A per-vertex LE-list: `(source, distance)` in decreasing distance.
pub type LeLists = Vec<Vec<(VertexId, u32)>>;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses the text format. Blank lines are ignored.
pub fn parse_adjacency_text(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, TEXT_HEADER)) => {}
        Some((ln, other)) => {
            return Err(parse_err(ln, format!("expected header {TEXT_HEADER:?}, found {other:?}")))
        }
        None => return Err(parse_err(1, "empty file")),
    }
    let mut last_line = 1;
    let mut next_int = |what: &str| -> Result<(usize, u64)> {
        match lines.next() {
            Some((ln, tok)) => {
                last_line = ln;
                tok.parse::<u64>()
                    .map(|x| (ln, x))
                    .map_err(|_| parse_err(ln, format!("{what}: {tok:?} is not a non-negative integer")))
            }
            None => Err(parse_err(last_line + 1, format!("unexpected end of file reading {what}"))),
        }
    };

    let (ln, n) = next_int("vertex count")?;
    if n as usize > MAX_VERTICES {
        return Err(parse_err(ln, format!("{n} vertices exceed the 32-bit id range")));
    }
    let (_, m) = next_int("edge count")?;
    let n = n as usize;
    let mut offsets = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (ln, o) = next_int("offset")?;
        if o > m {
            return Err(parse_err(ln, format!("offset {o} exceeds edge count {m}")));
        }
        if i == 0 && o != 0 {
            return Err(parse_err(ln, "first offset must be 0"));
        }
        if offsets.last().is_some_and(|&prev| o < prev) {
            return Err(parse_err(ln, "offsets must be non-decreasing"));
        }
        offsets.push(o);
    }
    let mut edges = Vec::with_capacity(m as usize);
    let mut src = 0usize;
    for k in 0..m {
        let (ln, t) = next_int("target")?;
        if t as usize >= n {
            return Err(parse_err(ln, format!("target {t} out of range for {n} vertices")));
        }
        while src + 1 < n && offsets[src + 1] <= k {
            src += 1;
        }
        edges.push((src as VertexId, t as VertexId));
    }
    if n == 0 && m > 0 {
        return Err(parse_err(last_line, "edges in a graph without vertices"));
    }
    if let Some((ln, tok)) = lines.next() {
        return Err(parse_err(ln, format!("trailing data {tok:?} after {m} targets")));
    }
    Graph::from_edges(n, &edges)
}

pub fn load_adjacency_text(path: impl AsRef<Path>) -> Result<Graph> {
    parse_adjacency_text(&std::fs::read_to_string(path)?)
}

pub fn write_adjacency_text_to(g: &Graph, mut w: impl Write) -> Result<()> {
    let csr = g.csr();
    writeln!(w, "{TEXT_HEADER}")?;
    writeln!(w, "{}", csr.num_vertices())?;
    writeln!(w, "{}", csr.num_edges())?;
    for o in &csr.offsets()[..csr.num_vertices()] {
        writeln!(w, "{o}")?;
    }
    for t in csr.targets() {
        writeln!(w, "{t}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_adjacency_text(g: &Graph) -> String {
    let mut buf = Vec::new();
    write_adjacency_text_to(g, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("ascii output")
}

pub fn write_adjacency_text(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    write_adjacency_text_to(g, BufWriter::new(File::create(path)?))
}

pub fn write_binary_to(g: &Graph, mut w: impl Write) -> Result<()> {
    let csr = g.csr();
    let flags = if g.is_symmetric() { FLAG_SYMMETRIC } else { 0 };
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&flags.to_le_bytes())?;
    w.write_all(&(csr.num_vertices() as u64).to_le_bytes())?;
    w.write_all(&(csr.num_edges() as u64).to_le_bytes())?;
    for o in &csr.offsets()[..csr.num_vertices()] {
        w.write_all(&o.to_le_bytes())?;
    }
    for t in csr.targets() {
        w.write_all(&t.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_binary(g: &Graph) -> Vec<u8> {
    let mut buf = Vec::new();
    write_binary_to(g, &mut buf).expect("writing to memory cannot fail");
    buf
}

pub fn write_binary(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    write_binary_to(g, BufWriter::new(File::create(path)?))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(k).filter(|&e| e <= self.bytes.len()).ok_or_else(|| {
            Error::Binary(format!("truncated while reading {what} at byte {}", self.pos))
        })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

pub fn parse_binary(bytes: &[u8]) -> Result<Graph> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(4, "magic")? != BINARY_MAGIC {
        return Err(Error::Binary("bad magic, expected CGR1".into()));
    }
    let flags = c.u32("flags")?;
    if flags & !FLAG_SYMMETRIC != 0 {
        return Err(Error::Binary(format!("unknown flag bits {flags:#x}")));
    }
    let n = c.u64("vertex count")?;
    let m = c.u64("edge count")?;
    if n as usize > MAX_VERTICES {
        return Err(Error::TooManyVertices(n));
    }
    let expect = 24u128 + 8 * n as u128 + 4 * m as u128;
    if expect != bytes.len() as u128 {
        return Err(Error::Binary(format!(
            "size mismatch: header implies {expect} bytes, file has {}",
            bytes.len()
        )));
    }
    let mut offsets = Vec::with_capacity(n as usize + 1);
    for _ in 0..n {
        offsets.push(c.u64("offsets")?);
    }
    offsets.push(m);
    let mut targets = Vec::with_capacity(m as usize);
    for _ in 0..m {
        targets.push(c.u32("targets")?);
    }
    Graph::from_csr(Csr::new(offsets, targets)?, flags & FLAG_SYMMETRIC != 0)
}

pub fn load_binary(path: impl AsRef<Path>) -> Result<Graph> {
    parse_binary(&std::fs::read(path)?)
}

/// Loads either format, chosen by the leading bytes.
pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(BINARY_MAGIC) {
        parse_binary(&bytes)
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| Error::Parse { line: 1, msg: format!("not UTF-8 text: {e}") })?;
        parse_adjacency_text(text)
    }
}

/// Writes binary when `path` ends in `.bin`, text otherwise.
pub fn write_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e == "bin") {
        write_binary(g, path)
    } else {
        write_adjacency_text(g, path)
    }
}

pub fn write_lelists_text_to(lists: &LeLists, mut w: impl Write) -> Result<()> {
    for (v, list) in lists.iter().enumerate() {
        write!(w, "{v}:")?;
        for (s, d) in list {
            write!(w, " ({s},{d})")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_lelists_text(text: &str) -> Result<LeLists> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (head, rest) = line
            .split_once(':')
            .ok_or_else(|| parse_err(ln, "missing ':' after vertex id"))?;
        let v: usize = head.trim().parse().map_err(|_| parse_err(ln, "bad vertex id"))?;
        if v != out.len() {
            return Err(parse_err(ln, format!("expected vertex {}, found {v}", out.len())));
        }
        let mut list = Vec::new();
        for tok in rest.split_whitespace() {
            let inner = tok
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| parse_err(ln, format!("bad entry {tok:?}")))?;
            let (s, d) = inner
                .split_once(',')
                .ok_or_else(|| parse_err(ln, format!("bad entry {tok:?}")))?;
            let s = s.parse().map_err(|_| parse_err(ln, format!("bad source in {tok:?}")))?;
            let d = d.parse().map_err(|_| parse_err(ln, format!("bad distance in {tok:?}")))?;
            list.push((s, d));
        }
        out.push(list);
    }
    Ok(out)
}

pub fn write_lelists_binary_to(lists: &LeLists, mut w: impl Write) -> Result<()> {
    w.write_all(LELIST_MAGIC)?;
    w.write_all(&(lists.len() as u64).to_le_bytes())?;
    for list in lists {
        w.write_all(&(list.len() as u32).to_le_bytes())?;
        for &(s, d) in list {
            w.write_all(&s.to_le_bytes())?;
            w.write_all(&d.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn parse_lelists_binary(bytes: &[u8]) -> Result<LeLists> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(4, "magic")? != LELIST_MAGIC {
        return Err(Error::Binary("bad magic, expected LEL1".into()));
    }
    let n = c.u64("vertex count")?;
    let mut out = Vec::with_capacity(n.min(1 << 24) as usize);
    for _ in 0..n {
        let len = c.u32("list length")?;
        let mut list = Vec::with_capacity(len.min(1 << 16) as usize);
        for _ in 0..len {
            list.push((c.u32("source")?, c.u32("distance")?));
        }
        out.push(list);
    }
    if c.pos != bytes.len() {
        return Err(Error::Binary("trailing bytes after LE-lists".into()));
    }
    Ok(out)
}

/// Writes binary when `path` ends in `.bin` or `.lel`, text otherwise.
pub fn write_lelists(lists: &LeLists, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let w = BufWriter::new(File::create(path)?);
    if path.extension().is_some_and(|e| e == "bin" || e == "lel") {
        write_lelists_binary_to(lists, w)
    } else {
        write_lelists_text_to(lists, w)
    }
}

pub fn load_lelists(path: impl AsRef<Path>) -> Result<LeLists> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.starts_with(LELIST_MAGIC) {
        parse_lelists_binary(&bytes)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|e| Error::Parse { line: 1, msg: format!("not UTF-8 text: {e}") })?;
        parse_lelists_text(&text)
    }
}

/// Reads whitespace-separated vertex ids (one permutation) from a reader.
pub fn read_vertex_list(r: impl BufRead) -> Result<Vec<VertexId>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        for tok in line?.split_whitespace() {
            out.push(tok.parse().map_err(|_| parse_err(i + 1, format!("bad vertex id {tok:?}")))?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::gen_random_digraph;

    const CYCLE: &str = "AdjacencyGraph\n3\n3\n0\n1\n2\n1\n2\n0\n";

    #[test]
    fn parses_three_cycle() {
        let g = parse_adjacency_text(CYCLE).unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!(to_adjacency_text(&g), CYCLE);
    }

    #[test]
    fn canonicalizes_on_load() {
        let messy = "AdjacencyGraph\n2\n4\n0\n3\n1\n1\n0\n0\n";
        let g = parse_adjacency_text(messy).unwrap();
        assert_eq!(to_adjacency_text(&g), "AdjacencyGraph\n2\n2\n0\n1\n1\n0\n");
        let again = parse_adjacency_text(&to_adjacency_text(&g)).unwrap();
        assert_eq!(to_adjacency_text(&again), to_adjacency_text(&g));
    }

    #[test]
    fn distinct_parse_errors_with_lines() {
        let cases = [
            ("Adjacency\n1\n0\n0\n", 1, "header"),
            ("AdjacencyGraph\n3\n3\n0\n1\n2\n1\n2\n", 9, "end of file"),
            ("AdjacencyGraph\n2\n1\n0\n0\n5\n", 6, "out of range"),
            ("AdjacencyGraph\n2\n1\n0\n1\n1\n9\n", 7, "trailing"),
            ("AdjacencyGraph\n2\nx\n", 3, "integer"),
            ("AdjacencyGraph\n3\n2\n0\n2\n1\n1\n1\n", 6, "non-decreasing"),
        ];
        for (text, line, needle) in cases {
            match parse_adjacency_text(text) {
                Err(Error::Parse { line: l, msg }) => {
                    assert_eq!(l, line, "{text:?}: {msg}");
                    assert!(msg.contains(needle), "{text:?}: {msg}");
                }
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn text_and_binary_round_trip() {
        let g = gen_random_digraph(500, 2000, 11).unwrap();
        assert_eq!(parse_adjacency_text(&to_adjacency_text(&g)).unwrap(), g);
        assert_eq!(parse_binary(&to_binary(&g)).unwrap(), g);
        let s = g.symmetrize();
        let back = parse_binary(&to_binary(&s)).unwrap();
        assert!(back.is_symmetric());
        assert_eq!(back, s);
    }

    #[test]
    fn binary_layout_is_exact() {
        let g = parse_adjacency_text(CYCLE).unwrap();
        let b = to_binary(&g);
        assert_eq!(&b[..4], b"CGR1");
        assert_eq!(u32::from_le_bytes(b[4..8].try_into().unwrap()), 0);
        assert_eq!(u64::from_le_bytes(b[8..16].try_into().unwrap()), 3);
        assert_eq!(u64::from_le_bytes(b[16..24].try_into().unwrap()), 3);
        assert_eq!(b.len(), 24 + 3 * 8 + 3 * 4);
        assert!(parse_binary(&b[..b.len() - 1]).is_err());
    }

    #[test]
    fn lelists_round_trip() {
        let lists: LeLists = vec![vec![(0, 0)], vec![(0, 1), (1, 0)], vec![]];
        let mut text = Vec::new();
        write_lelists_text_to(&lists, &mut text).unwrap();
        let text = String::from_utf8(text).unwrap();
        assert_eq!(text, "0: (0,0)\n1: (0,1) (1,0)\n2:\n");
        assert_eq!(parse_lelists_text(&text).unwrap(), lists);
        let mut bin = Vec::new();
        write_lelists_binary_to(&lists, &mut bin).unwrap();
        assert_eq!(parse_lelists_binary(&bin).unwrap(), lists);
    }
}
