//! Text formats for graphs, designs, distributions, bit strings and
//! enumerable sets. Readers skip blank lines and lines starting with `#`
//! (the CLI writes its parameter echo that way); errors name the 1-based
//! line of the file. Writers emit no comments, so `write(read(s)) == s` for
//! any comment-free file produced by a writer.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num::{BigInt, BigRational, Num};

use crate::bits::BitString;
use crate::design::DesignFamily;
use crate::dist::{Dist, Weight};
use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::muchnik::EnumerableSet;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Non-comment lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn fields<T: FromStr>(line: usize, text: &str, expected: usize, what: &str) -> Result<Vec<T>> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.len() != expected {
        return Err(parse_err(
            line,
            format!("{what}: expected {expected} fields, found {}", parts.len()),
        ));
    }
    parts
        .iter()
        .map(|p| p.parse().map_err(|_| parse_err(line, format!("{what}: bad number `{p}`"))))
        .collect()
}

fn at_line(line: usize, e: Error) -> Error {
    match e {
        Error::Parse { message, .. } => parse_err(line, message),
        other => parse_err(line, other.to_string()),
    }
}

fn end_line(text: &str) -> usize {
    text.lines().count().max(1)
}

/// `N M D`, then `N` lines of `D` right indices (no rows when `D = 0`).
pub fn read_graph(text: &str) -> Result<BipartiteGraph> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty graph file"))?;
    let h: Vec<usize> = fields(hl, header, 3, "graph header `N M D`")?;
    let (n, m, d) = (h[0], h[1], h[2]);
    let mut adj = Vec::with_capacity(n * d);
    for row in (0..n).filter(|_| d > 0) {
        let (ln, text_row) = lines
            .next()
            .ok_or_else(|| parse_err(end_line(text), format!("missing adjacency row {row}")))?;
        let r: Vec<u64> = fields(ln, text_row, d, "adjacency row")?;
        if let Some(z) = r.iter().find(|&&z| z as usize >= m) {
            return Err(parse_err(ln, format!("right index {z} out of range (M = {m})")));
        }
        adj.extend(r.into_iter().map(|z| z as u32));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "extra line after the adjacency rows"));
    }
    BipartiteGraph::new(n, m, d, adj).map_err(|e| at_line(hl, e))
}

pub fn write_graph(g: &BipartiteGraph) -> String {
    let mut out = format!("{} {} {}\n", g.left_size(), g.right_size(), g.degree());
    for a in (0..g.left_size()).filter(|_| g.degree() > 0) {
        let row: Vec<String> = g.neighbors(a).iter().map(u32::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// `d l m`, then `m` lines of `l` sorted indices.
pub fn read_design(text: &str) -> Result<DesignFamily> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty design file"))?;
    let h: Vec<usize> = fields(hl, header, 3, "design header `d l m`")?;
    let (d, l, m) = (h[0], h[1], h[2]);
    let mut sets = Vec::with_capacity(m);
    for j in 0..m {
        let (ln, row) = lines
            .next()
            .ok_or_else(|| parse_err(end_line(text), format!("missing set {j}")))?;
        let s: Vec<usize> = fields(ln, row, l, "design set")?;
        if s.windows(2).any(|w| w[0] >= w[1]) {
            return Err(parse_err(ln, "set indices must be strictly increasing"));
        }
        if let Some(e) = s.iter().find(|&&e| e >= d) {
            return Err(parse_err(ln, format!("index {e} outside universe of size {d}")));
        }
        sets.push(s);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "extra line after the sets"));
    }
    DesignFamily::new(d, l, sets).map_err(|e| at_line(hl, e))
}

pub fn write_design(f: &DesignFamily) -> String {
    let mut out = format!("{} {} {}\n", f.universe(), f.set_size(), f.len());
    for s in f.sets() {
        let row: Vec<String> = s.iter().map(usize::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Weights that have a text form.
pub trait TextWeight: Weight {
    fn parse_weight(s: &str) -> Option<Self>;
    fn format_weight(&self) -> String;
}

impl TextWeight for f64 {
    fn parse_weight(s: &str) -> Option<Self> {
        match s.split_once('/') {
            Some((p, q)) => Some(p.parse::<f64>().ok()? / q.parse::<f64>().ok()?),
            None => s.parse().ok(),
        }
    }
    /// Shortest representation that reads back to the same float.
    fn format_weight(&self) -> String {
        format!("{self:?}")
    }
}

impl TextWeight for BigRational {
    /// `p/q`, an integer, or a finite decimal such as `0.125` (read exactly).
    fn parse_weight(s: &str) -> Option<Self> {
        if s.contains('/') {
            let r = BigRational::from_str_radix(s, 10).ok()?;
            return Some(r);
        }
        match s.split_once('.') {
            None => Some(BigRational::from_integer(s.parse::<BigInt>().ok()?)),
            Some((int, frac)) => {
                if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                    return None;
                }
                let digits: BigInt = format!("{int}{frac}").parse().ok()?;
                let den = num::pow(BigInt::from(10), frac.len());
                Some(BigRational::new(digits, den))
            }
        }
    }
    fn format_weight(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// `n`, then `2^n` lines `bitstring weight`, each string exactly once.
pub fn read_dist<W: TextWeight>(text: &str) -> Result<Dist<W>> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty distribution file"))?;
    let n: usize = fields::<usize>(hl, header, 1, "distribution header `n`")?[0];
    if n > crate::dist::MAX_DIST_BITS {
        return Err(parse_err(hl, format!("n = {n} exceeds the dense limit")));
    }
    let mut probs: Vec<Option<W>> = vec![None; 1 << n];
    for (ln, row) in lines {
        let parts: Vec<&str> = row.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(parse_err(ln, "expected `bitstring weight`"));
        }
        let x: BitString = parts[0].parse().map_err(|e| at_line(ln, e))?;
        if x.len() != n {
            return Err(parse_err(ln, format!("string has {} bits, expected {n}", x.len())));
        }
        let w = W::parse_weight(parts[1]).ok_or_else(|| parse_err(ln, format!("bad weight `{}`", parts[1])))?;
        let slot = &mut probs[x.to_u64() as usize];
        if slot.is_some() {
            return Err(parse_err(ln, format!("string {x} listed twice")));
        }
        *slot = Some(w);
    }
    let end = end_line(text);
    let probs = probs
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| parse_err(end, format!("missing weight for index {i}"))))
        .collect::<Result<Vec<W>>>()?;
    Dist::new(n, probs).map_err(|e| at_line(end, e))
}

pub fn write_dist<W: TextWeight>(x: &Dist<W>) -> String {
    let n = x.len_bits();
    let mut out = format!("{n}\n");
    for (i, p) in x.probs().iter().enumerate() {
        let _ = writeln!(out, "{} {}", BitString::from_u64(i as u64, n), p.format_weight());
    }
    out
}

/// A single `<length>:<hex>` line.
pub fn read_bits(text: &str) -> Result<BitString> {
    let mut lines = content_lines(text);
    let (ln, row) = lines.next().ok_or_else(|| parse_err(1, "empty bit-string file"))?;
    let s = row.parse().map_err(|e| at_line(ln, e))?;
    if let Some((extra, _)) = lines.next() {
        return Err(parse_err(extra, "extra line after the bit string"));
    }
    Ok(s)
}

pub fn write_bits(s: &BitString) -> String {
    format!("{s}\n")
}

/// Any number of `<length>:<hex>` lines.
pub fn read_bits_lines(text: &str) -> Result<Vec<BitString>> {
    content_lines(text)
        .map(|(ln, row)| row.parse().map_err(|e| at_line(ln, e)))
        .collect()
}

/// `count bound`, then `count` left indices, one per line, in enumeration order.
pub fn read_set(text: &str) -> Result<EnumerableSet> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty set file"))?;
    let h: Vec<usize> = fields(hl, header, 2, "set header `count bound`")?;
    let mut order = Vec::with_capacity(h[0]);
    for i in 0..h[0] {
        let (ln, row) = lines
            .next()
            .ok_or_else(|| parse_err(end_line(text), format!("missing member {i}")))?;
        order.push(fields::<usize>(ln, row, 1, "set member")?[0]);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "extra line after the members"));
    }
    EnumerableSet::new(order, h[1]).map_err(|e| at_line(hl, e))
}

pub fn write_set(s: &EnumerableSet) -> String {
    let mut out = format!("{} {}\n", s.len(), s.bound());
    for a in s.members() {
        let _ = writeln!(out, "{a}");
    }
    out
}

/// File kinds understood by [`read_file`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatKind {
    Graph,
    Design,
    Bits,
    Dist,
    Set,
}

impl FromStr for FormatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "graph" => FormatKind::Graph,
            "design" => FormatKind::Design,
            "bits" => FormatKind::Bits,
            "dist" => FormatKind::Dist,
            "set" => FormatKind::Set,
            _ => return Err(Error::Precondition(format!("unknown format `{s}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Graph(BipartiteGraph),
    Design(DesignFamily),
    Bits(BitString),
    Dist(Dist<BigRational>),
    Set(EnumerableSet),
}

pub fn parse(text: &str, kind: FormatKind) -> Result<Document> {
    Ok(match kind {
        FormatKind::Graph => Document::Graph(read_graph(text)?),
        FormatKind::Design => Document::Design(read_design(text)?),
        FormatKind::Bits => Document::Bits(read_bits(text)?),
        FormatKind::Dist => Document::Dist(read_dist(text)?),
        FormatKind::Set => Document::Set(read_set(text)?),
    })
}

pub fn read_file(path: impl AsRef<Path>, kind: FormatKind) -> Result<Document> {
    parse(&std::fs::read_to_string(path)?, kind)
}

impl Document {
    pub fn write(&self) -> String {
        match self {
            Document::Graph(g) => write_graph(g),
            Document::Design(f) => write_design(f),
            Document::Bits(s) => write_bits(s),
            Document::Dist(x) => write_dist(x),
            Document::Set(s) => write_set(s),
        }
    }
}
