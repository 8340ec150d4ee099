//! Orbit caches as JSON lines: a header with the search parameters, one
//! record per class in discovery order, and a trailer with the outcome.
//!
//! Files are written to a temporary sibling and renamed into place, so a
//! reader sees either a complete cache or none; a cache without its trailer
//! is rejected.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arith::{IntPolar, Orbit, OrbitNode, Step};
use crate::quat::HurwitzElement;

use super::HarnessError;

pub const CACHE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheHeader {
    pub v: u32,
    pub kind: String,
    pub root: [i64; 12],
    pub nmax: i64,
    pub max_depth: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub v: u32,
    pub polar: [i64; 12],
    pub depth: u32,
    pub radius_sq: [i64; 2],
    pub parent: Option<u32>,
    /// Doubled numerators of the syllable `(ζ, w0)`.
    pub step: Option<[i64; 8]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheTrailer {
    pub v: u32,
    pub kind: String,
    pub classes: usize,
    pub new_per_depth: Vec<usize>,
    pub exhausted: bool,
    pub aborted: bool,
}

fn io(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io(format!("{}: {e}", path.display()))
}

fn corrupt(path: &Path, line: usize, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Cache(format!("{} line {line}: {msg}", path.display()))
}

impl CacheRecord {
    fn from_node(n: &OrbitNode) -> Self {
        let step = n.step.map(|s| {
            let mut out = [0; 8];
            out[..4].copy_from_slice(&s.zeta.doubled());
            out[4..].copy_from_slice(&s.w0.doubled());
            out
        });
        let (a, b) = n.key.radius_sq;
        CacheRecord { v: CACHE_VERSION, polar: n.polar.doubled(), depth: n.depth, radius_sq: [a, b], parent: n.parent, step }
    }

    fn to_node(&self) -> crate::Result<OrbitNode> {
        let polar = IntPolar::from_doubled(&self.polar)?;
        let key = crate::arith::canonical_key(&polar)?;
        let step = match self.step {
            Some(s) => Some(Step {
                zeta: HurwitzElement::from_doubled([s[0], s[1], s[2], s[3]])?,
                w0: HurwitzElement::from_doubled([s[4], s[5], s[6], s[7]])?,
            }),
            None => None,
        };
        Ok(OrbitNode { key, polar, depth: self.depth, parent: self.parent, step })
    }
}

/// Header of the cache that a search with these parameters would write.
pub fn header_for(root: &IntPolar, nmax: i64, max_depth: u32) -> CacheHeader {
    CacheHeader { v: CACHE_VERSION, kind: "header".into(), root: root.doubled(), nmax, max_depth }
}

/// Writes `orbit`, searched with `max_depth`, to `path` atomically.
pub fn write_cache(path: &Path, orbit: &Orbit, max_depth: u32) -> Result<(), HarnessError> {
    let tmp = path.with_extension("jsonl.tmp");
    {
        let file = File::create(&tmp).map_err(|e| io(&tmp, e))?;
        let mut w = BufWriter::new(file);
        let mut line = |value: String| writeln!(w, "{value}").map_err(|e| io(&tmp, e));
        line(json(&header_for(&orbit.root, orbit.nmax, max_depth)))?;
        for n in &orbit.nodes {
            line(json(&CacheRecord::from_node(n)))?;
        }
        line(json(&CacheTrailer {
            v: CACHE_VERSION,
            kind: "trailer".into(),
            classes: orbit.len(),
            new_per_depth: orbit.new_per_depth.clone(),
            exhausted: orbit.exhausted,
            aborted: orbit.aborted,
        }))?;
        w.flush().map_err(|e| io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| io(path, e))
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

/// Reads the header of a cache file.
pub fn read_header(path: &Path) -> Result<CacheHeader, HarnessError> {
    let file = File::open(path).map_err(|e| io(path, e))?;
    let mut first = String::new();
    BufReader::new(file).read_line(&mut first).map_err(|e| io(path, e))?;
    parse_header(path, &first)
}

fn parse_header(path: &Path, line: &str) -> Result<CacheHeader, HarnessError> {
    let h: CacheHeader = serde_json::from_str(line).map_err(|e| corrupt(path, 1, e))?;
    if h.v != CACHE_VERSION || h.kind != "header" {
        return Err(corrupt(path, 1, format!("unsupported header (version {}, kind {})", h.v, h.kind)));
    }
    Ok(h)
}

/// Reads and validates a complete cache.
pub fn read_cache(path: &Path) -> Result<(CacheHeader, Orbit), HarnessError> {
    let file = File::open(path).map_err(|e| io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let first = lines.next().ok_or_else(|| corrupt(path, 1, "empty cache"))?.map_err(|e| io(path, e))?;
    let header = parse_header(path, &first)?;
    let root = IntPolar::from_doubled(&header.root).map_err(|e| corrupt(path, 1, e))?;
    let mut nodes = Vec::new();
    let mut trailer = None;
    for (i, line) in lines.enumerate() {
        let no = i + 2;
        let line = line.map_err(|e| io(path, e))?;
        if trailer.is_some() {
            return Err(corrupt(path, no, "data after the trailer"));
        }
        if line.contains("\"kind\"") {
            let t: CacheTrailer = serde_json::from_str(&line).map_err(|e| corrupt(path, no, e))?;
            if t.kind != "trailer" || t.v != CACHE_VERSION {
                return Err(corrupt(path, no, "expected a trailer"));
            }
            trailer = Some(t);
            continue;
        }
        let r: CacheRecord = serde_json::from_str(&line).map_err(|e| corrupt(path, no, e))?;
        if r.v != CACHE_VERSION {
            return Err(corrupt(path, no, format!("unsupported record version {}", r.v)));
        }
        let node = r.to_node().map_err(|e| corrupt(path, no, e))?;
        if [node.key.radius_sq.0, node.key.radius_sq.1] != r.radius_sq {
            return Err(corrupt(path, no, "stored radius does not match the polar point"));
        }
        nodes.push(node);
    }
    let t = trailer.ok_or_else(|| corrupt(path, nodes.len() + 2, "missing trailer (incomplete cache)"))?;
    if t.classes != nodes.len() {
        return Err(corrupt(path, nodes.len() + 2, format!("trailer lists {} classes, found {}", t.classes, nodes.len())));
    }
    let orbit = Orbit::from_parts(root, header.nmax, nodes, t.new_per_depth, t.exhausted, t.aborted)
        .map_err(|e| HarnessError::Cache(format!("{}: {e}", path.display())))?;
    Ok((header, orbit))
}
