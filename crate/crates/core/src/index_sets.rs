//! Multi-index truncation sets.
//!
//! The main entry point is [`hyperbolic_cross`], which enumerates
//! `{ j ∈ ℕ₀^d : ∏ (j_k + 1) ≤ s }` without visiting the full degree box.
//! Indices are stored in graded order: total degree ascending, ties broken
//! lexicographically on the entries.

use std::cmp::Ordering;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A multi-index `j ∈ ℕ₀^d`, one polynomial degree per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidTruncation(
                "multi-index must have dimension at least 1".into(),
            ));
        }
        Ok(Self(entries))
    }

    pub fn zero(d: usize) -> Self {
        Self(vec![0; d.max(1)])
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    /// `∏ (j_k + 1)`, the quantity bounded by the cross order.
    pub fn hyperbolic_product(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e) + 1).product()
    }

    pub fn nonzero_count(&self) -> usize {
        self.0.iter().filter(|&&e| e != 0).count()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Graded order: total degree first, then lexicographic.
pub fn graded_cmp(a: &MultiIndex, b: &MultiIndex) -> Ordering {
    a.total_degree()
        .cmp(&b.total_degree())
        .then_with(|| a.0.cmp(&b.0))
}

/// An ordered, duplicate-free set of multi-indices of a common dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiIndexSet {
    dimension: usize,
    indices: Vec<MultiIndex>,
    order: Option<usize>,
}

impl MultiIndexSet {
    /// Builds a set from arbitrary indices, sorting them into graded order.
    pub fn from_indices(dimension: usize, mut indices: Vec<MultiIndex>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidTruncation("dimension must be at least 1".into()));
        }
        for j in &indices {
            if j.dimension() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: j.dimension(),
                });
            }
        }
        indices.sort_by(graded_cmp);
        let before = indices.len();
        indices.dedup();
        if indices.len() != before {
            return Err(Error::InvalidTruncation("duplicate multi-indices".into()));
        }
        Ok(Self {
            dimension,
            indices,
            order: None,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Order `s` of the hyperbolic cross this set was generated from, if any.
    pub fn order(&self) -> Option<usize> {
        self.order
    }

    pub fn cardinality(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn get(&self, position: usize) -> Option<&MultiIndex> {
        self.indices.get(position)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MultiIndex> {
        self.indices.iter()
    }

    pub fn position(&self, j: &MultiIndex) -> Option<usize> {
        self.indices
            .binary_search_by(|probe| graded_cmp(probe, j))
            .ok()
    }

    pub fn contains(&self, j: &MultiIndex) -> bool {
        self.position(j).is_some()
    }

    /// Writes the line-oriented text form: a `d=<d> s=<s> N=<N>` header
    /// followed by one space-separated multi-index per line.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        let s = self.order.map_or_else(|| "-".to_string(), |s| s.to_string());
        writeln!(out, "d={} s={} N={}", self.dimension, s, self.cardinality())?;
        for j in &self.indices {
            writeln!(out, "{j}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing index-set header".into()))??;
        let mut d = None;
        let mut s = None;
        let mut n = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("malformed header field `{field}`")))?;
            let parse = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("header field `{field}` is not an integer")))
            };
            match key {
                "d" => d = Some(parse(value)?),
                "s" if value == "-" => {}
                "s" => s = Some(parse(value)?),
                "N" => n = Some(parse(value)?),
                _ => return Err(Error::Parse(format!("unknown header key `{key}`"))),
            }
        }
        let d = d.ok_or_else(|| Error::Parse("header lacks d=".into()))?;
        let n = n.ok_or_else(|| Error::Parse("header lacks N=".into()))?;
        let mut indices = Vec::with_capacity(n);
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let entries = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u32>().map_err(|_| {
                        Error::Parse(format!("line {}: `{tok}` is not a degree", lineno + 2))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            indices.push(MultiIndex::new(entries)?);
        }
        if indices.len() != n {
            return Err(Error::Parse(format!(
                "header declares N={n} but {} indices follow",
                indices.len()
            )));
        }
        let mut set = Self::from_indices(d, indices)?;
        set.order = s;
        Ok(set)
    }
}

impl<'a> IntoIterator for &'a MultiIndexSet {
    type Item = &'a MultiIndex;
    type IntoIter = std::slice::Iter<'a, MultiIndex>;

    fn into_iter(self) -> Self::IntoIter {
        self.indices.iter()
    }
}

/// Hyperbolic cross of order `s` in dimension `d`.
pub fn hyperbolic_cross(d: usize, s: usize) -> Result<MultiIndexSet> {
    if d == 0 {
        return Err(Error::InvalidTruncation("dimension d must be at least 1".into()));
    }
    if s == 0 {
        return Err(Error::InvalidTruncation("order s must be at least 1".into()));
    }
    let mut indices = Vec::new();
    let mut current = vec![0u32; d];
    extend_cross(&mut current, 0, 1, s as u64, &mut indices);
    indices.sort_by(graded_cmp);
    Ok(MultiIndexSet {
        dimension: d,
        indices,
        order: Some(s),
    })
}

fn extend_cross(
    current: &mut Vec<u32>,
    coord: usize,
    product: u64,
    bound: u64,
    out: &mut Vec<MultiIndex>,
) {
    if coord == current.len() {
        out.push(MultiIndex(current.clone()));
        return;
    }
    let mut degree = 0u32;
    while product * (u64::from(degree) + 1) <= bound {
        current[coord] = degree;
        extend_cross(current, coord + 1, product * (u64::from(degree) + 1), bound, out);
        degree += 1;
    }
    current[coord] = 0;
}
