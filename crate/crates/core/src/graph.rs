//! Directed graphs and the DIMACS shortest-path text format.
//!
//! Vertices are 0-based in memory and 1-based in every text format.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{ApspError, Result};
use crate::matrix::{Matrix, WeightMatrix};
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph, collapsing parallel arcs to their lightest weight.
    /// Arcs keep the order of their first occurrence.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Graph> {
        let mut slot: HashMap<(usize, usize), usize> = HashMap::new();
        let mut out: Vec<Edge> = Vec::new();
        for e in edges {
            if e.from >= n || e.to >= n {
                return Err(ApspError::OutOfRange(format!(
                    "arc ({}, {}) in a graph with {n} vertices",
                    e.from + 1,
                    e.to + 1
                )));
            }
            if Weight::finite(e.weight).is_none() {
                return Err(ApspError::Overflow(format!("arc weight {}", e.weight)));
            }
            match slot.get(&(e.from, e.to)) {
                Some(&p) => out[p].weight = out[p].weight.min(e.weight),
                None => {
                    slot.insert((e.from, e.to), out.len());
                    out.push(e);
                }
            }
        }
        Ok(Graph { n, edges: out })
    }

    /// Convenience constructor from 1-based `(u, v, w)` triples.
    pub fn from_one_based(n: usize, arcs: &[(usize, usize, i64)]) -> Result<Graph> {
        let mut edges = Vec::with_capacity(arcs.len());
        for &(u, v, w) in arcs {
            if u == 0 || v == 0 {
                return Err(ApspError::OutOfRange("vertex 0 in 1-based arc list".into()));
            }
            edges.push(Edge { from: u - 1, to: v - 1, weight: w });
        }
        Graph::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Largest absolute arc weight, 0 for an arcless graph.
    pub fn max_abs_weight(&self) -> i64 {
        self.edges.iter().map(|e| e.weight.abs()).max().unwrap_or(0)
    }

    /// Entry `(i, j)` is the arc weight, 0 on the diagonal and `+inf` elsewhere.
    /// A negative self-loop overrides the zero diagonal so the cycle stays visible.
    pub fn to_weight_matrix(&self) -> WeightMatrix {
        let mut d = Matrix::filled(self.n, self.n, Weight::INF);
        for i in 0..self.n {
            d.set(i, i, Weight::ZERO);
        }
        for e in &self.edges {
            let w = Weight::of(e.weight);
            if e.from != e.to || w < Weight::ZERO {
                d.set(e.from, e.to, w);
            }
        }
        d
    }

    /// Recovers a graph from a weight matrix; finite off-diagonal entries become arcs.
    pub fn from_weight_matrix(d: &WeightMatrix) -> Result<Graph> {
        if !d.is_square() {
            return Err(ApspError::DimensionMismatch("weight matrix must be square".into()));
        }
        let n = d.rows();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let w = *d.get(i, j);
                if w.is_neg_inf() {
                    return Err(ApspError::Contract("-inf in an input weight matrix".into()));
                }
                if let Some(v) = w.value() {
                    if i != j || v < 0 {
                        edges.push(Edge { from: i, to: j, weight: v });
                    }
                }
            }
        }
        Graph::new(n, edges)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> ApspError {
    ApspError::Parse { line, msg: msg.into() }
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let t = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    t.parse().map_err(|e| parse_err(line, format!("bad {what} {t:?}: {e}")))
}

/// One arc line before validation. Shared by the integer and real loaders.
struct RawDimacs<W> {
    n: usize,
    arcs: Vec<(usize, usize, W, usize)>,
}

fn read_dimacs<W, R: BufRead>(reader: R, weight: impl Fn(&str, usize) -> Result<W>) -> Result<RawDimacs<W>> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut arcs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let mut toks = line.split_whitespace();
        match toks.next() {
            None | Some("c") => continue,
            Some("p") => {
                if header.is_some() {
                    return Err(parse_err(lineno, "second problem line"));
                }
                if toks.next() != Some("sp") {
                    return Err(parse_err(lineno, "expected problem line \"p sp n m\""));
                }
                let n: usize = parse_field(toks.next(), lineno, "vertex count")?;
                let m: usize = parse_field(toks.next(), lineno, "arc count")?;
                if toks.next().is_some() {
                    return Err(parse_err(lineno, "trailing tokens on problem line"));
                }
                if n > u32::MAX as usize - 1 {
                    return Err(parse_err(lineno, "vertex count too large"));
                }
                header = Some((n, m, lineno));
            }
            Some("a") => {
                let (n, _, _) = header.ok_or_else(|| parse_err(lineno, "arc before problem line"))?;
                let u: usize = parse_field(toks.next(), lineno, "tail vertex")?;
                let v: usize = parse_field(toks.next(), lineno, "head vertex")?;
                let wt = toks.next().ok_or_else(|| parse_err(lineno, "missing arc weight"))?;
                let w = weight(wt, lineno)?;
                if toks.next().is_some() {
                    return Err(parse_err(lineno, "trailing tokens on arc line"));
                }
                for x in [u, v] {
                    if x == 0 || x > n {
                        return Err(parse_err(lineno, format!("vertex {x} outside 1..{n}")));
                    }
                }
                arcs.push((u - 1, v - 1, w, lineno));
            }
            Some(t) => return Err(parse_err(lineno, format!("unknown line type {t:?}"))),
        }
    }
    let (n, m, hline) = header.ok_or_else(|| parse_err(0, "missing problem line"))?;
    if arcs.len() != m {
        return Err(parse_err(hline, format!("header declares {m} arcs, found {}", arcs.len())));
    }
    Ok(RawDimacs { n, arcs })
}

/// Parses a DIMACS shortest-path file with integer weights.
pub fn load_dimacs<R: BufRead>(reader: R) -> Result<Graph> {
    let raw = read_dimacs(reader, |t, line| {
        let v: i64 = t.parse().map_err(|e| parse_err(line, format!("bad arc weight {t:?}: {e}")))?;
        Weight::finite(v).ok_or_else(|| parse_err(line, format!("arc weight {v} overflows")))?;
        Ok(v)
    })?;
    Graph::new(raw.n, raw.arcs.into_iter().map(|(from, to, weight, _)| Edge { from, to, weight }))
}

pub fn load_dimacs_str(text: &str) -> Result<Graph> {
    load_dimacs(text.as_bytes())
}

/// A DIMACS file whose arc weights are nonnegative reals.
#[derive(Clone, Debug)]
pub struct RealGraph {
    pub n: usize,
    pub arcs: Vec<(usize, usize, f64)>,
}

pub fn load_dimacs_real<R: BufRead>(reader: R) -> Result<RealGraph> {
    let raw = read_dimacs(reader, |t, line| {
        let v: f64 = t.parse().map_err(|e| parse_err(line, format!("bad arc weight {t:?}: {e}")))?;
        if !v.is_finite() || v < 0.0 {
            return Err(parse_err(line, format!("arc weight {t} must be finite and nonnegative")));
        }
        Ok(v)
    })?;
    Ok(RealGraph { n: raw.n, arcs: raw.arcs.into_iter().map(|(u, v, w, _)| (u, v, w)).collect() })
}

impl RealGraph {
    /// Rescales so the smallest nonzero weight becomes `1/epsilon`, rounding
    /// up to integers. Returns the integer graph and the factor that maps
    /// integer distances back to the original units.
    pub fn to_integer(&self, epsilon: f64) -> Result<(Graph, f64)> {
        if !(epsilon > 0.0) {
            return Err(ApspError::Contract("epsilon must be positive".into()));
        }
        let min_nz = self.arcs.iter().map(|a| a.2).filter(|&w| w > 0.0).fold(f64::INFINITY, f64::min);
        let unit = if min_nz.is_finite() { min_nz * epsilon } else { 1.0 };
        let mut edges = Vec::with_capacity(self.arcs.len());
        for &(from, to, w) in &self.arcs {
            let scaled = (w / unit).ceil();
            if scaled > crate::weight::FINITE_MAX as f64 {
                return Err(ApspError::Overflow(format!("scaled weight {scaled}")));
            }
            edges.push(Edge { from, to, weight: scaled as i64 });
        }
        Ok((Graph::new(self.n, edges)?, unit))
    }
}

/// Renders a graph in DIMACS form.
pub fn render_dimacs(g: &Graph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "c {} vertices, {} arcs", g.n(), g.edges().len());
    let _ = writeln!(s, "p sp {} {}", g.n(), g.edges().len());
    for e in g.edges() {
        let _ = writeln!(s, "a {} {} {}", e.from + 1, e.to + 1, e.weight);
    }
    s
}
