//! Labeled simple undirected graphs on up to 64 vertices, stored as one
//! neighbor bitset per vertex so that triangle counting and induced-subgraph
//! extraction stay branch-free in the enumeration hot paths.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Hard cap on vertices; one `u64` bitset per vertex.
pub const MAX_VERTICES: usize = 64;

/// Number of vertex pairs, `n*(n-1)/2`.
pub const fn pair_count(n: usize) -> usize {
    n * (n.saturating_sub(1)) / 2
}

/// A potential edge: an unordered vertex pair stored with `u < v`.
///
/// The canonical order of all pairs for a fixed `n` is lexicographic on
/// `(u, v)`; every digit and enumeration statement in this crate is defined
/// relative to that order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId {
    pub u: usize,
    pub v: usize,
}

impl EdgeId {
    /// Normalizes the endpoint order; errors on a loop.
    pub fn new(a: usize, b: usize) -> Result<EdgeId> {
        if a == b {
            return Err(Error::InvalidArgument(format!("loop at vertex {a}")));
        }
        Ok(EdgeId {
            u: a.min(b),
            v: a.max(b),
        })
    }

    /// Rank of this pair in the canonical lexicographic order for `n` vertices.
    pub fn index(&self, n: usize) -> usize {
        debug_assert!(self.v < n);
        self.u * (2 * n - self.u - 1) / 2 + (self.v - self.u - 1)
    }

    /// Inverse of [`EdgeId::index`].
    pub fn from_index(mut idx: usize, n: usize) -> EdgeId {
        let mut u = 0;
        while idx >= n - 1 - u {
            idx -= n - 1 - u;
            u += 1;
        }
        EdgeId { u, v: u + 1 + idx }
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

/// All vertex pairs of an `n`-vertex graph in canonical order.
pub fn all_pairs(n: usize) -> impl Iterator<Item = EdgeId> {
    (0..n).flat_map(move |u| (u + 1..n).map(move |v| EdgeId { u, v }))
}

/// Bits of `x` strictly above position `i`.
#[inline]
fn bits_above(x: u64, i: usize) -> u64 {
    if i >= 63 {
        0
    } else {
        x >> (i + 1) << (i + 1)
    }
}

/// Edge-subset encoding of a graph: bit `k` is the `k`-th canonical pair.
///
/// A `u64` is enough for every enumeration this toolkit performs (the
/// exhaustive engine caps at n = 8, i.e. 28 bits); encoding requires
/// `pair_count(n) <= 63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphCode(pub u64);

/// Labeled simple undirected graph with adjacency bitsets.
#[derive(Clone, Copy)]
pub struct Graph {
    n: usize,
    adj: [u64; MAX_VERTICES],
}

impl Graph {
    pub fn empty(n: usize) -> Result<Graph> {
        if n > MAX_VERTICES {
            return Err(Error::UnsupportedSize(format!(
                "{n} vertices exceeds the cap of {MAX_VERTICES}"
            )));
        }
        Ok(Graph {
            n,
            adj: [0; MAX_VERTICES],
        })
    }

    pub fn complete(n: usize) -> Result<Graph> {
        let mut g = Graph::empty(n)?;
        for e in all_pairs(n) {
            g.set_edge(e, true);
        }
        Ok(g)
    }

    /// Builds a graph from explicit edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut g = Graph::empty(n)?;
        for &(a, b) in edges {
            let e = EdgeId::new(a, b)?;
            if e.v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge {e} out of range for n={n}"
                )));
            }
            if g.has_edge(e) {
                return Err(Error::InvalidArgument(format!("duplicate edge {e}")));
            }
            g.set_edge(e, true);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Neighbor bitset of `v`.
    pub fn adj(&self, v: usize) -> u64 {
        debug_assert!(v < self.n);
        self.adj[v]
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        debug_assert!(e.v < self.n);
        self.adj[e.u] >> e.v & 1 == 1
    }

    pub fn set_edge(&mut self, e: EdgeId, present: bool) {
        debug_assert!(e.v < self.n);
        if present {
            self.adj[e.u] |= 1 << e.v;
            self.adj[e.v] |= 1 << e.u;
        } else {
            self.adj[e.u] &= !(1 << e.v);
            self.adj[e.v] &= !(1 << e.u);
        }
    }

    pub fn toggle_edge(&mut self, e: EdgeId) {
        self.set_edge(e, !self.has_edge(e));
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.adj[v].count_ones()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v) as usize).sum::<usize>() / 2
    }

    /// Edges in canonical order.
    pub fn edges(&self) -> Vec<EdgeId> {
        all_pairs(self.n).filter(|&e| self.has_edge(e)).collect()
    }

    /// Number of vertex triples inducing K3, via neighbor-bitset intersections.
    ///
    /// Each triangle `u < v < w` is counted once, at its lowest edge `(u, v)`.
    pub fn triangle_count(&self) -> u64 {
        let mut total = 0u64;
        for u in 0..self.n {
            let mut rest = bits_above(self.adj[u], u); // neighbors above u
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                total += (self.adj[u] & bits_above(self.adj[v], v)).count_ones() as u64;
            }
        }
        total
    }

    /// List of triangles as ordered triples `u < v < w`.
    pub fn triangles(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(EdgeId { u, v }) {
                    continue;
                }
                let mut common = (self.adj[u] & self.adj[v]) >> (v + 1);
                let mut w = v + 1;
                while common != 0 {
                    if common & 1 == 1 {
                        out.push((u, v, w));
                    }
                    common >>= 1;
                    w += 1;
                }
            }
        }
        out
    }

    /// Induced subgraph on an ordered tuple; vertex `i` of the result is `vs[i]`.
    pub fn induced(&self, vs: &[usize]) -> Result<Graph> {
        let mut seen = 0u64;
        for &v in vs {
            if v >= self.n {
                return Err(Error::InvalidArgument(format!(
                    "vertex {v} out of range for n={}",
                    self.n
                )));
            }
            if seen >> v & 1 == 1 {
                return Err(Error::InvalidArgument(format!("duplicate vertex {v}")));
            }
            seen |= 1 << v;
        }
        let mut g = Graph::empty(vs.len())?;
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                if self.has_edge(EdgeId::new(vs[i], vs[j])?) {
                    g.set_edge(EdgeId { u: i, v: j }, true);
                }
            }
        }
        Ok(g)
    }

    /// Edge set as a bitmask over the canonical pairs of the tuple `vs`
    /// (bit for pair `(i, j)` of the tuple, in canonical order).
    pub fn induced_mask(&self, vs: &[usize]) -> u64 {
        let k = vs.len();
        let mut mask = 0u64;
        let mut bit = 0;
        for i in 0..k {
            for j in i + 1..k {
                let (a, b) = (vs[i].min(vs[j]), vs[i].max(vs[j]));
                if self.adj[a] >> b & 1 == 1 {
                    mask |= 1 << bit;
                }
                bit += 1;
            }
        }
        mask
    }

    /// Edge set of this whole graph as a canonical-pair bitmask.
    pub fn edge_mask(&self) -> u64 {
        debug_assert!(pair_count(self.n) <= 64);
        let mut mask = 0u64;
        for (k, e) in all_pairs(self.n).enumerate() {
            if self.has_edge(e) {
                mask |= 1 << k;
            }
        }
        mask
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n).expect("same size");
        for e in all_pairs(self.n) {
            g.set_edge(e, !self.has_edge(e));
        }
        g
    }

    /// True if every edge of `self` is an edge of `other` (same vertex count).
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && (0..self.n).all(|v| self.adj[v] & !other.adj[v] == 0)
    }

    /// 2-coloring if the graph is bipartite.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let mut color = vec![u8::MAX; self.n];
        for start in 0..self.n {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                let mut nb = self.adj[v];
                while nb != 0 {
                    let u = nb.trailing_zeros() as usize;
                    nb &= nb - 1;
                    if color[u] == u8::MAX {
                        color[u] = 1 - color[v];
                        stack.push(u);
                    } else if color[u] == color[v] {
                        return None;
                    }
                }
            }
        }
        Some(color)
    }

    pub fn is_regular(&self, k: u32) -> bool {
        (0..self.n).all(|v| self.degree(v) == k)
    }

    /// Decodes an edge-subset integer; bit `k` of `code` is the `k`-th canonical pair.
    pub fn from_code(code: GraphCode, n: usize) -> Result<Graph> {
        let m = pair_count(n);
        if m > 63 {
            return Err(Error::UnsupportedSize(format!(
                "n={n} has {m} pairs; codes support up to 63 bits"
            )));
        }
        if m < 64 && code.0 >= 1u64 << m {
            return Err(Error::InvalidArgument(format!(
                "code {} out of range for n={n}",
                code.0
            )));
        }
        let mut g = Graph::empty(n)?;
        for (k, e) in all_pairs(n).enumerate() {
            if code.0 >> k & 1 == 1 {
                g.set_edge(e, true);
            }
        }
        Ok(g)
    }

    pub fn to_code(&self) -> Result<GraphCode> {
        let m = pair_count(self.n);
        if m > 63 {
            return Err(Error::UnsupportedSize(format!(
                "n={} has {m} pairs; codes support up to 63 bits",
                self.n
            )));
        }
        Ok(GraphCode(self.edge_mask()))
    }

    /// Text format: first line `n m`, then `m` lines `u v` with `u < v`.
    pub fn to_text(&self) -> String {
        let edges = self.edges();
        let mut s = format!("{} {}\n", self.n, edges.len());
        for e in edges {
            s.push_str(&format!("{} {}\n", e.u, e.v));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Graph> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph text".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("bad vertex count".into()))?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("bad edge count".into()))?;
        if it.next().is_some() {
            return Err(Error::Parse("trailing tokens on header line".into()));
        }
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let mut it = line.split_whitespace();
            let u: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge line: {line}")))?;
            let v: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge line: {line}")))?;
            if it.next().is_some() {
                return Err(Error::Parse(format!("trailing tokens: {line}")));
            }
            if u >= v {
                return Err(Error::Parse(format!("edge {u} {v} must have u < v")));
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "header says {m} edges, found {}",
                edges.len()
            )));
        }
        Graph::from_edges(n, &edges)
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.adj[..self.n] == other.adj[..other.n]
    }
}

impl Eq for Graph {}

impl Hash for Graph {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.adj[..self.n].hash(state);
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Graph {
    type Err = Error;
    fn from_str(s: &str) -> Result<Graph> {
        Graph::from_text(s)
    }
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Graph::from_text(&s).map_err(serde::de::Error::custom)
    }
}

/// Brute-force isomorphism test for graphs with at most 8 vertices.
pub fn is_isomorphic_small(a: &Graph, b: &Graph) -> Result<bool> {
    if a.n > 8 || b.n > 8 {
        return Err(Error::UnsupportedSize(
            "isomorphism search is capped at 8 vertices".into(),
        ));
    }
    if a.n != b.n || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    let n = a.n;
    let mut perm: Vec<usize> = (0..n).collect();
    Ok(permutes(&mut perm, 0, &|p| {
        all_pairs(n).all(|e| {
            a.has_edge(e) == b.has_edge(EdgeId::new(p[e.u], p[e.v]).expect("distinct"))
        })
    }))
}

// Returns true as soon as `check` accepts some permutation.
fn permutes(perm: &mut Vec<usize>, at: usize, check: &dyn Fn(&[usize]) -> bool) -> bool {
    if at == perm.len() {
        return check(perm);
    }
    for i in at..perm.len() {
        perm.swap(at, i);
        if permutes(perm, at + 1, check) {
            perm.swap(at, i);
            return true;
        }
        perm.swap(at, i);
    }
    false
}

/// All graphs isomorphic to `pattern`, as canonical-pair bitmasks.
///
/// Used to evaluate isomorphism-count features without running a search per
/// subset: a candidate subset matches iff its induced mask is in this set.
pub fn iso_mask_set(pattern: &Graph) -> Result<std::collections::HashSet<u64>> {
    if pattern.n() > 8 {
        return Err(Error::UnsupportedSize(
            "pattern graphs are capped at 8 vertices".into(),
        ));
    }
    let n = pattern.n();
    let mut set = std::collections::HashSet::new();
    let mut perm: Vec<usize> = (0..n).collect();
    collect_perm_masks(pattern, &mut perm, 0, &mut set);
    Ok(set)
}

fn collect_perm_masks(
    pattern: &Graph,
    perm: &mut Vec<usize>,
    at: usize,
    out: &mut std::collections::HashSet<u64>,
) {
    if at == perm.len() {
        let mut mask = 0u64;
        for (k, e) in all_pairs(pattern.n()).enumerate() {
            if pattern.has_edge(EdgeId::new(perm[e.u], perm[e.v]).expect("distinct")) {
                mask |= 1 << k;
            }
        }
        out.insert(mask);
        return;
    }
    for i in at..perm.len() {
        perm.swap(at, i);
        collect_perm_masks(pattern, perm, at + 1, out);
        perm.swap(at, i);
    }
}

/// Common small graphs used throughout the reductions and tests.
pub mod shapes {
    use super::*;

    /// Complete graph.
    pub fn complete(n: usize) -> Graph {
        Graph::complete(n).expect("small")
    }

    /// K2: a single edge.
    pub fn k2() -> Graph {
        Graph::from_edges(2, &[(0, 1)]).expect("small")
    }

    /// The empty graph on two vertices.
    pub fn k2_bar() -> Graph {
        Graph::empty(2).expect("small")
    }

    /// K3: the triangle.
    pub fn k3() -> Graph {
        complete(3)
    }

    /// P2: the path on three vertices with center 1.
    pub fn p2() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)]).expect("small")
    }

    /// Complement of P2: one edge on three vertices.
    pub fn p2_bar() -> Graph {
        p2().complement()
    }

    /// The empty graph on three vertices.
    pub fn k3_bar() -> Graph {
        Graph::empty(3).expect("small")
    }

    /// K3,3: complete bipartite, parts {0,1,2} and {3,4,5}.
    pub fn k33() -> Graph {
        let mut edges = Vec::new();
        for u in 0..3 {
            for v in 3..6 {
                edges.push((u, v));
            }
        }
        Graph::from_edges(6, &edges).expect("small")
    }

    /// Q3: the cube graph, vertices are 3-bit strings joined at Hamming distance 1.
    pub fn cube() -> Graph {
        let mut edges = Vec::new();
        for v in 0..8usize {
            for b in 0..3 {
                let u = v ^ (1 << b);
                if u > v {
                    edges.push((v, u));
                }
            }
        }
        Graph::from_edges(8, &edges).expect("small")
    }

    /// Wheel on six vertices: hub 0 joined to a 5-cycle 1..5.
    pub fn wheel6() -> Graph {
        let mut edges = vec![(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)];
        for i in 1..=5 {
            let j = if i == 5 { 1 } else { i + 1 };
            edges.push((i.min(j), i.max(j)));
        }
        Graph::from_edges(6, &edges).expect("small")
    }
}
