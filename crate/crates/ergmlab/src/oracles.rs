//! Independent brute-force ground truth. Everything here is deliberately
//! dumb: edge-subset enumeration, backtracking, and a hitting-set search
//! whose only cleverness is a bound. These are the other side of every
//! dual-route check in the test suite.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};

/// Cap on edges for full 2^m subset enumeration.
pub const CENSUS_EDGE_CAP: usize = 25;

/// Cap on vertices for the matching backtracker.
pub const MATCHING_VERTEX_CAP: usize = 30;

/// `counts[i]` = number of triangle-free subgraphs with exactly `i` edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriFreeCensus {
    pub counts: Vec<u64>,
}

impl TriFreeCensus {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Highest edge count with a nonzero entry, and that entry.
    pub fn top(&self) -> (usize, u64) {
        for i in (0..self.counts.len()).rev() {
            if self.counts[i] != 0 {
                return (i, self.counts[i]);
            }
        }
        (0, self.counts.first().copied().unwrap_or(0))
    }
}

/// Exact census of triangle-free subgraphs of `g` by iterating every edge
/// subset. Subgraphs are spanning: a subgraph is a subset of `g`'s edges.
pub fn trifree_census_exhaustive(g: &Graph) -> Result<TriFreeCensus> {
    let edges = g.edges();
    let m = edges.len();
    if m > CENSUS_EDGE_CAP {
        return Err(Error::TooLarge(format!(
            "census enumeration is capped at {CENSUS_EDGE_CAP} edges, graph has {m}"
        )));
    }
    // Triangles of g as 3-bit masks over g's edge list; a subset is
    // triangle-free iff it contains no such mask completely.
    let edge_index: std::collections::HashMap<EdgeId, usize> = edges
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect();
    let tri_masks: Vec<u32> = g
        .triangles()
        .iter()
        .map(|&(a, b, c)| {
            let m1 = edge_index[&EdgeId { u: a, v: b }];
            let m2 = edge_index[&EdgeId { u: a, v: c }];
            let m3 = edge_index[&EdgeId { u: b, v: c }];
            (1u32 << m1) | (1 << m2) | (1 << m3)
        })
        .collect();
    let mut counts = vec![0u64; m + 1];
    for subset in 0..1u64 << m {
        let subset = subset as u32;
        if tri_masks.iter().all(|&t| subset & t != t) {
            counts[subset.count_ones() as usize] += 1;
        }
    }
    Ok(TriFreeCensus { counts })
}

/// Maximum triangle-free subgraph edge count and the number of subgraphs
/// achieving it, via branch-and-bound on triangle hitting sets.
///
/// The search repeatedly picks the lexicographically smallest uncovered
/// triangle and branches on deleting each of its edges, pruning when the
/// deletion count exceeds the best bound. Converging branches can reach the
/// same deletion set, so sets are deduplicated, and each surviving subgraph
/// is re-verified triangle-free before it is counted.
pub fn max_trifree_count(g: &Graph) -> (usize, u64) {
    let total_edges = g.edge_count();
    let mut best = usize::MAX;
    let mut sets: HashSet<Vec<EdgeId>> = HashSet::new();
    let mut current = *g;
    let mut deleted: Vec<EdgeId> = Vec::new();

    fn smallest_triangle(g: &Graph) -> Option<(usize, usize, usize)> {
        let n = g.n();
        for u in 0..n {
            for v in u + 1..n {
                if !g.has_edge(EdgeId { u, v }) {
                    continue;
                }
                let mut common = (g.adj(u) & g.adj(v)) >> (v + 1);
                if common != 0 {
                    let w = v + 1 + common.trailing_zeros() as usize;
                    let _ = &mut common;
                    return Some((u, v, w));
                }
            }
        }
        None
    }

    fn rec(
        current: &mut Graph,
        deleted: &mut Vec<EdgeId>,
        best: &mut usize,
        sets: &mut HashSet<Vec<EdgeId>>,
    ) {
        match smallest_triangle(current) {
            None => {
                let k = deleted.len();
                if k < *best {
                    *best = k;
                    sets.clear();
                }
                if k == *best {
                    debug_assert_eq!(current.triangle_count(), 0);
                    let mut key = deleted.clone();
                    key.sort_unstable();
                    sets.insert(key);
                }
            }
            Some((a, b, c)) => {
                if deleted.len() >= *best {
                    return; // destroying this triangle would exceed the bound
                }
                for e in [
                    EdgeId { u: a, v: b },
                    EdgeId { u: a, v: c },
                    EdgeId { u: b, v: c },
                ] {
                    current.set_edge(e, false);
                    deleted.push(e);
                    rec(current, deleted, best, sets);
                    deleted.pop();
                    current.set_edge(e, true);
                }
            }
        }
    }

    rec(&mut current, &mut deleted, &mut best, &mut sets);

    // verify each survivor before trusting the count
    for set in &sets {
        let mut h = *g;
        for &e in set {
            h.set_edge(e, false);
        }
        assert_eq!(h.triangle_count(), 0, "survivor has a triangle");
    }
    (total_edges - best, sets.len() as u64)
}

/// `counts[i]` = number of matchings with exactly `i` edges; `perfect` is
/// the entry at `n/2` (zero for odd `n`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingCensus {
    pub counts: Vec<u64>,
    pub perfect: u64,
}

/// Exact matching census by backtracking over vertices in index order:
/// the lowest unmatched vertex is either skipped or matched to each
/// unmatched neighbor.
pub fn count_matchings(g: &Graph) -> Result<MatchingCensus> {
    let n = g.n();
    if n > MATCHING_VERTEX_CAP {
        return Err(Error::TooLarge(format!(
            "matching census is capped at {MATCHING_VERTEX_CAP} vertices, graph has {n}"
        )));
    }
    let mut counts = vec![0u64; n / 2 + 1];
    fn rec(g: &Graph, v: usize, used: u64, size: usize, counts: &mut [u64]) {
        let n = g.n();
        let mut v = v;
        while v < n && used >> v & 1 == 1 {
            v += 1;
        }
        if v >= n {
            counts[size] += 1;
            return;
        }
        // skip v
        rec(g, v + 1, used | 1 << v, size, counts);
        // or match it to an unmatched neighbor
        let mut nb = g.adj(v) & !used;
        while nb != 0 {
            let u = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            rec(g, v + 1, used | 1 << v | 1 << u, size + 1, counts);
        }
    }
    if n == 0 {
        counts[0] = 1;
    } else {
        rec(g, 0, 0, 0, &mut counts);
    }
    let perfect = if n % 2 == 0 { counts[n / 2] } else { 0 };
    debug_assert_eq!(counts[0], 1);
    Ok(MatchingCensus { counts, perfect })
}

/// All perfect matchings, each as a sorted edge list.
pub fn enumerate_perfect_matchings(g: &Graph) -> Result<Vec<Vec<EdgeId>>> {
    let n = g.n();
    if n > MATCHING_VERTEX_CAP {
        return Err(Error::TooLarge(format!(
            "matching enumeration is capped at {MATCHING_VERTEX_CAP} vertices"
        )));
    }
    if n % 2 != 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut stack = Vec::new();
    fn rec(g: &Graph, used: u64, stack: &mut Vec<EdgeId>, out: &mut Vec<Vec<EdgeId>>) {
        let n = g.n();
        let mut v = 0;
        while v < n && used >> v & 1 == 1 {
            v += 1;
        }
        if v >= n {
            out.push(stack.clone());
            return;
        }
        let mut nb = g.adj(v) & !used;
        while nb != 0 {
            let u = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            stack.push(EdgeId { u: v, v: u });
            rec(g, used | 1 << v | 1 << u, stack, out);
            stack.pop();
        }
    }
    rec(g, 0, &mut stack, &mut out);
    Ok(out)
}

/// Number of perfect matchings of a bipartite graph via permanent expansion
/// of its biadjacency matrix (bitmask dynamic program). Independent of the
/// backtracking census.
pub fn permanent_perfect_matchings(g: &Graph) -> Result<u64> {
    let color = g
        .bipartition()
        .ok_or_else(|| Error::InvalidInput("graph is not bipartite".into()))?;
    let a: Vec<usize> = (0..g.n()).filter(|&v| color[v] == 0).collect();
    let b: Vec<usize> = (0..g.n()).filter(|&v| color[v] == 1).collect();
    if a.len() != b.len() {
        return Ok(0);
    }
    if a.len() > 10 {
        return Err(Error::TooLarge(
            "permanent expansion is capped at parts of size 10".into(),
        ));
    }
    let k = a.len();
    let rows: Vec<u32> = a
        .iter()
        .map(|&u| {
            let mut row = 0u32;
            for (j, &v) in b.iter().enumerate() {
                if u != v && g.has_edge(EdgeId::new(u, v).expect("distinct")) {
                    row |= 1 << j;
                }
            }
            row
        })
        .collect();
    // dp[mask] = ways to match the first popcount(mask) rows into columns `mask`
    let mut dp = vec![0u64; 1 << k];
    dp[0] = 1;
    for mask in 0..(1u32 << k) as usize {
        if dp[mask] == 0 {
            continue;
        }
        let i = (mask as u32).count_ones() as usize;
        if i == k {
            continue;
        }
        let mut choices = rows[i] & !(mask as u32);
        while choices != 0 {
            let j = choices.trailing_zeros();
            choices &= choices - 1;
            dp[mask | 1 << j] += dp[mask];
        }
    }
    Ok(dp[(1 << k) - 1])
}

/// TRI-FREE decision: is there a triangle-free subgraph with `k` or more edges?
pub fn tri_free_decision(g: &Graph, k: usize) -> bool {
    max_trifree_count(g).0 >= k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{pair_count, shapes, Graph, GraphCode};

    #[test]
    fn census_examples() {
        let c = trifree_census_exhaustive(&shapes::k3()).unwrap();
        assert_eq!(c.counts, vec![1, 3, 3, 0]);

        // forests: every subgraph is triangle-free, so d_i = C(m, i)
        let path4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let c = trifree_census_exhaustive(&path4).unwrap();
        assert_eq!(c.counts, vec![1, 3, 3, 1]);

        let c = trifree_census_exhaustive(&shapes::complete(4)).unwrap();
        assert_eq!(c.counts[6], 0);
        assert_eq!(c.counts[5], 0);
        assert_eq!(c.counts[4], 3); // the three 4-cycles of K4
    }

    #[test]
    fn census_cap() {
        let k8 = shapes::complete(8); // 28 edges
        assert!(matches!(
            trifree_census_exhaustive(&k8),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn hitting_set_matches_census_top() {
        // every graph on 4 vertices, plus some named ones
        for code in 0..1u64 << pair_count(4) {
            let g = Graph::from_code(GraphCode(code), 4).unwrap();
            let census = trifree_census_exhaustive(&g).unwrap();
            let (max_e, count) = max_trifree_count(&g);
            assert_eq!((max_e, count), census.top(), "code {code}");
        }
        for g in [shapes::k33(), shapes::cube(), shapes::complete(5)] {
            let census = trifree_census_exhaustive(&g).unwrap();
            assert_eq!(max_trifree_count(&g), census.top());
        }
    }

    #[test]
    fn max_trifree_on_k3() {
        assert_eq!(max_trifree_count(&shapes::k3()), (2, 3));
    }

    #[test]
    fn matching_census_examples() {
        let c = count_matchings(&shapes::k33()).unwrap();
        assert_eq!(c.perfect, 6);
        let c = count_matchings(&shapes::cube()).unwrap();
        assert_eq!(c.perfect, 9);
        // sizes run 0..=floor(n/2); anything above vanishes by definition
        let c = count_matchings(&shapes::p2()).unwrap();
        assert_eq!(c.counts, vec![1, 2]);
        assert_eq!(c.perfect, 0);
        assert!(count_matchings(&Graph::empty(31).unwrap()).is_err());
    }

    #[test]
    fn permanent_agrees_with_backtracker() {
        for (g, want) in [(shapes::k33(), 6u64), (shapes::cube(), 9)] {
            assert_eq!(permanent_perfect_matchings(&g).unwrap(), want);
            assert_eq!(count_matchings(&g).unwrap().perfect, want);
        }
        assert!(permanent_perfect_matchings(&shapes::k3()).is_err());
    }

    #[test]
    fn permanent_cross_check_random_bipartite() {
        // random bipartite graphs with parts of size <= 4
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..100 {
            let pa = (next() % 4 + 1) as usize;
            let pb = (next() % 4 + 1) as usize;
            let n = pa + pb;
            let mut edges = Vec::new();
            for u in 0..pa {
                for v in pa..n {
                    if next() % 2 == 0 {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let back = count_matchings(&g).unwrap().perfect;
            let perm = permanent_perfect_matchings(&g).unwrap();
            assert_eq!(back, perm);
        }
    }

    #[test]
    fn perfect_matching_enumeration_matches_census() {
        for g in [shapes::k33(), shapes::cube()] {
            let all = enumerate_perfect_matchings(&g).unwrap();
            assert_eq!(all.len() as u64, count_matchings(&g).unwrap().perfect);
            for m in &all {
                assert_eq!(m.len(), g.n() / 2);
                let mut seen = 0u64;
                for e in m {
                    assert!(g.has_edge(*e));
                    assert_eq!(seen & (1 << e.u | 1 << e.v), 0);
                    seen |= 1 << e.u | 1 << e.v;
                }
            }
        }
    }

    #[test]
    fn decision_examples() {
        assert!(tri_free_decision(&shapes::k3(), 2));
        assert!(!tri_free_decision(&shapes::k3(), 3));
        assert!(tri_free_decision(&shapes::k3_bar(), 0));
    }
}
