//! Executable versions of the constructions: the trifree model whose digits
//! census triangle-free subgraphs, the inapproximability gap instance, the
//! snub gadget and its matching bijection, the #MATCHING model, feature
//! replacement, and the two-vertex dichotomy.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::{shift_window, Dyadic};
use crate::error::{Error, Result};
use crate::graph::{all_pairs, pair_count, shapes, EdgeId, Graph};
use crate::model::{ErgmModel, Feature, FeatureKind};

/// Parameters of a trifree model: weight `alpha` on edges of the source,
/// `beta = -C(n,2) alpha - C(n,2) - 1` on non-edges and on the triangle count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrifreeParams {
    pub alpha: i64,
    pub beta: i64,
    pub source: Graph,
}

/// Builds the trifree model for `g`: one labeled edge indicator per vertex
/// pair (weight `alpha` for edges of `g`, `beta` otherwise) plus a triangle
/// count at weight `beta`.
pub fn build_trifree_ergm(g: &Graph, alpha: i64) -> Result<(ErgmModel, TrifreeParams)> {
    if alpha < 1 {
        return Err(Error::InvalidArgument(format!(
            "alpha must be >= 1, got {alpha}"
        )));
    }
    let n = g.n();
    let c = pair_count(n) as i64;
    let beta = -c * alpha - c - 1;
    let mut features: Vec<Feature> = all_pairs(n)
        .map(|e| {
            let w = if g.has_edge(e) { alpha } else { beta };
            Feature::indicator(shapes::k2(), vec![e.u, e.v], w)
        })
        .collect();
    features.push(Feature::iso_count(shapes::k3(), beta));
    let model = ErgmModel::new(n, features)?;
    Ok((
        model,
        TrifreeParams {
            alpha,
            beta,
            source: *g,
        },
    ))
}

/// Edge roles in a snub graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnubRole {
    VertexTriangle,
    Cross,
    Connecting,
}

/// Bookkeeping for one source edge's gadget: the picked triangle vertices,
/// the cross edge, its two companion connecting edges, and the vertex
/// triangle edges the matching bijection deletes when the source edge is
/// matched.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnubGadget {
    pub source_edge: EdgeId,
    /// Picked vertices `(a in t_u, b in t_v)`.
    pub picked: (usize, usize),
    pub cross: EdgeId,
    pub connecting: [EdgeId; 2],
    /// `(a, next(a))` in `t_u` and `(b, next(b))` in `t_v`.
    pub vt_delete: [EdgeId; 2],
}

/// `snub(G)` with its edge-role labels and per-source-edge gadget records.
///
/// Vertex `v` of the source becomes triangle `t_v` on `{3v, 3v+1, 3v+2}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SnubGraph {
    pub graph: Graph,
    pub source: Graph,
    pub roles: Vec<(EdgeId, SnubRole)>,
    pub gadgets: Vec<SnubGadget>,
}

impl SnubGraph {
    pub fn role(&self, e: EdgeId) -> Option<SnubRole> {
        self.roles
            .iter()
            .find(|(edge, _)| *edge == e)
            .map(|(_, r)| *r)
    }

    /// Counts per role: (vertex-triangle, cross, connecting).
    pub fn role_census(&self) -> (usize, usize, usize) {
        let mut vt = 0;
        let mut cross = 0;
        let mut conn = 0;
        for (_, r) in &self.roles {
            match r {
                SnubRole::VertexTriangle => vt += 1,
                SnubRole::Cross => cross += 1,
                SnubRole::Connecting => conn += 1,
            }
        }
        (vt, cross, conn)
    }

    /// Number of triangles each edge participates in.
    pub fn triangle_participation(&self) -> HashMap<EdgeId, usize> {
        let mut part: HashMap<EdgeId, usize> = HashMap::new();
        for (a, b, c) in self.graph.triangles() {
            for e in [
                EdgeId { u: a, v: b },
                EdgeId { u: a, v: c },
                EdgeId { u: b, v: c },
            ] {
                *part.entry(e).or_insert(0) += 1;
            }
        }
        for (e, _) in &self.roles {
            part.entry(*e).or_insert(0);
        }
        part
    }
}

/// Deterministic snub construction: cyclic orderings follow increasing
/// vertex index within each triangle, source edges are processed in
/// canonical order, and the lowest-index unpicked vertex is picked.
pub fn snub(g: &Graph) -> Result<SnubGraph> {
    snub_with_choices(g, None)
}

/// Snub construction with seeded random cyclic orderings and picks. The
/// resulting graph differs, but its census and the maximum-triangle-free
/// count do not.
pub fn snub_seeded(g: &Graph, seed: u64) -> Result<SnubGraph> {
    snub_with_choices(g, Some(ChaCha8Rng::seed_from_u64(seed)))
}

fn snub_with_choices(g: &Graph, mut rng: Option<ChaCha8Rng>) -> Result<SnubGraph> {
    let n = g.n();
    if !g.is_regular(3) {
        return Err(Error::InvalidInput("snub requires a 3-regular graph".into()));
    }
    if g.bipartition().is_none() {
        return Err(Error::InvalidInput("snub requires a bipartite graph".into()));
    }
    if 3 * n > crate::graph::MAX_VERTICES {
        return Err(Error::TooLarge(format!(
            "snub needs 3n = {} vertices, cap is {}",
            3 * n,
            crate::graph::MAX_VERTICES
        )));
    }

    // cyclic ordering per triangle: direction 1 is increasing index
    let directions: Vec<usize> = match &mut rng {
        None => vec![1; n],
        Some(r) => (0..n).map(|_| *[1usize, 2].choose(r).expect("nonempty")).collect(),
    };
    let next = |x: usize| -> usize {
        let v = x / 3;
        3 * v + (x % 3 + directions[v]) % 3
    };

    let mut out = Graph::empty(3 * n)?;
    let mut roles = Vec::new();
    for v in 0..n {
        for i in 0..3 {
            let e = EdgeId::new(3 * v + i, 3 * v + (i + 1) % 3)?;
            if out.has_edge(e) {
                continue;
            }
            out.set_edge(e, true);
            roles.push((e, SnubRole::VertexTriangle));
        }
    }

    let mut picked = vec![false; 3 * n];
    let mut gadgets = Vec::new();
    for source_edge in g.edges() {
        let (u, v) = (source_edge.u, source_edge.v);
        let candidates_u: Vec<usize> =
            (3 * u..3 * u + 3).filter(|&x| !picked[x]).collect();
        let candidates_v: Vec<usize> =
            (3 * v..3 * v + 3).filter(|&x| !picked[x]).collect();
        let (a, b) = match &mut rng {
            None => (candidates_u[0], candidates_v[0]),
            Some(r) => (
                *candidates_u.choose(r).expect("3-regular leaves a vertex"),
                *candidates_v.choose(r).expect("3-regular leaves a vertex"),
            ),
        };
        picked[a] = true;
        picked[b] = true;
        let cross = EdgeId::new(a, b)?;
        let conn1 = EdgeId::new(a, next(b))?;
        let conn2 = EdgeId::new(b, next(a))?;
        for (e, role) in [
            (cross, SnubRole::Cross),
            (conn1, SnubRole::Connecting),
            (conn2, SnubRole::Connecting),
        ] {
            if out.has_edge(e) {
                return Err(Error::InvalidInput(format!(
                    "snub construction collided on edge {e}"
                )));
            }
            out.set_edge(e, true);
            roles.push((e, role));
        }
        gadgets.push(SnubGadget {
            source_edge,
            picked: (a, b),
            cross,
            connecting: [conn1, conn2],
            vt_delete: [EdgeId::new(a, next(a))?, EdgeId::new(b, next(b))?],
        });
    }

    Ok(SnubGraph {
        graph: out,
        source: *g,
        roles,
        gadgets,
    })
}

/// The forward map of the matching bijection: deletes the cross edge of
/// every unmatched source edge, and for every matched source edge the two
/// vertex-triangle edges adjacent to both its cross and connecting edges.
/// The result is triangle-free with `11n/2` edges.
pub fn matching_to_trifree_subgraph(sg: &SnubGraph, matching: &[EdgeId]) -> Result<Graph> {
    let n = sg.source.n();
    let mut covered = 0u64;
    let mset: HashSet<EdgeId> = matching.iter().copied().collect();
    if mset.len() != matching.len() {
        return Err(Error::InvalidInput("matching repeats an edge".into()));
    }
    for e in matching {
        if !sg.source.has_edge(*e) {
            return Err(Error::InvalidInput(format!("{e} is not a source edge")));
        }
        if covered & (1 << e.u | 1 << e.v) != 0 {
            return Err(Error::InvalidInput(format!("{e} shares a vertex")));
        }
        covered |= 1 << e.u | 1 << e.v;
    }
    if covered.count_ones() as usize != n {
        return Err(Error::InvalidInput(
            "matching is not perfect: some vertex is uncovered".into(),
        ));
    }

    let mut out = sg.graph;
    for gadget in &sg.gadgets {
        if mset.contains(&gadget.source_edge) {
            out.set_edge(gadget.vt_delete[0], false);
            out.set_edge(gadget.vt_delete[1], false);
        } else {
            out.set_edge(gadget.cross, false);
        }
    }
    Ok(out)
}

/// The #MATCHING model for a bipartite `g`: weight `C(n,2)` on each edge of
/// `g`, weight `beta = -C(n,2)^2 - C(n,2) - 1` on each non-edge and on each
/// path occurrence (center plus unordered endpoints) inside `g`. The digits
/// of its partition function in base `2^C(n,2)` census matchings by size,
/// with the perfect-matching count at digit `n/2`.
pub fn build_matching_ergm(g: &Graph) -> Result<ErgmModel> {
    if g.bipartition().is_none() {
        return Err(Error::InvalidInput(
            "the matching model requires a bipartite graph".into(),
        ));
    }
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidInput(
            "the matching model needs at least one vertex pair".into(),
        ));
    }
    let c = pair_count(n) as i64;
    let beta = -c * c - c - 1;
    let mut features: Vec<Feature> = all_pairs(n)
        .map(|e| {
            let w = if g.has_edge(e) { c } else { beta };
            Feature::indicator(shapes::k2(), vec![e.u, e.v], w)
        })
        .collect();
    // one indicator per unordered path in g: center, endpoints x < y
    for center in 0..n {
        for x in 0..n {
            for y in x + 1..n {
                if x == center || y == center {
                    continue;
                }
                let e1 = EdgeId::new(x, center)?;
                let e2 = EdgeId::new(center, y)?;
                if g.has_edge(e1) && g.has_edge(e2) {
                    features.push(Feature::indicator(shapes::p2(), vec![x, center, y], beta));
                }
            }
        }
    }
    ErgmModel::new(n, features)
}

/// Parameters recorded by a feature replacement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplacementParams {
    /// The enforcement weight actually used; the construction's minimum is
    /// `w_plus + w_minus`.
    pub gamma: i64,
    /// Number of weight-`2 gamma` indicator features added (`k' + 1`).
    pub s: usize,
    pub w_plus: i64,
    pub w_minus: i64,
    /// Vertices of the replacement pattern.
    pub k: usize,
    /// Vertices of the replaced pattern.
    pub k_prime: usize,
    pub original_n: usize,
}

impl ReplacementParams {
    /// Potential edges at the new vertices constrained by no feature in the
    /// all-enforced states; each original state appears `2^this` times, so
    /// the recovered window is `floor(2^this * Z_old)`.
    pub fn free_cross_edges(&self) -> usize {
        self.original_n * self.k - self.k_prime * (self.k - 1)
    }

    pub fn window_bit(&self) -> u64 {
        2 * self.s as u64 * self.gamma as u64
    }
}

/// Smallest enforcement weight with a proven-clean recovery window:
/// `2 gamma >= C(n+k,2) + w+ + w- + 1` bounds the total mass of states that
/// miss an enforcement feature below `2^-(w-+1)`, so the window digits are
/// exact. Never below the construction's own `w+ + w-`.
pub fn clean_replacement_gamma(model: &ErgmModel, replacement_pattern: &Graph) -> i64 {
    let (w_plus, w_minus) = model.weight_split();
    let big_n = model.n() + replacement_pattern.n();
    let c = pair_count(big_n) as i64;
    let clean = (c + w_plus + w_minus + 1).div_euclid(2) + (c + w_plus + w_minus + 1).rem_euclid(2);
    clean.max(w_plus + w_minus).max(1)
}

/// Replaces a labeled indicator on pattern `H'` by indicators on the larger
/// pattern `H`, adding `k` fresh vertices and `s = k' + 1` enforcement
/// features of weight `2 gamma` plus one carried-weight feature.
///
/// `embedding[i]` names the `H` vertex playing `H'` vertex `i`; it must be
/// an induced-subgraph embedding. `gamma` defaults to the construction's
/// minimum `w+ + w-`; recovery of the old partition function from the new
/// one needs the larger [`clean_replacement_gamma`].
pub fn feature_replace(
    model: &ErgmModel,
    feature_idx: usize,
    pattern_h: &Graph,
    embedding: &[usize],
    gamma: Option<i64>,
) -> Result<(ErgmModel, ReplacementParams)> {
    let feature = model
        .features()
        .get(feature_idx)
        .ok_or_else(|| Error::InvalidArgument(format!("no feature {feature_idx}")))?;
    let (h_prime, verts, weight) = match &feature.kind {
        FeatureKind::LabeledIndicator { pattern, vertices } => {
            (pattern, vertices.clone(), feature.weight)
        }
        FeatureKind::IsoCount { .. } => {
            return Err(Error::UnsupportedFeature(
                "count features must be expanded into labeled indicators first \
                 (see expand_count_feature)"
                    .into(),
            ))
        }
    };
    let k_prime = h_prime.n();
    let k = pattern_h.n();
    if embedding.len() != k_prime {
        return Err(Error::InvalidEmbedding(format!(
            "embedding maps {} vertices, pattern has {k_prime}",
            embedding.len()
        )));
    }
    let mut seen = vec![false; k];
    for &t in embedding {
        if t >= k {
            return Err(Error::InvalidEmbedding(format!(
                "target vertex {t} out of range for a {k}-vertex pattern"
            )));
        }
        if seen[t] {
            return Err(Error::InvalidEmbedding(format!("target {t} repeated")));
        }
        seen[t] = true;
    }
    for i in 0..k_prime {
        for j in i + 1..k_prime {
            let in_hp = h_prime.has_edge(EdgeId::new(i, j)?);
            let in_h = pattern_h.has_edge(EdgeId::new(embedding[i], embedding[j])?);
            if in_hp != in_h {
                return Err(Error::InvalidEmbedding(format!(
                    "pair ({i},{j}) is {} in the replaced pattern but {} in the target",
                    if in_hp { "an edge" } else { "a non-edge" },
                    if in_h { "an edge" } else { "a non-edge" },
                )));
            }
        }
    }

    let n = model.n();
    let new_n = n + k;
    if new_n > crate::graph::MAX_VERTICES {
        return Err(Error::UnsupportedSize(format!(
            "replacement needs {new_n} vertices, cap is {}",
            crate::graph::MAX_VERTICES
        )));
    }
    let (w_plus, w_minus) = model.weight_split();
    if w_plus + w_minus == 0 {
        return Err(Error::InvalidArgument(
            "all weights are zero: gamma = w+ + w- would be degenerate".into(),
        ));
    }
    let gamma = gamma.unwrap_or(w_plus + w_minus);
    if gamma < w_plus + w_minus {
        return Err(Error::InvalidArgument(format!(
            "gamma = {gamma} is below the construction minimum w+ + w- = {}",
            w_plus + w_minus
        )));
    }

    // new vertex n + j plays H vertex j
    let base_tuple: Vec<usize> = (n..new_n).collect();
    let mut features: Vec<Feature> = model
        .features()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != feature_idx)
        .map(|(_, f)| f.clone())
        .collect();
    // all-new copy of H
    features.push(Feature::indicator(*pattern_h, base_tuple.clone(), 2 * gamma));
    // one original vertex swapped in at a time
    for i in 0..k_prime {
        let mut tuple = base_tuple.clone();
        tuple[embedding[i]] = verts[i];
        features.push(Feature::indicator(*pattern_h, tuple, 2 * gamma));
    }
    // all paired vertices swapped, carrying the replaced feature's weight
    let mut tuple = base_tuple.clone();
    for i in 0..k_prime {
        tuple[embedding[i]] = verts[i];
    }
    features.push(Feature::indicator(*pattern_h, tuple, weight));

    let new_model = ErgmModel::new(new_n, features)?;
    Ok((
        new_model,
        ReplacementParams {
            gamma,
            s: k_prime + 1,
            w_plus,
            w_minus,
            k,
            k_prime,
            original_n: n,
        },
    ))
}

/// Expands an isomorphism-count feature into labeled indicators, one per
/// automorphism-orbit representative tuple, in lexicographic order. The
/// expanded model has the same density exponent as the original on every
/// graph, which is what makes replacing a count feature meaningful.
pub fn expand_count_feature(model: &ErgmModel, feature_idx: usize) -> Result<ErgmModel> {
    let feature = model
        .features()
        .get(feature_idx)
        .ok_or_else(|| Error::InvalidArgument(format!("no feature {feature_idx}")))?;
    let pattern = match &feature.kind {
        FeatureKind::IsoCount { pattern } => *pattern,
        FeatureKind::LabeledIndicator { .. } => {
            return Err(Error::InvalidArgument(
                "feature is already a labeled indicator".into(),
            ))
        }
    };
    let k = pattern.n();
    let n = model.n();
    if n > 5 && k >= 3 {
        return Err(Error::TooLarge(
            "count expansion is capped at n = 5 for patterns on 3+ vertices".into(),
        ));
    }
    let autos = automorphisms(&pattern);
    let mut features: Vec<Feature> = model
        .features()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != feature_idx)
        .map(|(_, f)| f.clone())
        .collect();
    let mut tuple = vec![0usize; k];
    expand_tuples(n, k, 0, &mut tuple, &mut |t| {
        // keep only the lexicographic minimum of the automorphism orbit
        let is_rep = autos.iter().all(|sigma| {
            let image: Vec<usize> = (0..k).map(|slot| t[sigma[slot]]).collect();
            t <= image.as_slice()
        });
        if is_rep {
            features.push(Feature::indicator(pattern, t.to_vec(), feature.weight));
        }
    });
    ErgmModel::new(n, features)
}

// all permutations fixing the pattern's edge set
fn automorphisms(pattern: &Graph) -> Vec<Vec<usize>> {
    let k = pattern.n();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..k).collect();
    fn rec(pattern: &Graph, perm: &mut Vec<usize>, at: usize, out: &mut Vec<Vec<usize>>) {
        let k = perm.len();
        if at == k {
            let ok = all_pairs(k).all(|e| {
                pattern.has_edge(e)
                    == pattern.has_edge(EdgeId::new(perm[e.u], perm[e.v]).expect("distinct"))
            });
            if ok {
                out.push(perm.clone());
            }
            return;
        }
        for i in at..k {
            perm.swap(at, i);
            rec(pattern, perm, at + 1, out);
            perm.swap(at, i);
        }
    }
    rec(pattern, &mut perm, 0, &mut out);
    out
}

// ordered tuples of distinct vertices, lexicographic
fn expand_tuples(
    n: usize,
    k: usize,
    at: usize,
    tuple: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if at == k {
        f(tuple);
        return;
    }
    for v in 0..n {
        if tuple[..at].contains(&v) {
            continue;
        }
        tuple[at] = v;
        expand_tuples(n, k, at + 1, tuple, f);
    }
}

/// `floor(z_new / 2^(2 s gamma))`: the digit window of the new partition
/// function where the all-enforced states live. At a clean gamma this equals
/// `floor(2^free_cross_edges * z_old)`.
pub fn recover_old_partition(z_new: &Dyadic, params: &ReplacementParams) -> BigUint {
    shift_window(z_new, params.window_bit())
}

/// Parameters of a Theorem-2-style gap instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapParams {
    /// `ceil(log2 f(n))` for the assumed approximation factor `f`.
    pub f_log: u32,
    /// `C(n,2) + 2 f_log + 1`.
    pub alpha: i64,
    /// Target edge count of the TRI-FREE question.
    pub k: usize,
}

/// Builds the trifree model at `alpha = C(n,2) + 2 f_log + 1`, the setting
/// that separates yes- and no-instances of TRI-FREE by more than the square
/// of the approximation factor.
pub fn gap_instance(g: &Graph, k: usize, f_log: u32) -> Result<(ErgmModel, GapParams)> {
    let c = pair_count(g.n()) as i64;
    let alpha = c + 2 * f_log as i64 + 1;
    let (model, _) = build_trifree_ergm(g, alpha)?;
    Ok((model, GapParams { f_log, alpha, k }))
}

/// The two thresholds of the gap argument, as exact dyadics:
/// yes-instances have `Z > 2^(k alpha)`, no-instances have
/// `Z < 2^(C(n,2) + (k-1) alpha)`.
pub fn gap_thresholds(params: &GapParams, n: usize) -> (Dyadic, Dyadic) {
    let c = pair_count(n) as i64;
    let k = params.k as i64;
    let yes = Dyadic::pow2(k * params.alpha);
    let no = Dyadic::pow2(c + (k - 1) * params.alpha);
    (yes, no)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapVerdict {
    pub is_yes: bool,
    pub yes_threshold: Dyadic,
    pub no_threshold: Dyadic,
}

/// Classifies an exact partition function against the two thresholds.
/// Exactly one inequality holds for any host with at least one vertex pair;
/// degenerate hosts are rejected.
pub fn classify_gap(z: &Dyadic, params: &GapParams, n: usize) -> Result<GapVerdict> {
    let (yes, no) = gap_thresholds(params, n);
    let is_yes = *z > yes;
    let is_no = *z < no;
    if is_yes == is_no {
        return Err(Error::InvalidInput(format!(
            "thresholds are inconclusive (n = {n} too small?): Z = {z}"
        )));
    }
    Ok(GapVerdict {
        is_yes,
        yes_threshold: yes,
        no_threshold: no,
    })
}

/// The identity chain of the gap argument at `f = 2^f_log`:
/// `f^2 * 2^(C(n,2) + (k-1) alpha) = 2^(k alpha - 1) < 2^(k alpha)`,
/// checked as exact dyadic arithmetic.
pub fn separation_identity_holds(params: &GapParams, n: usize) -> bool {
    let c = pair_count(n) as i64;
    let k = params.k as i64;
    let lhs = Dyadic::pow2(2 * params.f_log as i64) * Dyadic::pow2(c + (k - 1) * params.alpha);
    let mid = Dyadic::pow2(k * params.alpha - 1);
    lhs == mid && mid < Dyadic::pow2(k * params.alpha)
}

/// Which hard three-vertex graph a pattern contains as an induced subgraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardnessCase {
    K3,
    P2,
    P2Complement,
    K3Complement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum DichotomyVerdict {
    /// Every pattern has at most two vertices: the product formula applies.
    Polynomial,
    /// Some pattern has three or more vertices; the witness names the first
    /// such pattern and which induced case drives the reduction.
    SharpPHard {
        pattern_index: usize,
        case: HardnessCase,
    },
}

/// Theorem-5 classification of a feature pattern set.
pub fn dichotomy_classify(patterns: &[Graph]) -> DichotomyVerdict {
    for (idx, p) in patterns.iter().enumerate() {
        if p.n() < 3 {
            continue;
        }
        // every 3 vertices induce one of the four cases; detect by the
        // possible induced edge counts, preferring K3, then P2, then their
        // complements (which reduce to the first two by complementation)
        let mut seen = [false; 4];
        for a in 0..p.n() {
            for b in a + 1..p.n() {
                for c in b + 1..p.n() {
                    let edges = p.has_edge(EdgeId { u: a, v: b }) as usize
                        + p.has_edge(EdgeId { u: a, v: c }) as usize
                        + p.has_edge(EdgeId { u: b, v: c }) as usize;
                    seen[edges] = true;
                }
            }
        }
        let case = if seen[3] {
            HardnessCase::K3
        } else if seen[2] {
            HardnessCase::P2
        } else if seen[1] {
            HardnessCase::P2Complement
        } else {
            HardnessCase::K3Complement
        };
        return DichotomyVerdict::SharpPHard {
            pattern_index: idx,
            case,
        };
    }
    DichotomyVerdict::Polynomial
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{count_matchings, max_trifree_count};
    use crate::partition::{decode_trifree_digits, partition_exhaustive};

    #[test]
    fn trifree_k3_weights() {
        let (m, p) = build_trifree_ergm(&shapes::k3(), 4).unwrap();
        assert_eq!(p.beta, -3 * 4 - 3 - 1);
        assert_eq!(m.features().len(), 4);
        assert!(m.features()[..3].iter().all(|f| f.weight == 4));
        assert_eq!(m.features()[3].weight, -16);
        assert_eq!(m.density_exponent(&shapes::k3()).unwrap(), 12 + p.beta);

        let (m, p) = build_trifree_ergm(&shapes::k3_bar(), 4).unwrap();
        assert!(m.features()[..3].iter().all(|f| f.weight == p.beta));
        assert!(build_trifree_ergm(&shapes::k3(), 0).is_err());
    }

    #[test]
    fn snub_censuses() {
        for (g, n) in [(shapes::k33(), 6usize), (shapes::cube(), 8)] {
            let sg = snub(&g).unwrap();
            assert_eq!(sg.graph.n(), 3 * n);
            assert_eq!(sg.graph.edge_count(), 15 * n / 2);
            assert_eq!(sg.graph.triangle_count() as usize, 4 * n);
            assert_eq!(sg.role_census(), (3 * n, 3 * n / 2, 3 * n));
            let part = sg.triangle_participation();
            for (e, role) in &sg.roles {
                let want = match role {
                    SnubRole::Connecting => 1,
                    _ => 2,
                };
                assert_eq!(part[e], want, "edge {e} role {role:?}");
            }
        }
    }

    #[test]
    fn snub_rejects_bad_inputs() {
        assert!(snub(&shapes::k3()).is_err()); // not bipartite, not 3-regular
        assert!(snub(&shapes::complete(4)).is_err()); // 3-regular but odd cycles
        let c6 = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]).unwrap();
        assert!(snub(&c6).is_err()); // bipartite but 2-regular
    }

    #[test]
    fn snub_vertex_triangles_induce_k3() {
        let sg = snub(&shapes::k33()).unwrap();
        for v in 0..6 {
            let tri = sg.graph.induced(&[3 * v, 3 * v + 1, 3 * v + 2]).unwrap();
            assert_eq!(tri, shapes::k3());
        }
    }

    #[test]
    fn triangle_count_feature_on_snub_k33() {
        // a homogeneous triangle count evaluated on the 18-vertex snub graph
        let sg = snub(&shapes::k33()).unwrap();
        let m = ErgmModel::new(18, vec![Feature::iso_count(shapes::k3(), 1)]).unwrap();
        assert_eq!(m.eval_feature(0, &sg.graph).unwrap(), 24);
    }

    #[test]
    fn identity_replacement_still_adds_the_gadget() {
        // H = H' = K2: the carried feature lands on entirely original
        // vertices, but k fresh vertices and k'+1 enforcement features are
        // added all the same, and the window still recovers Z_old.
        let old = ErgmModel::new(
            3,
            vec![Feature::indicator(shapes::k2(), vec![0, 1], 2)],
        )
        .unwrap();
        let gamma = clean_replacement_gamma(&old, &shapes::k2());
        let (new_model, params) =
            feature_replace(&old, 0, &shapes::k2(), &[0, 1], Some(gamma)).unwrap();
        assert_eq!(new_model.n(), 5);
        assert_eq!(params.s, 3);
        assert_eq!(params.free_cross_edges(), 3 * 2 - 2 * 1);
        let z_old = partition_exhaustive(&old).unwrap().z;
        let z_new = partition_exhaustive(&new_model).unwrap().z;
        assert_eq!(
            recover_old_partition(&z_new, &params),
            z_old.mul_pow2(params.free_cross_edges() as i64).floor()
        );
        assert_eq!(
            recover_old_partition(&z_new, &params),
            BigUint::from(320u32) // 2^4 * 20
        );
    }

    #[test]
    fn matching_map_produces_distinct_trifree_subgraphs() {
        let g = shapes::k33();
        let sg = snub(&g).unwrap();
        let matchings = crate::oracles::enumerate_perfect_matchings(&g).unwrap();
        assert_eq!(matchings.len(), 6);
        let mut images = HashSet::new();
        for m in &matchings {
            let sub = matching_to_trifree_subgraph(&sg, m).unwrap();
            assert_eq!(sub.edge_count(), 11 * 6 / 2);
            assert_eq!(sub.triangle_count(), 0);
            assert!(sub.is_subgraph_of(&sg.graph));
            images.insert(sub);
        }
        assert_eq!(images.len(), 6);
        // non-matchings are rejected
        assert!(matching_to_trifree_subgraph(&sg, &[]).is_err());
        let not_perfect = vec![EdgeId { u: 0, v: 3 }];
        assert!(matching_to_trifree_subgraph(&sg, &not_perfect).is_err());
    }

    #[test]
    fn snub_choice_independence() {
        let g = shapes::k33();
        let baseline = max_trifree_count(&snub(&g).unwrap().graph);
        for seed in 0..6 {
            let sg = snub_seeded(&g, seed).unwrap();
            assert_eq!(sg.graph.edge_count(), 45);
            assert_eq!(sg.graph.triangle_count(), 24);
            assert_eq!(max_trifree_count(&sg.graph), baseline);
        }
    }

    #[test]
    fn parsimony_on_k33() {
        let g = shapes::k33();
        let sg = snub(&g).unwrap();
        let pm = count_matchings(&g).unwrap().perfect;
        let (max_edges, count) = max_trifree_count(&sg.graph);
        assert_eq!(max_edges, 33);
        assert_eq!(count, pm);
        assert_eq!(pm, 6);
    }

    #[test]
    fn matching_model_digit_examples() {
        // single edge: matchings (1, 1)
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(matching_digits(&g), vec![1, 1]);
        // path: two single-edge matchings, no 2-edge matching
        assert_eq!(matching_digits(&shapes::p2()), vec![1, 2]);
        // two disjoint edges: one perfect matching
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(matching_digits(&g), vec![1, 2, 1]);
        assert!(build_matching_ergm(&shapes::k3()).is_err());
    }

    fn matching_digits(g: &Graph) -> Vec<u64> {
        let m = build_matching_ergm(g).unwrap();
        let z = partition_exhaustive(&m).unwrap().z;
        let c = pair_count(g.n()) as u64;
        let d = crate::dyadic::integer_part_digits(&z, c, g.n() / 2).unwrap();
        d.digits
            .iter()
            .map(|d| u64::try_from(d).expect("small"))
            .collect()
    }

    #[test]
    fn replacement_shape_k2_to_p2() {
        let old = ErgmModel::new(
            3,
            vec![Feature::indicator(shapes::k2(), vec![0, 1], 2)],
        )
        .unwrap();
        let (new_model, params) =
            feature_replace(&old, 0, &shapes::p2(), &[0, 1], None).unwrap();
        assert_eq!(new_model.n(), 6);
        assert_eq!(params.s, 3);
        assert_eq!((params.w_plus, params.w_minus), (2, 0));
        assert_eq!(params.gamma, 2);
        assert_eq!(params.free_cross_edges(), 5);
        // 3 enforcement features + 1 carried
        assert_eq!(new_model.features().len(), 4);
        assert!(new_model.features()[..3].iter().all(|f| f.weight == 4));
        assert_eq!(new_model.features()[3].weight, 2);
    }

    #[test]
    fn replacement_wheel_example_adds_five_indicators() {
        // replacing a triangle indicator with the 6-vertex wheel adds six
        // new vertices and five wheel indicators
        let old = ErgmModel::new(
            3,
            vec![Feature::indicator(shapes::k3(), vec![0, 1, 2], 1)],
        )
        .unwrap();
        // triangle hub+rim: vertices 0,1,2 of the wheel with hub 0 form K3
        let (new_model, params) =
            feature_replace(&old, 0, &shapes::wheel6(), &[0, 1, 2], None).unwrap();
        assert_eq!(new_model.n(), 9);
        assert_eq!(params.k, 6);
        assert_eq!(params.s, 4);
        assert_eq!(new_model.features().len(), 5);
    }

    #[test]
    fn replacement_rejects_bad_embeddings_and_degenerate_gamma() {
        let old = ErgmModel::new(
            3,
            vec![Feature::indicator(shapes::k2(), vec![0, 1], 2)],
        )
        .unwrap();
        // vertices 0 and 2 of the path are not adjacent
        assert!(matches!(
            feature_replace(&old, 0, &shapes::p2(), &[0, 2], None),
            Err(Error::InvalidEmbedding(_))
        ));
        assert!(matches!(
            feature_replace(&old, 0, &shapes::p2(), &[0], None),
            Err(Error::InvalidEmbedding(_))
        ));
        let zero = ErgmModel::new(
            3,
            vec![Feature::indicator(shapes::k2(), vec![0, 1], 0)],
        )
        .unwrap();
        assert!(feature_replace(&zero, 0, &shapes::p2(), &[0, 1], None).is_err());
        // gamma below the minimum
        assert!(feature_replace(&old, 0, &shapes::p2(), &[0, 1], Some(1)).is_err());
        // count features must be expanded first
        let counts = ErgmModel::new(3, vec![Feature::iso_count(shapes::k2(), 1)]).unwrap();
        assert!(matches!(
            feature_replace(&counts, 0, &shapes::p2(), &[0, 1], None),
            Err(Error::UnsupportedFeature(_))
        ));
    }

    #[test]
    fn count_expansion_preserves_exponents() {
        for pattern in [shapes::k2(), shapes::k3(), shapes::p2()] {
            let m = ErgmModel::new(
                4,
                vec![
                    Feature::iso_count(pattern, 3),
                    Feature::indicator(shapes::k2(), vec![1, 2], -1),
                ],
            )
            .unwrap();
            let expanded = expand_count_feature(&m, 0).unwrap();
            for code in 0..1u64 << 6 {
                let g = Graph::from_code(crate::graph::GraphCode(code), 4).unwrap();
                assert_eq!(
                    m.density_exponent(&g).unwrap(),
                    expanded.density_exponent(&g).unwrap(),
                    "pattern {pattern:?} code {code}"
                );
            }
        }
    }

    #[test]
    fn window_at_minimum_gamma_is_polluted() {
        // At the construction minimum gamma = w+ + w- the states that miss
        // an enforcement feature still outweigh the window: the recovered
        // value is 878, not 2^F * Z_old = 640 (both frozen against an
        // independent enumeration). This is why recovery uses the clean
        // gamma.
        let old = ErgmModel::new(
            3,
            vec![Feature::indicator(shapes::k2(), vec![0, 1], 2)],
        )
        .unwrap();
        let (new_model, params) =
            feature_replace(&old, 0, &shapes::p2(), &[0, 1], None).unwrap();
        assert_eq!(params.gamma, 2);
        let z_new = partition_exhaustive(&new_model).unwrap().z;
        let window = recover_old_partition(&z_new, &params);
        assert_eq!(window, BigUint::from(878u32));
        assert_ne!(window, BigUint::from(640u32));
    }

    #[test]
    fn clean_window_with_negative_weights() {
        // Z_old = 4 + 4 * 2^-3 = 4.5; floor(2^5 * 4.5) = 144 at the clean
        // gamma (frozen against an independent enumeration).
        let old = ErgmModel::new(
            3,
            vec![Feature::indicator(shapes::k2(), vec![0, 1], -3)],
        )
        .unwrap();
        let z_old = partition_exhaustive(&old).unwrap().z;
        assert_eq!(z_old, Dyadic::from_natural(9u32).mul_pow2(-1));
        let gamma = clean_replacement_gamma(&old, &shapes::p2());
        assert_eq!(gamma, 10);
        let (new_model, params) =
            feature_replace(&old, 0, &shapes::p2(), &[0, 1], Some(gamma)).unwrap();
        let z_new = partition_exhaustive(&new_model).unwrap().z;
        let window = recover_old_partition(&z_new, &params);
        assert_eq!(
            window,
            z_old.mul_pow2(params.free_cross_edges() as i64).floor()
        );
        assert_eq!(window, BigUint::from(144u32));
    }

    #[test]
    fn gap_instance_k3_examples() {
        let (m, p) = gap_instance(&shapes::k3(), 2, 3).unwrap();
        assert_eq!(p.alpha, 3 + 6 + 1);
        let z = partition_exhaustive(&m).unwrap().z;
        // d2 = 3 > 0, so this is a yes-instance
        let v = classify_gap(&z, &p, 3).unwrap();
        assert!(v.is_yes);
        assert!(separation_identity_holds(&p, 3));

        let (m, p) = gap_instance(&shapes::k3(), 4, 3).unwrap();
        let z = partition_exhaustive(&m).unwrap().z;
        let v = classify_gap(&z, &p, 3).unwrap();
        assert!(!v.is_yes);
        assert!(separation_identity_holds(&p, 3));
    }

    #[test]
    fn gap_digits_match_census_route() {
        let (m, p) = gap_instance(&shapes::k3(), 2, 3).unwrap();
        let z = partition_exhaustive(&m).unwrap().z;
        let d = decode_trifree_digits(&z, 3, p.alpha as u64).unwrap();
        let want: Vec<BigUint> = [1u32, 3, 3, 0].iter().map(|&x| x.into()).collect();
        assert_eq!(d.digits, want);
    }

    #[test]
    fn dichotomy_examples() {
        assert_eq!(
            dichotomy_classify(&[shapes::k2(), shapes::k2_bar()]),
            DichotomyVerdict::Polynomial
        );
        let cases = [
            (shapes::k3(), HardnessCase::K3),
            (shapes::p2(), HardnessCase::P2),
            (shapes::p2_bar(), HardnessCase::P2Complement),
            (shapes::k3_bar(), HardnessCase::K3Complement),
            (shapes::wheel6(), HardnessCase::K3),
        ];
        for (pattern, want) in cases {
            match dichotomy_classify(&[shapes::k2(), pattern]) {
                DichotomyVerdict::SharpPHard {
                    pattern_index,
                    case,
                } => {
                    assert_eq!(pattern_index, 1);
                    assert_eq!(case, want, "{pattern:?}");
                }
                v => panic!("expected hard verdict, got {v:?}"),
            }
        }
    }
}
