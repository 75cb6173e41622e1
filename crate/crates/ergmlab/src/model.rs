//! ERGM representation: weighted subgraph features and the density exponent.
//!
//! Densities are `2^(sum_f f(G) w_f)` with integer weights, so evaluating a
//! model on a graph reduces to computing that integer exponent exactly.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::{iso_mask_set, shapes, EdgeId, Graph};

/// A single weighted feature.
///
/// `LabeledIndicator` is heterogeneous: it is 1 exactly when the induced
/// subgraph on its vertex tuple equals the pattern edge-for-edge under the
/// fixed numbering (not up to isomorphism). `IsoCount` is homogeneous: it
/// counts unordered vertex subsets whose induced subgraph is isomorphic to
/// the pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeatureKind {
    LabeledIndicator { pattern: Graph, vertices: Vec<usize> },
    IsoCount { pattern: Graph },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Feature {
    pub kind: FeatureKind,
    pub weight: i64,
}

impl Feature {
    pub fn indicator(pattern: Graph, vertices: Vec<usize>, weight: i64) -> Feature {
        Feature {
            kind: FeatureKind::LabeledIndicator { pattern, vertices },
            weight,
        }
    }

    pub fn iso_count(pattern: Graph, weight: i64) -> Feature {
        Feature {
            kind: FeatureKind::IsoCount { pattern },
            weight,
        }
    }

    pub fn pattern(&self) -> &Graph {
        match &self.kind {
            FeatureKind::LabeledIndicator { pattern, .. } => pattern,
            FeatureKind::IsoCount { pattern } => pattern,
        }
    }
}

// Per-feature evaluation plan, precomputed at model construction.
#[derive(Clone, Debug)]
enum EvalPlan {
    // induced mask on the tuple must equal the pattern's mask
    Indicator { mask: u64 },
    // IsoCount(K3): neighbor-bitset triangle count
    Triangles,
    // general IsoCount: masks of all graphs isomorphic to the pattern
    IsoMasks { k: usize, masks: HashSet<u64> },
}

/// An ERGM: a vertex count plus weighted features.
///
/// Immutable after construction; all evaluation is pure.
#[derive(Clone, Debug)]
pub struct ErgmModel {
    n: usize,
    features: Vec<Feature>,
    plans: Vec<EvalPlan>,
}

impl ErgmModel {
    pub fn new(n: usize, features: Vec<Feature>) -> Result<ErgmModel> {
        if n > crate::graph::MAX_VERTICES {
            return Err(Error::UnsupportedSize(format!(
                "model on {n} vertices exceeds the cap of {}",
                crate::graph::MAX_VERTICES
            )));
        }
        let mut plans = Vec::with_capacity(features.len());
        for (idx, f) in features.iter().enumerate() {
            match &f.kind {
                FeatureKind::LabeledIndicator { pattern, vertices } => {
                    if vertices.len() != pattern.n() {
                        return Err(Error::InvalidArgument(format!(
                            "feature {idx}: tuple has {} vertices, pattern has {}",
                            vertices.len(),
                            pattern.n()
                        )));
                    }
                    let mut seen = 0u64;
                    for &v in vertices {
                        if v >= n {
                            return Err(Error::InvalidArgument(format!(
                                "feature {idx}: vertex {v} out of range for n={n}"
                            )));
                        }
                        if seen >> v & 1 == 1 {
                            return Err(Error::InvalidArgument(format!(
                                "feature {idx}: duplicate vertex {v}"
                            )));
                        }
                        seen |= 1 << v;
                    }
                    plans.push(EvalPlan::Indicator {
                        mask: pattern.edge_mask(),
                    });
                }
                FeatureKind::IsoCount { pattern } => {
                    if pattern.n() > 8 {
                        return Err(Error::UnsupportedSize(format!(
                            "feature {idx}: count patterns are capped at 8 vertices"
                        )));
                    }
                    if pattern == &shapes::k3() {
                        plans.push(EvalPlan::Triangles);
                    } else {
                        plans.push(EvalPlan::IsoMasks {
                            k: pattern.n(),
                            masks: iso_mask_set(pattern)?,
                        });
                    }
                }
            }
        }
        Ok(ErgmModel { n, features, plans })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    fn check_graph(&self, g: &Graph) -> Result<()> {
        if g.n() != self.n {
            return Err(Error::InvalidArgument(format!(
                "graph has {} vertices, model has {}",
                g.n(),
                self.n
            )));
        }
        Ok(())
    }

    /// Value of feature `idx` in `g`: 0/1 for indicators, a count for
    /// isomorphism-count features.
    pub fn eval_feature(&self, idx: usize, g: &Graph) -> Result<u64> {
        self.check_graph(g)?;
        let f = self
            .features
            .get(idx)
            .ok_or_else(|| Error::InvalidArgument(format!("no feature {idx}")))?;
        Ok(self.eval_plan(idx, f, g))
    }

    fn eval_plan(&self, idx: usize, f: &Feature, g: &Graph) -> u64 {
        match (&self.plans[idx], &f.kind) {
            (EvalPlan::Indicator { mask }, FeatureKind::LabeledIndicator { vertices, .. }) => {
                (g.induced_mask(vertices) == *mask) as u64
            }
            (EvalPlan::Triangles, _) => g.triangle_count(),
            (EvalPlan::IsoMasks { k, masks }, _) => {
                let mut count = 0;
                let mut scratch = vec![0usize; *k];
                for_each_combination(self.n, *k, &mut scratch, &mut |vs| {
                    if masks.contains(&g.induced_mask(vs)) {
                        count += 1;
                    }
                });
                count
            }
            _ => unreachable!("plan matches feature kind by construction"),
        }
    }

    /// `sum_f f(G) w_f`, so the density of `g` is exactly `2^result`.
    pub fn density_exponent(&self, g: &Graph) -> Result<i64> {
        self.check_graph(g)?;
        let mut total = 0i64;
        for (idx, f) in self.features.iter().enumerate() {
            total += f.weight * self.eval_plan(idx, f, g) as i64;
        }
        Ok(total)
    }

    /// Exponent change from toggling the pair `e` in `g`.
    ///
    /// Only features whose value can be affected by that pair are
    /// re-evaluated, which is what makes long sampling chains cheap.
    pub fn exponent_delta(&self, g: &Graph, e: EdgeId) -> Result<i64> {
        self.check_graph(g)?;
        if e.v >= self.n {
            return Err(Error::InvalidArgument(format!(
                "pair {e} out of range for n={}",
                self.n
            )));
        }
        let mut after = *g;
        after.toggle_edge(e);
        let sign = if g.has_edge(e) { -1i64 } else { 1i64 };
        let mut delta = 0i64;
        for (idx, f) in self.features.iter().enumerate() {
            match (&self.plans[idx], &f.kind) {
                (EvalPlan::Indicator { mask }, FeatureKind::LabeledIndicator { vertices, .. }) => {
                    if vertices.contains(&e.u) && vertices.contains(&e.v) {
                        let before = (g.induced_mask(vertices) == *mask) as i64;
                        let now = (after.induced_mask(vertices) == *mask) as i64;
                        delta += f.weight * (now - before);
                    }
                }
                (EvalPlan::Triangles, _) => {
                    // toggling (u,v) changes exactly the triangles through it
                    let common = (g.adj(e.u) & g.adj(e.v)).count_ones() as i64;
                    delta += f.weight * sign * common;
                }
                (EvalPlan::IsoMasks { k, masks }, _) => {
                    if *k >= 2 {
                        let mut scratch = vec![0usize; k - 2];
                        let mut d = 0i64;
                        for_each_combination_excluding(
                            self.n,
                            k - 2,
                            [e.u, e.v],
                            &mut scratch,
                            &mut |others| {
                                let mut vs = Vec::with_capacity(*k);
                                vs.extend_from_slice(others);
                                vs.push(e.u);
                                vs.push(e.v);
                                vs.sort_unstable();
                                let before = masks.contains(&g.induced_mask(&vs)) as i64;
                                let now = masks.contains(&after.induced_mask(&vs)) as i64;
                                d += now - before;
                            },
                        );
                        delta += f.weight * d;
                    }
                }
                _ => unreachable!(),
            }
        }
        Ok(delta)
    }

    /// Replaces every feature's pattern by its complement, keeping weights
    /// and vertex tuples. The resulting model assigns to the complement of
    /// any graph the exponent this model assigns to the graph, so the
    /// partition function is unchanged.
    pub fn complement_model(&self) -> ErgmModel {
        let features = self
            .features
            .iter()
            .map(|f| match &f.kind {
                FeatureKind::LabeledIndicator { pattern, vertices } => Feature::indicator(
                    pattern.complement(),
                    vertices.clone(),
                    f.weight,
                ),
                FeatureKind::IsoCount { pattern } => {
                    Feature::iso_count(pattern.complement(), f.weight)
                }
            })
            .collect();
        ErgmModel::new(self.n, features).expect("complement preserves validity")
    }

    /// Sum of all positive weights and absolute sum of all negative weights.
    pub fn weight_split(&self) -> (i64, i64) {
        let mut plus = 0i64;
        let mut minus = 0i64;
        for f in &self.features {
            if f.weight >= 0 {
                plus += f.weight;
            } else {
                minus += -f.weight;
            }
        }
        (plus, minus)
    }
}

// Calls `f` on every sorted k-subset of 0..n.
fn for_each_combination(n: usize, k: usize, scratch: &mut [usize], f: &mut impl FnMut(&[usize])) {
    fn rec(
        n: usize,
        k: usize,
        start: usize,
        at: usize,
        scratch: &mut [usize],
        f: &mut impl FnMut(&[usize]),
    ) {
        if at == k {
            f(&scratch[..k]);
            return;
        }
        for v in start..=(n - (k - at)) {
            scratch[at] = v;
            rec(n, k, v + 1, at + 1, scratch, f);
        }
    }
    if k > n {
        return;
    }
    if k == 0 {
        f(&[]);
        return;
    }
    rec(n, k, 0, 0, scratch, f);
}

// Calls `f` on every sorted k-subset of 0..n avoiding the two excluded vertices.
fn for_each_combination_excluding(
    n: usize,
    k: usize,
    exclude: [usize; 2],
    scratch: &mut [usize],
    f: &mut impl FnMut(&[usize]),
) {
    let pool: Vec<usize> = (0..n).filter(|v| !exclude.contains(v)).collect();
    fn rec(
        pool: &[usize],
        k: usize,
        start: usize,
        at: usize,
        scratch: &mut [usize],
        f: &mut impl FnMut(&[usize]),
    ) {
        if at == k {
            f(&scratch[..k]);
            return;
        }
        for i in start..=(pool.len() - (k - at)) {
            scratch[at] = pool[i];
            rec(pool, k, i + 1, at + 1, scratch, f);
        }
    }
    if k > pool.len() {
        return;
    }
    if k == 0 {
        f(&[]);
        return;
    }
    rec(&pool, k, 0, 0, scratch, f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{all_pairs, GraphCode};

    #[test]
    fn iso_count_triangles_on_k4() {
        let m = ErgmModel::new(4, vec![Feature::iso_count(shapes::k3(), 1)]).unwrap();
        assert_eq!(m.eval_feature(0, &shapes::complete(4)).unwrap(), 4);
    }

    #[test]
    fn labeled_indicator_is_exact_on_the_tuple() {
        let m = ErgmModel::new(
            3,
            vec![Feature::indicator(shapes::k2(), vec![0, 1], 1)],
        )
        .unwrap();
        let only01 = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let only02 = Graph::from_edges(3, &[(0, 2)]).unwrap();
        assert_eq!(m.eval_feature(0, &only01).unwrap(), 1);
        assert_eq!(m.eval_feature(0, &only02).unwrap(), 0);
    }

    #[test]
    fn density_exponent_examples() {
        let empty = ErgmModel::new(3, vec![]).unwrap();
        assert_eq!(empty.density_exponent(&shapes::k3()).unwrap(), 0);

        // trifree(K3, alpha=4): three edge indicators at 4, triangle count at -16
        let (alpha, beta) = (4i64, -16i64);
        let mut feats: Vec<Feature> = all_pairs(3)
            .map(|e| Feature::indicator(shapes::k2(), vec![e.u, e.v], alpha))
            .collect();
        feats.push(Feature::iso_count(shapes::k3(), beta));
        let m = ErgmModel::new(3, feats).unwrap();
        let two_edges = Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(m.density_exponent(&two_edges).unwrap(), 2 * alpha);
        assert_eq!(m.density_exponent(&shapes::k3()).unwrap(), 3 * alpha + beta);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let m = ErgmModel::new(3, vec![]).unwrap();
        assert!(m.density_exponent(&shapes::k2()).is_err());
        assert!(m.eval_feature(0, &shapes::k3()).is_err());
    }

    #[test]
    fn homogeneous_equals_heterogeneous_triangles() {
        for n in [4usize, 5] {
            let w = 3i64;
            let homog = ErgmModel::new(n, vec![Feature::iso_count(shapes::k3(), w)]).unwrap();
            let mut feats = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    for c in b + 1..n {
                        feats.push(Feature::indicator(shapes::k3(), vec![a, b, c], w));
                    }
                }
            }
            let heter = ErgmModel::new(n, feats).unwrap();
            let m_pairs = crate::graph::pair_count(n);
            let codes: Vec<u64> = if n == 4 {
                (0..1u64 << m_pairs).collect()
            } else {
                (0..1u64 << m_pairs).step_by(19).collect()
            };
            for code in codes {
                let g = Graph::from_code(GraphCode(code), n).unwrap();
                assert_eq!(
                    homog.density_exponent(&g).unwrap(),
                    heter.density_exponent(&g).unwrap()
                );
            }
        }
    }

    #[test]
    fn exponent_delta_matches_recompute() {
        let mut feats: Vec<Feature> = all_pairs(4)
            .map(|e| Feature::indicator(shapes::k2(), vec![e.u, e.v], ((e.u + e.v) as i64) - 2))
            .collect();
        feats.push(Feature::iso_count(shapes::k3(), -5));
        feats.push(Feature::iso_count(shapes::p2(), 2));
        let m = ErgmModel::new(4, feats).unwrap();
        for code in 0..1u64 << 6 {
            let g = Graph::from_code(GraphCode(code), 4).unwrap();
            for e in all_pairs(4) {
                let mut after = g;
                after.toggle_edge(e);
                let direct =
                    m.density_exponent(&after).unwrap() - m.density_exponent(&g).unwrap();
                assert_eq!(m.exponent_delta(&g, e).unwrap(), direct);
            }
        }
    }

    #[test]
    fn complement_model_mirrors_exponents() {
        let feats = vec![
            Feature::indicator(shapes::k2(), vec![0, 2], 3),
            Feature::iso_count(shapes::p2(), -2),
            Feature::iso_count(shapes::k3(), 5),
        ];
        let m = ErgmModel::new(4, feats).unwrap();
        let cm = m.complement_model();
        for code in 0..1u64 << 6 {
            let g = Graph::from_code(GraphCode(code), 4).unwrap();
            assert_eq!(
                m.density_exponent(&g).unwrap(),
                cm.density_exponent(&g.complement()).unwrap()
            );
        }
        // involution
        let back = cm.complement_model();
        assert_eq!(back.features(), m.features());
    }

    #[test]
    fn complement_model_preserves_partition_function() {
        use crate::partition::partition_exhaustive;
        // n = 2: the two states swap roles, Z stays 1 + 2^w
        for w in [-4i64, 0, 3] {
            let m = ErgmModel::new(2, vec![Feature::iso_count(shapes::k2(), w)]).unwrap();
            let cm = m.complement_model();
            match &cm.features()[0].kind {
                FeatureKind::IsoCount { pattern } => assert_eq!(pattern, &shapes::k2_bar()),
                _ => panic!("kind preserved"),
            }
            let z = partition_exhaustive(&m).unwrap().z;
            assert_eq!(z, partition_exhaustive(&cm).unwrap().z);
            assert_eq!(z, crate::dyadic::Dyadic::one() + crate::dyadic::Dyadic::pow2(w));
        }
        // random three-feature model at n = 4
        let m = ErgmModel::new(
            4,
            vec![
                Feature::indicator(shapes::p2(), vec![0, 3, 1], 2),
                Feature::iso_count(shapes::k3(), -3),
                Feature::iso_count(shapes::k2(), 1),
            ],
        )
        .unwrap();
        assert_eq!(
            partition_exhaustive(&m).unwrap().z,
            partition_exhaustive(&m.complement_model()).unwrap().z
        );
    }

    #[test]
    fn weight_split_sums_signs() {
        let m = ErgmModel::new(
            3,
            vec![
                Feature::indicator(shapes::k2(), vec![0, 1], 4),
                Feature::indicator(shapes::k2(), vec![0, 2], -7),
                Feature::iso_count(shapes::k3(), 2),
            ],
        )
        .unwrap();
        assert_eq!(m.weight_split(), (6, 7));
    }
}
