//! Three ways to get at a partition function: exhaustive exact summation
//! over all graphs, the closed-form product formula for two-vertex feature
//! sets, and the digit decoder that reads a triangle-free census out of the
//! integer part of Z.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::dyadic::{integer_part_digits, DigitVector, Dyadic};
use crate::error::{Error, Result};
use crate::graph::{all_pairs, pair_count, EdgeId, Graph, GraphCode};
use crate::model::{ErgmModel, FeatureKind};

/// Default cap on exhaustive enumeration: 2^28 states at n = 8. This is the
/// desk-scale boundary; everything past it is what the hardness results are
/// about.
pub const DEFAULT_ENUM_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionResult {
    /// Exact partition function; positive, since the empty graph always
    /// contributes at least one term.
    pub z: Dyadic,
    /// States actually enumerated: `2^C(n,2)` for the exhaustive engine,
    /// 0 for the closed-form two-vertex engine.
    pub states_enumerated: u64,
}

/// Exact `Z = sum_G 2^density_exponent(G)` over all graphs on the model's
/// vertex set, by enumerating every edge-subset code.
///
/// The code range is split across rayon workers; each worker accumulates an
/// exponent histogram and the merged histogram is materialized into one
/// dyadic. Exactness makes the result bit-identical for any worker count.
pub fn partition_exhaustive(model: &ErgmModel) -> Result<PartitionResult> {
    partition_exhaustive_with_cap(model, DEFAULT_ENUM_CAP)
}

pub fn partition_exhaustive_with_cap(model: &ErgmModel, cap: usize) -> Result<PartitionResult> {
    let n = model.n();
    if n > cap {
        return Err(Error::TooLarge(format!(
            "exhaustive enumeration is capped at n={cap}, model has n={n}"
        )));
    }
    let m = pair_count(n);
    let total: u64 = 1u64 << m;
    let hist = (0..total)
        .into_par_iter()
        .fold(BTreeMap::<i64, u64>::new, |mut h, code| {
            let g = Graph::from_code(GraphCode(code), n).expect("code in range");
            let e = model.density_exponent(&g).expect("sizes match");
            *h.entry(e).or_insert(0) += 1;
            h
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (e, c) in b {
                *a.entry(e).or_insert(0) += c;
            }
            a
        });
    Ok(PartitionResult {
        z: dyadic_from_exponent_histogram(&hist),
        states_enumerated: total,
    })
}

// sum of count * 2^exponent over the histogram, exactly
fn dyadic_from_exponent_histogram(hist: &BTreeMap<i64, u64>) -> Dyadic {
    let Some((&min_e, _)) = hist.iter().next() else {
        return Dyadic::zero();
    };
    let shift = if min_e < 0 { min_e.unsigned_abs() } else { 0 };
    let mut acc = BigUint::zero();
    for (&e, &c) in hist {
        acc += BigUint::from(c) << (e + shift as i64) as u64;
    }
    Dyadic::new(acc, shift)
}

/// Per-pair aggregated weights of a two-vertex model, following the
/// edge / non-edge split of the polynomial algorithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoVertexTerm {
    pub edge: EdgeId,
    /// Sum of weights that reward this pair being an edge.
    pub x: i64,
    /// Sum of weights that reward this pair being a non-edge.
    pub x_bar: i64,
    /// `x - x_bar`.
    pub x_prime: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoVertexTerms {
    pub terms: Vec<TwoVertexTerm>,
    /// `Y = prod_e 2^x_bar_e`.
    pub y: Dyadic,
    /// Exponent contributed by features on fewer than two vertices, which
    /// are constant across all graphs.
    pub const_exponent: i64,
}

/// Aggregates a model whose feature patterns all have at most two vertices.
pub fn two_vertex_terms(model: &ErgmModel) -> Result<TwoVertexTerms> {
    let n = model.n();
    let m = pair_count(n);
    let mut x = vec![0i64; m];
    let mut x_bar = vec![0i64; m];
    let mut const_exponent = 0i64;
    for (idx, f) in model.features().iter().enumerate() {
        let pat = f.pattern();
        if pat.n() > 2 {
            return Err(Error::UnsupportedFeature(format!(
                "feature {idx} has a {}-vertex pattern; the two-vertex engine needs <= 2",
                pat.n()
            )));
        }
        let is_edge_pattern = pat.n() == 2 && pat.edge_count() == 1;
        match &f.kind {
            FeatureKind::LabeledIndicator { vertices, .. } => match pat.n() {
                2 => {
                    let e = EdgeId::new(vertices[0], vertices[1])?;
                    if is_edge_pattern {
                        x[e.index(n)] += f.weight;
                    } else {
                        x_bar[e.index(n)] += f.weight;
                    }
                }
                // 0- and 1-vertex indicators are identically true
                _ => const_exponent += f.weight,
            },
            FeatureKind::IsoCount { .. } => match pat.n() {
                2 => {
                    // one copy per pair, edge or non-edge
                    for k in 0..m {
                        if is_edge_pattern {
                            x[k] += f.weight;
                        } else {
                            x_bar[k] += f.weight;
                        }
                    }
                }
                1 => const_exponent += f.weight * n as i64,
                _ => const_exponent += f.weight,
            },
        }
    }
    let y = Dyadic::pow2(x_bar.iter().sum());
    let terms = all_pairs(n)
        .enumerate()
        .map(|(k, edge)| TwoVertexTerm {
            edge,
            x: x[k],
            x_bar: x_bar[k],
            x_prime: x[k] - x_bar[k],
        })
        .collect();
    Ok(TwoVertexTerms {
        terms,
        y,
        const_exponent,
    })
}

/// Closed-form exact `Z = 2^const * Y * prod_e (1 + 2^x'_e)` for models whose
/// feature patterns all have at most two vertices.
pub fn partition_two_vertex(model: &ErgmModel) -> Result<PartitionResult> {
    let t = two_vertex_terms(model)?;
    let mut z = t.y.mul_pow2(t.const_exponent);
    for term in &t.terms {
        z = z * (Dyadic::one() + Dyadic::pow2(term.x_prime));
    }
    Ok(PartitionResult {
        z,
        states_enumerated: 0,
    })
}

/// Reads the digits `d_0 ... d_C(n,2)` of `floor(z)` in base `2^alpha`.
///
/// For `z` the partition function of a trifree model built from `G` with
/// this `alpha`, digit `d_i` is the number of `i`-edge triangle-free
/// subgraphs of `G`. Requires `alpha > C(n,2)`, which is what keeps the
/// digits carry-free.
pub fn decode_trifree_digits(z: &Dyadic, n: usize, alpha: u64) -> Result<DigitVector> {
    let m = pair_count(n) as u64;
    if alpha <= m {
        return Err(Error::PreconditionViolated(format!(
            "alpha = {alpha} must exceed C(n,2) = {m}"
        )));
    }
    integer_part_digits(z, alpha, m as usize)
}

/// `sum_{i >= k} d_i`: the number of census entries at or above `k`.
/// Indices past the last digit contribute zero.
pub fn count_at_least_k(d: &DigitVector, k: usize) -> BigUint {
    d.digits.iter().skip(k).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::shapes;
    use crate::model::Feature;
    use crate::reductions::build_trifree_ergm;

    #[test]
    fn exhaustive_tiny_models() {
        let m = ErgmModel::new(2, vec![Feature::iso_count(shapes::k2(), 3)]).unwrap();
        let r = partition_exhaustive(&m).unwrap();
        assert_eq!(r.z, Dyadic::from_natural(9u32));
        assert_eq!(r.states_enumerated, 2);

        let m = ErgmModel::new(2, vec![]).unwrap();
        assert_eq!(partition_exhaustive(&m).unwrap().z, Dyadic::from_natural(2u32));
    }

    #[test]
    fn exhaustive_trifree_k3_is_817_and_a_sixteenth() {
        let (m, p) = build_trifree_ergm(&shapes::k3(), 4).unwrap();
        assert_eq!(p.beta, -16);
        let r = partition_exhaustive(&m).unwrap();
        let expected = Dyadic::from_natural(817u32) + Dyadic::pow2(-4);
        assert_eq!(r.z, expected);
        assert_eq!(r.states_enumerated, 8);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let m = ErgmModel::new(9, vec![]).unwrap();
        assert!(matches!(
            partition_exhaustive(&m),
            Err(Error::TooLarge(_))
        ));
        assert!(partition_exhaustive_with_cap(&ErgmModel::new(3, vec![]).unwrap(), 3).is_ok());
    }

    #[test]
    fn two_vertex_examples() {
        for w in [-3i64, 0, 5] {
            let m = ErgmModel::new(2, vec![Feature::iso_count(shapes::k2(), w)]).unwrap();
            let r = partition_two_vertex(&m).unwrap();
            assert_eq!(r.z, Dyadic::one() + Dyadic::pow2(w));
        }
        let m = ErgmModel::new(3, vec![]).unwrap();
        assert_eq!(
            partition_two_vertex(&m).unwrap().z,
            Dyadic::from_natural(8u32)
        );
        let m = ErgmModel::new(3, vec![Feature::iso_count(shapes::k3(), 1)]).unwrap();
        assert!(matches!(
            partition_two_vertex(&m),
            Err(Error::UnsupportedFeature(_))
        ));
    }

    #[test]
    fn two_vertex_terms_expose_the_split() {
        let m = ErgmModel::new(
            3,
            vec![
                Feature::indicator(shapes::k2(), vec![0, 1], 4),
                Feature::indicator(shapes::k2_bar(), vec![0, 1], 1),
                Feature::iso_count(shapes::k2(), 2),
                Feature::iso_count(shapes::k2_bar(), -1),
            ],
        )
        .unwrap();
        let t = two_vertex_terms(&m).unwrap();
        let e01 = &t.terms[0];
        assert_eq!((e01.x, e01.x_bar, e01.x_prime), (6, 0, 6));
        let e02 = &t.terms[1];
        assert_eq!((e02.x, e02.x_bar, e02.x_prime), (2, -1, 3));
        for term in &t.terms {
            assert_eq!(term.x_prime, term.x - term.x_bar);
        }
        // x_bar sums: (0,1) has 1 - 1 = 0, the other two pairs have -1 each
        assert_eq!(t.y, Dyadic::pow2(-2));
    }

    #[test]
    fn decode_trifree_examples() {
        let alpha = 4u64;
        for (g, want) in [
            (shapes::k3(), vec![1u32, 3, 3, 0]),
            (shapes::k3_bar(), vec![1, 0, 0, 0]),
            (shapes::p2(), vec![1, 2, 1, 0]),
        ] {
            let (m, p) = build_trifree_ergm(&g, alpha as i64).unwrap();
            let z = partition_exhaustive(&m).unwrap().z;
            let d = decode_trifree_digits(&z, 3, p.alpha as u64).unwrap();
            let want: Vec<BigUint> = want.into_iter().map(BigUint::from).collect();
            assert_eq!(d.digits, want);
        }
        assert!(matches!(
            decode_trifree_digits(&Dyadic::one(), 3, 3),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn count_at_least_k_examples() {
        let d = DigitVector {
            base_exponent: 4,
            digits: [1u32, 3, 3, 0].iter().map(|&x| x.into()).collect(),
        };
        assert_eq!(count_at_least_k(&d, 0), BigUint::from(7u32));
        assert_eq!(count_at_least_k(&d, 2), BigUint::from(3u32));
        assert_eq!(count_at_least_k(&d, 4), BigUint::zero());
        assert_eq!(count_at_least_k(&d, 17), BigUint::zero());
    }

    #[test]
    fn parallel_determinism_across_pool_sizes() {
        let (m, _) = build_trifree_ergm(&shapes::complete(4), 7).unwrap();
        let mut results = Vec::new();
        for threads in [1usize, 2, 4] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let r = pool.install(|| partition_exhaustive(&m)).unwrap();
            results.push(r.z);
        }
        assert_eq!(results[0], results[1]);
        assert_eq!(results[1], results[2]);
    }
}
