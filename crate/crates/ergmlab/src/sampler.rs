//! Edge-toggle Metropolis-Hastings chain targeting an ERGM distribution,
//! with exact-distribution diagnostics at small n.
//!
//! Proposals toggle a uniformly random vertex pair and are accepted with
//! probability min(1, 2^delta). The acceptance draw uses 64 uniform bits
//! compared against 2^(64+delta), which realizes the probability exactly for
//! -64 <= delta < 0; steeper downhill moves are rejected outright, an error
//! below 2^-64 per step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{pair_count, EdgeId, Graph, GraphCode};
use crate::model::ErgmModel;
use crate::partition::partition_exhaustive;
use crate::reductions::TrifreeParams;

/// Largest n for which run_chain keeps a full visit histogram.
const HISTOGRAM_VERTEX_CAP: usize = 6;

/// Largest n for which exact TV diagnostics are computed.
pub const TV_VERTEX_CAP: usize = 5;

/// A running chain: the current graph, its cached density exponent, and the
/// chain's own seeded RNG.
#[derive(Clone, Debug)]
pub struct ChainState {
    current: Graph,
    current_exponent: i64,
    step_count: u64,
    accepted: u64,
    rng_seed: u64,
    rng: ChaCha8Rng,
}

impl ChainState {
    /// Starts a chain at the empty graph.
    pub fn new(model: &ErgmModel, seed: u64) -> Result<ChainState> {
        let empty = Graph::empty(model.n())?;
        let exponent = model.density_exponent(&empty)?;
        Ok(ChainState {
            current: empty,
            current_exponent: exponent,
            step_count: 0,
            accepted: 0,
            rng_seed: seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn current(&self) -> &Graph {
        &self.current
    }

    pub fn current_exponent(&self) -> i64 {
        self.current_exponent
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    /// One Metropolis-Hastings step; returns whether the proposal was accepted.
    pub fn mh_step(&mut self, model: &ErgmModel) -> Result<bool> {
        let n = model.n();
        let m = pair_count(n);
        if m == 0 {
            self.step_count += 1;
            return Ok(false); // nothing to toggle
        }
        let e = EdgeId::from_index(self.rng.random_range(0..m), n);
        let delta = model.exponent_delta(&self.current, e)?;
        let accept = if delta >= 0 {
            true
        } else if delta >= -64 {
            // 64 uniform bits against 2^(64+delta): exact probability 2^delta
            let r: u64 = self.rng.random();
            r >> (64 + delta) as u32 == 0
        } else {
            false
        };
        if accept {
            self.current.toggle_edge(e);
            self.current_exponent += delta;
            self.accepted += 1;
        }
        self.step_count += 1;
        Ok(accept)
    }
}

/// Diagnostics of one chain run.
#[derive(Clone, Debug, Serialize)]
pub struct SampleReport {
    /// Half the L1 distance between the visit histogram and the exact
    /// distribution; only computed when n is small enough to enumerate.
    pub tv_distance: Option<f64>,
    pub acceptance_rate: f64,
    pub steps: u64,
}

#[derive(Clone, Debug)]
pub struct ChainRun {
    pub report: SampleReport,
    /// Visit counts per graph code, kept when `n <= 6`.
    pub histogram: Option<Vec<u64>>,
    pub final_graph: Graph,
}

/// Runs `steps` MH steps from the empty graph, invoking `visit` on the state
/// after every step.
pub fn run_chain_with(
    model: &ErgmModel,
    steps: u64,
    seed: u64,
    mut visit: impl FnMut(&Graph),
) -> Result<ChainRun> {
    if steps < 1 {
        return Err(Error::InvalidArgument("steps must be >= 1".into()));
    }
    let n = model.n();
    let mut histogram = if n <= HISTOGRAM_VERTEX_CAP {
        Some(vec![0u64; 1 << pair_count(n)])
    } else {
        None
    };
    let mut state = ChainState::new(model, seed)?;
    for _ in 0..steps {
        state.mh_step(model)?;
        if let Some(h) = histogram.as_mut() {
            h[state.current.to_code()?.0 as usize] += 1;
        }
        visit(&state.current);
    }
    let tv_distance = if n <= TV_VERTEX_CAP {
        let hist = histogram.as_ref().expect("histogram kept for small n");
        Some(tv_against_exact(model, hist, steps)?)
    } else {
        None
    };
    Ok(ChainRun {
        report: SampleReport {
            tv_distance,
            acceptance_rate: state.accepted as f64 / steps as f64,
            steps,
        },
        histogram,
        final_graph: state.current,
    })
}

/// Runs a chain and reports diagnostics.
pub fn run_chain(model: &ErgmModel, steps: u64, seed: u64) -> Result<ChainRun> {
    run_chain_with(model, steps, seed, |_| {})
}

/// Exact probabilities per graph code, `2^exponent / Z`, as floats.
pub fn exact_distribution(model: &ErgmModel) -> Result<Vec<f64>> {
    let n = model.n();
    if n > TV_VERTEX_CAP {
        return Err(Error::TooLarge(format!(
            "exact distribution is capped at n = {TV_VERTEX_CAP}"
        )));
    }
    let z = partition_exhaustive(model)?.z;
    let (z_mant, z_exp) = z.frexp();
    let m = pair_count(n);
    (0..1u64 << m)
        .map(|code| {
            let g = Graph::from_code(GraphCode(code), n)?;
            let e = model.density_exponent(&g)?;
            let diff = (e - z_exp).clamp(-2000, 2000) as i32;
            Ok(2f64.powi(diff) / z_mant)
        })
        .collect()
}

fn tv_against_exact(model: &ErgmModel, histogram: &[u64], steps: u64) -> Result<f64> {
    let exact = exact_distribution(model)?;
    let total = steps as f64;
    let mut tv = 0.0;
    for (count, p) in histogram.iter().zip(exact.iter()) {
        tv += (*count as f64 / total - p).abs();
    }
    Ok(tv / 2.0)
}

/// The verification bit of the sampling-hardness argument: 1 iff `sample` is
/// a triangle-free subgraph of the trifree model's source with at least `k`
/// edges.
pub fn theorem4_check(params: &TrifreeParams, sample: &Graph, k: usize) -> bool {
    sample.n() == params.source.n()
        && sample.is_subgraph_of(&params.source)
        && sample.triangle_count() == 0
        && sample.edge_count() >= k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;
    use crate::graph::{all_pairs, shapes};
    use crate::model::Feature;
    use crate::oracles::trifree_census_exhaustive;
    use crate::reductions::build_trifree_ergm;

    fn small_random_model(seed: u64) -> ErgmModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut feats = Vec::new();
        for e in all_pairs(3) {
            feats.push(Feature::indicator(
                shapes::k2(),
                vec![e.u, e.v],
                rng.random_range(-5..=5),
            ));
        }
        if seed % 2 == 0 {
            feats.push(Feature::iso_count(shapes::k3(), rng.random_range(-5..=5)));
        }
        ErgmModel::new(3, feats).unwrap()
    }

    #[test]
    fn uniform_model_accepts_everything() {
        let m = ErgmModel::new(3, vec![]).unwrap();
        let run = run_chain(&m, 5000, 7).unwrap();
        assert_eq!(run.report.acceptance_rate, 1.0);
    }

    #[test]
    fn trifree_deltas_match_the_density_form() {
        let (m, p) = build_trifree_ergm(&shapes::k3(), 4).unwrap();
        // adding an edge of G that closes no triangle: delta = alpha
        let empty = Graph::empty(3).unwrap();
        assert_eq!(
            m.exponent_delta(&empty, EdgeId { u: 0, v: 1 }).unwrap(),
            p.alpha
        );
        // adding the third edge closes a triangle on a G-pair:
        // delta = alpha + beta
        let two = Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(
            m.exponent_delta(&two, EdgeId { u: 1, v: 2 }).unwrap(),
            p.alpha + p.beta
        );

        // with G = P2 the pair (0,2) is not in G: adding it alone costs
        // beta; adding it when both path edges are present also closes a
        // triangle, costing beta twice
        let (m, p) = build_trifree_ergm(&shapes::p2(), 4).unwrap();
        assert_eq!(
            m.exponent_delta(&empty, EdgeId { u: 0, v: 2 }).unwrap(),
            p.beta
        );
        assert_eq!(
            m.exponent_delta(&shapes::p2(), EdgeId { u: 0, v: 2 }).unwrap(),
            2 * p.beta
        );
    }

    #[test]
    fn detailed_balance_exact_on_random_models() {
        // pi(G) P(G->H) = pi(H) P(H->G) for one-edge-apart pairs, as exact
        // dyadics; the uniform proposal factor cancels.
        for seed in 0..10u64 {
            let m = small_random_model(seed);
            for code in 0..8u64 {
                let g = Graph::from_code(GraphCode(code), 3).unwrap();
                for e in all_pairs(3) {
                    let delta = m.exponent_delta(&g, e).unwrap();
                    assert!(delta.abs() <= 64, "test models stay in exact range");
                    let eg = m.density_exponent(&g).unwrap();
                    let mut h = g;
                    h.toggle_edge(e);
                    let eh = m.density_exponent(&h).unwrap();
                    assert_eq!(eh - eg, delta);
                    let lhs = Dyadic::pow2(eg) * Dyadic::pow2((eh - eg).min(0));
                    let rhs = Dyadic::pow2(eh) * Dyadic::pow2((eg - eh).min(0));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn cache_stays_coherent() {
        for seed in 0..5u64 {
            let m = small_random_model(seed);
            let mut state = ChainState::new(&m, seed ^ 0xabcd).unwrap();
            for _ in 0..2000 {
                state.mh_step(&m).unwrap();
            }
            assert_eq!(
                state.current_exponent(),
                m.density_exponent(state.current()).unwrap()
            );
        }
    }

    #[test]
    fn same_seed_same_trajectory() {
        let (m, _) = build_trifree_ergm(&shapes::k3(), 4).unwrap();
        let a = run_chain(&m, 20_000, 99).unwrap();
        let b = run_chain(&m, 20_000, 99).unwrap();
        assert_eq!(a.histogram, b.histogram);
        assert_eq!(a.final_graph, b.final_graph);
    }

    #[test]
    fn uniform_chain_tv_is_small() {
        let m = ErgmModel::new(3, vec![]).unwrap();
        let run = run_chain(&m, 200_000, 3).unwrap();
        let tv = run.report.tv_distance.unwrap();
        assert!(tv < 0.02, "tv = {tv}");
    }

    #[test]
    fn theorem4_check_examples() {
        let (_, p) = build_trifree_ergm(&shapes::k3(), 4).unwrap();
        let two = Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        assert!(theorem4_check(&p, &two, 2));
        assert!(!theorem4_check(&p, &two, 3));
        assert!(!theorem4_check(&p, &shapes::k3(), 1)); // has a triangle
        let (_, p_path) = build_trifree_ergm(&shapes::p2(), 4).unwrap();
        let off = Graph::from_edges(3, &[(0, 2)]).unwrap();
        assert!(!theorem4_check(&p_path, &off, 1)); // edge outside G
    }

    #[test]
    fn concentration_on_maximum_states() {
        // mass outside the maximum triangle-free subgraphs is exponentially
        // small relative to the maximum states, exactly as dyadics
        for g in [
            shapes::k3(),
            shapes::p2(),
            shapes::complete(4),
            shapes::complete(5),
            Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2)]).unwrap(),
        ] {
            let n = g.n();
            let c = pair_count(n) as i64;
            let alpha = c + 1;
            let (m, _) = build_trifree_ergm(&g, alpha).unwrap();
            let z = partition_exhaustive(&m).unwrap().z;
            let census = trifree_census_exhaustive(&g).unwrap();
            let (k, d_k) = census.top();
            let max_mass = Dyadic::from_natural(d_k).mul_pow2(k as i64 * alpha);
            let non_max = z.checked_sub(&max_mass).expect("mass splits");
            // non_max * 2^(k alpha) < 2^(C + (k-1) alpha) * max_mass
            let lhs = non_max.mul_pow2(k as i64 * alpha);
            let rhs = max_mass.mul_pow2(c + (k as i64 - 1) * alpha);
            assert!(lhs < rhs, "concentration fails on {g:?}");
        }
    }
}
