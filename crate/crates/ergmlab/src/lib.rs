//! Exact computation and reduction toolkit for exponential random graph
//! models with integer weights.
//!
//! Densities are powers of two, so partition functions live in the exact
//! dyadic numbers and nothing here ever rounds. The crate provides:
//!
//! * [`graph`] — bitset graphs up to 64 vertices with triangle counting,
//!   induced subgraphs, small-graph isomorphism, and an edge-subset code.
//! * [`dyadic`] — exact `M * 2^-s` arithmetic and base-`2^alpha` digit
//!   extraction.
//! * [`model`] — ERGMs as weighted labeled-indicator and
//!   isomorphism-count features, with exact density exponents.
//! * [`partition`] — exhaustive enumeration, the closed-form two-vertex
//!   product formula, and the digit decoder that reads a triangle-free
//!   census out of a partition function.
//! * [`reductions`] — the trifree model, the inapproximability gap
//!   instance, the snub gadget with its matching bijection, the #MATCHING
//!   model, feature replacement with window recovery, and the two-vertex
//!   dichotomy.
//! * [`oracles`] — independent brute-force ground truth for every
//!   construction above.
//! * [`sampler`] — a seeded edge-toggle Metropolis-Hastings chain with
//!   exact-distribution diagnostics.
//! * [`acceptance`] — the end-to-end verification suite, runnable from
//!   tests or the CLI.

pub mod acceptance;
pub mod dyadic;
pub mod error;
pub mod files;
pub mod graph;
pub mod model;
pub mod oracles;
pub mod partition;
pub mod reductions;
pub mod sampler;

pub use dyadic::{DigitVector, Dyadic};
pub use error::{Error, Result};
pub use graph::{EdgeId, Graph, GraphCode};
pub use model::{ErgmModel, Feature, FeatureKind};
pub use partition::PartitionResult;
