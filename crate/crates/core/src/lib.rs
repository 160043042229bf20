//! Decide whether a quadratic inequality between products of minors holds
//! for every totally nonnegative matrix of a given shape, certify positive
//! answers combinatorially through feasible noncrossing matchings, and
//! refute negative ones with an explicit matrix built from unit-weight
//! flows in a planar network.
//!
//! The crate is organized around the objects of that criterion:
//!
//! * [`model`] — contexts, proper pairs, families;
//! * [`matching`] — noncrossing matchings, feasibility, the exchange map;
//! * [`decision`] — matching counts and the universality verdict;
//! * [`network`], [`flow`], [`matrix`] — exact flow-generated matrices and
//!   their minors;
//! * [`hat`], [`doubleflow`] — the vertex-split calculus behind the
//!   positive direction;
//! * [`witness`] — counterexample networks for the negative direction;
//! * [`random`] — seeded TNN sampling for property checks.

#![forbid(unsafe_code)]

pub mod decision;
pub mod doubleflow;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod hat;
pub mod matching;
pub mod matrix;
pub mod model;
pub mod network;
pub mod random;
pub mod rational;
pub mod witness;

pub use decision::{canonicalize, check_universal, matching_multiset, Relabeling, Status, Verdict};
pub use doubleflow::{decompose, double_flows, matching_of, switch, Decomposition, DoubleFlow, PathClass};
pub use error::{Error, Result};
pub use flow::{count_flows_capped, enumerate_flows, fg_function, lindstrom_matrix, Flow};
pub use hat::{hat_transform, HatNetwork};
pub use matching::{
    couples_cross, exchange, feasible_matchings, is_feasible_for, is_noncrossing, Couple, Matching,
};
pub use matrix::{combinations, evaluate_inequality, Matrix};
pub use model::{parse_ground, subsets_lex, Context, Family, Ground, ProperPair, Side};
pub use network::{
    build_network, network_from_json, network_to_json, PlanarNetwork, ValidationReport, Vertex,
    VertexId, Violation, Weighting,
};
pub use random::{random_tnn, staircase_network};
pub use rational::{format_rational, parse_rational, rat, Rational};
pub use witness::{build_counterexample, build_witness_network, verify_p1p2, WitnessCertificate};
