//! Parameterized approximation schemes for fair maximum coverage and
//! cardinality-constrained MaxSAT.
//!
//! The crate is organised around [`CoverageInstance`], a bipartite
//! set/element structure with colored elements and per-color demands:
//!
//! * [`freqd`] solves instances whose elements lie in at most `d` sets, by
//!   bucketing plus probabilistic branching, with an optional matroid
//!   constraint on the chosen sets.
//! * [`kddfree`] solves instances whose incidence graph has no `K_{d,d}`,
//!   using color splitting, label coding and high-degree-set branching.
//! * [`reduction`] turns a colored CNF formula into a coverage instance by a
//!   random partial assignment and lifts coverage solutions back.
//! * [`exact`] holds brute-force oracles used as ground truth.
//! * [`matroid`] provides independence oracles with truncation and contraction.

pub mod error;
pub mod exact;
pub mod formats;
pub mod freqd;
pub mod generate;
pub mod instance;
pub mod kddfree;
pub mod matroid;
pub mod rational;
pub mod reduction;
mod seed;

pub use error::{Error, Result};
pub use instance::{
    approx_factor, Clause, CnfInstance, ColorId, CoverageInstance, CoverageVector, ElemId, Literal, SetId,
};
pub use matroid::{MatroidOracle, MatroidSpec, RepresentativeSubset};
pub use rational::{format_rational, parse_rational, Rational};
pub use seed::{derive_seed, rng_from_seed, SolverRng};
