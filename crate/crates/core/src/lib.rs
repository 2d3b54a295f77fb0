//! Concentration-inequality toolkit for adversarial quantum setups.
//!
//! The crate evaluates one-sided concentration bounds for measurement
//! statistics on states prepared by an adversary, where the only structure
//! available is permutation invariance of the state or independence of the
//! per-round measurements.  It provides:
//!
//! * [`repcore`] — exact combinatorics and small-scale representation
//!   theory: partitions, hook lengths, irrep dimensions, Schur polynomials,
//!   symmetric-group characters, and Schur–Weyl isotypic projectors;
//! * [`coeffs`] — the polynomial prefactors that price the reduction from
//!   adversarial to i.i.d. statistics, in log scale;
//! * [`geometry`] — probability-simplex geometry: KL divergence, halfspace
//!   regions and their `O(1/n)` expansions, and qubit measurement images;
//! * [`optimizer`] — alternating minimization of `D(p‖q)` between convex
//!   regions, with a grid-search oracle for validation;
//! * [`bounds`] — the Azuma, Kato, permutation-invariant, and
//!   i.i.d.-measurement bound evaluators plus the plain Sanov baseline;
//! * [`scenarios`] — two worked examples: a two-projector estimation toy
//!   model and the PBC00 three-state QKD finite-size key rate;
//! * [`verify`] — independent oracles: an exact operator-inequality checker
//!   at desk scale and a dynamic-programming adversary over type classes.
//!
//! Heavy sweeps are data-parallel via rayon; build with
//! `--no-default-features` for a fully sequential build.

pub mod bounds;
pub mod coeffs;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod optimizer;
pub mod repcore;
pub mod scenarios;
pub mod verify;

pub use error::{Error, Result};
