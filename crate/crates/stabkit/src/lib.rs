//! Stabbing axis-parallel rectangles with horizontal/vertical lines: exact LP
//! relaxation, threshold-rounding algorithms, ε-net machinery, and certification
//! of the analysis constants behind the approximation guarantees.
//!
//! The crate is organized bottom-up:
//!
//! * [`rational`] — exact rational scalar (`Rat`) with canonical parsing/formatting.
//! * [`model`] — geometric data model: rectangles, candidate lines, instances,
//!   interval systems, projections, and clique discretization.
//! * [`lp`] — dense two-phase simplex over exact rationals or floats, the covering
//!   relaxation builder, and solution verification.
//! * [`exact`] — exact polynomial solvers: interval hitting DP, ε-nets (optimal and
//!   randomized), net-weight profiles, shifted partitions, and a branch-and-bound
//!   integral oracle.
//! * [`rounding`] — the four rounding schemes (half-split, sorted-threshold,
//!   dual-threshold segment rounding, net rounding for unit squares), each with
//!   randomized and derandomized modes.
//! * [`analysis`] — certification of the analysis constants: the μ̄ integral and
//!   its maximum, the hard-profile lower bound γ(τx,τy), dual interval-family
//!   certificates, the level recurrence, and randomized configuration audits.
//! * [`harness`] — instance generators, the hard LP-value profile, and the gap
//!   experiment runner with CSV/JSON reports.

pub mod analysis;
pub mod exact;
pub mod harness;
pub mod lp;
pub mod model;
pub mod rational;
pub mod rounding;

pub use rational::Rat;
