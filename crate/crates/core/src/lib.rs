//! A simulation and verification laboratory for the Mermin device.
//!
//! The crate computes quantum (Bell-spin-state) and classical
//! (instruction-set) correlation statistics three ways: analytically, by
//! exhaustive enumeration, and by seeded Monte Carlo. On top of that it
//! verifies that spin-angular-momentum conservation holds exactly for
//! aligned measurements and only on average for unaligned ones, and tests
//! elliptope membership of correlation triples.
//!
//! Module map:
//! - [`spin_algebra`]: exact 2x2 / 4x4 complex linear algebra (Pauli
//!   matrices, direction operators, SU(2) rotations, tensor products,
//!   expectation values).
//! - [`bell_states`]: the four Bell states, closed-form correlations,
//!   Born-rule joint distributions, invariances, basis changes.
//! - [`quantum_sampler`]: seeded, counter-based Monte Carlo trial logs.
//! - [`classical_lhv`]: the eight instruction sets, exact enumeration,
//!   the Bell bound, raffle sampling.
//! - [`conservation`]: outcome partitions, conditional averages,
//!   correlation reconstruction, ensembles, elliptope checks.
//! - [`io`]: JSONL/CSV trial logs, run manifests, summary tables.
//! - [`checks`]: the one-shot invariant suite behind `mermin check`.

pub mod bell_states;
pub mod checks;
pub mod classical_lhv;
pub mod conservation;
pub mod io;
pub mod quantum_sampler;
pub mod rng;
pub mod spin_algebra;
