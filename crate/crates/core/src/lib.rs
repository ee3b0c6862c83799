//! Projection-free constrained optimization built around conditional-gradient
//! (Frank-Wolfe) updates with adaptive, line-search-free step sizes.
//!
//! The solver family estimates local smoothness from a self-normalized
//! accumulator of past iterate differences instead of requiring a global
//! Lipschitz constant, and pairs it with one of four gradient estimators:
//! exact full gradients, a SPIDER recursion for finite sums, and two
//! momentum-based variance-reduction updates for expectation problems. The
//! crate also ships the constraint-set oracles (nuclear-norm, ℓp, and ℓ1
//! balls), test objectives with exact gradients, classic conditional-gradient
//! baselines, and dataset plumbing for benchmark runs.

pub mod baselines;
pub mod data_io;
pub mod error;
pub mod estimators;
pub mod numerics;
pub mod objectives;
pub mod schedule;
pub mod sets;
pub mod solver;

pub use error::{Error, Result};
pub use numerics::{lp_norm, top_singular_pair, Matrix, PowerIterConfig, Rng, Vector};
pub use objectives::{sample_batch, BatchMode, Dataset, LossKind, Objective};
pub use sets::{FeasibleSet, LmoWorkspace};
pub use solver::{fw_gap, run, RunOutput, SolverConfig, TraceRecord, Variant};
