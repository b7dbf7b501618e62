//! Numerical toolkit for qubit noise modelled as a perturbed generalized
//! damping (GD) process.
//!
//! The crate is organised around the workflow an experimentalist follows:
//!
//! * [`gd`] builds the continuous-time model (coefficient matrix, Bloch
//!   generator, eigensystem) and its discrete-time channels (Kraus and
//!   Pauli-Liouville forms).
//! * [`estimation`] simulates population-inversion and Ramsey experiments
//!   with SPAM and fits exponential decays to recover Γ1 and Γ2′.
//! * [`rb`] computes randomized-benchmarking observables from a channel and
//!   their ideal GD predictions.
//! * [`diamond`] evaluates the diamond-distance upper bounds and a
//!   multistart numerical oracle for the diamond norm.
//! * [`mc`] is the seeded Monte Carlo harness behind the `gdbench` CLI.
//!
//! Data-parallel loops go through [`parallel`], which uses rayon when the
//! `parallel` feature is enabled and falls back to plain iteration otherwise.

pub mod diamond;
pub mod error;
pub mod estimation;
pub mod gd;
pub mod linalg;
pub mod mc;
pub mod parallel;
pub mod rb;

pub use diamond::{BoundReport, DiamondOracle, OracleConfig, OracleResult};
pub use error::{Error, Result};
pub use estimation::{DecaySeries, FitResult, SpamParams};
pub use gd::{
    BlochGenerator, EigenSystem, KrausSet, LiouvilleChannel, PauliMap, PerturbedGdParams,
};
pub use rb::RbReport;
