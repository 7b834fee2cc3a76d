//! Simulation toolkit for a bit-by-bit subdivision search over an unsorted
//! list, where membership of the target in a sublist is decided by a chain of
//! non-unitary measurement operators acting on a one-qubit flag register.
//!
//! The crate is organized in four layers:
//!
//! - [`statevec`]: dense state vectors for the index register plus flag
//!   qubit, with the handful of operations the search needs (prefix
//!   preparation, partial Hadamard, oracle, selective single-qubit operators,
//!   computational-basis measurement).
//! - [`differentiator`]: construction and execution of the measurement chain
//!   that tells the nearly parallel flag states apart: the discriminating
//!   matrix `D`, its SVD, diagonal root, normalization into a complete
//!   measurement pair `(M0, M1)`, and the `R^T, M0 x v, Q` chain itself.
//! - [`subdiv`]: the search driver that fixes index bits one at a time,
//!   using one oracle query plus a differentiator chain per membership test,
//!   with configurable policies for stochastic chain failures.
//! - [`analysis`]: cost models and experiments, from closed-form versus
//!   Monte Carlo chain success probability and expected restarts to baseline
//!   query counts and the joint-register experiment that drops the
//!   product-state assumption.

pub mod analysis;
pub mod differentiator;
pub mod error;
pub mod mat2;
pub mod sigfmt;
pub mod statevec;
pub mod subdiv;

pub use error::{Error, Result};
pub use mat2::Mat2;
pub use statevec::{OracleSpec, QuantumState};
