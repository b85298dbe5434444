//! Local-unitary invariants of multi-qubit pure states built from the
//! cumulants of a nilpotent state algebra.
//!
//! * [`algebra`]: the commutative algebra whose elements are unnormalised
//!   states, with product, inverse, log and exp.
//! * [`cumulant`]: cumulant polynomials, set partitions and raising operators.
//! * [`invariant`]: closed-form twirled invariants, Sudbery's invariants and
//!   the Jacobian-rank independence check.
//! * [`haar`]: Haar sampling on SU(2) and a Monte-Carlo twirl oracle.
//! * [`mixed`]: density matrices, the mixed-state lift and the trace-norm
//!   cumulant invariant.
//! * [`transvectant`]: covariants, transvection and the hyperdeterminant.
//! * [`states`], [`io`], [`cli`], [`battery`]: generators, file formats,
//!   command dispatch and the self-test battery.

pub mod algebra;
pub mod battery;
pub mod cli;
pub mod cumulant;
pub mod error;
pub mod haar;
pub mod invariant;
pub mod io;
pub mod mixed;
pub mod states;
pub mod transvectant;

pub use algebra::{AlgebraElement, MultiIndex};
pub use error::{Error, Result};
