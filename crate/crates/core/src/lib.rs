//! Symbolic tractor calculus for conformally invariant quantizations.
//!
//! The crate builds invariant bilinear operators pairing a trace-free symbol
//! with a density, enumerates the critical weights where the construction
//! degenerates, expands everything into metric/Schouten formulas, and checks
//! invariance two independent ways: a linearized symbolic rescaling and an
//! exact polynomial coordinate evaluator.

pub mod coeff;
pub mod critical;
pub mod error;
pub mod expr;
pub mod linsolve;
pub mod rescale;
pub mod tractor;
pub mod poly;

pub use coeff::{Coefficient, Param};
pub use error::{Error, Result};
pub use expr::canon::canonicalize;
pub use expr::{Mode, TensorExpr, TensorTerm};
