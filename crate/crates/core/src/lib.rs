//! Two-prover one-round games and their precursors.
//!
//! The crate builds games (two-prover, multi-round single-prover, three-query
//! PCP), transforms them (oracularization with and without a dummy question,
//! parallel repetition, 1-in-3 3SAT to PCP), computes their values (classical,
//! no-signaling through an exact LP, entangled lower bounds through see-saw),
//! and runs the two strategy-rounding constructions with every intermediate
//! inequality reported.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod instances;
pub mod io;
pub mod limits;
pub mod lp;
pub mod model;
pub mod quantum;
pub mod rounding;
pub mod scalar;
pub mod suites;
pub mod transforms;
pub mod values;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar, ScalarMode};
