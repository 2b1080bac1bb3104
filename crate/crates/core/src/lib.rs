//! Statistical assertions for debugging quantum circuits.
//!
//! A small dense state-vector simulator runs circuits that carry assertion
//! checkpoints. At each checkpoint the circuit prefix is sampled and the
//! measurement distribution is tested for a classical state (chi-square
//! against a single peak), a uniform superposition (chi-square goodness of
//! fit) or a product state between two qubit groups (Fisher's exact test on
//! 2×2 contingency tables, a Monte Carlo permutation test otherwise).

pub mod assertions;
pub mod cli;
pub mod error;
pub mod rng;
pub mod sampling;
pub mod sim;
pub mod stats;

pub use assertions::{AssertionDirective, AssertionKind, AssertionResult, Check, EvaluationConfig};
pub use error::{Error, Result};
pub use sampling::MeasurementDistribution;
pub use sim::{Circuit, GateKind, GateOp, Item, StateVector};
pub use stats::{ContingencyTable, PValue, TestMethod};
