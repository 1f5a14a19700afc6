//! Entanglement analysis for bipartite qudit systems.
//!
//! The crate is organized around the workflow of constructing states
//! (Bell-diagonal mixtures and a catalog of named states), testing them
//! against a stack of entanglement criteria and witnesses, and running
//! the quantitative protocols (teleportation bounds, activation, Choi
//! duality, Fisher information) plus Monte Carlo surveys of the
//! Bell-diagonal state space.

pub mod bell;
pub mod criteria;
pub mod error;
pub mod linalg;
pub mod protocols;
pub mod survey;
pub mod tol;
pub mod witnesses;
pub mod zoo;

mod radicals;
mod seesaw;
mod simplexlp;

pub use error::{Error, Result};
pub use linalg::{DenseState, HermitianOperator, SchmidtDecomposition, C64};

/// Toolkit version reported by the CLI and embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
