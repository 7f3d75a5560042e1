//! Topological bookkeeping for Lagrangian-sphere surgeries on symplectic
//! 6-manifolds.
//!
//! The crate is split by concern:
//!
//! - [`lattice`]: exact rationals, matrices, symmetric 3-tensors, polynomials in ε
//! - [`profile`]: cohomological data of a closed 6-manifold and Kähler-obstruction tests
//! - [`surgery`]: blow-ups of nodes, conifold and triple-point transitions, A_n chains
//! - [`monodromy`]: SL(2,Z) Dehn-twist words for elliptic fibrations
//! - [`fibre`]: fibre products of fibred surfaces, Milnor numbers, sphere graphs
//! - [`local`]: floating-point checks of the explicit local coordinate maps
//! - [`fixtures`]: the named example data shipped under `fixtures/`
//! - [`report`]: command drivers producing structured reports for the CLI

pub mod fibre;
pub mod fixtures;
pub mod lattice;
pub mod local;
pub mod monodromy;
pub mod profile;
pub mod report;
pub mod surgery;

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}: matrix is {1}x{2}, expected square")]
    NotSquare(String, usize, usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("triple product t{0:?} is unknown")]
    UnknownProducts([usize; 3]),
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("missing field: {0}")]
    Missing(&'static str),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("unknown rule {0:?}")]
    UnknownRule(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
