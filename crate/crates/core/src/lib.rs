//! Exact diagonalization and Bethe-type quantization for XXZ qubit chains
//! with a single detuned site, in the one- and two-excitation sectors.

pub mod analysis;
pub mod analytic;
pub mod chain;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod experiments;
pub mod matrix;
pub mod output;
pub mod poly;
pub mod quantization;

pub use chain::{Boundary, ChainSpec, HamiltonianMatrix, SectorBasis, SiteTuple};
pub use error::{Error, Result};
