//! Recovery of planted subgraphs through the Schur-Horn orbitope
//! relaxation: graph families, spectral tools, orbitope projections, the
//! eigenspace invariants behind recovery guarantees, an ADMM solver, dual
//! certificates and seeded experiment sweeps.

pub mod certificate;
pub mod error;
pub mod graphs;
pub mod harness;
pub mod invariants;
pub mod orbitope;
pub mod sdpa;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
