//! Graph homomorphism complexes and their algebraic topology.
//!
//! `graph` holds finite graphs and their maps, `complex` builds the cell
//! complexes Hom(G,H) and Hom₊(G,H), `algebra` computes exact (co)homology,
//! `equivariant` handles ℤ₂-actions and Stiefel-Whitney heights and
//! `spectral` computes the support-filtration spectral sequence.

pub mod algebra;
pub mod complex;
pub mod equivariant;
mod error;
pub mod graph;
pub mod spectral;

pub use error::{Error, Result};
