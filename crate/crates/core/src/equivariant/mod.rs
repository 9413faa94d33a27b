//! ℤ₂-actions on complexes, quotients and Stiefel-Whitney heights.

pub mod action;
pub mod bound;
pub mod quotient;
pub mod sw;

pub use action::{induced_involution, CellInvolution};
pub use quotient::{cellular_quotient, quotient, Cover, DeltaComplex, Quotient};
pub use sw::{sw_class, sw_height, sw_model, Certificate, Route, SwClass, SwModel, SwReport};
