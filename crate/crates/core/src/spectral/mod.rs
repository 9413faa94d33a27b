//! Support filtration of Hom₊, spectral-sequence pages and the quotient
//! complexes of sphere products.

pub mod consistency;
pub mod filtration;
pub mod pages;
pub mod spheres;

pub use filtration::{support_filtration, FilteredCochainComplex};
pub use pages::{spectral_pages, Pages, SpectralPage};
