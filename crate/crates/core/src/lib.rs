//! Cusp excursions of geodesics on arithmetic hyperbolic surfaces.
//!
//! Exact cusp arithmetic on the modular group, continued-fraction spectra,
//! cusp counting, nested Cantor constructions and the self-similar covering
//! used for Hausdorff dimension bounds of divergent diagonal geodesics.
#![no_std]

extern crate alloc;

pub mod arith;
pub mod cantor;
pub mod counting;
pub mod covering;
mod error;
pub mod excursion;
pub mod geometry;
pub mod lattice;
pub mod product;
pub mod real;

pub use error::{Error, Result};
pub use excursion::{Direction, ExcursionRecord, Spectrum};
pub use lattice::Cusp;
