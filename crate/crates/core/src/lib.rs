//! Linking numbers of curves in R³ and holomorphic linking of complex
//! curves in C³, each computed by a kernel double integral, a closed form
//! for lines, and (for C³) a residue sum over curve–surface intersections.

pub mod error;
pub mod gauss;
pub mod geometry;
pub mod holo;
pub mod poly;
pub mod quadrature;
pub mod residue;

pub use error::{Error, Result};
pub use num_complex::Complex64;
