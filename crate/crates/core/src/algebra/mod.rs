//! Sparse complex polynomials over rings with grouped variables.

mod parse;
mod poly;
mod ring;
mod system;
mod univariate;

pub use parse::{format_coefficient, format_poly, parse_poly};
pub use poly::{MPoly, Monomial};
pub use ring::Ring;
pub use system::{CompiledSystem, PolySystem};
pub use univariate::univariate_roots;

pub type Cx = num_complex::Complex64;

