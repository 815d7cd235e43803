//! Numerical homotopy continuation with u-generation.
//!
//! The crate intersects witness sets of projective and multiprojective
//! varieties with hypersurfaces by deforming a structured start hypersurface
//! on the cone over the variety, and includes a regeneration baseline, a
//! cascade driver and the benchmark families used to compare the two.

pub mod algebra;
pub mod bench;
pub mod error;
pub mod io;
pub mod multiproj;
pub mod regen;
pub mod rng;
pub mod tracker;
pub mod ugen;
pub mod witness;

pub use algebra::{Cx, MPoly, PolySystem, Ring};
pub use error::{Error, Result};
