//! Edge-colorings of large complete graphs built from an expansive Z² action.
//!
//! Vertices are a separated set of points; the edge `{x, y}` gets the color of
//! a lattice vector `v` with `|v| <= n` that pushes `T^v x` and `T^v y` apart.
//! Because each `T^v` is a bijection, a monochromatic clique moved by `T^v`
//! stays separated, which bounds its size by the separated-set count at scale
//! one. The [`ramsey`] module gives exact small opposite-Ramsey values to
//! compare against.

pub mod action;
pub mod cliques;
pub mod colorer;
pub mod error;
pub mod metric;
pub mod ramsey;
pub mod rng;
pub mod sepset;

pub use error::{Error, Result};
