//! Exact computations for group actions on simplicial trees.
pub mod error;
pub mod folds;
pub mod free_group;
pub mod persistence;
pub mod projection_complex;
pub mod report;
pub mod suite;
pub mod tree_geometry;

pub use error::{Error, Result};
