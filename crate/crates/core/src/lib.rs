//! Bi-objective design of 3D road alignments.
//!
//! A design is a sequence of horizontal intersection points with circular
//! curves plus station elevations along the straight tangents. It is costed
//! against a piecewise-planar terrain for earthwork (cut, fill and unbalanced
//! material) and utility (road length), and the resulting bi-objective problem
//! is solved by weighted sums, direct multisearch, or an evolutionary solver.

pub mod alignment;
pub mod cli;
pub mod config;
pub mod constraints;
pub mod costing;
pub mod error;
pub mod geom;
pub mod moo;
pub mod terrain;

pub use error::{Error, Result};
