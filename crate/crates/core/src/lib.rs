//! Maximal hard-core model on the triangular lattice.
//!
//! Counting kernels for maximal independent sets, finite-volume Gibbs measures
//! with colored boundary conditions, contour machinery, periodic ground states
//! and exact Delaunay audits.

pub mod codec;
pub mod configspace;
pub mod contours;
pub mod counting;
pub mod delaunay;
pub mod error;
pub mod gibbs;
pub mod groundstates;
pub mod lattice;

pub use configspace::Configuration;
pub use error::{Error, Result};
pub use lattice::{Color, Face, Orientation, Region, Site};
