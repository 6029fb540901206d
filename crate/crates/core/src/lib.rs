//! Weighted graph Laplacians on finite and infinite graphs.
//!
//! A weighted graph is a vertex set `V` together with symmetric edge weights
//! `b`, a killing term `c >= 0` and a vertex measure `m > 0`. This crate
//! builds the associated Laplacians, restricts them to finite Dirichlet
//! sections of (possibly infinite) graph families and computes:
//!
//! * isoperimetric constants and the two-sided eigenvalue bounds they imply,
//! * estimates of the bottom of the essential spectrum by exhaustion,
//! * the heat content `M_t`, the largest bounded `alpha`-harmonic function and
//!   a stochastic completeness verdict,
//! * Monte Carlo simulation of the associated jump process with killing and
//!   explosion detection.
//!
//! Data-parallel loops (subset enumeration, trajectory batches, radius
//! sweeps) run on rayon when the `parallel` feature is enabled (default) and
//! fall back to plain iterators otherwise.

pub mod corpus;
pub mod error;
pub mod family;
pub mod graph;
pub mod heat;
pub mod io;
pub mod isoperimetry;
pub mod linalg;
pub mod markov;
pub mod par;
pub mod section;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use family::{GraphFamily, Law, MeasureLaw};
pub use graph::{GraphInput, Violation, WeightedGraph};
pub use section::{DirichletSection, Exhaustion};

/// Absolute tolerance used for floating point comparisons unless an
/// operation states otherwise.
pub const TOL: f64 = 1e-12;

/// Largest section handled with dense eigendecompositions.
pub const DENSE_CAP: usize = 3000;
