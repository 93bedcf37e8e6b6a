//! Numerical verification toolkit for Hermitian geometry and weighted
//! Bergman-projection estimates.
//!
//! The crate computes Chern connection data (torsion, curvature trace,
//! torsion norm form) for chart-local metrics, checks the
//! Diederich-Fornæss-type curvature inequality on sampled domains, verifies
//! the twisted Bochner-Kodaira-Morrey-Kohn-Hörmander identity by quadrature,
//! and runs weighted Bergman-projection experiments on planar domains.

pub mod bergman;
pub mod config;
pub mod df;
pub mod error;
pub mod fd;
pub mod field;
pub mod geometry;
pub mod linalg;
pub mod metric;
pub mod models;
pub mod forms;
pub mod point;
pub mod quadrature;
pub mod report;
pub mod runner;

pub use error::{Error, Result};
pub use field::{DerivMode, ScalarField};
pub use metric::MetricField;
pub use point::ChartPoint;
