//! Planar weighted Bergman projections, proxy norms, a Cauchy-transform
//! `∂̄` solver and the twisted solution operator.

pub mod basis;
pub mod cauchy;
pub mod domain;
pub mod experiment;
pub mod twisted;

pub use basis::{gram_and_project, sobolev_proxy_warning, weighted_norm, GridFn, HoloBasis, ProjectionResult, WeightedSpace};
pub use cauchy::{cauchy_solve, cauchy_solve_masses, dbar_residual};
pub use domain::{Comparability, Flavor, Grid, PlanarDomain};
pub use experiment::{
    b_for_s, boas_straube_defect, cauchy_estimate_sweep, detraz_ratio, detraz_sweep, operator_bound,
    operator_bound_experiment, projection_laws, ratio_change, test_family, BoundReport, RatioChange, TestFunction,
};
pub use twisted::{solution_bound, twisted_solution, Kappa, TwistedSolution};
