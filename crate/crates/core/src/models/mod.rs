//! Built-in metrics, model domains and closed forms.

pub mod domains;
pub mod hopf;
pub mod metrics;
pub mod square;

pub use domains::{
    box_grid_sample, product_domain_assemble, product_sample, product_shell, rank_one_of, square_grid, AnnulusDefining,
    BallDefining,
};
pub use hopf::{hopf_closed_forms, w1, HopfChart};
pub use metrics::{Conformal, ConstantMetric, Euclidean, FubiniStudy, HopfMetric, LinearPullback, ProductMetric};
pub use square::{square_defining, square_distance, SquareDefining};
