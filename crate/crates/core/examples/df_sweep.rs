//! Minimum eigenvalue of the curvature-condition form over the product
//! domain (unit disc times a Hopf chart) for a grid of exponents.

use hermitian_bergman::df::df_sweep;
use hermitian_bergman::models::{product_domain_assemble, product_sample};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let problem = product_domain_assemble(2).unwrap();
    let sample = product_sample(2, 11, 10, 1e-3, &mut rng).unwrap();
    let etas: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let report = df_sweep(&problem, &sample, &etas, None).unwrap();
    println!("{} sample points, psd tolerance {:.1e}", report.sample_size, report.psd_tol);
    for row in &report.rows {
        println!("{row:?}");
    }
    println!("all pass: {}", report.all_pass());
}
