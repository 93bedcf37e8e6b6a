//! Curvature trace and torsion norm form of the Hopf metric `|z|^{-2} I`,
//! compared with their closed forms, plus the relative eigenvalues.

use hermitian_bergman::geometry::{curvature_trace, torsion_norm_form};
use hermitian_bergman::linalg::{cholesky_lower, hermitian_eigenvalues, lower_inverse, max_abs_diff, CMat};
use hermitian_bergman::metric::eval_checked;
use hermitian_bergman::models::{hopf_closed_forms, HopfChart, HopfMetric};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn relative(form: &CMat, g: &CMat) -> Vec<f64> {
    let li = lower_inverse(&cholesky_lower(g).unwrap());
    let mut v = hermitian_eigenvalues(&(&li * form * li.adjoint()));
    v.sort_by(f64::total_cmp);
    v
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [2, 3] {
        let g = HopfMetric::new(n);
        let z = HopfChart::standard(n).sample(&mut rng);
        let theta = curvature_trace(&g, &z).unwrap();
        let q = torsion_norm_form(&g, &z).unwrap();
        let (ct, cq) = hopf_closed_forms(n, &z).unwrap();
        let gz = eval_checked(&g, &z).unwrap();
        println!("n = {n}, z = {:?}", z.coords());
        println!("  |Θ - closed form| = {:.2e}", max_abs_diff(&theta, &ct));
        println!("  |Q - closed form| = {:.2e}", max_abs_diff(&q, &cq));
        println!("  eig(Θ) = {:?}", relative(&theta, &gz));
        println!("  eig(Q) = {:?}", relative(&q, &gz));
    }
}
