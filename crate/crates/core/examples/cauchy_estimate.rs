//! Interior Cauchy estimate `|u'(0)|² ≤ C R^{-4} ∫ |u|²` for monomials.

use hermitian_bergman::bergman::cauchy_estimate_sweep;

fn main() {
    let est = cauchy_estimate_sweep(&[0.1, 0.5, 1.0], 6, 4.0 / std::f64::consts::PI, 96).unwrap();
    println!("constant {:.4}, smallest working constant {:.4}, pass = {}", est.constant, est.measured_constant, est.pass);
    for (r, m, lhs, rhs) in &est.rows {
        println!("  R = {r}, m = {m}: {lhs:.4e} <= {rhs:.4e}");
    }
}
