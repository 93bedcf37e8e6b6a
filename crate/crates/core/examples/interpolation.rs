//! Linear interpolation of the weight form in the exponent, and the lower
//! bound it gives for the curvature-condition form.

use hermitian_bergman::df::{interpolation_bound_terms, psi_interpolation_check};
use hermitian_bergman::linalg::{c, max_abs_diff};
use hermitian_bergman::models::product_domain_assemble;
use hermitian_bergman::ChartPoint;

fn main() {
    let p = product_domain_assemble(2).unwrap();
    let z = ChartPoint::from_parts(&[(0.3, -0.4), (1.5, 0.2)]).unwrap();
    let v = [c(0.7, 0.1), c(-0.2, 0.5)];
    let (a, b) = (0.0, 1.0);
    for s in [0.1, 0.25, 0.4] {
        let (lhs, rhs) = psi_interpolation_check(&p, a, b, s, &z).unwrap();
        let (quad, bound, _) = interpolation_bound_terms(&p, a, b, s, &z, &v).unwrap();
        println!("s = {s}: interpolation defect {:.2e}, Z*F Z = {quad:.6} >= {bound:.6}", max_abs_diff(&lhs, &rhs));
    }
}
