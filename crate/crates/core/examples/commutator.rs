//! The weighted commutator identity for affine vector fields, checked at a
//! point for three weights.

use hermitian_bergman::field::{AffineRe, Constant, NormSquared, ScalarField};
use hermitian_bergman::forms::{commutator_check, AffineVectorField};
use hermitian_bergman::linalg::{c, cr};
use hermitian_bergman::models::HopfMetric;
use hermitian_bergman::ChartPoint;

fn main() {
    let g = HopfMetric::new(2);
    let z = ChartPoint::from_parts(&[(0.5, 0.1), (-0.2, 0.4)]).unwrap();
    let mut z1 = AffineVectorField::euler(2);
    z1.b = vec![c(0.3, -0.1), cr(0.2)];
    let z2 = AffineVectorField::coordinate(2, 1);
    let phi = NormSquared::new(2);
    let weights: Vec<(&str, Box<dyn ScalarField>)> = vec![
        ("0", Box::new(Constant::new(2, 0.0))),
        ("|z|^2", Box::new(NormSquared::new(2))),
        ("2 Re z1", Box::new(AffineRe::new(vec![cr(2.0), cr(0.0)], 0.0))),
    ];
    for (name, psi) in &weights {
        let (lhs, rhs) = commutator_check(&g, psi.as_ref(), &z1, &z2, &phi, &z).unwrap();
        println!("psi = {name:>7}: lhs = {lhs:.6}, rhs = {rhs:.6}, |diff| = {:.2e}", (lhs - rhs).norm());
    }
}
