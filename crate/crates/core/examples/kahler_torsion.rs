//! Torsion of several metrics and the finite-difference check of `dω = τ ∧ ω`.

use hermitian_bergman::geometry::{kahler_differential, torsion_coeffs};
use hermitian_bergman::metric::MetricField;
use hermitian_bergman::models::{Euclidean, FubiniStudy, HopfMetric};
use hermitian_bergman::ChartPoint;

fn main() {
    let z = ChartPoint::from_parts(&[(0.4, -0.2), (0.3, 0.5)]).unwrap();
    let metrics: Vec<(&str, Box<dyn MetricField>)> = vec![
        ("euclidean", Box::new(Euclidean::new(2))),
        ("fubini-study", Box::new(FubiniStudy::new(2))),
        ("hopf", Box::new(HopfMetric::new(2))),
    ];
    for (name, g) in &metrics {
        let t = torsion_coeffs(g.as_ref(), &z).unwrap().max_abs();
        let d = kahler_differential(g.as_ref(), &z, 1e-4).unwrap().max_defect();
        println!("{name:>13}: max |T| = {t:.3e}, dω defect = {d:.3e}");
    }
}
