//! Weighted norm ratios of the Bergman projection on the unit disc against
//! the analytic operator bound.

use hermitian_bergman::bergman::{b_for_s, operator_bound, operator_bound_experiment, test_family, Grid, PlanarDomain, WeightedSpace};

fn main() {
    let grid = Grid::new(PlanarDomain::unit_disc(), 96).unwrap();
    let space = WeightedSpace::unweighted(&grid);
    let family = test_family(8, 3);
    for s in [0.1, 0.25, 0.4] {
        let r = operator_bound_experiment(&space, 15, s, &family, 0.1).unwrap();
        println!(
            "s = {s}: B = {:.3}, bound = {:.3}, max ratio = {:.3}, pass = {}",
            b_for_s(s),
            operator_bound(b_for_s(s)),
            r.max_ratio,
            r.pass
        );
    }
}
