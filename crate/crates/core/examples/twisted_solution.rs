//! Solves `∂̄u = f ∂̄κ` with the twisted solution operator and compares the
//! weighted norm of `u` with the analytic bound.

use hermitian_bergman::bergman::{b_for_s, solution_bound, twisted_solution, Grid, Kappa, PlanarDomain, WeightedSpace};

fn main() {
    let grid = Grid::new(PlanarDomain::unit_disc(), 96).unwrap();
    let space = WeightedSpace::unweighted(&grid);
    for s in [0.1, 0.25] {
        let b = b_for_s(s);
        for m in [0u32, 1] {
            let f = grid.map(|z| z.powu(m));
            let sol = twisted_solution(&space, 15, &f, Kappa::power(2.0 * s), b, 0.1).unwrap();
            let d = &sol.diagnostics;
            println!(
                "s = {s}, f = z^{m}: residual {:.2e}, ratio {:.3} (bound {:.3}), orthogonality {:.2e}",
                d.dbar_residual,
                d.ratio,
                solution_bound(b),
                d.orthogonality
            );
        }
    }
}
