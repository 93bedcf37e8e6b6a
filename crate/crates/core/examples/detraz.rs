//! Derivative-to-value ratios of monomials on the square and the disc.

use hermitian_bergman::bergman::{detraz_sweep, Grid, PlanarDomain};

fn main() {
    for domain in [PlanarDomain::Square, PlanarDomain::unit_disc()] {
        let grid = Grid::new(domain, 128).unwrap();
        let sweep = detraz_sweep(&grid, 0..=20, 0.25).unwrap();
        println!("{}: max ratio {:.5} at m = {}", sweep.domain, sweep.max_ratio, sweep.argmax);
        for (m, r) in sweep.ratios.iter().step_by(5) {
            println!("  m = {m:>2}: {r:.5}");
        }
    }
}
