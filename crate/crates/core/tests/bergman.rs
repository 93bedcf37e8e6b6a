use std::f64::consts::PI;

use hermitian_bergman::bergman::*;
use hermitian_bergman::linalg::{cr, C64};
use hermitian_bergman::Error;
use nalgebra::{DMatrix, DVector};

fn disc(res: usize) -> Grid {
    Grid::new(PlanarDomain::unit_disc(), res).unwrap()
}

fn square(res: usize) -> Grid {
    Grid::new(PlanarDomain::Square, res).unwrap()
}

#[test]
fn grid_areas_and_comparability() {
    let g = disc(128);
    assert!((g.total_area() - PI).abs() < 1e-12);
    assert!(g.delta.iter().all(|&d| d > 0.0));
    let cmp = g.comparability();
    // −ρ/δ = 1 + |z| on the disc
    assert!(cmp.c1 >= 1.0 && cmp.c1 < 1.02 && cmp.c2 <= 2.0 && cmp.c2 > 1.98, "{cmp:?}");
    let s = square(64);
    assert!((s.total_area() - 4.0).abs() < 1e-12);
    let cmp = s.comparability();
    assert!(cmp.c1 > 0.0 && cmp.c2.is_finite() && cmp.c1 <= cmp.c2);
}

#[test]
fn area_norm_is_sqrt_pi() {
    let g = disc(256);
    let one = vec![cr(1.0); g.len()];
    let n = weighted_norm(&g, &one, 0.0, Flavor::Delta).unwrap();
    assert!((n - PI.sqrt()).abs() < 1e-3);
}

#[test]
fn singular_weight_matches_radial_integral() {
    // ∫₀¹ (1−r²)^{−1/2} 2πr dr with r = sin θ has a smooth integrand.
    let m = 20000;
    let oracle: f64 = (0..m)
        .map(|k| {
            let th = (k as f64 + 0.5) * (PI / 2.0) / m as f64;
            2.0 * PI * th.sin()
        })
        .sum::<f64>()
        * (PI / 2.0)
        / m as f64;
    let g = disc(256);
    let one = vec![cr(1.0); g.len()];
    let n = weighted_norm(&g, &one, 0.25, Flavor::NegRho).unwrap();
    assert!((n * n - oracle).abs() < 1e-3 * oracle, "{} vs {oracle}", n * n);
}

#[test]
fn weighted_norm_is_monotone_in_s() {
    let g = disc(128);
    let u = g.map(|z| z.powu(10));
    for flavor in [Flavor::Delta, Flavor::NegRho] {
        let lo = weighted_norm(&g, &u, 0.1, flavor).unwrap();
        let hi = weighted_norm(&g, &u, 0.4, flavor).unwrap();
        assert!(hi > lo);
    }
    assert!(sobolev_proxy_warning(0.25).is_none());
    assert!(sobolev_proxy_warning(0.5).is_some());
}

#[test]
fn projection_of_constants_and_conjugates_on_the_disc() {
    let g = disc(128);
    let sp = WeightedSpace::unweighted(&g);
    let basis = HoloBasis::new(&sp, 25).unwrap();
    let one = GridFn::smooth(vec![cr(1.0); g.len()]);
    let p = gram_and_project(&sp, &basis, &one).unwrap();
    let mono = basis.monomial_coefficients(&p.coeffs);
    assert!((mono[0] - cr(1.0)).norm() < 1e-10);
    assert!(mono[1..].iter().all(|c| c.norm() < 1e-8));
    assert!(p.idempotence_defect < 1e-8);

    let zbar = GridFn::smooth(g.map(|z| z.conj()));
    let p = gram_and_project(&sp, &basis, &zbar).unwrap();
    // exact zero is broken only by the lattice
    assert!(sp.norm(&p.as_gridfn()).unwrap() < 1e-4 * sp.norm(&zbar).unwrap());
}

/// Weighted least squares on monomials, solved by SVD.
fn least_squares_oracle(g: &Grid, v: &[C64], degree: usize) -> Vec<C64> {
    let a = DMatrix::from_fn(g.len(), degree + 1, |i, k| g.nodes[i].powu(k as u32) * g.area[i].sqrt());
    let b = DVector::from_fn(g.len(), |i, _| v[i] * g.area[i].sqrt());
    let x = a.svd(true, true).solve(&b, 1e-14).unwrap();
    x.iter().copied().collect()
}

#[test]
fn square_conjugate_projection_matches_least_squares() {
    let degree = 10;
    let g = square(256);
    let sp = WeightedSpace::unweighted(&g);
    let basis = HoloBasis::new(&sp, degree).unwrap();
    let p = gram_and_project(&sp, &basis, &GridFn::smooth(g.map(|z| z.conj()))).unwrap();
    let ours = basis.monomial_coefficients(&p.coeffs);
    let fine = square(512);
    let oracle = least_squares_oracle(&fine, &fine.map(|z| z.conj()), degree);
    let big = oracle.iter().map(|c| c.norm()).fold(0.0, f64::max);
    assert!(big > 0.1);
    for (k, (a, b)) in ours.iter().zip(&oracle).enumerate() {
        if b.norm() > 1e-3 * big {
            assert!((a - b).norm() < 1e-3 * b.norm(), "k = {k}: {a} vs {b}");
        } else {
            assert!(a.norm() < 1e-3 * big, "k = {k}: {a}");
        }
    }
}

#[test]
fn basis_recurrence_reproduces_node_values() {
    let g = square(64);
    let sp = WeightedSpace::unweighted(&g);
    let basis = HoloBasis::new(&sp, 20).unwrap();
    let coeffs: Vec<C64> = (0..basis.len()).map(|k| C64::new(1.0 / (k + 1) as f64, 0.3)).collect();
    let vals = basis.combine(&coeffs);
    let mono = basis.monomial_coefficients(&coeffs);
    for k in (0..g.len()).step_by(97) {
        let z = g.nodes[k];
        let (f, df) = basis.eval(&coeffs, z);
        assert!((f - vals[k]).norm() < 1e-9 * (1.0 + vals[k].norm()));
        let direct: C64 = mono.iter().enumerate().map(|(m, c)| c * z.powu(m as u32)).sum();
        assert!((direct - f).norm() < 1e-8 * (1.0 + f.norm()));
        let h = 1e-6;
        let fd = (basis.eval(&coeffs, z + h).0 - basis.eval(&coeffs, z - h).0) / (2.0 * h);
        assert!((fd - df).norm() < 1e-6 * (1.0 + df.norm()));
    }
    let d = basis.diagnostics();
    assert!(d.orthonormality_defect < 1e-10 && !d.ill_conditioned);
}

#[test]
fn projection_laws_hold() {
    let family = test_family(20, 11);
    for g in [disc(128), square(128)] {
        let psi = g.nodes.iter().map(|z| z.norm_sqr()).collect();
        let sp = WeightedSpace::new(&g, psi, 0.0).unwrap();
        let basis = HoloBasis::new(&sp, 25).unwrap();
        let laws = projection_laws(&sp, &basis, &family, 20, 5).unwrap();
        assert!(laws.max_idempotence_defect <= 1e-8, "{laws:?}");
        assert!(laws.max_self_adjoint_defect <= 1e-8, "{laws:?}");
        assert!(laws.max_contraction <= 1.0 + 1e-10, "{laws:?}");
    }
}

#[test]
fn cauchy_transform_examples() {
    let g = disc(64);
    let zero = cauchy_solve(&g, &vec![cr(0.0); g.len()]).unwrap();
    assert!(zero.iter().all(|w| w.norm() == 0.0));
    let sub = g.interior_subgrid(0.1);
    let ones = vec![cr(1.0); g.len()];
    let w = cauchy_solve(&g, &ones).unwrap();
    assert!(dbar_residual(&g, &w, &ones, &sub).unwrap() <= 1e-2);

    let mut prev = f64::INFINITY;
    for res in [32, 64, 128] {
        let g = disc(res);
        let sub = g.interior_subgrid(0.1);
        let rhs = g.map(|z| z.conj());
        let w = cauchy_solve(&g, &rhs).unwrap();
        let r = dbar_residual(&g, &w, &rhs, &sub).unwrap();
        assert!(r <= 1e-2 && r <= 0.5 * prev, "res {res}: {r} after {prev}");
        prev = r;
    }
}

#[test]
fn cauchy_rejects_bad_input() {
    let g = disc(16);
    assert!(matches!(cauchy_solve(&g, &[cr(1.0)]), Err(Error::Dimension { .. })));
    let mut rhs = vec![cr(0.0); g.len()];
    rhs[3] = cr(f64::NAN);
    assert!(matches!(cauchy_solve(&g, &rhs), Err(Error::Numerical(_))));
}

#[test]
fn constant_twist_gives_zero() {
    let g = disc(32);
    let sp = WeightedSpace::unweighted(&g);
    let f = vec![cr(1.0); g.len()];
    let sol = twisted_solution(&sp, 10, &f, Kappa::constant(3.0), 1.0, 0.1).unwrap();
    assert!(sol.u.values.iter().all(|v| v.norm() == 0.0));
    assert_eq!(sol.diagnostics.ratio, 0.0);
}

#[test]
fn twisted_solution_on_the_disc_respects_the_estimate() {
    let eta = 0.5;
    let b = PlanarDomain::unit_disc().b_estimate(eta, 41).unwrap().unwrap();
    assert!(b >= 1.0 - 1e-9, "B = {b}");
    let g = disc(128);
    let sp = WeightedSpace::unweighted(&g);
    let f = vec![cr(1.0); g.len()];
    let sol = twisted_solution(&sp, 25, &f, Kappa::power(eta), b, 0.1).unwrap();
    let d = &sol.diagnostics;
    assert!(d.ratio > 0.0 && d.ratio <= solution_bound(b) * 1.1, "{d:?}");
    assert!(d.orthogonality <= 1e-8, "{d:?}");
    assert!(d.dbar_residual <= 1e-2, "{d:?}");
}

#[test]
fn twisted_residual_on_the_square_decreases() {
    let mut prev = f64::INFINITY;
    for res in [32, 64, 128] {
        let g = square(res);
        let sp = WeightedSpace::unweighted(&g);
        let f = g.map(|z| z);
        let sol = twisted_solution(&sp, 25, &f, Kappa::power(0.5), 1.0, 0.1).unwrap();
        let d = &sol.diagnostics;
        assert!(d.dbar_residual < prev, "res {res}: {d:?}");
        assert!(d.orthogonality <= 1e-8);
        prev = d.dbar_residual;
    }
    assert!(prev < 2e-2);
}

#[test]
fn operator_bound_constant_and_fixed_points() {
    let b = b_for_s(0.25);
    assert!((b - 1.0).abs() < 1e-15);
    assert!((operator_bound(b) - (2.0 + 2f64.sqrt())).abs() < 1e-12);
    let g = square(64);
    let sp = WeightedSpace::unweighted(&g);
    let holo = vec![TestFunction::monomial(3, 0, 0.0), TestFunction::monomial(0, 0, 0.0)];
    let r = operator_bound_experiment(&sp, 25, 0.25, &holo, 0.1).unwrap();
    for row in &r.rows {
        assert!((row.ratio_plus.unwrap() - 1.0).abs() < 1e-9);
        assert!((row.ratio_minus.unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn operator_bound_holds_on_the_disc_family() {
    let g = disc(128);
    let sp = WeightedSpace::unweighted(&g);
    let family = test_family(8, 0);
    for s in [0.1, 0.2, 0.3, 0.4] {
        let r = operator_bound_experiment(&sp, 25, s, &family, 0.1).unwrap();
        assert!(r.pass, "s = {s}: {} > {}", r.max_ratio, r.bound);
        // (−ρ)^{−s−t} v leaves L² only for t = 0.2, s ≥ 0.3
        let skipped = r.rows.iter().filter(|row| row.skipped.is_some()).count();
        assert_eq!(skipped, if s >= 0.3 { 4 } else { 0 });
    }
}

#[test]
fn truncation_is_stable() {
    let g = disc(128);
    let sp = WeightedSpace::unweighted(&g);
    let family = test_family(20, 3);
    let a = operator_bound_experiment(&sp, 25, 0.25, &family, 0.1).unwrap();
    let b = operator_bound_experiment(&sp, 30, 0.25, &family, 0.1).unwrap();
    let ch = ratio_change(&a, &b);
    assert!(ch.max_relative_change <= 0.01, "{ch:?}");
    assert!(ch.max_null_ratio < 1e-3);
}

#[test]
fn boas_straube_factorization() {
    let g = disc(128);
    let sp = WeightedSpace::unweighted(&g);
    for v in test_family(10, 9) {
        let d = boas_straube_defect(&sp, 25, &v, 0.5).unwrap();
        assert!(d <= 1e-6, "{}: {d}", v.label);
    }
}

#[test]
fn detraz_examples() {
    let g = disc(256);
    assert_eq!(detraz_ratio(&g, |_| (cr(1.0), cr(0.0)), 0.25).unwrap(), 0.0);
    assert!(detraz_ratio(&g, |_| (cr(0.0), cr(0.0)), 0.25).is_err());
    // radial oracle: ∫(1−r)^{3/2} r dr / ∫(1−r)^{−1/2} r³ dr = B(2, 5/2)/B(4, 1/2) = 1/8
    let r = detraz_ratio(&g, |z| (z, cr(1.0)), 0.25).unwrap();
    assert!((r - 0.125f64.sqrt()).abs() < 1e-3 * r, "{r}");
    let sweep = detraz_sweep(&square(128), 1..=30, 0.25).unwrap();
    assert!(sweep.max_ratio.is_finite() && sweep.max_ratio < 1.0);
    let last = sweep.ratios.last().unwrap().1;
    assert!(last <= sweep.max_ratio);
}

#[test]
fn cauchy_estimate_sweep_holds() {
    let e = cauchy_estimate_sweep(&[0.1, 0.5], 20, 4.0 / PI, 128).unwrap();
    assert!(e.pass);
    // extremal at m = 1: ∫_{B_R} |z|² = πR⁴/2
    assert!((e.measured_constant - 2.0 / PI).abs() < 1e-3);
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(Grid::new(PlanarDomain::Disc { radius: -1.0 }, 32).is_err());
    assert!(Grid::new(PlanarDomain::Square, 2).is_err());
    let g = disc(32);
    assert!(g.power_mass(Flavor::NegRho, -1.0).is_err());
    let sp = WeightedSpace::unweighted(&g);
    assert!(operator_bound_experiment(&sp, 5, 0.5, &test_family(2, 0), 0.1).is_err());
    assert!(HoloBasis::new(&WeightedSpace::unweighted(&Grid::new(PlanarDomain::unit_disc(), 4).unwrap()), 25).is_err());
}
