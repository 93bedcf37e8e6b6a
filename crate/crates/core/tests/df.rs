use std::sync::Arc;

use hermitian_bergman::df::{
    b_margin, b_margin_point, default_eta_grid, df_form, df_sweep, interpolation_bound_terms, kappa_derivatives,
    psi_interpolation_check, refine_threshold, DFProblem, DomainSample, PointData,
};
use hermitian_bergman::field::{self, Constant, FdScalar, FnScalar, Gradient, LinearPullbackScalar, NormSquared, ScalarField};
use hermitian_bergman::linalg::{c, cr, form_eval, max_abs_diff, min_eigenvalue, outer_conj, CMat, C64};
use hermitian_bergman::metric::MetricField;
use hermitian_bergman::models::{
    box_grid_sample, hopf_closed_forms, product_domain_assemble, product_sample, BallDefining, Conformal,
    Euclidean, HopfChart, HopfMetric, LinearPullback, SquareDefining,
};
use hermitian_bergman::ChartPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(parts: &[(f64, f64)]) -> ChartPoint {
    ChartPoint::from_parts(parts).unwrap()
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn flat_ball(n: usize, psi: Arc<dyn ScalarField>) -> DFProblem {
    DFProblem::new(Arc::new(Euclidean::new(n)), psi, Arc::new(BallDefining::unit(n)), 0.5).unwrap()
}

// ρ = |z|² + 0.3 Re(z₁²) − 1, not unitarily invariant
fn tilted_ball(n: usize) -> FnScalar {
    FnScalar::new(n, "tilted-ball", |z| {
        Ok(cr(z.iter().map(|v| v.norm_sqr()).sum::<f64>() + 0.3 * (z[0] * z[0]).re - 1.0))
    })
    .with_gradient(|z| {
        let mut dz: Vec<C64> = z.iter().map(|v| v.conj()).collect();
        dz[0] += z[0] * 0.3;
        let dzbar = dz.iter().map(|v| v.conj()).collect();
        Ok(Gradient { dz, dzbar })
    })
    .with_hessian(|z| Ok(CMat::identity(z.len(), z.len())))
}

#[test]
fn kappa_matches_differences() {
    let rho = tilted_ball(2);
    let z = p(&[(0.2, 0.1), (-0.3, 0.25)]);
    for &eta in &[0.0, 0.3, 0.5, 1.0] {
        let k = kappa_derivatives(&rho, eta, &z).unwrap();
        let r2 = rho.clone();
        let kf = FnScalar::new(2, "kappa", move |w| Ok(cr((-field::real_value(&r2, w)?).powf(eta))));
        let fd = FdScalar::new(kf, 1e-4);
        let g = field::gradient(&fd, &z).unwrap();
        for j in 0..2 {
            assert!((g.dz[j] - k.dkappa[j]).norm() < 1e-7);
        }
        let h = field::complex_hessian(&fd, &z).unwrap();
        assert!(max_abs_diff(&h, &k.ddbar) < 1e-6, "eta {eta}");
    }
}

#[test]
fn hopf_form_matches_specialized_condition() {
    let rho: Arc<dyn ScalarField> = Arc::new(BallDefining { n: 2, radius: 1.5 });
    let prob = DFProblem::new(Arc::new(HopfMetric::new(2)), Arc::new(Constant::new(2, 0.0)), rho.clone(), 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let chart = HopfChart::standard(2);
    for z in chart.samples(20, &mut rng) {
        let (_, q) = hopf_closed_forms(2, &z).unwrap();
        for &eta in &[0.0, 0.4, 1.0] {
            let k = kappa_derivatives(&rho, eta, &z).unwrap();
            let want = q.clone() * cr(k.kappa) - k.ddbar;
            let got = df_form(&prob.with_eta(eta).unwrap(), &z).unwrap();
            assert!(max_abs_diff(&got, &want) < 1e-8);
        }
    }
}

#[test]
fn product_domain_point_is_nonnegative() {
    let prob = product_domain_assemble(2).unwrap().with_eta(0.5).unwrap();
    let f = df_form(&prob, &p(&[(0.0, 0.0), (1.0, 0.0)])).unwrap();
    assert!(min_eigenvalue(&f) >= -1e-12);
    // η = 0: Hopf block cancels, so the form vanishes identically for n = 2
    let f0 = df_form(&prob.with_eta(0.0).unwrap(), &p(&[(0.3, -0.2), (0.7, 0.1)])).unwrap();
    assert!(f0.iter().all(|v| v.norm() < 1e-10));
}

#[test]
fn ball_sweep_passes() {
    let prob = flat_ball(2, Arc::new(Constant::new(2, 0.0)));
    let sample = box_grid_sample(&BallDefining::unit(2), 1.0, 20, 1e-3).unwrap();
    assert!(sample.len() > 1000);
    let report = df_sweep(&prob, &sample, &[0.0, 0.25, 0.5, 0.75, 1.0], None).unwrap();
    assert!(report.all_pass(), "{report:?}");
    assert_eq!(report.best_eta, Some(1.0));
    for row in &report.rows {
        assert!(row.b.map_or(true, |b| b >= 0.0));
    }
}

#[test]
fn product_sweeps_pass() {
    for n in [2, 3] {
        let prob = product_domain_assemble(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sample = product_sample(n, 21, 10, 1e-3, &mut rng).unwrap();
        let report = df_sweep(&prob, &sample, &[0.0, 0.25, 0.5, 0.75, 1.0], None).unwrap();
        assert!(report.all_pass(), "n={n}: {:?}", report.rows);
    }
}

#[test]
fn hopf_counterexample_fails_near_one() {
    // −ρ = 1 + 40|z₂|²: ∂∂̄(−ρ)^η grows with η and beats the Hopf curvature
    let rho = FnScalar::new(2, "concave", |z| Ok(cr(-1.0 - 40.0 * z[1].norm_sqr())))
        .with_gradient(|z| {
            Ok(Gradient {
                dz: vec![cr(0.0), z[1].conj() * -40.0],
                dzbar: vec![cr(0.0), z[1] * -40.0],
            })
        })
        .with_hessian(|_| Ok(CMat::from_row_slice(2, 2, &[cr(0.0), cr(0.0), cr(0.0), cr(-40.0)])));
    let prob = DFProblem::new(Arc::new(HopfMetric::new(2)), Arc::new(Constant::new(2, 0.0)), Arc::new(rho.clone()), 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pts = HopfChart::standard(2).samples(50, &mut rng);
    let sample = DomainSample::from_points(&rho, pts, 0.0).unwrap();
    let report = df_sweep(&prob, &sample, &default_eta_grid(), None).unwrap();
    assert!(report.rows[0].pass);
    let last = report.rows.last().unwrap();
    assert!(!last.pass, "{:?}", report.rows);
    assert!(last.min_eig < -1.0);
    assert_eq!(last.worst_point.len(), 2);
    // the Hopf curvature has W₁ in its kernel, so any η > 0 already fails
    assert_eq!(report.best_eta, Some(0.0));
    // a strictly plurisubharmonic weight moves the threshold inside (0, 1)
    let lifted = DFProblem::new(prob.metric.clone(), Arc::new(field::FnScalar::new(2, "4|z|^2", |z| {
        Ok(cr(4.0 * z.iter().map(|v| v.norm_sqr()).sum::<f64>()))
    }).with_hessian(|z| Ok(CMat::identity(z.len(), z.len()) * cr(4.0)))), prob.rho.clone(), 0.0).unwrap();
    let report = df_sweep(&lifted, &sample, &default_eta_grid(), None).unwrap();
    assert!(!report.rows.last().unwrap().pass);
    let best = report.best_eta.unwrap();
    assert!(best > 0.0);
    let t = refine_threshold(&lifted, &sample, best, best + 0.05, 1e-3).unwrap();
    assert!(t >= best && t < best + 0.05);
    assert!(df_sweep(&lifted, &sample, &[t], None).unwrap().all_pass());
    assert!(!df_sweep(&lifted, &sample, &[t + 1e-3], None).unwrap().all_pass());
}

#[test]
fn square_margin_at_least_one() {
    let rho = SquareDefining::planar();
    let prob = DFProblem::new(Arc::new(Euclidean::new(1)), Arc::new(Constant::new(1, 0.0)), Arc::new(rho.clone()), 0.5).unwrap();
    let sample = box_grid_sample(&rho, 1.0, 41, 1e-3).unwrap();
    let b = b_margin(&prob, &sample).unwrap().unwrap();
    assert!(b >= 1.0, "B = {b}");
}

#[test]
fn b_margin_matches_brute_force() {
    let prob = product_domain_assemble(2).unwrap().with_eta(0.6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let z = p(&[(0.4, -0.3), (0.6, 0.2)]);
    let pd = PointData::new(&prob, &z).unwrap();
    let f = pd.df_form(0.6);
    let b = b_margin_point(&f, &pd.drho, pd.rho, 0.6, 1e-8).unwrap().unwrap();
    let scale = 0.36 * (-pd.rho).powf(0.6 - 2.0);
    let r = outer_conj(&pd.drho, &pd.drho);
    // F − B·scale·R is PSD and singular
    let rest = &f - &r * cr(b * scale);
    assert!(min_eigenvalue(&rest) > -1e-9 * b.max(1.0));
    assert!(min_eigenvalue(&rest).abs() < 1e-8 * b.max(1.0));
    for _ in 0..2000 {
        let v = random_vec(&mut rng, 2);
        let q = form_eval(&f, &v);
        let rr = form_eval(&r, &v) * scale;
        if rr > 1e-12 {
            assert!(q / rr >= b * (1.0 - 1e-9));
        }
    }
}

#[test]
fn plurisubharmonic_weight_raises_margin() {
    let sample = box_grid_sample(&BallDefining::unit(2), 1.0, 8, 1e-2).unwrap();
    let base = b_margin(&flat_ball(2, Arc::new(Constant::new(2, 0.0))), &sample).unwrap().unwrap();
    let lifted = b_margin(&flat_ball(2, Arc::new(NormSquared::new(2))), &sample).unwrap().unwrap();
    assert!(lifted > base, "{base} -> {lifted}");
}

#[test]
fn b_margin_unitary_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let phi = field::AffineRe::new(vec![c(0.4, 0.1), c(-0.2, 0.3)], 0.0);
    let metric = Conformal::new(phi);
    let rho = tilted_ball(2);
    let psi = NormSquared::new(2);
    for _ in 0..5 {
        let m = CMat::from_fn(2, 2, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let u = m.qr().q();
        let moved = DFProblem::new(
            Arc::new(LinearPullback::new(metric.clone(), u.clone()).unwrap()),
            Arc::new(LinearPullbackScalar::new(psi.clone(), u.clone())),
            Arc::new(LinearPullbackScalar::new(rho.clone(), u.clone())),
            0.7,
        )
        .unwrap();
        let orig = DFProblem::new(Arc::new(metric.clone()), Arc::new(psi.clone()), Arc::new(rho.clone()), 0.7).unwrap();
        let w = ChartPoint::new(random_vec(&mut rng, 2).iter().map(|v| v * 0.4).collect()).unwrap();
        let z = ChartPoint::new((&u * nalgebra::DVector::from_vec(w.coords().to_vec())).iter().copied().collect()).unwrap();
        let one = |prob: &DFProblem, x: &ChartPoint| {
            let pd = PointData::new(prob, x).unwrap();
            b_margin_point(&pd.df_form(0.7), &pd.drho, pd.rho, 0.7, 1e-8).unwrap().unwrap()
        };
        let (b0, b1) = (one(&orig, &z), one(&moved, &w));
        assert!((b0 - b1).abs() <= 1e-8 * b0.abs().max(1.0), "{b0} vs {b1}");
    }
    let _ = metric.dim();
}

#[test]
fn interpolation_identity_and_bound() {
    let prob = product_domain_assemble(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let chart = HopfChart::standard(1);
    let mut checked = 0;
    while checked < 100 {
        let z1 = c(rng.gen_range(-0.95..0.95), rng.gen_range(-0.95..0.95));
        let mut coords = vec![z1];
        coords.extend_from_slice(&chart.sample(&mut rng));
        let z = ChartPoint::new(coords).unwrap();
        let a = rng.gen_range(0.0..0.4);
        let b = rng.gen_range(0.6..1.0);
        let s = rng.gen_range(a / 2.0 + 1e-3..b / 2.0 - 1e-3);
        let (lhs, rhs) = psi_interpolation_check(&prob, a, b, s, &z).unwrap();
        let scale = lhs.iter().fold(1.0f64, |m, v| m.max(v.norm()));
        assert!(max_abs_diff(&lhs, &rhs) <= 1e-12 * scale);
        let v = random_vec(&mut rng, 2);
        let (quad, bound, extra) = interpolation_bound_terms(&prob, 0.0, 1.0, s, &z, &v).unwrap();
        let tol = 1e-9 * bound.abs().max(1.0);
        assert!(quad >= bound - tol, "{quad} < {bound}");
        assert!(quad + extra >= bound - tol);
        checked += 1;
    }
    assert!(psi_interpolation_check(&prob, 0.3, 0.3, 0.15, &p(&[(0.0, 0.0), (0.8, 0.0)])).is_err());
}
