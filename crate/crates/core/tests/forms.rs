use hermitian_bergman::field::{AffineRe, Bump, Constant, FnScalar, Gradient, NormSquared};
use hermitian_bergman::forms::{
    adjoint_ibp_residual, bkmkh_residual, commutator_check, dbar_01, dbar_01_naive, dbar_star_psi, divergence,
    tau_identity_check, AffineVectorField, DbarOf, FnForm, FnVectorField, ScaledForm,
};
use hermitian_bergman::forms::CoeffJet;
use hermitian_bergman::linalg::{c, cr, C64};
use hermitian_bergman::metric::MetricField;
use hermitian_bergman::models::{Euclidean, FubiniStudy, HopfChart, HopfMetric};
use hermitian_bergman::quadrature::{QuadratureBox, SupportBox};
use hermitian_bergman::{ChartPoint, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(parts: &[(f64, f64)]) -> ChartPoint {
    ChartPoint::from_parts(parts).unwrap()
}

/// `u = Σ (Σ_k a_{jk} z_k + b_{jk} z̄_k) dz̄_j` with an analytic jet.
fn linear_form(a: Vec<Vec<C64>>, b: Vec<Vec<C64>>) -> FnForm {
    let n = a.len();
    let (a2, b2) = (a.clone(), b.clone());
    FnForm::new(n, move |z| {
        Ok((0..n).map(|j| (0..n).map(|k| a[j][k] * z[k] + b[j][k] * z[k].conj()).sum()).collect())
    })
    .with_jet(move |z| {
        Ok(CoeffJet {
            value: (0..n).map(|j| (0..n).map(|k| a2[j][k] * z[k] + b2[j][k] * z[k].conj()).sum()).collect(),
            dz: (0..n).map(|l| (0..n).map(|j| a2[j][l]).collect()).collect(),
            dzbar: (0..n).map(|l| (0..n).map(|j| b2[j][l]).collect()).collect(),
        })
    })
}

#[test]
fn divergence_examples() {
    let z = p(&[(0.4, 0.2), (-0.1, 0.3)]);
    let e = Euclidean::new(2);
    let mut zf = AffineVectorField::euler(2);
    zf.a[(1, 1)] = cr(0.0);
    assert!((divergence(&e, &zf, &z).unwrap() - 1.0).norm() < 1e-15);
    assert!(divergence(&e, &AffineVectorField::coordinate(2, 0), &z).unwrap().norm() < 1e-15);
    // oracle: Σ ∂_j Z^j + Z(log det g); for Hopf log det = −n log|z|², W₁(log det) = −n
    let h = HopfMetric::new(2);
    let w1 = AffineVectorField::euler(2);
    let d = divergence(&h, &w1, &p(&[(1.0, 0.0), (0.0, 0.0)])).unwrap();
    assert!(d.norm() < 1e-14, "{d}");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let z = p(&[(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), (rng.gen_range(-1.0..1.0), 0.2)]);
        let d = divergence(&FubiniStudy::new(2), &AffineVectorField::coordinate(2, 1), &z).unwrap();
        // ∂_2 log det g_FS = −3 z̄_2/(1+|z|²)
        let want = -3.0 * z[1].conj() / (1.0 + z.norm_sqr());
        assert!((d - want).norm() < 1e-12);
    }
}

#[test]
fn dbar_star_examples() {
    let e = Euclidean::new(2);
    let zero = Constant::new(2, 0.0);
    let z = p(&[(1.0, 0.0), (0.0, 0.0)]);
    let zbar1 = linear_form(
        vec![vec![cr(0.0); 2]; 2],
        vec![vec![cr(1.0), cr(0.0)], vec![cr(0.0), cr(0.0)]],
    );
    assert!(dbar_star_psi(&e, &zero, &zbar1, &z).unwrap().norm() < 1e-15);
    let z1 = linear_form(
        vec![vec![cr(1.0), cr(0.0)], vec![cr(0.0), cr(0.0)]],
        vec![vec![cr(0.0); 2]; 2],
    );
    assert!((dbar_star_psi(&e, &zero, &z1, &z).unwrap() + 1.0).norm() < 1e-15);
    assert!(dbar_star_psi(&e, &NormSquared::new(2), &z1, &z).unwrap().norm() < 1e-15);
}

fn bump_pair(n: usize, center: Vec<C64>, w: f64) -> (Bump, Bump) {
    let f = Bump::new(center.clone(), w, 6);
    let mut c2 = center;
    c2[0] += c(0.2 * w, -0.1 * w);
    let h = Bump::new(c2, w, 6);
    assert_eq!(f.center.len(), n);
    (f, h)
}

#[test]
fn adjoint_ibp_flat() {
    let (f, h) = bump_pair(1, vec![c(0.1, 0.0)], 0.5);
    let q = QuadratureBox::uniform(SupportBox::around(&[c(0.1, 0.0)], 0.6), 64).unwrap();
    let e = Euclidean::new(1);
    let zero = Constant::new(1, 0.0);
    let r = adjoint_ibp_residual(&e, &zero, &f, &AffineVectorField::coordinate(1, 0), &h, &q).unwrap();
    assert!(r < 1e-6, "{r}");
    let mut fz = f.clone();
    fz.amplitude = 0.0;
    assert_eq!(adjoint_ibp_residual(&e, &zero, &fz, &AffineVectorField::coordinate(1, 0), &h, &q).unwrap(), 0.0);
    let unsupported = NormSquared::new(1);
    assert!(matches!(
        adjoint_ibp_residual(&e, &zero, &unsupported, &AffineVectorField::coordinate(1, 0), &h, &q),
        Err(Error::Domain(_))
    ));
}

#[test]
fn adjoint_ibp_hopf_converges() {
    let center = vec![c(0.6, 0.1), c(0.0, 0.3)];
    let (f, h) = bump_pair(2, center.clone(), 0.2);
    let g = HopfMetric::new(2);
    let zero = Constant::new(2, 0.0);
    let w1 = AffineVectorField::euler(2);
    let mut prev = f64::INFINITY;
    for res in [16, 24, 32] {
        let q = QuadratureBox::uniform(SupportBox::around(&center, 0.22), res).unwrap();
        let r = adjoint_ibp_residual(&g, &zero, &f, &w1, &h, &q).unwrap();
        assert!(r < prev, "{res}: {r}");
        prev = r;
    }
    assert!(prev < 1e-3, "{prev}");
}

#[test]
fn commutator_examples() {
    let e = Euclidean::new(2);
    let psi = NormSquared::new(2);
    let one = Constant::new(2, 1.0);
    let z = p(&[(0.3, 0.1), (0.2, -0.4)]);
    let d1 = AffineVectorField::coordinate(2, 0);
    let d2 = AffineVectorField::coordinate(2, 1);
    let (l, r) = commutator_check(&e, &psi, &d1, &d1, &one, &z).unwrap();
    assert!((l - 1.0).norm() < 1e-6 && (r - 1.0).norm() < 1e-14, "{l} {r}");
    let (l, r) = commutator_check(&e, &psi, &d1, &d2, &one, &z).unwrap();
    assert!(l.norm() < 1e-6 && r.norm() < 1e-14);
    let hopf = HopfMetric::new(2);
    let zero = Constant::new(2, 0.0);
    let (l, r) = commutator_check(&hopf, &zero, &d2, &d2, &one, &p(&[(1.0, 0.0), (0.0, 0.0)])).unwrap();
    assert!((r - 2.0).norm() < 1e-12 && (l - r).norm() < 1e-4, "{l} {r}");
    let nonholo = FnVectorField::new(2, false, |z| Ok(vec![z[0].conj(), cr(0.0)]));
    assert!(matches!(
        commutator_check(&e, &psi, &nonholo, &d1, &one, &z),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn commutator_with_nonconstant_phi() {
    let phi = FnScalar::new(2, "phi", |z| Ok(z[0] * z[1].conj() + cr(z[1].norm_sqr())))
        .complex()
        .with_gradient(|z| {
            Ok(Gradient {
                dz: vec![z[1].conj(), z[1].conj()],
                dzbar: vec![cr(0.0), z[0] + z[1]],
            })
        });
    let hopf = HopfMetric::new(2);
    let psi = AffineRe::new(vec![cr(2.0), cr(0.0)], 0.0);
    let chart = HopfChart::standard(2);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let z = chart.sample(&mut rng);
        let (l, r) = commutator_check(&hopf, &psi, &AffineVectorField::euler(2), &AffineVectorField::coordinate(2, 1), &phi, &z).unwrap();
        assert!((l - r).norm() < 1e-4, "{l} {r}");
    }
}

#[test]
fn dbar_examples() {
    let u = linear_form(
        vec![vec![cr(0.0); 2]; 2],
        vec![vec![cr(0.0), cr(1.0)], vec![cr(0.0), cr(0.0)]],
    );
    let z = p(&[(1.0, 0.0), (0.0, 0.0)]);
    let e = dbar_01(&Euclidean::new(2), &u, &z).unwrap();
    assert!((e.coeffs[(0, 1)] + 1.0).norm() < 1e-15 && (e.coeffs[(1, 0)] - 1.0).norm() < 1e-15);
    let h = dbar_01(&HopfMetric::new(2), &u, &z).unwrap();
    assert!((&h.coeffs - &e.coeffs).iter().all(|v| v.norm() < 1e-10));
    let naive = dbar_01_naive(&u, &z).unwrap();
    assert!((&naive.coeffs - &e.coeffs).iter().all(|v| v.norm() < 1e-15));
}

#[test]
fn dbar_squared_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let center = vec![c(rng.gen_range(-0.3..0.3), 0.1), c(0.2, rng.gen_range(-0.3..0.3))];
        let f = Bump::new(center, 1.5, 6);
        let u = DbarOf { f, h: 1e-4 };
        let z = p(&[(rng.gen_range(-0.3..0.3), 0.0), (0.1, rng.gen_range(-0.3..0.3))]);
        let d = dbar_01(&HopfMetric::new(2), &u, &z).unwrap();
        assert!(d.max_abs() < 1e-6, "{}", d.max_abs());
    }
}

#[test]
fn tau_identity_examples() {
    let z = p(&[(1.0, 0.0), (0.0, 0.0)]);
    let h = HopfMetric::new(2);
    let dz2 = ScaledForm::basis(Constant::new(2, 1.0), 1);
    let dz1 = ScaledForm::basis(Constant::new(2, 1.0), 0);
    let (l, r) = tau_identity_check(&h, &dz2, &dz2, &z).unwrap();
    assert!((l - 1.0).norm() < 1e-14 && (r - 1.0).norm() < 1e-14, "{l} {r}");
    let (l, r) = tau_identity_check(&h, &dz1, &dz2, &z).unwrap();
    assert!(l.norm() < 1e-14 && r.norm() < 1e-14);
    let (l, r) = tau_identity_check(&FubiniStudy::new(2), &dz1, &dz2, &p(&[(0.3, 0.2), (0.1, 0.0)])).unwrap();
    assert!(l.norm() < 1e-14 && r.norm() < 1e-14);
}

#[test]
fn bkmkh_zero_form() {
    let mut b = Bump::new(vec![c(0.0, 0.0), c(0.0, 0.0)], 0.5, 5);
    b.amplitude = 0.0;
    let u = ScaledForm::basis(b, 0);
    let q = QuadratureBox::uniform(SupportBox::around(&[c(0.0, 0.0), c(0.0, 0.0)], 0.55), 8).unwrap();
    let r = bkmkh_residual(&Euclidean::new(2), &Constant::new(2, 0.0), &Constant::new(2, 1.0), &u, &q).unwrap();
    assert_eq!(r.residual, 0.0);
}

#[test]
fn bkmkh_small_grids() {
    // nontrivial κ and ψ in flat space, then the Hopf case
    let center = vec![c(0.6, 0.0), c(0.0, 0.3)];
    let w = 0.15;
    let u = ScaledForm::basis(Bump::new(center.clone(), w, 6), 1);
    let kappa = AffineRe::new(vec![cr(1.0), cr(0.0)], 2.0);
    for res in [8, 12, 16] {
        let q = QuadratureBox::uniform(SupportBox::around(&center, 1.1 * w), res).unwrap();
        let r = bkmkh_residual(&Euclidean::new(2), &NormSquared::new(2), &kappa, &u, &q).unwrap();
        let rh = bkmkh_residual(&HopfMetric::new(2), &Constant::new(2, 0.0), &kappa, &u, &q).unwrap();
        println!("{res}: flat {r:?}\n    hopf {rh:?}");
    }
    let _ = MetricField::dim(&Euclidean::new(1));
}
