//! Runs a configured experiment and assembles its [`RunReport`].

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::bergman::{
    b_for_s, boas_straube_defect, detraz_sweep, operator_bound_experiment, projection_laws, solution_bound, test_family,
    twisted_solution, Grid, HoloBasis, Kappa, PlanarDomain, WeightedSpace,
};
use crate::config::{
    hopf_chart, resolve_defining, resolve_metric, resolve_planar_domain, resolve_weight, DefiningDomain, ExperimentConfig,
    ExperimentKind, RegistrySpec,
};
use crate::df::{default_eta_grid, df_sweep, DFProblem, DomainSample};
use crate::error::{Error, Result};
use crate::field::{self, AffineRe, Bump, Constant, FnScalar, Gradient, ScalarField, SharedScalar};
use crate::forms::{bkmkh_residual, commutator_check, AffineVectorField, BkmkhResult, ScaledForm, ZeroOneForm};
use crate::geometry::{curvature_trace, kahler_differential, torsion_coeffs, torsion_norm_form};
use crate::linalg::{c, cholesky_lower, cr, form_eval, hermitian_eigenvalues, lower_inverse, max_abs_diff, CMat, C64};
use crate::metric::{eval_checked, MetricField, SharedMetric};
use crate::models::{
    box_grid_sample, hopf_closed_forms, product_domain_assemble, product_sample, product_shell, w1, AnnulusDefining,
    BallDefining, Euclidean, HopfMetric, SquareDefining,
};
use crate::point::ChartPoint;
use crate::quadrature::{QuadratureBox, SupportBox};
use crate::report::{BoundSource, CheckRecord, ErrorRecord, Relation, RunReport, TOOLKIT_VERSION};

pub const DEFAULT_SLACK: f64 = 0.1;
/// Step of the finite-difference `dω` check.
pub const DIFFERENTIAL_STEP: f64 = 1e-4;
/// Distance from the boundary of the `∂̄`-residual subgrid.
pub const RESIDUAL_MARGIN: f64 = 0.1;
/// Exponent of the twist in the factorization check.
pub const FACTORIZATION_ETA: f64 = 0.5;

type Outcome = (Vec<CheckRecord>, serde_json::Value);

/// Loads, validates and runs a configuration file.
///
/// Errors are configuration problems (exit 2). Failures during the run are
/// recorded in [`RunReport::error`].
pub fn run_config(path: &Path) -> Result<RunReport> {
    let cfg = ExperimentConfig::load(path)?;
    run(&cfg)
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let start = Instant::now();
    let outcome = match cfg.kind {
        ExperimentKind::GeometryVerify => geometry_verify(cfg),
        ExperimentKind::DfSweep => df_experiment(cfg),
        ExperimentKind::Bkmkh => bkmkh_experiment(cfg),
        ExperimentKind::Bergman => bergman_experiment(cfg),
        ExperimentKind::Twisted => twisted_experiment(cfg),
        ExperimentKind::Detraz => detraz_experiment(cfg),
    };
    let (checks, details, error) = match outcome {
        Ok((checks, details)) => {
            let bad: Vec<&str> = checks.iter().filter(|c| !c.value.is_finite()).map(|c| c.name.as_str()).collect();
            if bad.is_empty() {
                (checks, details, None)
            } else {
                let e = Error::Numerical(format!("non-finite values in {}", bad.join(", ")));
                let kept = checks.iter().filter(|c| c.value.is_finite()).cloned().collect();
                (kept, details, Some(ErrorRecord::from_error(&e)))
            }
        }
        Err(e) => (Vec::new(), serde_json::Value::Null, Some(ErrorRecord::from_error(&e))),
    };
    Ok(RunReport {
        toolkit_version: TOOLKIT_VERSION.into(),
        config: cfg.clone(),
        checks,
        details,
        wall_clock_s: start.elapsed().as_secs_f64(),
        error,
    })
}

fn slack(cfg: &ExperimentConfig) -> f64 {
    cfg.slack.unwrap_or(DEFAULT_SLACK)
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

// ---------------------------------------------------------------------------
// geometry

fn is_kahler(spec: &RegistrySpec) -> bool {
    match spec.name.as_str() {
        "euclidean" | "fubini-study" => true,
        "hopf" | "conformal" => spec.n.unwrap_or(2) == 1,
        "product" => spec.factors.as_deref().unwrap_or_default().iter().all(is_kahler),
        _ => false,
    }
}

fn sample_coords(spec: &RegistrySpec, rng: &mut ChaCha8Rng) -> Result<Vec<C64>> {
    match spec.name.as_str() {
        "hopf" => Ok(hopf_chart(spec)?.sample(rng).coords().to_vec()),
        "product" => {
            let mut out = Vec::new();
            for f in spec.factors.as_deref().unwrap_or_default() {
                out.extend(sample_coords(f, rng)?);
            }
            Ok(out)
        }
        _ => {
            let n = crate::config::metric_dim(spec)?;
            Ok((0..n).map(|_| c(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7))).collect())
        }
    }
}

/// Eigenvalues of a Hermitian form relative to the metric, ascending.
fn relative_eigenvalues(form: &CMat, g: &CMat) -> Result<Vec<f64>> {
    let li = lower_inverse(&cholesky_lower(g)?);
    let m = &li * form * li.adjoint();
    let mut v = hermitian_eigenvalues(&m);
    v.sort_by(|a, b| a.total_cmp(b));
    Ok(v)
}

fn profile_error(vals: &[f64], top: f64) -> f64 {
    vals.iter().enumerate().map(|(i, v)| (v - if i == 0 { 0.0 } else { top }).abs()).fold(0.0, f64::max)
}

/// `φ = z₁ z̄ₙ + |zₙ|² + z₁²`, a complex test function for the commutator.
fn commutator_phi(n: usize) -> FnScalar {
    let last = n - 1;
    FnScalar::new(n, "phi", move |z| Ok(z[0] * z[last].conj() + cr(z[last].norm_sqr()) + z[0] * z[0]))
        .complex()
        .with_gradient(move |z| {
            let mut dz = vec![cr(0.0); n];
            let mut dzbar = vec![cr(0.0); n];
            dz[0] += z[last].conj() + z[0] * 2.0;
            dz[last] += z[last].conj();
            dzbar[last] += z[0] + z[last];
            Ok(Gradient { dz, dzbar })
        })
}

fn default_weights(n: usize) -> Vec<RegistrySpec> {
    let mut lin = RegistrySpec::named("re-linear");
    let mut coeffs = vec![[0.0, 0.0]; n];
    coeffs[0] = [2.0, 0.0];
    lin.coeffs = Some(coeffs);
    vec![RegistrySpec::named("zero"), RegistrySpec::named("norm-squared"), lin]
}

fn random_affine(rng: &mut ChaCha8Rng, n: usize) -> AffineVectorField {
    AffineVectorField {
        a: CMat::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
        b: (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
    }
}

fn geometry_verify(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec = cfg.metric.clone().unwrap_or_else(|| RegistrySpec::named("hopf").with_n(2));
    let g = resolve_metric(&spec)?;
    let n = g.dim();
    let tol = &cfg.tolerances;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let count = cfg.points.unwrap_or(100);
    let points = (0..count)
        .map(|_| ChartPoint::new(sample_coords(&spec, &mut rng)?))
        .collect::<Result<Vec<_>>>()?;
    let hopf = spec.name == "hopf";

    let (mut torsion_max, mut theta_min, mut q_min) = (0.0f64, f64::INFINITY, f64::INFINITY);
    let (mut theta_cf, mut q_cf, mut theta_prof, mut q_prof, mut kernel) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for z in &points {
        torsion_max = torsion_max.max(torsion_coeffs(&*g, z)?.max_abs());
        let theta = curvature_trace(&*g, z)?;
        let q = torsion_norm_form(&*g, z)?;
        let gm = eval_checked(&*g, z)?;
        let tv = relative_eigenvalues(&theta, &gm)?;
        let qv = relative_eigenvalues(&q, &gm)?;
        theta_min = theta_min.min(tv[0]);
        q_min = q_min.min(qv[0]);
        if hopf {
            let (ct, cq) = hopf_closed_forms(n, z)?;
            theta_cf = theta_cf.max(max_abs_diff(&theta, &ct));
            q_cf = q_cf.max(max_abs_diff(&q, &cq));
            theta_prof = theta_prof.max(profile_error(&tv, n as f64));
            q_prof = q_prof.max(profile_error(&qv, 1.0));
            // W₁ has unit length in the Hopf metric
            let w = w1(z);
            kernel = kernel.max(form_eval(&theta, &w).abs()).max(form_eval(&q, &w).abs());
        }
    }

    let mut checks = Vec::new();
    let torsion_tol = tol.torsion.unwrap_or(1e-8);
    if is_kahler(&spec) {
        checks.push(CheckRecord::error("torsion.max_abs", torsion_max, torsion_tol));
    } else {
        checks.push(CheckRecord::info("torsion.max_abs", torsion_max));
    }
    if spec.name == "fubini-study" {
        let pos = tol.positivity.unwrap_or(1e-8);
        checks.push(CheckRecord::gate("theta.min_relative_eig", theta_min, Relation::Above, 0.0, pos, BoundSource::Analytic));
    } else {
        checks.push(CheckRecord::info("theta.min_relative_eig", theta_min));
    }
    checks.push(CheckRecord::info("q.min_relative_eig", q_min));
    if hopf {
        let cf = tol.closed_form.unwrap_or(1e-6);
        checks.push(CheckRecord::error("hopf.theta_closed_form", theta_cf, cf));
        checks.push(CheckRecord::error("hopf.q_closed_form", q_cf, cf));
        checks.push(CheckRecord::error("hopf.theta_profile", theta_prof, cf));
        checks.push(CheckRecord::error("hopf.q_profile", q_prof, cf));
        checks.push(CheckRecord::error("hopf.kernel_w1", kernel, cf));
    }

    let fd_count = cfg.check_points.unwrap_or(20).min(points.len());
    let mut domega = 0.0f64;
    for z in &points[..fd_count] {
        domega = domega.max(kahler_differential(&*g, z, DIFFERENTIAL_STEP)?.max_defect());
    }
    checks.push(CheckRecord::error("domega_tau.max_defect", domega, tol.differential.unwrap_or(1e-5)));

    let weights = cfg.weights.clone().unwrap_or_else(|| default_weights(n));
    let phi = commutator_phi(n);
    let comm_tol = tol.commutator.unwrap_or(1e-4);
    let mut comm_rows = Vec::new();
    for w in &weights {
        let psi = resolve_weight(w, n)?;
        let mut worst = 0.0f64;
        for z in &points[..fd_count] {
            let (z1, z2) = (random_affine(&mut rng, n), random_affine(&mut rng, n));
            let (l, r) = commutator_check(&*g, &*psi, &z1, &z2, &phi, z)?;
            worst = worst.max((l - r).norm());
        }
        comm_rows.push(json!({ "weight": w.name, "max_defect": worst }));
        checks.push(CheckRecord::error(format!("commutator[psi={}]", w.name), worst, comm_tol));
    }

    let details = json!({
        "metric": g.label(),
        "n": n,
        "points": points.len(),
        "fd_points": fd_count,
        "differential_step": DIFFERENTIAL_STEP,
        "commutator": comm_rows,
    });
    Ok((checks, details))
}

// ---------------------------------------------------------------------------
// df sweep

fn df_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec = cfg.domain.clone().unwrap_or_else(|| RegistrySpec::named("product").with_n(2));
    let domain = resolve_defining(&spec)?;
    let etas = cfg.etas.clone().unwrap_or_else(default_eta_grid);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let margin = 1e-3;
    let planar_problem = |n: usize, rho: SharedScalar| -> Result<DFProblem> {
        let metric: SharedMetric = match &cfg.metric {
            Some(m) => resolve_metric(m)?,
            None => Arc::new(Euclidean::new(n)),
        };
        if metric.dim() != n {
            return Err(Error::Schema(format!("metric has dimension {}, domain {n}", metric.dim())));
        }
        let psi = match &cfg.weight {
            Some(w) => resolve_weight(w, n)?,
            None => Arc::new(Constant::new(n, 0.0)),
        };
        DFProblem::new(metric, psi, rho, 0.0)
    };
    let (problem, sample, shell): (DFProblem, DomainSample, Option<DomainSample>) = match domain {
        DefiningDomain::Product { n } => {
            if cfg.metric.is_some() || cfg.weight.is_some() {
                return Err(Error::Schema("the product domain fixes its metric and weight".into()));
            }
            let sample = product_sample(n, cfg.grid.unwrap_or(21), cfg.hopf_points.unwrap_or(50), margin, &mut rng)?;
            let shell = product_shell(n, 16, 4, &mut rng)?;
            (product_domain_assemble(n)?, sample, Some(shell))
        }
        DefiningDomain::Ball { n, radius } => {
            let rho = BallDefining { n, radius };
            let m = cfg.grid.unwrap_or(if n == 1 { 41 } else { 9 });
            let sample = box_grid_sample(&rho, radius, m, margin)?;
            (planar_problem(n, Arc::new(rho))?, sample, None)
        }
        DefiningDomain::Annulus { r_in, r_out } => {
            let rho = AnnulusDefining::new(r_in, r_out)?;
            let sample = box_grid_sample(&rho, r_out, cfg.grid.unwrap_or(41), margin)?;
            (planar_problem(1, Arc::new(rho))?, sample, None)
        }
        DefiningDomain::Square => {
            let rho = SquareDefining::planar();
            let sample = box_grid_sample(&rho, 1.0, cfg.grid.unwrap_or(41), margin)?;
            (planar_problem(1, Arc::new(rho))?, sample, None)
        }
    };
    let report = df_sweep(&problem, &sample, &etas, shell.as_ref())?;
    let mut checks = Vec::new();
    for (i, row) in report.rows.iter().enumerate() {
        let eta = fmt_num(row.eta);
        checks.push(CheckRecord::gate(
            format!("df.min_eig[eta={eta}]"),
            row.min_eig,
            Relation::AtLeast,
            0.0,
            report.psd_tol,
            BoundSource::Analytic,
        ));
        if let Some(b) = row.b {
            checks.push(CheckRecord::info(format!("df.b[eta={eta}]"), b));
        }
        if let Some(shell) = &report.shell_min_eig {
            checks.push(CheckRecord::info(format!("df.shell_min_eig[eta={eta}]"), shell[i]));
        }
    }
    let details = json!({
        "domain": spec.name,
        "metric": problem.metric.label(),
        "report": report,
    });
    Ok((checks, details))
}

// ---------------------------------------------------------------------------
// BKMKH identity

fn bkmkh_rows<M, P, K, U>(g: &M, psi: &P, kappa: &K, u: &U, bounds: &SupportBox, resolutions: &[usize]) -> Result<Vec<(usize, BkmkhResult)>>
where
    M: MetricField + ?Sized,
    P: ScalarField + ?Sized,
    K: ScalarField + ?Sized,
    U: ZeroOneForm + ?Sized,
{
    resolutions
        .iter()
        .map(|&res| Ok((res, bkmkh_residual(g, psi, kappa, u, &QuadratureBox::uniform(bounds.clone(), res)?)?)))
        .collect()
}

/// Quadrature box around a bump support, offset so that no node layout is
/// symmetric about the center.
fn offset_box(center: &[C64], w: f64) -> Result<SupportBox> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for z in center {
        lo.extend([z.re - 1.05 * w, z.im - 1.2 * w]);
        hi.extend([z.re + 1.3 * w, z.im + 1.1 * w]);
    }
    SupportBox::new(lo, hi)
}

fn bkmkh_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec = cfg.metric.clone().unwrap_or_else(|| RegistrySpec::named("euclidean").with_n(2));
    let resolutions = cfg.resolutions.clone().unwrap_or_else(|| vec![16, 32, 48]);
    if spec.n.unwrap_or(2) != 2 {
        return Err(Error::InvalidInput("the identity test cases are two-dimensional".into()));
    }
    let center = vec![c(0.6, 0.0), c(0.0, 0.3)];
    let w = 0.15;
    let bounds = offset_box(&center, w)?;
    let psi = Constant::new(2, 0.0);
    let (rows, case) = match spec.name.as_str() {
        "euclidean" => {
            resolve_metric(&spec)?;
            let u = ScaledForm::basis(Bump::new(center.clone(), w, 3).with_phase(vec![cr(12.0), c(0.0, 6.0)]), 0);
            (bkmkh_rows(&Euclidean::new(2), &psi, &Constant::new(2, 1.0), &u, &bounds, &resolutions)?, "flat")
        }
        "hopf" => {
            resolve_metric(&spec)?;
            let u = ScaledForm::basis(Bump::new(center.clone(), w, 3), 1);
            let kappa = AffineRe::new(vec![cr(1.0), cr(0.0)], 2.0);
            (bkmkh_rows(&HopfMetric::new(2), &psi, &kappa, &u, &bounds, &resolutions)?, "hopf")
        }
        other => return Err(Error::InvalidInput(format!("no identity test case for metric `{other}`"))),
    };
    let mut checks: Vec<CheckRecord> =
        rows.iter().map(|(res, r)| CheckRecord::info(format!("bkmkh.relative[res={res}]"), r.relative)).collect();
    if rows.len() > 1 {
        let worst = rows.windows(2).map(|p| p[1].1.relative / p[0].1.relative).fold(0.0, f64::max);
        let tol = cfg.tolerances.decrease.unwrap_or(1e-12);
        checks.push(CheckRecord::gate("bkmkh.successive_ratio", worst, Relation::Below, 1.0, tol, BoundSource::MeasuredBaseline));
    }
    let last = rows.last().map(|r| r.1.relative).unwrap_or(f64::NAN);
    checks.push(CheckRecord::error("bkmkh.final_relative", last, cfg.tolerances.residual.unwrap_or(1e-2)));
    let details = json!({
        "case": case,
        "rows": rows.iter().map(|(res, r)| json!({ "resolution": res, "result": r })).collect::<Vec<_>>(),
    });
    Ok((checks, details))
}

// ---------------------------------------------------------------------------
// planar experiments

fn planar_domain(cfg: &ExperimentConfig, default: PlanarDomain) -> Result<PlanarDomain> {
    cfg.domain.as_ref().map(resolve_planar_domain).transpose().map(|d| d.unwrap_or(default))
}

fn planar_psi(cfg: &ExperimentConfig, grid: &Grid) -> Result<Vec<f64>> {
    match &cfg.weight {
        None => Ok(vec![0.0; grid.len()]),
        Some(w) => {
            let psi = resolve_weight(w, 1)?;
            grid.nodes.iter().map(|z| field::real_value(&*psi, &[*z])).collect()
        }
    }
}

fn single_resolution(cfg: &ExperimentConfig, default: usize) -> Result<usize> {
    match cfg.resolutions.as_deref() {
        None => Ok(default),
        Some([r]) => Ok(*r),
        Some(_) => Err(Error::Schema(format!("{} takes a single resolution", cfg.kind.name()))),
    }
}

fn bergman_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    let domain = planar_domain(cfg, PlanarDomain::unit_disc())?;
    let grid = Grid::new(domain, single_resolution(cfg, 256)?)?;
    let space = WeightedSpace::new(&grid, planar_psi(cfg, &grid)?, 0.0)?;
    let degree = cfg.degree.unwrap_or(25);
    let family = test_family(cfg.family_size.unwrap_or(20), cfg.seed);
    let s_values = cfg.s_values.clone().unwrap_or_else(|| vec![0.1, 0.2, 0.3, 0.4]);
    let slack = slack(cfg);
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    for &s in &s_values {
        let r = operator_bound_experiment(&space, degree, s, &family, slack)?;
        let tag = fmt_num(s);
        checks.push(CheckRecord::gate(format!("bergman.max_ratio[s={tag}]"), r.max_ratio, Relation::AtMostRelative, r.bound, slack, BoundSource::Analytic));
        let skipped = r.rows.iter().filter(|row| row.skipped.is_some()).count();
        checks.push(CheckRecord::info(format!("bergman.skipped[s={tag}]"), skipped as f64));
        reports.push(r);
    }
    let basis = HoloBasis::new(&space, degree)?;
    let diag = basis.diagnostics();
    checks.push(CheckRecord::info("bergman.gram_condition", diag.gram_condition));
    let laws = projection_laws(&space, &basis, &family, 2 * family.len(), cfg.seed)?;
    let ptol = cfg.tolerances.projection.unwrap_or(1e-8);
    checks.push(CheckRecord::error("bergman.idempotence", laws.max_idempotence_defect, ptol));
    checks.push(CheckRecord::error("bergman.self_adjointness", laws.max_self_adjoint_defect, ptol));
    checks.push(CheckRecord::gate("bergman.contraction", laws.max_contraction, Relation::AtMost, 1.0, ptol, BoundSource::Analytic));
    let ftol = cfg.tolerances.factorization.unwrap_or(1e-6);
    let mut factor = Vec::new();
    let mut worst = 0.0f64;
    for v in &family {
        let d = boas_straube_defect(&space, degree, v, FACTORIZATION_ETA)?;
        worst = worst.max(d);
        factor.push(json!({ "label": v.label, "defect": d }));
    }
    checks.push(CheckRecord::error("bergman.factorization", worst, ftol));
    let details = json!({
        "domain": grid.domain.name(),
        "resolution": grid.resolution,
        "degree": degree,
        "family": family,
        "bounds": reports,
        "projection_laws": laws,
        "factorization_eta": FACTORIZATION_ETA,
        "factorization": factor,
        "basis": diag,
    });
    Ok((checks, details))
}

fn twisted_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    let domain = planar_domain(cfg, PlanarDomain::unit_disc())?;
    let grid = Grid::new(domain, single_resolution(cfg, 256)?)?;
    let space = WeightedSpace::new(&grid, planar_psi(cfg, &grid)?, 0.0)?;
    let degree = cfg.degree.unwrap_or(25);
    let s_values = cfg.s_values.clone().unwrap_or_else(|| vec![0.1, 0.25]);
    let monomials = cfg.monomials.clone().unwrap_or_else(|| vec![0, 1]);
    let slack = slack(cfg);
    let rtol = cfg.tolerances.residual.unwrap_or(1e-2);
    let otol = cfg.tolerances.projection.unwrap_or(1e-8);
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for &s in &s_values {
        let b = b_for_s(s);
        for &m in &monomials {
            let f = grid.map(|z| z.powu(m));
            let sol = twisted_solution(&space, degree, &f, Kappa::power(2.0 * s), b, RESIDUAL_MARGIN)?;
            let d = sol.diagnostics;
            let tag = format!("s={};f=z^{m}", fmt_num(s));
            checks.push(CheckRecord::error(format!("twisted.residual[{tag}]"), d.dbar_residual, rtol));
            checks.push(CheckRecord::gate(format!("twisted.ratio[{tag}]"), d.ratio, Relation::AtMostRelative, solution_bound(b), slack, BoundSource::Analytic));
            checks.push(CheckRecord::error(format!("twisted.orthogonality[{tag}]"), d.orthogonality, otol));
            rows.push(json!({ "s": s, "monomial": m, "diagnostics": d }));
        }
    }
    let details = json!({
        "domain": grid.domain.name(),
        "resolution": grid.resolution,
        "degree": degree,
        "margin": RESIDUAL_MARGIN,
        "rows": rows,
    });
    Ok((checks, details))
}

fn detraz_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    let domain = planar_domain(cfg, PlanarDomain::Square)?;
    let resolutions = cfg.resolutions.clone().unwrap_or_else(|| vec![256, 384]);
    let s_values = cfg.s_values.clone().unwrap_or_else(|| vec![0.25]);
    let m_max = cfg.m_max.unwrap_or(30);
    let stol = cfg.tolerances.stability.unwrap_or(0.05);
    let mut checks = Vec::new();
    let mut sweeps = Vec::new();
    for &s in &s_values {
        let mut maxima = Vec::new();
        for &res in &resolutions {
            let grid = Grid::new(domain, res)?;
            let sweep = detraz_sweep(&grid, 0..=m_max, s)?;
            checks.push(CheckRecord::info(format!("detraz.max_ratio[s={};res={res}]", fmt_num(s)), sweep.max_ratio));
            maxima.push(sweep.max_ratio);
            sweeps.push(sweep);
        }
        if maxima.len() > 1 {
            let (first, last) = (maxima[0], maxima[maxima.len() - 1]);
            let change = (last - first).abs() / first.abs();
            checks.push(CheckRecord::gate(format!("detraz.refinement_change[s={}]", fmt_num(s)), change, Relation::AtMost, 0.0, stol, BoundSource::MeasuredBaseline));
        }
    }
    Ok((checks, json!({ "sweeps": sweeps })))
}
