//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line with
//! its measurements and runtime; the test fails if any criterion fails.

use std::time::{Duration, Instant};

use hermitian_bergman::bergman::{b_for_s, operator_bound, solution_bound};
use hermitian_bergman::config::{ExperimentConfig, ExperimentKind, RegistrySpec};
use hermitian_bergman::df::{interpolation_bound_terms, psi_interpolation_check};
use hermitian_bergman::field::LogNormSquared;
use hermitian_bergman::geometry::{complex_hessian, curvature_trace};
use hermitian_bergman::linalg::{c, cr, max_abs_diff, C64};
use hermitian_bergman::models::{product_domain_assemble, HopfChart, HopfMetric};
use hermitian_bergman::report::RunReport;
use hermitian_bergman::runner::run;
use hermitian_bergman::ChartPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn config(kind: ExperimentKind, f: impl FnOnce(&mut ExperimentConfig)) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(kind);
    cfg.seed = 20;
    f(&mut cfg);
    cfg
}

fn metric(name: &str, n: usize) -> Option<RegistrySpec> {
    Some(RegistrySpec::named(name).with_n(n))
}

fn planar(name: &str) -> Option<RegistrySpec> {
    Some(RegistrySpec::named(name))
}

fn execute(cfg: &ExperimentConfig) -> RunReport {
    let r = run(cfg).expect("valid configuration");
    if let Some(e) = &r.error {
        println!("    {} run error: {}", cfg.kind.name(), e.message);
    }
    r
}

/// Gating records whose names start with one of `prefixes`; all must pass
/// and at least one must exist.
fn gated(r: &RunReport, prefixes: &[&str]) -> (bool, Vec<String>) {
    let recs: Vec<_> = r.checks.iter().filter(|c| c.gating && prefixes.iter().any(|p| c.name.starts_with(p))).collect();
    let lines = recs
        .iter()
        .map(|c| format!("{}={:.3e}{}", c.name, c.value, if c.pass { "" } else { "(FAIL)" }))
        .collect();
    (r.error.is_none() && !recs.is_empty() && recs.iter().all(|c| c.pass), lines)
}

fn value(r: &RunReport, name: &str) -> f64 {
    r.checks.iter().find(|c| c.name == name).map(|c| c.value).unwrap_or(f64::NAN)
}

fn criterion(results: &mut Vec<(usize, bool)>, id: usize, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let in_time = limit.is_none_or(|l| took < l);
    let pass = out.pass && in_time;
    let limit_txt = limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default();
    println!(
        "criterion {id:>2} {}: {title} [{:.1}s{limit_txt}] {}",
        if pass { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        out.detail
    );
    results.push((id, pass));
}

/// `Θ = n ∂∂̄ log|z|²` for the Hopf metric, since `det g = |z|^{−2n}`.
fn hopf_curvature_oracle(n: usize, points: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for z in HopfChart::standard(n).samples(points, &mut rng) {
        let theta = curvature_trace(&HopfMetric::new(n), &z).unwrap();
        let oracle = complex_hessian(&LogNormSquared { n }, &z).unwrap() * cr(n as f64);
        worst = worst.max(max_abs_diff(&theta, &oracle));
    }
    worst
}

#[test]
fn acceptance() {
    let mut results = Vec::new();
    let mut hopf_runs = Vec::new();

    criterion(&mut results, 1, "Hopf closed forms and eigenvalue profiles, n = 2, 3", Some(Duration::from_secs(10)), || {
        let mut pass = true;
        let mut detail = Vec::new();
        for n in [2, 3] {
            let r = execute(&config(ExperimentKind::GeometryVerify, |c| c.metric = metric("hopf", n)));
            let (ok, lines) = gated(&r, &["hopf."]);
            let oracle = hopf_curvature_oracle(n, 100, 100 + n as u64);
            pass &= ok && oracle <= 1e-6;
            detail.push(format!("n={n}: {} log-det oracle={oracle:.2e}", lines.join(" ")));
            hopf_runs.push(r);
        }
        Outcome { pass, detail: detail.join("; ") }
    });

    let mut euclid = None;
    criterion(&mut results, 2, "Kähler torsion vanishes; Fubini-Study curvature positive", Some(Duration::from_secs(10)), || {
        let e = execute(&config(ExperimentKind::GeometryVerify, |c| c.metric = metric("euclidean", 2)));
        let fs = execute(&config(ExperimentKind::GeometryVerify, |c| c.metric = metric("fubini-study", 2)));
        let (ok_e, le) = gated(&e, &["torsion."]);
        let (ok_fs, lfs) = gated(&fs, &["torsion.", "theta."]);
        euclid = Some(e);
        Outcome { pass: ok_e && ok_fs, detail: format!("euclidean: {} fubini-study: {}", le.join(" "), lfs.join(" ")) }
    });

    criterion(&mut results, 3, "dω = τω for the Hopf metric at 20 points, h = 1e-4", Some(Duration::from_secs(10)), || {
        let r = &hopf_runs[0];
        let (ok, lines) = gated(r, &["domega_tau."]);
        let fd = r.details["fd_points"].as_u64().unwrap_or(0);
        let step = r.details["differential_step"].as_f64().unwrap_or(0.0);
        Outcome { pass: ok && fd == 20 && step == 1e-4, detail: format!("{} points={fd}", lines.join(" ")) }
    });

    criterion(&mut results, 4, "commutator identity over {Euclidean, Hopf} × {0, |z|², 2 Re z₁}", Some(Duration::from_secs(30)), || {
        let e = euclid.as_ref().unwrap();
        let h = &hopf_runs[0];
        let (ok_e, le) = gated(e, &["commutator"]);
        let (ok_h, lh) = gated(h, &["commutator"]);
        let count = le.len() + lh.len();
        Outcome { pass: ok_e && ok_h && count == 6, detail: format!("euclidean: {} hopf: {}", le.join(" "), lh.join(" ")) }
    });

    criterion(&mut results, 5, "integral identity residual decreases over 16/32/48", Some(Duration::from_secs(600)), || {
        let mut pass = true;
        let mut detail = Vec::new();
        for m in ["euclidean", "hopf"] {
            let r = execute(&config(ExperimentKind::Bkmkh, |c| {
                c.metric = metric(m, 2);
                c.resolutions = Some(vec![16, 32, 48]);
            }));
            let (ok, _) = gated(&r, &["bkmkh."]);
            let rel: Vec<String> = [16, 32, 48].iter().map(|res| format!("{:.2e}", value(&r, &format!("bkmkh.relative[res={res}]")))).collect();
            pass &= ok;
            detail.push(format!("{m}: {}", rel.join(" > ")));
        }
        Outcome { pass, detail: detail.join("; ") }
    });

    criterion(&mut results, 6, "product-domain sweep passes for η ∈ {0, 0.05, …, 1}, n = 2, 3", Some(Duration::from_secs(120)), || {
        let mut pass = true;
        let mut detail = Vec::new();
        for n in [2, 3] {
            let r = execute(&config(ExperimentKind::DfSweep, |c| {
                c.domain = Some(RegistrySpec::named("product").with_n(n));
                c.grid = Some(21);
                c.hopf_points = Some(50);
            }));
            let (ok, lines) = gated(&r, &["df.min_eig"]);
            let worst = r.checks.iter().filter(|c| c.gating).map(|c| c.value).fold(f64::INFINITY, f64::min);
            let samples = r.details["report"]["sample_size"].as_u64().unwrap_or(0);
            pass &= ok && lines.len() == 21 && samples == 21 * 21 * 50;
            detail.push(format!("n={n}: {} exponents, {samples} points, min eig {worst:.2e}", lines.len()));
        }
        Outcome { pass, detail: detail.join("; ") }
    });

    criterion(&mut results, 7, "interpolation identity and inequality", Some(Duration::from_secs(30)), || {
        let prob = product_domain_assemble(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        let chart = HopfChart::standard(1);
        let (mut identity, mut margin) = (0.0f64, f64::INFINITY);
        for _ in 0..100 {
            let mut coords = vec![c(rng.gen_range(-0.95..0.95), rng.gen_range(-0.95..0.95))];
            coords.extend_from_slice(&chart.sample(&mut rng));
            let z = ChartPoint::new(coords).unwrap();
            let a = rng.gen_range(0.0..0.4);
            let b = rng.gen_range(0.6..1.0);
            let s = rng.gen_range(a / 2.0 + 1e-3..b / 2.0 - 1e-3);
            let (lhs, rhs) = psi_interpolation_check(&prob, a, b, s, &z).unwrap();
            let scale = lhs.iter().fold(1.0f64, |m, v| m.max(v.norm()));
            identity = identity.max(max_abs_diff(&lhs, &rhs) / scale);
            // the product domain passes on all of [0, 1]
            let v: Vec<C64> = (0..2).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let (quad, bound, _) = interpolation_bound_terms(&prob, 0.0, 1.0, s, &z, &v).unwrap();
            margin = margin.min((quad - bound) / bound.abs().max(1.0));
        }
        Outcome {
            pass: identity <= 1e-12 && margin >= -1e-9,
            detail: format!("identity defect {identity:.2e}, min relative inequality margin {margin:.2e}"),
        }
    });

    criterion(&mut results, 8, "twisted solution on disc and square, s = 0.1, 0.25, res 256", Some(Duration::from_secs(300)), || {
        let mut pass = true;
        let mut detail = Vec::new();
        for d in ["disc", "square"] {
            let r = execute(&config(ExperimentKind::Twisted, |c| {
                c.domain = planar(d);
                c.s_values = Some(vec![0.1, 0.25]);
                c.resolutions = Some(vec![256]);
                c.slack = Some(0.1);
            }));
            let (ok, _) = gated(&r, &["twisted.residual", "twisted.ratio"]);
            let mut bounds_ok = true;
            for s in [0.1f64, 0.25] {
                let oracle = (1.0 + (1.0 - 2.0 * s) / (2.0 * s)).powf(-0.5);
                bounds_ok &= r.checks.iter().filter(|c| c.name.starts_with(&format!("twisted.ratio[s={s};"))).all(|c| (c.bound.unwrap() - oracle).abs() <= 1e-15);
            }
            let worst_res = r.checks.iter().filter(|c| c.name.starts_with("twisted.residual")).map(|c| c.value).fold(0.0, f64::max);
            let ratios: Vec<String> = r.checks.iter().filter(|c| c.name.starts_with("twisted.ratio")).map(|c| format!("{:.3}/{:.3}", c.value, c.bound.unwrap())).collect();
            pass &= ok && bounds_ok;
            detail.push(format!("{d}: max residual {worst_res:.2e}, ratio/bound {}", ratios.join(" ")));
        }
        Outcome { pass, detail: detail.join("; ") }
    });

    criterion(&mut results, 9, "weighted projection bound, projection laws, factorization", Some(Duration::from_secs(300)), || {
        let quarter = operator_bound(b_for_s(0.25));
        let mut pass = (quarter - (2.0 + 2f64.sqrt())).abs() <= 1e-12 && (solution_bound(b_for_s(0.25)) - 0.5f64.sqrt()).abs() <= 1e-15;
        let mut detail = vec![format!("bound(1/4) = {quarter:.6}")];
        for d in ["disc", "square"] {
            let r = execute(&config(ExperimentKind::Bergman, |c| {
                c.domain = planar(d);
                c.s_values = Some(vec![0.1, 0.2, 0.3, 0.4]);
                c.family_size = Some(20);
                c.resolutions = Some(vec![256]);
                c.slack = Some(0.1);
            }));
            let (ok, _) = gated(&r, &["bergman."]);
            let family = r.details["family"].as_array().map(|f| f.len()).unwrap_or(0);
            let ratios: Vec<String> = r
                .checks
                .iter()
                .filter(|c| c.name.starts_with("bergman.max_ratio"))
                .map(|c| format!("{:.3}/{:.3}", c.value, c.bound.unwrap()))
                .collect();
            pass &= ok && family == 20 && ratios.len() == 4;
            detail.push(format!(
                "{d}: ratio/bound {} idempotence {:.1e} self-adjoint {:.1e} contraction {:.6} factorization {:.1e}",
                ratios.join(" "),
                value(&r, "bergman.idempotence"),
                value(&r, "bergman.self_adjointness"),
                value(&r, "bergman.contraction"),
                value(&r, "bergman.factorization"),
            ));
        }
        Outcome { pass, detail: detail.join("; ") }
    });

    criterion(&mut results, 10, "monomial derivative ratios on the square, 256 → 384", Some(Duration::from_secs(120)), || {
        let r = execute(&config(ExperimentKind::Detraz, |c| {
            c.domain = planar("square");
            c.s_values = Some(vec![0.25]);
            c.resolutions = Some(vec![256, 384]);
            c.m_max = Some(30);
        }));
        let (ok, lines) = gated(&r, &["detraz.refinement_change"]);
        let (a, b) = (value(&r, "detraz.max_ratio[s=0.25;res=256]"), value(&r, "detraz.max_ratio[s=0.25;res=384]"));
        Outcome { pass: ok && a.is_finite() && b.is_finite(), detail: format!("max {a:.5} → {b:.5}, {}", lines.join(" ")) }
    });

    criterion(&mut results, 11, "identical configuration and seed give byte-identical CSV", None, || {
        let cfgs = [
            config(ExperimentKind::GeometryVerify, |c| c.metric = metric("hopf", 2)),
            config(ExperimentKind::DfSweep, |c| c.hopf_points = Some(10)),
            config(ExperimentKind::Detraz, |c| c.resolutions = Some(vec![64, 96])),
        ];
        let dir = tempfile::tempdir().unwrap();
        let mut pass = true;
        for (k, cfg) in cfgs.iter().enumerate() {
            let mut bytes = Vec::new();
            for rep in 0..2 {
                let out = dir.path().join(format!("{k}-{rep}"));
                let paths = execute(cfg).emit(&out, &[hermitian_bergman::config::Format::Csv]).unwrap();
                bytes.push(std::fs::read(&paths[0]).unwrap());
            }
            pass &= !bytes[0].is_empty() && bytes[0] == bytes[1];
        }
        Outcome { pass, detail: format!("{} configurations compared", cfgs.len()) }
    });

    let failed: Vec<usize> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    println!("acceptance: {}/{} criteria pass", results.len() - failed.len(), results.len());
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
