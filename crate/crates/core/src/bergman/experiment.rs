//! Operator-bound, factorization, Detraz and Cauchy-estimate experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::basis::{gram_and_project, GridFn, HoloBasis, WeightedSpace};
use super::domain::{Flavor, Grid, PlanarDomain};
use crate::error::{Error, Result};
use crate::linalg::{c, cr, C64};

/// `v = (Σ c z^j z̄^k) · (−ρ)^{−t}`.
#[derive(Debug, Clone, Serialize)]
pub struct TestFunction {
    pub label: String,
    pub terms: Vec<(C64, u32, u32)>,
    pub t: f64,
}

impl TestFunction {
    pub fn monomial(j: u32, k: u32, t: f64) -> Self {
        let label = match (j, k) {
            (0, 0) => "1".to_string(),
            _ => format!("z^{j} zbar^{k}"),
        };
        let label = if t == 0.0 { label } else { format!("{label} (-rho)^-{t}") };
        Self { label, terms: vec![(cr(1.0), j, k)], t }
    }

    pub fn smooth_value(&self, z: C64) -> C64 {
        self.terms.iter().map(|&(c, j, k)| c * z.powu(j) * z.conj().powu(k)).sum()
    }

    pub fn is_holomorphic(&self) -> bool {
        self.t == 0.0 && self.terms.iter().all(|t| t.2 == 0)
    }

    pub fn on(&self, grid: &Grid) -> GridFn {
        GridFn::with_power(grid.map(|z| self.smooth_value(z)), -self.t)
    }
}

/// `{z̄^m (−ρ)^{−t} : m ≤ 3, t ∈ {0, 0.2}}` followed by seeded random
/// combinations of `z^j z̄^k` (`j, k ≤ 3`) with `t ∈ {0, 0.1, 0.2}`.
pub fn test_family(count: usize, seed: u64) -> Vec<TestFunction> {
    let mut out = Vec::with_capacity(count);
    for t in [0.0, 0.2] {
        for m in 0..=3 {
            out.push(TestFunction::monomial(0, m, t));
        }
    }
    out.truncate(count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = 0;
    while out.len() < count {
        let nterms = rng.gen_range(1..=3);
        let terms: Vec<(C64, u32, u32)> = (0..nterms)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                (c(re, im), rng.gen_range(0..=3), rng.gen_range(0..=3))
            })
            .collect();
        let t = [0.0, 0.1, 0.2][rng.gen_range(0..3)];
        out.push(TestFunction { label: format!("random-{idx}"), terms, t });
        idx += 1;
    }
    out
}

/// `B = (1 − 2s)/(2s)`.
pub fn b_for_s(s: f64) -> f64 {
    (1.0 - 2.0 * s) / (2.0 * s)
}

/// `√(1+B) / (√(1+B) − 1)`.
pub fn operator_bound(b: f64) -> f64 {
    let r = (1.0 + b).sqrt();
    r / (r - 1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub label: String,
    /// `‖(−ρ)^{s} P v‖ / ‖(−ρ)^{s} v‖`.
    pub ratio_plus: Option<f64>,
    /// `‖(−ρ)^{−s} P v‖ / ‖(−ρ)^{−s} v‖`.
    pub ratio_minus: Option<f64>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub domain: String,
    pub resolution: usize,
    pub degree: usize,
    pub s: f64,
    pub b: f64,
    pub bound: f64,
    pub slack: f64,
    pub max_ratio: f64,
    pub max_idempotence_defect: f64,
    pub gram_condition: f64,
    pub pass: bool,
    pub rows: Vec<BoundRow>,
}

/// Both weighted ratios of `P_ψ` for every test function against
/// `√(1+B)/(√(1+B)−1)·(1 + slack)`.
pub fn operator_bound_experiment(
    space: &WeightedSpace<'_>,
    degree: usize,
    s: f64,
    family: &[TestFunction],
    slack: f64,
) -> Result<BoundReport> {
    if !(s > 0.0 && s < 0.5) {
        return Err(Error::InvalidInput(format!("s = {s} outside (0, 1/2)")));
    }
    let grid = space.grid;
    let basis = HoloBasis::new(space, degree)?;
    let plus = WeightedSpace::new(grid, space.psi.clone(), space.weight_power + 2.0 * s)?;
    let minus = WeightedSpace::new(grid, space.psi.clone(), space.weight_power - 2.0 * s)?;
    let b = b_for_s(s);
    let bound = operator_bound(b);
    let mut rows = Vec::with_capacity(family.len());
    let mut max_ratio: f64 = 0.0;
    let mut max_idem: f64 = 0.0;
    for v in family {
        let gv = v.on(grid);
        let pr = gram_and_project(space, &basis, &gv)?;
        max_idem = max_idem.max(pr.idempotence_defect);
        let pv = pr.as_gridfn();
        let ratio = |sp: &WeightedSpace<'_>| -> Result<Option<f64>> {
            let den = sp.norm(&gv)?;
            Ok((den > 0.0).then(|| sp.norm(&pv).map(|n| n / den)).transpose()?)
        };
        let ratio_plus = ratio(&plus)?;
        let (ratio_minus, skipped) = if 2.0 * (s + v.t) >= 1.0 {
            (None, Some(format!("(-rho)^-s v is not square integrable (s + t = {})", s + v.t)))
        } else {
            (ratio(&minus)?, None)
        };
        for r in [ratio_plus, ratio_minus].into_iter().flatten() {
            max_ratio = max_ratio.max(r);
        }
        rows.push(BoundRow { label: v.label.clone(), ratio_plus, ratio_minus, skipped });
    }
    Ok(BoundReport {
        domain: grid.domain.name(),
        resolution: grid.resolution,
        degree,
        s,
        b,
        bound,
        slack,
        max_ratio,
        max_idempotence_defect: max_idem,
        gram_condition: basis.gram_condition,
        pass: max_ratio <= bound * (1.0 + slack),
        rows,
    })
}

/// Ratios below this are projections that vanish to quadrature accuracy.
pub const NULL_RATIO: f64 = 1e-3;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatioChange {
    /// Largest relative change among ratios that are resolved in both runs.
    pub max_relative_change: f64,
    /// Largest ratio below [`NULL_RATIO`] in either run.
    pub max_null_ratio: f64,
}

/// Compares the ratios of two runs over the same family.
pub fn ratio_change(a: &BoundReport, b: &BoundReport) -> RatioChange {
    let mut out = RatioChange { max_relative_change: 0.0, max_null_ratio: 0.0 };
    for (x, y) in a.rows.iter().zip(&b.rows) {
        for (p, q) in [(x.ratio_plus, y.ratio_plus), (x.ratio_minus, y.ratio_minus)] {
            if let (Some(p), Some(q)) = (p, q) {
                if p >= NULL_RATIO && q >= NULL_RATIO {
                    out.max_relative_change = out.max_relative_change.max((p - q).abs() / p.max(q));
                } else {
                    out.max_null_ratio = out.max_null_ratio.max(p.max(q));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionLaws {
    pub max_idempotence_defect: f64,
    /// `max |⟨Pv, w⟩ − ⟨v, Pw⟩| / (‖v‖‖w‖)` over the pairs.
    pub max_self_adjoint_defect: f64,
    /// `max ‖Pv‖/‖v‖`.
    pub max_contraction: f64,
    pub pairs: usize,
}

/// Idempotence, self-adjointness and contraction over seeded random pairs
/// drawn from `family`.
pub fn projection_laws(space: &WeightedSpace<'_>, basis: &HoloBasis, family: &[TestFunction], pairs: usize, seed: u64) -> Result<ProjectionLaws> {
    let grid = space.grid;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let funcs: Vec<GridFn> = family.iter().map(|v| v.on(grid)).collect();
    let projs = funcs.iter().map(|v| gram_and_project(space, basis, v)).collect::<Result<Vec<_>>>()?;
    let norms = funcs.iter().map(|v| space.norm(v)).collect::<Result<Vec<_>>>()?;
    let mut out = ProjectionLaws { max_idempotence_defect: 0.0, max_self_adjoint_defect: 0.0, max_contraction: 0.0, pairs };
    for (p, n) in projs.iter().zip(&norms) {
        out.max_idempotence_defect = out.max_idempotence_defect.max(p.idempotence_defect);
        out.max_contraction = out.max_contraction.max(space.norm(&p.as_gridfn())? / n);
    }
    for _ in 0..pairs {
        let a = rng.gen_range(0..funcs.len());
        let b = rng.gen_range(0..funcs.len());
        let lhs = space.inner(&projs[a].as_gridfn(), &funcs[b])?;
        let rhs = space.inner(&funcs[a], &projs[b].as_gridfn())?;
        out.max_self_adjoint_defect = out.max_self_adjoint_defect.max((lhs - rhs).norm() / (norms[a] * norms[b]));
    }
    Ok(out)
}

/// Relative defect of `P_ψ v = P_ψ(κ⁻¹ P_{ψ+log κ}(κ v))` for `κ = (−ρ)^eta`.
pub fn boas_straube_defect(space: &WeightedSpace<'_>, degree: usize, v: &TestFunction, eta: f64) -> Result<f64> {
    let grid = space.grid;
    let basis = HoloBasis::new(space, degree)?;
    let gv = v.on(grid);
    let lhs = gram_and_project(space, &basis, &gv)?.as_gridfn();
    let twisted = WeightedSpace::new(grid, space.psi.clone(), space.weight_power - eta)?;
    let tbasis = HoloBasis::new(&twisted, degree)?;
    let kv = GridFn::with_power(gv.values.clone(), gv.rho_power + eta);
    let inner = gram_and_project(&twisted, &tbasis, &kv)?;
    let back = GridFn::with_power(inner.values, -eta);
    let rhs = gram_and_project(space, &basis, &back)?.as_gridfn();
    let diff = GridFn::smooth(lhs.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect());
    let scale = space.norm(&lhs)?.max(space.norm(&gv)? * 1e-12);
    Ok(space.norm(&diff)? / scale)
}

/// `‖δ^{1−s} u′‖ / ‖δ^{−s} u‖` for holomorphic `u` given as `z ↦ (u, u′)`.
pub fn detraz_ratio<F: Fn(C64) -> (C64, C64)>(grid: &Grid, u: F, s: f64) -> Result<f64> {
    let num_m = grid.power_mass(Flavor::Delta, 2.0 - 2.0 * s)?;
    let den_m = grid.power_mass(Flavor::Delta, -2.0 * s)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (k, &z) in grid.nodes.iter().enumerate() {
        let (v, d) = u(z);
        num += d.norm_sqr() * num_m[k];
        den += v.norm_sqr() * den_m[k];
    }
    if !(den > 0.0) {
        return Err(Error::InvalidInput("u vanishes on the grid".into()));
    }
    crate::error::ensure_finite((num / den).sqrt(), "Detraz ratio")
}

#[derive(Debug, Clone, Serialize)]
pub struct DetrazSweep {
    pub domain: String,
    pub resolution: usize,
    pub s: f64,
    pub ratios: Vec<(u32, f64)>,
    pub max_ratio: f64,
    pub argmax: u32,
}

/// Detraz ratios of `z^m` for `m` in `range`.
pub fn detraz_sweep(grid: &Grid, degrees: std::ops::RangeInclusive<u32>, s: f64) -> Result<DetrazSweep> {
    let mut ratios = Vec::new();
    let (mut max_ratio, mut argmax) = (0.0, *degrees.start());
    for m in degrees {
        let r = detraz_ratio(grid, |z| (z.powu(m), if m == 0 { cr(0.0) } else { z.powu(m - 1) * m as f64 }), s)?;
        if r > max_ratio {
            max_ratio = r;
            argmax = m;
        }
        ratios.push((m, r));
    }
    Ok(DetrazSweep { domain: grid.domain.name(), resolution: grid.resolution, s, ratios, max_ratio, argmax })
}

#[derive(Debug, Clone, Serialize)]
pub struct CauchyEstimate {
    pub constant: f64,
    /// Smallest constant that works for the whole sweep.
    pub measured_constant: f64,
    pub pass: bool,
    pub rows: Vec<(f64, u32, f64, f64)>,
}

/// `|u′(0)|² ≤ C R^{−4} ∫_{B(0,R)} |u|²` for `u = z^m`, integrals by quadrature.
pub fn cauchy_estimate_sweep(radii: &[f64], m_max: u32, constant: f64, resolution: usize) -> Result<CauchyEstimate> {
    let mut rows = Vec::new();
    let mut measured: f64 = 0.0;
    for &r in radii {
        let grid = Grid::new(PlanarDomain::Disc { radius: r }, resolution)?;
        for m in 0..=m_max {
            let integral: f64 = grid.nodes.iter().zip(&grid.area).map(|(z, a)| z.norm_sqr().powi(m as i32) * a).sum();
            let lhs = if m == 1 { 1.0 } else { 0.0 };
            measured = measured.max(lhs * r.powi(4) / integral);
            rows.push((r, m, lhs, constant * integral / r.powi(4)));
        }
    }
    let pass = rows.iter().all(|&(_, _, l, rhs)| l <= rhs);
    Ok(CauchyEstimate { constant, measured_constant: measured, pass, rows })
}
