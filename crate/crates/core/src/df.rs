//! The curvature inequality `(−ρ)^η(Θ + ∂∂̄ψ) − ∂∂̄(−ρ)^η ⪰ (−ρ)^η |τZ♭|²`
//! as a pointwise matrix condition, swept over exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{self, ScalarField, SharedScalar};
use crate::geometry::{curvature_from_jet, torsion_norm_form_from, Christoffel, TorsionCoefficients};
use crate::linalg::{cr, hermitian_eigh, hermitian_part, min_eigenvalue, outer_conj, CMat, C64};
use crate::metric::{MetricField, MetricJet, SharedMetric};
use crate::point::ChartPoint;

pub const PSD_TOL_ANALYTIC: f64 = 1e-8;
pub const PSD_TOL_FD: f64 = 1e-5;

/// Metric, weight, defining function and exponent.
#[derive(Clone)]
pub struct DFProblem {
    pub metric: SharedMetric,
    pub psi: SharedScalar,
    pub rho: SharedScalar,
    pub eta: f64,
}

impl DFProblem {
    pub fn new(metric: SharedMetric, psi: SharedScalar, rho: SharedScalar, eta: f64) -> Result<Self> {
        let n = metric.dim();
        if psi.dim() != n || rho.dim() != n {
            return Err(Error::Dimension {
                expected: n,
                got: if psi.dim() != n { psi.dim() } else { rho.dim() },
            });
        }
        check_eta(eta)?;
        Ok(Self { metric, psi, rho, eta })
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        check_eta(eta)?;
        Ok(Self { eta, ..self.clone() })
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// `1e-8` when every ingredient uses analytic derivatives, `1e-5` otherwise.
    pub fn psd_tol(&self) -> f64 {
        let analytic = self.metric.deriv_mode().is_analytic()
            && self.psi.deriv_mode().is_analytic()
            && self.rho.deriv_mode().is_analytic();
        if analytic {
            PSD_TOL_ANALYTIC
        } else {
            PSD_TOL_FD
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("eta must lie in [0, 1], got {eta}")))
    }
}

/// Interior sample points with defining-function values.
#[derive(Debug, Clone)]
pub struct DomainSample {
    pub points: Vec<ChartPoint>,
    pub rho: Vec<f64>,
    /// Boundary distance when known.
    pub delta: Vec<Option<f64>>,
    pub weights: Vec<f64>,
}

impl DomainSample {
    /// Keeps the points with `ρ ≤ −margin`.
    pub fn from_points<F: ScalarField + ?Sized>(rho: &F, points: Vec<ChartPoint>, margin: f64) -> Result<Self> {
        let mut out = Self {
            points: Vec::new(),
            rho: Vec::new(),
            delta: Vec::new(),
            weights: Vec::new(),
        };
        for p in points {
            let r = field::real_value(rho, &p)?;
            if r <= -margin {
                out.points.push(p);
                out.rho.push(r);
                out.delta.push(None);
                out.weights.push(1.0);
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points on level sets `ρ = t` for each target `t`, found by bisection
    /// along rays `center + s·dir`, `s > 0`.
    pub fn shell<F: ScalarField + ?Sized>(
        rho: &F,
        rays: &[(ChartPoint, Vec<C64>)],
        targets: &[f64],
    ) -> Result<Self> {
        let mut points = Vec::new();
        for (center, dir) in rays {
            let at = |s: f64| -> Result<f64> {
                let p: Vec<C64> = center.iter().zip(dir).map(|(c, d)| c + d * s).collect();
                field::real_value(rho, &p)
            };
            let mut hi = 1.0;
            let mut guard = 0;
            while at(hi)? <= 0.0 {
                hi *= 2.0;
                guard += 1;
                if guard > 60 {
                    return Err(Error::Domain("ray never leaves the domain".into()));
                }
            }
            for &t in targets {
                let (mut lo, mut up) = (0.0, hi);
                if at(lo)? > t {
                    continue;
                }
                for _ in 0..80 {
                    let mid = 0.5 * (lo + up);
                    if at(mid)? <= t {
                        lo = mid;
                    } else {
                        up = mid;
                    }
                }
                let p: Vec<C64> = center.iter().zip(dir).map(|(c, d)| c + d * lo).collect();
                points.push(ChartPoint::new(p)?);
            }
        }
        Self::from_points(rho, points, 0.0)
    }
}

/// `κ = (−ρ)^η` and its derivatives.
#[derive(Debug, Clone)]
pub struct KappaJet {
    pub kappa: f64,
    /// `∂_{z_j} κ`.
    pub dkappa: Vec<C64>,
    /// `∂_{z_j}∂_{z̄_k} κ`.
    pub ddbar: CMat,
}

pub fn kappa_derivatives<F: ScalarField + ?Sized>(rho: &F, eta: f64, z: &ChartPoint) -> Result<KappaJet> {
    let r = field::real_value(rho, z)?;
    if r >= 0.0 {
        return Err(Error::Domain(format!("rho = {r} >= 0 at {:?}", z.coords())));
    }
    let g = field::gradient(rho, z)?;
    let h = hermitian_part(&field::complex_hessian(rho, z)?);
    let m = -r;
    let kappa = m.powf(eta);
    let d1 = -eta * m.powf(eta - 1.0);
    let dkappa = g.dz.iter().map(|v| v * d1).collect();
    let rank1 = outer_conj(&g.dz, &g.dz);
    let ddbar = &h * cr(d1) - rank1 * cr(eta * (1.0 - eta) * m.powf(eta - 2.0));
    Ok(KappaJet { kappa, dkappa, ddbar })
}

/// η-independent ingredients at one point.
#[derive(Debug, Clone)]
pub struct PointData {
    pub rho: f64,
    pub drho: Vec<C64>,
    pub ddrho: CMat,
    /// `Θ + ∂∂̄ψ`.
    pub curvature: CMat,
    pub torsion: CMat,
}

impl PointData {
    pub fn new(p: &DFProblem, z: &ChartPoint) -> Result<Self> {
        let rho = field::real_value(&p.rho, z)?;
        if rho >= 0.0 {
            return Err(Error::Domain(format!("rho = {rho} >= 0 at {:?}", z.coords())));
        }
        let jet = MetricJet::second(&p.metric, z)?;
        let theta = curvature_from_jet(&jet)?;
        let t = TorsionCoefficients::from_christoffel(&Christoffel::from_jet(&jet));
        let q = torsion_norm_form_from(&jet, &t);
        let ddpsi = hermitian_part(&field::complex_hessian(&p.psi, z)?);
        Ok(Self {
            rho,
            drho: field::gradient(&p.rho, z)?.dz,
            ddrho: hermitian_part(&field::complex_hessian(&p.rho, z)?),
            curvature: theta + ddpsi,
            torsion: q,
        })
    }

    /// `∂ρ ⊗ ∂̄ρ`.
    pub fn rank_one(&self) -> CMat {
        outer_conj(&self.drho, &self.drho)
    }

    /// `Ψ_η = Θ + ∂∂̄ψ + η(−ρ)^{-1}∂∂̄ρ − Q`.
    pub fn psi_form(&self, eta: f64) -> CMat {
        &self.curvature - &self.torsion + &self.ddrho * cr(eta / -self.rho)
    }

    /// `F_η = (−ρ)^η [Ψ_η + η(1−η)(−ρ)^{-2} ∂ρ⊗∂̄ρ]`.
    pub fn df_form(&self, eta: f64) -> CMat {
        let m = -self.rho;
        let inner = self.psi_form(eta) + self.rank_one() * cr(eta * (1.0 - eta) / (m * m));
        hermitian_part(&(inner * cr(m.powf(eta))))
    }
}

/// `F = κ(Θ + ∂∂̄ψ) − ∂∂̄κ − κQ` with `κ = (−ρ)^η`.
pub fn df_form(p: &DFProblem, z: &ChartPoint) -> Result<CMat> {
    let k = kappa_derivatives(&p.rho, p.eta, z)?;
    let jet = MetricJet::second(&p.metric, z)?;
    let theta = curvature_from_jet(&jet)?;
    let t = TorsionCoefficients::from_christoffel(&Christoffel::from_jet(&jet));
    let q = torsion_norm_form_from(&jet, &t);
    let ddpsi = hermitian_part(&field::complex_hessian(&p.psi, z)?);
    let f = (theta + ddpsi - q) * cr(k.kappa) - k.ddbar;
    Ok(hermitian_part(&f))
}

/// Largest `B` with `F ⪰ B η² (−ρ)^{η−2} ∂ρ⊗∂̄ρ` at this point; `None` when the
/// right side vanishes (no constraint).
pub fn b_margin_point(f: &CMat, drho: &[C64], rho: f64, eta: f64, psd_tol: f64) -> Result<Option<f64>> {
    let r2: f64 = drho.iter().map(|v| v.norm_sqr()).sum();
    if eta == 0.0 || r2 == 0.0 {
        return Ok(None);
    }
    let c = eta * eta * (-rho).powf(eta - 2.0);
    let (vals, vecs) = hermitian_eigh(f);
    if vals[0] < -psd_tol {
        return Err(Error::Numerical(format!(
            "form is not positive semidefinite (min eigenvalue {:e})",
            vals[0]
        )));
    }
    let n = drho.len();
    let mut inv_quad = 0.0;
    for (i, &lam) in vals.iter().enumerate() {
        let proj: C64 = (0..n).map(|k| vecs[(k, i)].conj() * drho[k]).sum();
        let w = proj.norm_sqr();
        if lam <= psd_tol {
            if w > 1e-12 * r2 {
                return Ok(Some(0.0));
            }
        } else {
            inv_quad += w / lam;
        }
    }
    if inv_quad == 0.0 {
        return Ok(None);
    }
    Ok(Some(1.0 / (c * inv_quad)))
}

/// `inf_z B(z)` over the sample; `None` when no point constrains `B`.
pub fn b_margin(p: &DFProblem, sample: &DomainSample) -> Result<Option<f64>> {
    let tol = p.psd_tol();
    let mut best: Option<f64> = None;
    for z in &sample.points {
        let pd = PointData::new(p, z)?;
        let f = pd.df_form(p.eta);
        if let Some(b) = b_margin_point(&f, &pd.drho, pd.rho, p.eta, tol)? {
            best = Some(best.map_or(b, |x: f64| x.min(b)));
        }
    }
    Ok(best)
}

/// Per-exponent sweep result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DFRow {
    pub eta: f64,
    pub min_eig: f64,
    pub worst_point: Vec<[f64; 2]>,
    pub pass: bool,
    /// `None` when unconstrained or when the exponent fails.
    pub b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DFReport {
    pub psd_tol: f64,
    pub sample_size: usize,
    pub rows: Vec<DFRow>,
    pub passing: Vec<f64>,
    pub best_eta: Option<f64>,
    /// Informational minimum eigenvalue on a near-boundary shell per exponent.
    pub shell_min_eig: Option<Vec<f64>>,
}

impl DFReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// `{0, 0.05, …, 1}`.
pub fn default_eta_grid() -> Vec<f64> {
    (0..=20).map(|k| k as f64 / 20.0).collect()
}

fn coords_of(z: &ChartPoint) -> Vec<[f64; 2]> {
    z.iter().map(|v| [v.re, v.im]).collect()
}

fn sweep_min(data: &[PointData], eta: f64) -> (f64, usize) {
    let mut worst = (f64::INFINITY, 0);
    for (i, pd) in data.iter().enumerate() {
        let e = min_eigenvalue(&pd.df_form(eta));
        if e < worst.0 {
            worst = (e, i);
        }
    }
    worst
}

/// Minimum eigenvalue of `F_η` over the sample for every `η` in the grid.
pub fn df_sweep(
    p: &DFProblem,
    sample: &DomainSample,
    etas: &[f64],
    shell: Option<&DomainSample>,
) -> Result<DFReport> {
    if sample.is_empty() {
        return Err(Error::InvalidInput("empty domain sample".into()));
    }
    for &e in etas {
        check_eta(e)?;
    }
    let tol = p.psd_tol();
    let data = sample
        .points
        .iter()
        .map(|z| PointData::new(p, z))
        .collect::<Result<Vec<_>>>()?;
    let shell_data = match shell {
        Some(s) => Some(
            s.points
                .iter()
                .map(|z| PointData::new(p, z))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let mut rows = Vec::with_capacity(etas.len());
    for &eta in etas {
        let (min_eig, idx) = sweep_min(&data, eta);
        let pass = min_eig >= -tol;
        let b = if pass {
            let mut best: Option<f64> = None;
            for pd in &data {
                let f = pd.df_form(eta);
                if let Some(v) = b_margin_point(&f, &pd.drho, pd.rho, eta, tol)? {
                    best = Some(best.map_or(v, |x: f64| x.min(v)));
                }
            }
            best
        } else {
            None
        };
        rows.push(DFRow {
            eta,
            min_eig,
            worst_point: coords_of(&sample.points[idx]),
            pass,
            b,
        });
    }
    let passing: Vec<f64> = rows.iter().filter(|r| r.pass).map(|r| r.eta).collect();
    let best_eta = passing.iter().copied().fold(None, |a: Option<f64>, v| Some(a.map_or(v, |x| x.max(v))));
    let shell_min_eig = shell_data.map(|d| etas.iter().map(|&e| sweep_min(&d, e).0).collect());
    Ok(DFReport {
        psd_tol: tol,
        sample_size: sample.len(),
        rows,
        passing,
        best_eta,
        shell_min_eig,
    })
}

/// Dyadic bisection of the pass/fail threshold between a passing `lo` and a
/// failing `hi`, down to width `tol`.
pub fn refine_threshold(p: &DFProblem, sample: &DomainSample, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let psd = p.psd_tol();
    let data = sample
        .points
        .iter()
        .map(|z| PointData::new(p, z))
        .collect::<Result<Vec<_>>>()?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if sweep_min(&data, mid).0 >= -psd {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `(Ψ_{2s}, ((b−2s)Ψ_a + (2s−a)Ψ_b)/(b−a))`.
pub fn psi_interpolation_check(p: &DFProblem, a: f64, b: f64, s: f64, z: &ChartPoint) -> Result<(CMat, CMat)> {
    if a == b {
        return Err(Error::InvalidInput("interpolation endpoints coincide".into()));
    }
    let pd = PointData::new(p, z)?;
    let eta = 2.0 * s;
    let lhs = pd.psi_form(eta);
    let rhs = (pd.psi_form(a) * cr(b - eta) + pd.psi_form(b) * cr(eta - a)) * cr(1.0 / (b - a));
    Ok((lhs, rhs))
}

/// Terms of the interpolated lower bound at `(z, Z)`:
/// `(Z†F_{2s}Z, (b−2s)(2s−a)(−ρ)^{2s−2}|∂ρ(Z)|², 2s(1−2s)(−ρ)^{2s−2}|∂ρ(Z)|²)`.
pub fn interpolation_bound_terms(p: &DFProblem, a: f64, b: f64, s: f64, z: &ChartPoint, v: &[C64]) -> Result<(f64, f64, f64)> {
    let pd = PointData::new(p, z)?;
    let eta = 2.0 * s;
    let f = pd.df_form(eta);
    let quad = crate::linalg::form_eval(&f, v);
    let dr: C64 = v.iter().zip(&pd.drho).map(|(x, r)| x * r).sum();
    let scale = (-pd.rho).powf(eta - 2.0) * dr.norm_sqr();
    Ok((quad, (b - eta) * (eta - a) * scale, eta * (1.0 - eta) * scale))
}
