//! Truncated weighted Bergman spaces and orthogonal projection.

use nalgebra::DMatrix;
use serde::Serialize;

use super::domain::{Flavor, Grid};
use crate::error::{Error, Result};
use crate::linalg::{cr, C64};

/// Cutoff above which the monomial Gram matrix is reported as ill conditioned.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

/// A grid function of the form `values · (−ρ)^{rho_power}`.
///
/// Keeping the power separate lets inner products integrate the singular
/// factor with [`Grid::power_mass`] instead of sampling it at nodes.
#[derive(Debug, Clone)]
pub struct GridFn {
    pub values: Vec<C64>,
    pub rho_power: f64,
}

impl GridFn {
    pub fn smooth(values: Vec<C64>) -> Self {
        Self { values, rho_power: 0.0 }
    }

    pub fn with_power(values: Vec<C64>, rho_power: f64) -> Self {
        Self { values, rho_power }
    }

    /// Pointwise values including the power factor.
    pub fn pointwise(&self, grid: &Grid) -> Vec<C64> {
        self.values.iter().zip(&grid.rho).map(|(v, r)| v * (-r).powf(self.rho_power)).collect()
    }
}

/// Weighted `L²` space `L²(Ω, e^{−ψ}(−ρ)^{weight_power})` on a grid.
#[derive(Debug, Clone)]
pub struct WeightedSpace<'g> {
    pub grid: &'g Grid,
    pub psi: Vec<f64>,
    pub weight_power: f64,
}

impl<'g> WeightedSpace<'g> {
    pub fn new(grid: &'g Grid, psi: Vec<f64>, weight_power: f64) -> Result<Self> {
        if psi.len() != grid.len() {
            return Err(Error::Dimension { expected: grid.len(), got: psi.len() });
        }
        Ok(Self { grid, psi, weight_power })
    }

    pub fn unweighted(grid: &'g Grid) -> Self {
        Self { grid, psi: vec![0.0; grid.len()], weight_power: 0.0 }
    }

    /// Quadrature masses for a product whose total `(−ρ)` exponent is `extra`.
    pub fn masses(&self, extra: f64) -> Result<Vec<f64>> {
        let m = self.grid.power_mass(Flavor::NegRho, self.weight_power + extra)?;
        Ok(m.iter().zip(&self.psi).map(|(m, p)| m * (-p).exp()).collect())
    }

    pub fn inner(&self, a: &GridFn, b: &GridFn) -> Result<C64> {
        let m = self.masses(a.rho_power + b.rho_power)?;
        Ok(a.values.iter().zip(&b.values).zip(&m).map(|((x, y), w)| x * y.conj() * w).sum())
    }

    pub fn norm(&self, a: &GridFn) -> Result<f64> {
        let m = self.masses(2.0 * a.rho_power)?;
        let s: f64 = a.values.iter().zip(&m).map(|(x, w)| x.norm_sqr() * w).sum();
        crate::error::ensure_finite(s.sqrt(), "weighted norm")
    }
}

/// Orthonormal polynomial basis of degree ≤ N in a weighted space, built by
/// Arnoldi iteration on multiplication by z (a stable QR of the weighted
/// Vandermonde matrix).
#[derive(Debug, Clone)]
pub struct HoloBasis {
    pub degree: usize,
    /// Node masses of the space (`e^{−ψ}(−ρ)^p` integrated per cell).
    pub mass: Vec<f64>,
    pub weight_power: f64,
    q: Vec<Vec<C64>>,
    /// Recurrence `z q_k = Σ_{j≤k+1} H[j][k] q_j`.
    hess: Vec<Vec<C64>>,
    q0: f64,
    /// Condition number of the monomial Gram matrix.
    pub gram_condition: f64,
    /// `max |⟨q_j, q_k⟩ − δ_jk|`.
    pub orthonormality_defect: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BasisDiagnostics {
    pub degree: usize,
    pub gram_condition: f64,
    pub orthonormality_defect: f64,
    pub ill_conditioned: bool,
}

impl HoloBasis {
    pub fn new(space: &WeightedSpace<'_>, degree: usize) -> Result<Self> {
        let grid = space.grid;
        let mass = space.masses(0.0)?;
        if grid.len() <= degree + 1 {
            return Err(Error::InvalidInput(format!("{} nodes cannot carry degree {degree}", grid.len())));
        }
        let ip = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).zip(&mass).map(|((x, y), w)| x * y.conj() * w).sum() };
        let total: f64 = mass.iter().sum();
        let q0 = 1.0 / total.sqrt();
        let mut q = vec![vec![cr(q0); grid.len()]];
        let mut hess = Vec::with_capacity(degree);
        for k in 0..degree {
            let mut v: Vec<C64> = q[k].iter().zip(&grid.nodes).map(|(a, z)| a * z).collect();
            let scale = ip(&v, &v).re.sqrt();
            let mut col = vec![C64::new(0.0, 0.0); k + 2];
            for _pass in 0..2 {
                for (j, qj) in q.iter().enumerate() {
                    let c = ip(&v, qj);
                    col[j] += c;
                    for (x, y) in v.iter_mut().zip(qj) {
                        *x -= c * y;
                    }
                }
            }
            let nrm = ip(&v, &v).re.sqrt();
            if !(nrm > 1e-13 * scale) {
                return Err(Error::Numerical(format!("polynomial basis degenerates at degree {}", k + 1)));
            }
            col[k + 1] = cr(nrm);
            for x in v.iter_mut() {
                *x /= nrm;
            }
            q.push(v);
            hess.push(col);
        }
        let n = degree + 1;
        let mut defect: f64 = 0.0;
        for j in 0..n {
            for k in j..n {
                let g = ip(&q[j], &q[k]);
                let target = if j == k { 1.0 } else { 0.0 };
                defect = defect.max((g - target).norm());
            }
        }
        // Monomials in the orthonormal basis: z^k = Σ_j R[j][k] q_j.
        let mut r = DMatrix::<C64>::zeros(n, n);
        let mut zk = vec![cr(1.0); grid.len()];
        for k in 0..n {
            for j in 0..=k {
                r[(j, k)] = ip(&zk, &q[j]);
            }
            for (x, z) in zk.iter_mut().zip(&grid.nodes) {
                *x *= z;
            }
        }
        let sv = r.singular_values();
        let (smax, smin) = sv.iter().fold((0.0f64, f64::INFINITY), |(a, b), &s| (a.max(s), b.min(s)));
        let gram_condition = (smax / smin).powi(2);
        Ok(Self { degree, mass, weight_power: space.weight_power, q, hess, q0, gram_condition, orthonormality_defect: defect })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn diagnostics(&self) -> BasisDiagnostics {
        BasisDiagnostics {
            degree: self.degree,
            gram_condition: self.gram_condition,
            orthonormality_defect: self.orthonormality_defect,
            ill_conditioned: self.gram_condition > GRAM_CONDITION_LIMIT,
        }
    }

    /// Values of the k-th orthonormal function at the nodes.
    pub fn values(&self, k: usize) -> &[C64] {
        &self.q[k]
    }

    /// Values of `Σ c_k q_k` at the nodes.
    pub fn combine(&self, coeffs: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.q[0].len()];
        for (c, qk) in coeffs.iter().zip(&self.q) {
            for (o, v) in out.iter_mut().zip(qk) {
                *o += c * v;
            }
        }
        out
    }

    /// `Σ c_k q_k` and its complex derivative at an arbitrary point.
    pub fn eval(&self, coeffs: &[C64], z: C64) -> (C64, C64) {
        let mut vals = vec![cr(self.q0)];
        let mut ders = vec![C64::new(0.0, 0.0)];
        for (k, col) in self.hess.iter().enumerate() {
            let mut v = z * vals[k];
            let mut d = vals[k] + z * ders[k];
            for j in 0..=k {
                v -= col[j] * vals[j];
                d -= col[j] * ders[j];
            }
            vals.push(v / col[k + 1]);
            ders.push(d / col[k + 1]);
        }
        let mut f = C64::new(0.0, 0.0);
        let mut df = C64::new(0.0, 0.0);
        for ((c, v), d) in coeffs.iter().zip(&vals).zip(&ders) {
            f += c * v;
            df += c * d;
        }
        (f, df)
    }

    /// Coefficients `⟨v, q_k⟩` of a grid function in the basis's space.
    pub fn coefficients(&self, space: &WeightedSpace<'_>, v: &GridFn) -> Result<Vec<C64>> {
        let m = if v.rho_power == 0.0 { self.mass.clone() } else { space.masses(v.rho_power)? };
        let mut out = Vec::with_capacity(self.len());
        for qk in &self.q {
            let c: C64 = v.values.iter().zip(qk).zip(&m).map(|((x, y), w)| x * y.conj() * w).sum();
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::Numerical("test function is not square integrable on the grid".into()));
            }
            out.push(c);
        }
        Ok(out)
    }

    /// Coefficients of `Σ c_k q_k` in the monomial basis.
    pub fn monomial_coefficients(&self, coeffs: &[C64]) -> Vec<C64> {
        // Evaluate the recurrence on coefficient vectors: q_k = Σ_m P[k][m] z^m.
        let n = self.len();
        let mut p: Vec<Vec<C64>> = vec![{
            let mut v = vec![C64::new(0.0, 0.0); n];
            v[0] = cr(self.q0);
            v
        }];
        for (k, col) in self.hess.iter().enumerate() {
            let mut v = vec![C64::new(0.0, 0.0); n];
            for m in 0..n - 1 {
                v[m + 1] = p[k][m];
            }
            for j in 0..=k {
                for m in 0..n {
                    v[m] -= col[j] * p[j][m];
                }
            }
            for x in v.iter_mut() {
                *x /= col[k + 1];
            }
            p.push(v);
        }
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (c, pk) in coeffs.iter().zip(&p) {
            for (o, x) in out.iter_mut().zip(pk) {
                *o += c * x;
            }
        }
        out
    }
}

/// Orthogonal projection of a grid function onto the truncated space.
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub coeffs: Vec<C64>,
    pub values: Vec<C64>,
    /// `‖P(Pv) − Pv‖ / ‖Pv‖` (zero when `Pv = 0`).
    pub idempotence_defect: f64,
    pub diagnostics: BasisDiagnostics,
}

impl ProjectionResult {
    pub fn as_gridfn(&self) -> GridFn {
        GridFn::smooth(self.values.clone())
    }
}

/// Weighted Bergman projection `P_ψ v` of `v` on the truncated polynomial space.
pub fn gram_and_project(space: &WeightedSpace<'_>, basis: &HoloBasis, v: &GridFn) -> Result<ProjectionResult> {
    let coeffs = basis.coefficients(space, v)?;
    let values = basis.combine(&coeffs);
    let pv = GridFn::smooth(values.clone());
    let again = basis.combine(&basis.coefficients(space, &pv)?);
    let nrm = space.norm(&pv)?;
    let diff = GridFn::smooth(again.iter().zip(&values).map(|(a, b)| a - b).collect());
    let idempotence_defect = if nrm > 0.0 { space.norm(&diff)? / nrm } else { 0.0 };
    Ok(ProjectionResult { coeffs, values, idempotence_defect, diagnostics: basis.diagnostics() })
}

/// Returned by [`weighted_norm`] when `s` leaves the range where the proxy is
/// equivalent to a Sobolev norm.
pub fn sobolev_proxy_warning(s: f64) -> Option<String> {
    (s >= 0.5).then(|| format!("s = {s} ≥ 1/2: the weighted norm is not a Sobolev-norm proxy"))
}

/// `‖w^{−s} u‖_{L²(Ω)}` with `w = δ` or `w = −ρ`, by quadrature.
pub fn weighted_norm(grid: &Grid, u: &[C64], s: f64, flavor: Flavor) -> Result<f64> {
    if u.len() != grid.len() {
        return Err(Error::Dimension { expected: grid.len(), got: u.len() });
    }
    let m = grid.power_mass(flavor, -2.0 * s)?;
    let acc: f64 = u.iter().zip(&m).map(|(x, w)| x.norm_sqr() * w).sum();
    crate::error::ensure_finite(acc.sqrt(), "weighted norm")
}
