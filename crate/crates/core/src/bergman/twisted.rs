//! The twisted solution `u = κ⁻¹(w − h)` of `∂̄(κu) = f ∂̄κ` orthogonal to
//! the truncated holomorphic space.

use serde::Serialize;

use super::basis::{GridFn, HoloBasis, WeightedSpace};
use super::cauchy::cauchy_solve_masses;
use super::domain::{Flavor, Grid};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// `κ = scale · (−ρ)^eta`; `eta = 0` is a constant twist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Kappa {
    pub scale: f64,
    pub eta: f64,
}

impl Kappa {
    pub fn power(eta: f64) -> Self {
        Self { scale: 1.0, eta }
    }

    pub fn constant(scale: f64) -> Self {
        Self { scale, eta: 0.0 }
    }

    pub fn value(&self, rho: f64) -> f64 {
        self.scale * (-rho).powf(self.eta)
    }

    /// `∂̄κ / κ` at an interior point.
    pub fn dbar_log(&self, rho: f64, drho_dzbar: C64) -> C64 {
        drho_dzbar * (self.eta / rho)
    }
}

/// `(1 + B)^{−1/2}`.
pub fn solution_bound(b: f64) -> f64 {
    (1.0 + b).sqrt().recip()
}

#[derive(Debug, Clone, Serialize)]
pub struct TwistedDiagnostics {
    pub kappa: Kappa,
    pub b_est: f64,
    /// Relative `L²` residual of `∂̄u = κ⁻¹(f − u)∂̄κ` on the interior subgrid.
    pub dbar_residual: f64,
    pub subgrid_nodes: usize,
    /// `‖u‖_{ψ−log κ} / ‖f‖_{ψ−log κ}`.
    pub ratio: f64,
    /// `(1 + B)^{−1/2}`.
    pub bound: f64,
    /// `max_k |⟨u, q_k⟩_ψ| / ‖u‖_{ψ−log κ}` (0 when `u = 0`).
    pub orthogonality: f64,
    pub gram_condition: f64,
    pub orthonormality_defect: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct TwistedSolution {
    pub u: GridFn,
    pub w: Vec<C64>,
    pub h: Vec<C64>,
    pub diagnostics: TwistedDiagnostics,
}

/// Builds the twisted solution for holomorphic `f` (values at the nodes).
///
/// `space` carries ψ (its weight power must be 0). `margin` is the minimal
/// boundary distance of the residual subgrid.
pub fn twisted_solution(
    space: &WeightedSpace<'_>,
    degree: usize,
    f: &[C64],
    kappa: Kappa,
    b_est: f64,
    margin: f64,
) -> Result<TwistedSolution> {
    let grid: &Grid = space.grid;
    if space.weight_power != 0.0 {
        return Err(Error::InvalidInput("twisted_solution expects an unweighted ψ-space".into()));
    }
    if f.len() != grid.len() {
        return Err(Error::Dimension { expected: grid.len(), got: f.len() });
    }
    if !(kappa.scale > 0.0) || kappa.eta < 0.0 {
        return Err(Error::InvalidInput(format!("κ must be positive, got {kappa:?}")));
    }
    let mut warnings = Vec::new();
    if kappa.eta >= 1.0 {
        warnings.push(format!("κ = (−ρ)^{} has no positive B for this domain", kappa.eta));
    }
    // f ∂̄κ = −η scale (−ρ)^{η−1} ∂̄ρ f, integrated per cell.
    let w = if kappa.eta == 0.0 {
        vec![C64::new(0.0, 0.0); grid.len()]
    } else {
        let m = grid.power_mass(Flavor::NegRho, kappa.eta - 1.0)?;
        let rhs: Vec<C64> = (0..grid.len())
            .map(|k| -f[k] * grid.domain.drho_dzbar(grid.nodes[k]) * (kappa.scale * kappa.eta * m[k]))
            .collect();
        cauchy_solve_masses(grid, &rhs)?
    };
    // h = P_{ψ + log κ} w; the scale of κ does not affect the projection.
    let twisted = WeightedSpace::new(grid, space.psi.clone(), -kappa.eta)?;
    let tbasis = HoloBasis::new(&twisted, degree)?;
    let hc = tbasis.coefficients(&twisted, &GridFn::smooth(w.clone()))?;
    let h = tbasis.combine(&hc);
    let u = GridFn::with_power(w.iter().zip(&h).map(|(a, b)| (a - b) / kappa.scale).collect(), -kappa.eta);

    // Norms in L²(ψ − log κ): weight e^{−ψ} κ.
    let kspace = WeightedSpace::new(grid, space.psi.clone(), kappa.eta)?;
    let f_norm = kspace.norm(&GridFn::smooth(f.to_vec()))?;
    if f_norm == 0.0 {
        return Err(Error::InvalidInput("f vanishes on the grid".into()));
    }
    let u_norm = kspace.norm(&u)?;
    let ratio = u_norm / f_norm;

    // ‖u‖_ψ diverges once η ≥ 1/2; the ψ − log κ norm is never larger since κ ≤ 1.
    let basis = HoloBasis::new(space, degree)?;
    let uc = basis.coefficients(space, &u)?;
    let orthogonality = if u_norm > 0.0 {
        uc.iter().map(|c| c.norm()).fold(0.0, f64::max) / u_norm
    } else {
        0.0
    };

    let sub = grid.interior_subgrid(margin);
    let dbar_residual = if kappa.eta == 0.0 {
        0.0
    } else {
        let up = u.pointwise(grid);
        let (mut num, mut den) = (0.0, 0.0);
        for &k in &sub {
            let z = grid.nodes[k];
            let target = (f[k] - up[k]) * kappa.dbar_log(grid.rho[k], grid.domain.drho_dzbar(z));
            num += (grid.dbar_fd(&up, k) - target).norm_sqr() * grid.area[k];
            den += target.norm_sqr() * grid.area[k];
        }
        if sub.is_empty() {
            return Err(Error::InvalidInput(format!("no interior nodes at distance ≥ {margin}")));
        }
        if den > 0.0 {
            (num / den).sqrt()
        } else {
            num.sqrt()
        }
    };
    if basis.diagnostics().ill_conditioned || tbasis.diagnostics().ill_conditioned {
        warnings.push("monomial Gram matrix is ill conditioned".into());
    }
    let diagnostics = TwistedDiagnostics {
        kappa,
        b_est,
        dbar_residual,
        subgrid_nodes: sub.len(),
        ratio,
        bound: solution_bound(b_est),
        orthogonality,
        gram_condition: basis.gram_condition.max(tbasis.gram_condition),
        orthonormality_defect: basis.orthonormality_defect.max(tbasis.orthonormality_defect),
        warnings,
    };
    Ok(TwistedSolution { u, w, h, diagnostics })
}
