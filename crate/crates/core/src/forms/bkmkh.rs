//! Quadrature check of the twisted Bochner-Kodaira-Morrey-Kohn-Hörmander
//! identity for compactly supported (0,1)-forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{self, ScalarField};
use crate::forms::ops::{
    coordinate_divergences, dbar_star_from, form_inner, frame_norm_sqr, nabla_t_bar, raise, tau_on_frame,
};
use crate::forms::{form_jet, ZeroOneForm};
use crate::geometry::{curvature_from_jet, Christoffel, TorsionCoefficients};
use crate::linalg::{cr, form_eval, hermitian_part, C64};
use crate::metric::{MetricField, MetricJet};
use crate::quadrature::{CompensatedSum, QuadratureBox};

/// Both sides of the identity and their difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BkmkhResult {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs|`.
    pub residual: f64,
    /// `|lhs − rhs| / |lhs|` (equal to `residual` when `lhs = 0`).
    pub relative: f64,
    pub nodes: usize,
}

/// Integrands of both sides at one node and `det g` there.
pub fn bkmkh_integrands<M, P, K, U>(g: &M, psi: &P, kappa: &K, u: &U, z: &[C64]) -> Result<(f64, f64, f64)>
where
    M: MetricField + ?Sized,
    P: ScalarField + ?Sized,
    K: ScalarField + ?Sized,
    U: ZeroOneForm + ?Sized,
{
    let jet = MetricJet::second(g, z)?;
    let n = jet.n;
    let gamma = Christoffel::from_jet(&jet);
    let t = TorsionCoefficients::from_christoffel(&gamma);
    let theta = curvature_from_jet(&jet)?;
    let inv = jet.inverse();
    let uj = form_jet(u, z)?;
    let k = field::real_value(kappa, z)?;
    if k <= 0.0 {
        return Err(Error::Domain(format!("kappa = {k} <= 0 on the support")));
    }
    let kg = field::gradient(kappa, z)?;
    let kh = hermitian_part(&field::complex_hessian(kappa, z)?);
    let pg = field::gradient(psi, z)?;
    let ph = hermitian_part(&field::complex_hessian(psi, z)?);

    let dbar = crate::linalg::CMat::from_fn(n, n, |a, b| uj.dzbar[a][b] - uj.dzbar[b][a]);
    let dbar_sq = crate::forms::ZeroTwoForm { n, coeffs: dbar }.norm_sqr(inv);
    let dw = coordinate_divergences(&gamma, &t);
    let star = dbar_star_from(&jet, &dw, &pg.dz, &uj);
    let lhs = k * (dbar_sq + star.norm_sqr());

    let nt = nabla_t_bar(&gamma, &t, &uj);
    let nabla_sq = frame_norm_sqr(&jet, &nt);
    let tau = tau_on_frame(&jet, &t, &uj.value);
    let tau_sq = 0.5 * tau.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>();
    // ⟨u, ∂̄κ⟩ with (∂̄κ)_c = ∂_{z̄_c} κ
    let u_dk = form_inner(inv, &uj.value, &kg.dzbar);
    let cross = 2.0 * (star * u_dk.conj()).re;
    let sharp = raise(inv, &uj.value);
    let curv = form_eval(&((theta + ph) * cr(k) - kh), &sharp);
    let rhs = k * nabla_sq - k * tau_sq + cross + curv;
    Ok((lhs, rhs, jet.factor.det()))
}

/// Weighted integrals of both sides over `quad` with weight `e^{−ψ} det g`.
pub fn bkmkh_residual<M, P, K, U>(g: &M, psi: &P, kappa: &K, u: &U, quad: &QuadratureBox) -> Result<BkmkhResult>
where
    M: MetricField + ?Sized,
    P: ScalarField + ?Sized,
    K: ScalarField + ?Sized,
    U: ZeroOneForm + ?Sized,
{
    let support = u
        .support_box()
        .ok_or_else(|| Error::Domain("identity check needs a compactly supported form".into()))?;
    if !quad.bounds.strictly_contains(&support) {
        return Err(Error::Domain("support of u is not strictly inside the quadrature box".into()));
    }
    let (mut l, mut r) = (CompensatedSum::default(), CompensatedSum::default());
    let mut nodes = 0usize;
    quad.for_each(|z, w| {
        if u.vanishes_at(z) {
            return Ok(());
        }
        let (a, b, det) = bkmkh_integrands(g, psi, kappa, u, z)?;
        let weight = (-field::real_value(psi, z)?).exp() * det * w;
        l.add(a * weight);
        r.add(b * weight);
        nodes += 1;
        Ok(())
    })?;
    let (lhs, rhs) = (l.value(), r.value());
    let residual = (lhs - rhs).abs();
    let relative = if lhs != 0.0 { residual / lhs.abs() } else { residual };
    Ok(BkmkhResult {
        lhs,
        rhs,
        residual,
        relative,
        nodes,
    })
}
