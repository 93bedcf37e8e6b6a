//! Pointwise operators: divergence, weighted adjoints, commutator, `∂̄` on
//! (0,1)-forms and the torsion identity.

use crate::error::{Error, Result};
use crate::fd;
use crate::field::{self, ScalarField};
use crate::forms::{form_jet, vector_jet, CoeffJet, VectorField10, ZeroOneForm};
use crate::geometry::{curvature_from_jet, Christoffel, TorsionCoefficients};
use crate::linalg::{form_pair, hermitian_part, CMat, C64};
use crate::metric::{MetricField, MetricJet};
use crate::point::ChartPoint;
use crate::quadrature::{CompensatedSum, QuadratureBox};

/// `Div W_k = Σ_j (Γ^j_{jk} − T^j_{jk})` for the coordinate fields.
pub fn coordinate_divergences(gamma: &Christoffel, t: &TorsionCoefficients) -> Vec<C64> {
    let n = gamma.n;
    (0..n)
        .map(|k| (0..n).map(|j| gamma.get(j, j, k) - t.get(j, j, k)).sum())
        .collect()
}

fn divergence_from(jet: &MetricJet, zj: &CoeffJet) -> C64 {
    let gamma = Christoffel::from_jet(jet);
    let t = TorsionCoefficients::from_christoffel(&gamma);
    let dw = coordinate_divergences(&gamma, &t);
    let n = jet.n;
    let flat: C64 = (0..n).map(|j| zj.dz[j][j]).sum();
    flat + (0..n).map(|k| dw[k] * zj.value[k]).sum::<C64>()
}

/// `Div Z = Σ_j [∂_j Z^j + Σ_k Γ^j_{jk} Z^k − Σ_k T^j_{jk} Z^k]`.
pub fn divergence<M, V>(g: &M, z_field: &V, z: &ChartPoint) -> Result<C64>
where
    M: MetricField + ?Sized,
    V: VectorField10 + ?Sized,
{
    let jet = MetricJet::first(g, z)?;
    let zj = vector_jet(z_field, z)?;
    Ok(divergence_from(&jet, &zj))
}

/// `(Z̄)*_ψ h = −Z h − (Div Z) h + (Z ψ) h`.
pub fn adjoint_bar_z<M, P, V, H>(g: &M, psi: &P, z_field: &V, h: &H, z: &[C64]) -> Result<C64>
where
    M: MetricField + ?Sized,
    P: ScalarField + ?Sized,
    V: VectorField10 + ?Sized,
    H: ScalarField + ?Sized,
{
    let jet = MetricJet::first(g, z)?;
    let zj = vector_jet(z_field, z)?;
    let hv = field::value(h, z)?;
    let hg = field::gradient(h, z)?;
    let pg = field::gradient(psi, z)?;
    let n = jet.n;
    let zh: C64 = (0..n).map(|j| zj.value[j] * hg.dz[j]).sum();
    let zpsi: C64 = (0..n).map(|j| zj.value[j] * pg.dz[j]).sum();
    Ok(-zh - divergence_from(&jet, &zj) * hv + zpsi * hv)
}

/// Raised components `u^j = ⟨u, dz̄_j⟩ = Σ_a g^{āj} u_a`.
pub fn raise(inv: &CMat, u: &[C64]) -> Vec<C64> {
    let n = u.len();
    (0..n).map(|j| (0..n).map(|a| inv[(a, j)] * u[a]).sum()).collect()
}

/// `∂̄*_ψ u` from precomputed jets.
pub(crate) fn dbar_star_from(jet: &MetricJet, dw: &[C64], dpsi: &[C64], uj: &CoeffJet) -> C64 {
    let n = jet.n;
    let inv = jet.inverse();
    let up = raise(inv, &uj.value);
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n {
        let dinv = jet.d_inverse(j);
        let mut d_up = C64::new(0.0, 0.0);
        for a in 0..n {
            d_up += dinv[(a, j)] * uj.value[a] + inv[(a, j)] * uj.dz[j][a];
        }
        acc += -d_up - dw[j] * up[j] + dpsi[j] * up[j];
    }
    acc
}

/// `∂̄*_ψ u = Σ_j (W̄_j)*_ψ u^j`.
pub fn dbar_star_psi<M, P, U>(g: &M, psi: &P, u: &U, z: &ChartPoint) -> Result<C64>
where
    M: MetricField + ?Sized,
    P: ScalarField + ?Sized,
    U: ZeroOneForm + ?Sized,
{
    let jet = MetricJet::first(g, z)?;
    let gamma = Christoffel::from_jet(&jet);
    let t = TorsionCoefficients::from_christoffel(&gamma);
    let dw = coordinate_divergences(&gamma, &t);
    let dpsi = field::gradient(psi, z)?.dz;
    let uj = form_jet(u, z)?;
    Ok(dbar_star_from(&jet, &dw, &dpsi, &uj))
}

/// `|⟨Z̄f, h⟩_ψ − ⟨f, (Z̄)*_ψ h⟩_ψ|` by midpoint quadrature with
/// `dV = det g · dλ`.
pub fn adjoint_ibp_residual<M, P, F, V, H>(
    g: &M,
    psi: &P,
    f: &F,
    z_field: &V,
    h: &H,
    quad: &QuadratureBox,
) -> Result<f64>
where
    M: MetricField + ?Sized,
    P: ScalarField + ?Sized,
    F: ScalarField + ?Sized,
    V: VectorField10 + ?Sized,
    H: ScalarField + ?Sized,
{
    let support = f
        .support_box()
        .ok_or_else(|| Error::Domain("adjoint check needs a compactly supported f".into()))?;
    if !quad.bounds.strictly_contains(&support) {
        return Err(Error::Domain("support of f is not strictly inside the quadrature box".into()));
    }
    let n = g.dim();
    let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
    quad.for_each(|z, w| {
        let fv = field::value(f, z)?;
        let fg = field::gradient(f, z)?;
        if fv.norm() == 0.0 && fg.dzbar.iter().all(|v| v.norm() == 0.0) {
            return Ok(());
        }
        let gm = crate::metric::eval_checked(g, z)?;
        let det = crate::linalg::HpdFactor::new(&gm)?.det();
        let weight = (-field::real_value(psi, z)?).exp() * det * w;
        let zv = z_field.coeffs(z)?;
        let zbar_f: C64 = (0..n).map(|j| zv[j].conj() * fg.dzbar[j]).sum();
        let hv = field::value(h, z)?;
        let adj = adjoint_bar_z(g, psi, z_field, h, z)?;
        let d = (zbar_f * hv.conj() - fv * adj.conj()) * weight;
        re.add(d.re);
        im.add(d.im);
        Ok(())
    })?;
    Ok(C64::new(re.value(), im.value()).norm())
}

/// `([Z̄₂, (Z̄₁)*_ψ] φ)(z)` by differences, and `(Θ + ∂∂̄ψ)(Z₁, Z̄₂) φ(z)`.
pub fn commutator_check<M, P, V1, V2, F>(
    g: &M,
    psi: &P,
    z1: &V1,
    z2: &V2,
    phi: &F,
    z: &ChartPoint,
) -> Result<(C64, C64)>
where
    M: MetricField + ?Sized,
    P: ScalarField + ?Sized,
    V1: VectorField10 + ?Sized,
    V2: VectorField10 + ?Sized,
    F: ScalarField + ?Sized,
{
    if !z1.is_holomorphic() || !z2.is_holomorphic() {
        return Err(Error::InvalidInput("commutator check needs holomorphic vector fields".into()));
    }
    let n = g.dim();
    let h = fd::DEFAULT_STEP;
    // A = (Z̄₁)*_ψ φ
    let a = |p: &[C64]| adjoint_bar_z(g, psi, z1, phi, p).map(|v| vec![v]);
    let (_, da_bar) = fd::wirtinger_first(&a, z, h)?;
    let z2v = z2.coeffs(z)?;
    let term1: C64 = (0..n).map(|k| z2v[k].conj() * da_bar[k][0]).sum();
    // B = Z̄₂ φ, then (Z̄₁)*_ψ B
    let b = |p: &[C64]| -> Result<Vec<C64>> {
        let zz = z2.coeffs(p)?;
        let gphi = field::gradient(phi, p)?;
        Ok(vec![(0..n).map(|k| zz[k].conj() * gphi.dzbar[k]).sum()])
    };
    let bv = b(z)?[0];
    let (db, _) = fd::wirtinger_first(&b, z, h)?;
    let jet = MetricJet::first(g, z)?;
    let z1j = vector_jet(z1, z)?;
    let pg = field::gradient(psi, z)?;
    let z1b: C64 = (0..n).map(|j| z1j.value[j] * db[j][0]).sum();
    let z1psi: C64 = (0..n).map(|j| z1j.value[j] * pg.dz[j]).sum();
    let term2 = -z1b - divergence_from(&jet, &z1j) * bv + z1psi * bv;
    let lhs = term1 - term2;
    let jet2 = MetricJet::second(g, z)?;
    let form = curvature_from_jet(&jet2)? + hermitian_part(&field::complex_hessian(psi, z)?);
    let rhs = form_pair(&form, &z1j.value, &z2v) * field::value(phi, z)?;
    Ok((lhs, rhs))
}

/// Antisymmetric coefficients `c[j][k] = (∂̄u)(W̄_j, W̄_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTwoForm {
    pub n: usize,
    pub coeffs: CMat,
}

impl ZeroTwoForm {
    pub fn max_abs(&self) -> f64 {
        crate::linalg::max_abs(&self.coeffs)
    }

    /// `|α|² = ½ Σ α_{ab} conj(α_{cd}) g^{āc} g^{b̄d}`.
    pub fn norm_sqr(&self, inv: &CMat) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        acc += (self.coeffs[(a, b)] * self.coeffs[(c, d)].conj() * inv[(a, c)] * inv[(b, d)]).re;
                    }
                }
            }
        }
        0.5 * acc
    }
}

/// `(∇_{W̄_j} u)_k = ∂_{z̄_j} u_k − Σ_ℓ conj(Γ^ℓ_{jk}) u_ℓ`.
pub fn nabla_bar(gamma: &Christoffel, uj: &CoeffJet) -> Vec<Vec<C64>> {
    let n = gamma.n;
    (0..n)
        .map(|j| {
            (0..n)
                .map(|k| uj.dzbar[j][k] - (0..n).map(|l| gamma.get(l, j, k).conj() * uj.value[l]).sum::<C64>())
                .collect()
        })
        .collect()
}

/// `(∇^T_{W̄_j} u)_k = (∇_{W̄_j} u)_k + u(T(W̄_j, W̄_k))`.
pub fn nabla_t_bar(gamma: &Christoffel, t: &TorsionCoefficients, uj: &CoeffJet) -> Vec<Vec<C64>> {
    let n = gamma.n;
    let mut out = nabla_bar(gamma, uj);
    for (j, row) in out.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v += (0..n).map(|l| t.get(l, j, k).conj() * uj.value[l]).sum::<C64>();
        }
    }
    out
}

/// `∂̄u = ½ Σ θ̄^j ∧ (∇_{W̄_j} + ∇^T_{W̄_j}) u`.
pub fn dbar_01<M, U>(g: &M, u: &U, z: &ChartPoint) -> Result<ZeroTwoForm>
where
    M: MetricField + ?Sized,
    U: ZeroOneForm + ?Sized,
{
    let jet = MetricJet::first(g, z)?;
    let gamma = Christoffel::from_jet(&jet);
    let t = TorsionCoefficients::from_christoffel(&gamma);
    let uj = form_jet(u, z)?;
    let d = nabla_bar(&gamma, &uj);
    let dt = nabla_t_bar(&gamma, &t, &uj);
    let n = jet.n;
    let coeffs = CMat::from_fn(n, n, |a, b| {
        let aa = d[a][b] + dt[a][b];
        let bb = d[b][a] + dt[b][a];
        (aa - bb) * 0.5
    });
    Ok(ZeroTwoForm { n, coeffs })
}

/// `(∂̄u)(W̄_j, W̄_k) = ∂_{z̄_j} u_k − ∂_{z̄_k} u_j`.
pub fn dbar_01_naive<U: ZeroOneForm + ?Sized>(u: &U, z: &ChartPoint) -> Result<ZeroTwoForm> {
    let uj = form_jet(u, z)?;
    let n = u.dim();
    Ok(ZeroTwoForm {
        n,
        coeffs: CMat::from_fn(n, n, |j, k| uj.dzbar[j][k] - uj.dzbar[k][j]),
    })
}

pub(crate) fn form_inner(inv: &CMat, u: &[C64], v: &[C64]) -> C64 {
    let n = u.len();
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..n {
        for c in 0..n {
            acc += u[a] * inv[(a, c)] * v[c].conj();
        }
    }
    acc
}

/// `u(T(Ē_a, Ē_b))` for all orthonormal pairs; entry `[a][b]`.
pub(crate) fn tau_on_frame(jet: &MetricJet, t: &TorsionCoefficients, u: &[C64]) -> Vec<Vec<C64>> {
    let n = jet.n;
    let e = &jet.factor.lower_inv;
    (0..n)
        .map(|a| {
            let ea: Vec<C64> = (0..n).map(|j| e[(a, j)]).collect();
            (0..n)
                .map(|b| {
                    let eb: Vec<C64> = (0..n).map(|j| e[(b, j)]).collect();
                    let tab = t.apply(&ea, &eb);
                    (0..n).map(|l| tab[l].conj() * u[l]).sum()
                })
                .collect()
        })
        .collect()
}

/// `⟨τu, τv⟩` in the orthonormal frame, and
/// `½ ⟨(∇̄^T − ∇̄)u, (∇̄^T − ∇̄)v⟩` in the coordinate frame.
pub fn tau_identity_check<M, U, V>(g: &M, u: &U, v: &V, z: &ChartPoint) -> Result<(C64, C64)>
where
    M: MetricField + ?Sized,
    U: ZeroOneForm + ?Sized,
    V: ZeroOneForm + ?Sized,
{
    let jet = MetricJet::first(g, z)?;
    let t = TorsionCoefficients::from_christoffel(&Christoffel::from_jet(&jet));
    let uv = u.coeffs(z)?;
    let vv = v.coeffs(z)?;
    let n = jet.n;
    let tu = tau_on_frame(&jet, &t, &uv);
    let tv = tau_on_frame(&jet, &t, &vv);
    let mut lhs = C64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            lhs += tu[a][b] * tv[a][b].conj();
        }
    }
    lhs *= 0.5;
    // (D_j u)_k = u(T(W̄_j, W̄_k))
    let diff = |w: &[C64]| -> Vec<Vec<C64>> {
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| (0..n).map(|l| t.get(l, j, k).conj() * w[l]).sum())
                    .collect()
            })
            .collect()
    };
    let du = diff(&uv);
    let dv = diff(&vv);
    let inv = jet.inverse();
    let mut rhs = C64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            rhs += inv[(j, k)] * form_inner(inv, &du[j], &dv[k]);
        }
    }
    Ok((lhs, rhs * 0.5))
}

/// `Σ_a |Σ_j conj(E_a^j) X_j|²` for (0,1)-forms `X_j` indexed by `W̄_j`.
pub(crate) fn frame_norm_sqr(jet: &MetricJet, x: &[Vec<C64>]) -> f64 {
    let n = jet.n;
    let e = &jet.factor.lower_inv;
    let inv = jet.inverse();
    let mut acc = 0.0;
    for a in 0..n {
        let y: Vec<C64> = (0..n)
            .map(|k| (0..n).map(|j| e[(a, j)].conj() * x[j][k]).sum())
            .collect();
        acc += form_inner(inv, &y, &y).re;
    }
    acc
}
