//! Chern connection, torsion and curvature trace in the coordinate frame.

use crate::error::{Error, Result};
use crate::field::{self, ScalarField};
use crate::fd;
use crate::linalg::{hermitian_part, trace, CMat, C64, I};
use crate::metric::{eval_checked, MetricField, MetricJet};
use crate::point::ChartPoint;

/// `Γ^ℓ_{jk}` with `∇_{W_j} W_k = Σ_ℓ Γ^ℓ_{jk} W_ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    pub n: usize,
    coeffs: Vec<C64>,
}

impl Christoffel {
    pub fn get(&self, l: usize, j: usize, k: usize) -> C64 {
        self.coeffs[(l * self.n + j) * self.n + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, v| a.max(v.norm()))
    }

    pub fn from_jet(jet: &MetricJet) -> Self {
        let n = jet.n;
        let inv = jet.inverse();
        let mut coeffs = vec![C64::new(0.0, 0.0); n * n * n];
        for j in 0..n {
            let m = &jet.dg[j] * inv;
            for k in 0..n {
                for l in 0..n {
                    coeffs[(l * n + j) * n + k] = m[(k, l)];
                }
            }
        }
        Self { n, coeffs }
    }
}

/// `T^ℓ_{jk}` with `T(W_j, W_k) = Σ_ℓ T^ℓ_{jk} W_ℓ`, antisymmetric in `j, k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionCoefficients {
    pub n: usize,
    coeffs: Vec<C64>,
}

impl TorsionCoefficients {
    pub fn get(&self, l: usize, j: usize, k: usize) -> C64 {
        self.coeffs[(l * self.n + j) * self.n + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, v| a.max(v.norm()))
    }

    pub fn from_christoffel(gamma: &Christoffel) -> Self {
        let n = gamma.n;
        let mut coeffs = vec![C64::new(0.0, 0.0); n * n * n];
        for l in 0..n {
            for j in 0..n {
                for k in (j + 1)..n {
                    let t = gamma.get(l, j, k) - gamma.get(l, k, j);
                    coeffs[(l * n + j) * n + k] = t;
                    coeffs[(l * n + k) * n + j] = -t;
                }
            }
        }
        Self { n, coeffs }
    }

    /// Coefficient vector of `T(X, Y)` for `X = Σ x_j W_j`, `Y = Σ y_k W_k`.
    pub fn apply(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        let n = self.n;
        (0..n)
            .map(|l| {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..n {
                    for k in 0..n {
                        acc += x[j] * y[k] * self.get(l, j, k);
                    }
                }
                acc
            })
            .collect()
    }
}

/// `H[j][k] = ∂_{z_j}∂_{z̄_k} f(z)`.
pub fn complex_hessian<F: ScalarField + ?Sized>(f: &F, z: &ChartPoint) -> Result<CMat> {
    let h = field::complex_hessian(f, z)?;
    Ok(if f.is_real() { hermitian_part(&h) } else { h })
}

pub fn christoffel<M: MetricField + ?Sized>(g: &M, z: &ChartPoint) -> Result<Christoffel> {
    Ok(Christoffel::from_jet(&MetricJet::first(g, z)?))
}

pub fn torsion_coeffs<M: MetricField + ?Sized>(g: &M, z: &ChartPoint) -> Result<TorsionCoefficients> {
    Ok(TorsionCoefficients::from_christoffel(&christoffel(g, z)?))
}

/// `Θ = −∂∂̄ log det G` from a second-order jet.
pub fn curvature_from_jet(jet: &MetricJet) -> Result<CMat> {
    let n = jet.n;
    let inv = jet.inverse();
    let ddg = jet.ddg()?;
    let a: Vec<CMat> = jet.dg.iter().map(|d| inv * d).collect();
    let mut theta = CMat::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            // ∂_{z̄_k} G = (∂_{z_k} G)†
            let dbar_k = jet.dg[k].adjoint();
            let v = trace(&(inv * &ddg[j][k])) - trace(&(inv * dbar_k * &a[j]));
            theta[(j, k)] = -v;
        }
    }
    let theta = hermitian_part(&theta);
    if theta.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Numerical("curvature is not finite".into()));
    }
    Ok(theta)
}

/// `Θ_{jk} = −∂_{z_j}∂_{z̄_k} log det g`.
pub fn curvature_trace<M: MetricField + ?Sized>(g: &M, z: &ChartPoint) -> Result<CMat> {
    curvature_from_jet(&MetricJet::second(g, z)?)
}

/// Orthonormal frame: row `a` holds the coordinate components of `E_a`.
pub fn orthonormal_frame(jet: &MetricJet) -> &CMat {
    &jet.factor.lower_inv
}

/// `Q` with `form_eval(Q, Z) = |τ Z♭|² = Σ_{a<b} |⟨T(E_a, E_b), Z⟩|²`.
pub fn torsion_norm_form_from(jet: &MetricJet, t: &TorsionCoefficients) -> CMat {
    let n = jet.n;
    let e = orthonormal_frame(jet);
    let mut q = CMat::zeros(n, n);
    for a in 0..n {
        let ea: Vec<C64> = (0..n).map(|j| e[(a, j)]).collect();
        for b in (a + 1)..n {
            let eb: Vec<C64> = (0..n).map(|j| e[(b, j)]).collect();
            let tab = t.apply(&ea, &eb);
            // ⟨T_ab, Z⟩ = Σ_m w_m conj(Z_m)
            let w: Vec<C64> = (0..n)
                .map(|m| (0..n).map(|l| tab[l] * jet.g[(l, m)]).sum())
                .collect();
            for j in 0..n {
                for k in 0..n {
                    q[(j, k)] += w[j].conj() * w[k];
                }
            }
        }
    }
    hermitian_part(&q)
}

pub fn torsion_norm_form<M: MetricField + ?Sized>(g: &M, z: &ChartPoint) -> Result<CMat> {
    let jet = MetricJet::first(g, z)?;
    let t = TorsionCoefficients::from_christoffel(&Christoffel::from_jet(&jet));
    Ok(torsion_norm_form_from(&jet, &t))
}

/// `log det g(z) − log det g̃(z)`.
pub fn kahler_comparison_weight<A, B>(g: &A, g_tilde: &B, z: &ChartPoint) -> Result<f64>
where
    A: MetricField + ?Sized,
    B: MetricField + ?Sized,
{
    let a = crate::linalg::log_det_hpd(&eval_checked(g, z)?)?;
    let b = crate::linalg::log_det_hpd(&eval_checked(g_tilde, z)?)?;
    Ok(a - b)
}

/// Coefficients of the (2,1) part of `dω` and of `τω`, for `ℓ < j` and each
/// `k`, with `ω = (i/2) Σ g_{jk̄} dz_j ∧ dz̄_k`.
#[derive(Debug, Clone)]
pub struct KahlerDifferential {
    /// `(ℓ, j, k, dω coefficient, τω coefficient)`.
    pub entries: Vec<(usize, usize, usize, C64, C64)>,
}

impl KahlerDifferential {
    pub fn max_defect(&self) -> f64 {
        self.entries
            .iter()
            .fold(0.0, |a, e| a.max((e.3 - e.4).norm()))
    }
}

/// `dω` by central differences of `g` with step `h`; `τω` from the torsion of
/// `g` in its own derivative mode.
pub fn kahler_differential<M: MetricField + ?Sized>(
    g: &M,
    z: &ChartPoint,
    h: f64,
) -> Result<KahlerDifferential> {
    let n = g.dim();
    let wrapped = |p: &[C64]| eval_checked(g, p).map(|m| m.iter().copied().collect::<Vec<_>>());
    let (dz, _) = fd::wirtinger_first(&wrapped, z, h)?;
    let dgl = |l: usize, j: usize, k: usize| dz[l][k * n + j];
    let gm = eval_checked(g, z)?;
    let t = torsion_coeffs(g, z)?;
    let half_i = I * 0.5;
    let mut entries = Vec::new();
    for l in 0..n {
        for j in (l + 1)..n {
            for k in 0..n {
                let d = half_i * (dgl(l, j, k) - dgl(j, l, k));
                let tau: C64 = (0..n).map(|m| t.get(m, l, j) * gm[(m, k)]).sum();
                entries.push((l, j, k, d, half_i * tau));
            }
        }
    }
    Ok(KahlerDifferential { entries })
}
