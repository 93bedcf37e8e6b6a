//! Chart-local Hermitian metrics `g_{jk̄}(z)` and their derivative jets.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fd;
use crate::field::DerivMode;
use crate::linalg::{hermitian_defect, min_eigenvalue, CMat, HpdFactor, C64};
use crate::point::check_dim;

/// Tolerance on conjugate symmetry of `eval` output.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub trait MetricField: Send + Sync {
    fn dim(&self) -> usize;

    /// `G[j][k] = g_{jk̄}(z)`.
    fn eval(&self, z: &[C64]) -> Result<CMat>;

    /// `[l] = ∂_{z_l} G`.
    fn first_deriv(&self, _z: &[C64]) -> Option<Result<Vec<CMat>>> {
        None
    }

    /// `[l][m] = ∂_{z_l} ∂_{z̄_m} G`.
    fn second_deriv(&self, _z: &[C64]) -> Option<Result<Vec<Vec<CMat>>>> {
        None
    }

    fn contains(&self, _z: &[C64]) -> bool {
        true
    }

    fn deriv_mode(&self) -> DerivMode {
        DerivMode::Analytic
    }

    fn label(&self) -> String {
        "metric".into()
    }
}

impl<T: MetricField + ?Sized> MetricField for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, z: &[C64]) -> Result<CMat> {
        (**self).eval(z)
    }
    fn first_deriv(&self, z: &[C64]) -> Option<Result<Vec<CMat>>> {
        (**self).first_deriv(z)
    }
    fn second_deriv(&self, z: &[C64]) -> Option<Result<Vec<Vec<CMat>>>> {
        (**self).second_deriv(z)
    }
    fn contains(&self, z: &[C64]) -> bool {
        (**self).contains(z)
    }
    fn deriv_mode(&self) -> DerivMode {
        (**self).deriv_mode()
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

impl<T: MetricField + ?Sized> MetricField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, z: &[C64]) -> Result<CMat> {
        (**self).eval(z)
    }
    fn first_deriv(&self, z: &[C64]) -> Option<Result<Vec<CMat>>> {
        (**self).first_deriv(z)
    }
    fn second_deriv(&self, z: &[C64]) -> Option<Result<Vec<Vec<CMat>>>> {
        (**self).second_deriv(z)
    }
    fn contains(&self, z: &[C64]) -> bool {
        (**self).contains(z)
    }
    fn deriv_mode(&self) -> DerivMode {
        (**self).deriv_mode()
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

pub type SharedMetric = Arc<dyn MetricField>;

/// Forces finite-difference derivatives with step `h`.
#[derive(Debug, Clone)]
pub struct FdMetric<M> {
    pub inner: M,
    pub h: f64,
}

impl<M: MetricField> FdMetric<M> {
    pub fn new(inner: M, h: f64) -> Self {
        Self { inner, h }
    }
}

impl<M: MetricField> MetricField for FdMetric<M> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, z: &[C64]) -> Result<CMat> {
        self.inner.eval(z)
    }
    fn contains(&self, z: &[C64]) -> bool {
        self.inner.contains(z)
    }
    fn deriv_mode(&self) -> DerivMode {
        DerivMode::FiniteDifference { h: self.h }
    }
    fn label(&self) -> String {
        format!("fd({})", self.inner.label())
    }
}

fn flatten(m: &CMat) -> Vec<C64> {
    m.iter().copied().collect()
}

fn unflatten(n: usize, v: &[C64]) -> CMat {
    CMat::from_column_slice(n, n, v)
}

fn guarded_eval<M: MetricField + ?Sized>(g: &M, z: &[C64]) -> Result<CMat> {
    if !g.contains(z) {
        return Err(Error::Domain(format!(
            "{} evaluated outside its domain at {z:?}",
            g.label()
        )));
    }
    let m = g.eval(z)?;
    if m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Numerical(format!("{} is not finite at {z:?}", g.label())));
    }
    Ok(m)
}

/// Metric matrix with validation of symmetry and positivity.
pub fn eval_checked<M: MetricField + ?Sized>(g: &M, z: &[C64]) -> Result<CMat> {
    check_dim(g.dim(), z.len())?;
    let m = guarded_eval(g, z)?;
    let defect = hermitian_defect(&m);
    if defect > HERMITIAN_TOL * (1.0 + crate::linalg::max_abs(&m)) {
        return Err(Error::Numerical(format!(
            "{} is not Hermitian (defect {defect:e})",
            g.label()
        )));
    }
    if min_eigenvalue(&m) <= 0.0 {
        return Err(Error::SingularMetric(format!(
            "{} is not positive definite at {z:?}",
            g.label()
        )));
    }
    Ok(m)
}

/// `[l] = ∂_{z_l} G`.
pub fn first_derivatives<M: MetricField + ?Sized>(g: &M, z: &[C64]) -> Result<Vec<CMat>> {
    let n = g.dim();
    check_dim(n, z.len())?;
    let mode = g.deriv_mode();
    if mode.is_analytic() {
        if let Some(d) = g.first_deriv(z) {
            return d;
        }
    }
    let wrapped = |p: &[C64]| guarded_eval(g, p).map(|m| flatten(&m));
    let (dz, _) = fd::wirtinger_first(&wrapped, z, mode.step())?;
    Ok(dz.iter().map(|v| unflatten(n, v)).collect())
}

/// `[l][m] = ∂_{z_l}∂_{z̄_m} G`.
pub fn second_derivatives<M: MetricField + ?Sized>(g: &M, z: &[C64]) -> Result<Vec<Vec<CMat>>> {
    let n = g.dim();
    check_dim(n, z.len())?;
    let mode = g.deriv_mode();
    if mode.is_analytic() {
        if let Some(d) = g.second_deriv(z) {
            return d;
        }
        if g.first_deriv(z).is_some() {
            // ∂_l ∂_{m̄} G = (∂_m G)† differentiated in z_l.
            let wrapped = |p: &[C64]| -> Result<Vec<C64>> {
                if !g.contains(p) {
                    return Err(Error::Domain(format!("{} stencil left the domain", g.label())));
                }
                let d = g.first_deriv(p).expect("first derivative callback")?;
                Ok(d.iter().flat_map(|m| flatten(&m.adjoint())).collect())
            };
            let (dz, _) = fd::wirtinger_first(&wrapped, z, mode.step())?;
            let nn = n * n;
            return Ok((0..n)
                .map(|l| {
                    (0..n)
                        .map(|m| unflatten(n, &dz[l][m * nn..(m + 1) * nn]))
                        .collect()
                })
                .collect());
        }
    }
    let wrapped = |p: &[C64]| guarded_eval(g, p).map(|m| flatten(&m));
    let mixed = fd::wirtinger_mixed(&wrapped, z, mode.step())?;
    Ok(mixed
        .iter()
        .map(|row| row.iter().map(|v| unflatten(n, v)).collect())
        .collect())
}

/// Metric value, factorization and derivatives at one point.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub n: usize,
    pub g: CMat,
    pub factor: HpdFactor,
    pub dg: Vec<CMat>,
    pub ddg: Option<Vec<Vec<CMat>>>,
}

impl MetricJet {
    /// First-order jet (value and `∂G`).
    pub fn first<M: MetricField + ?Sized>(g: &M, z: &[C64]) -> Result<Self> {
        let m = eval_checked(g, z)?;
        let factor = HpdFactor::new(&m)?;
        let dg = first_derivatives(g, z)?;
        Ok(Self {
            n: g.dim(),
            g: m,
            factor,
            dg,
            ddg: None,
        })
    }

    /// Second-order jet (adds `∂∂̄G`).
    pub fn second<M: MetricField + ?Sized>(g: &M, z: &[C64]) -> Result<Self> {
        let mut jet = Self::first(g, z)?;
        jet.ddg = Some(second_derivatives(g, z)?);
        Ok(jet)
    }

    pub fn inverse(&self) -> &CMat {
        &self.factor.inverse
    }

    /// `∂_l G⁻¹ = −G⁻¹ (∂_l G) G⁻¹`.
    pub fn d_inverse(&self, l: usize) -> CMat {
        let inv = &self.factor.inverse;
        -(inv * &self.dg[l] * inv)
    }

    pub fn ddg(&self) -> Result<&Vec<Vec<CMat>>> {
        self.ddg
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("second derivatives were not computed".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cr, max_abs_diff};

    struct Diag;

    impl MetricField for Diag {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, z: &[C64]) -> Result<CMat> {
            let a = 1.0 + z[0].norm_sqr();
            Ok(CMat::from_row_slice(2, 2, &[cr(a), z[1] * 0.1, z[1].conj() * 0.1, cr(2.0)]))
        }
        fn first_deriv(&self, z: &[C64]) -> Option<Result<Vec<CMat>>> {
            let zero = cr(0.0);
            Some(Ok(vec![
                CMat::from_row_slice(2, 2, &[z[0].conj(), zero, zero, zero]),
                CMat::from_row_slice(2, 2, &[zero, cr(0.1), zero, zero]),
            ]))
        }
    }

    #[test]
    fn derivative_modes_agree() {
        let z = [C64::new(0.3, 0.2), C64::new(-0.1, 0.4)];
        let a = first_derivatives(&Diag, &z).unwrap();
        let f = first_derivatives(&FdMetric::new(Diag, 1e-4), &z).unwrap();
        for l in 0..2 {
            assert!(max_abs_diff(&a[l], &f[l]) < 1e-8);
        }
        let a = second_derivatives(&Diag, &z).unwrap();
        let f = second_derivatives(&FdMetric::new(Diag, 1e-3), &z).unwrap();
        for l in 0..2 {
            for m in 0..2 {
                assert!(max_abs_diff(&a[l][m], &f[l][m]) < 1e-5);
            }
        }
        // ∂_1∂_{1̄} g_{11̄} = 1
        assert!((a[0][0][(0, 0)] - 1.0).norm() < 1e-6);
    }
}
