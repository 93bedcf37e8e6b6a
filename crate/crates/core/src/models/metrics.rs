//! Built-in metrics with analytic first and second derivatives.

use crate::error::{Error, Result};
use crate::field::{self, ScalarField};
use crate::linalg::{cr, CMat, C64};
use crate::metric::{first_derivatives, second_derivatives, MetricField};

fn norm2(z: &[C64]) -> f64 {
    z.iter().map(|v| v.norm_sqr()).sum()
}

/// `g = I`.
#[derive(Debug, Clone)]
pub struct Euclidean {
    pub n: usize,
}

impl Euclidean {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl MetricField for Euclidean {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, _z: &[C64]) -> Result<CMat> {
        Ok(CMat::identity(self.n, self.n))
    }
    fn first_deriv(&self, _z: &[C64]) -> Option<Result<Vec<CMat>>> {
        Some(Ok(vec![CMat::zeros(self.n, self.n); self.n]))
    }
    fn second_deriv(&self, _z: &[C64]) -> Option<Result<Vec<Vec<CMat>>>> {
        Some(Ok(vec![vec![CMat::zeros(self.n, self.n); self.n]; self.n]))
    }
    fn label(&self) -> String {
        format!("euclidean(n={})", self.n)
    }
}

/// A constant Hermitian positive-definite matrix.
#[derive(Debug, Clone)]
pub struct ConstantMetric {
    pub g: CMat,
}

impl MetricField for ConstantMetric {
    fn dim(&self) -> usize {
        self.g.nrows()
    }
    fn eval(&self, _z: &[C64]) -> Result<CMat> {
        Ok(self.g.clone())
    }
    fn first_deriv(&self, _z: &[C64]) -> Option<Result<Vec<CMat>>> {
        let n = self.dim();
        Some(Ok(vec![CMat::zeros(n, n); n]))
    }
    fn second_deriv(&self, _z: &[C64]) -> Option<Result<Vec<Vec<CMat>>>> {
        let n = self.dim();
        Some(Ok(vec![vec![CMat::zeros(n, n); n]; n]))
    }
    fn label(&self) -> String {
        "constant".into()
    }
}

/// Hopf metric `g = |z|^{-2} I` on `ℂⁿ∖{0}`.
#[derive(Debug, Clone)]
pub struct HopfMetric {
    pub n: usize,
}

impl HopfMetric {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl MetricField for HopfMetric {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, z: &[C64]) -> Result<CMat> {
        let r2 = norm2(z);
        if r2 <= 0.0 {
            return Err(Error::Domain("Hopf metric at the origin".into()));
        }
        Ok(CMat::identity(self.n, self.n) * cr(1.0 / r2))
    }
    fn contains(&self, z: &[C64]) -> bool {
        norm2(z) > 0.0
    }
    fn first_deriv(&self, z: &[C64]) -> Option<Result<Vec<CMat>>> {
        let r2 = norm2(z);
        let n = self.n;
        Some(Ok((0..n)
            .map(|l| CMat::identity(n, n) * (-z[l].conj() / (r2 * r2)))
            .collect()))
    }
    fn second_deriv(&self, z: &[C64]) -> Option<Result<Vec<Vec<CMat>>>> {
        let r2 = norm2(z);
        let n = self.n;
        Some(Ok((0..n)
            .map(|l| {
                (0..n)
                    .map(|m| {
                        let d = if l == m { -1.0 / (r2 * r2) } else { 0.0 };
                        let v = cr(d) + z[l].conj() * z[m] * (2.0 / (r2 * r2 * r2));
                        CMat::identity(n, n) * v
                    })
                    .collect()
            })
            .collect()))
    }
    fn label(&self) -> String {
        format!("hopf(n={})", self.n)
    }
}

/// Fubini-Study metric on the affine chart, `g = ∂∂̄ log(1 + |z|²)`.
#[derive(Debug, Clone)]
pub struct FubiniStudy {
    pub n: usize,
}

impl FubiniStudy {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

fn kd(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

impl MetricField for FubiniStudy {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, z: &[C64]) -> Result<CMat> {
        let s = 1.0 + norm2(z);
        let n = self.n;
        Ok(CMat::from_fn(n, n, |j, k| {
            cr(kd(j, k) / s) - z[j].conj() * z[k] / (s * s)
        }))
    }
    fn first_deriv(&self, z: &[C64]) -> Option<Result<Vec<CMat>>> {
        let s = 1.0 + norm2(z);
        let (s2, s3) = (s * s, s * s * s);
        let n = self.n;
        Some(Ok((0..n)
            .map(|l| {
                CMat::from_fn(n, n, |j, k| {
                    -z[l].conj() * kd(j, k) / s2 - z[j].conj() * kd(k, l) / s2
                        + z[l].conj() * z[j].conj() * z[k] * (2.0 / s3)
                })
            })
            .collect()))
    }
    fn second_deriv(&self, z: &[C64]) -> Option<Result<Vec<Vec<CMat>>>> {
        let s = 1.0 + norm2(z);
        let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
        let n = self.n;
        Some(Ok((0..n)
            .map(|l| {
                (0..n)
                    .map(|m| {
                        CMat::from_fn(n, n, |j, k| {
                            let t1 = -(cr(kd(l, m) / s2) - z[l].conj() * z[m] * (2.0 / s3)) * kd(j, k);
                            let t2 = -(cr(kd(j, m) / s2) - z[j].conj() * z[m] * (2.0 / s3)) * kd(k, l);
                            let t3 = z[k]
                                * 2.0
                                * (z[j].conj() * kd(l, m) / s3 + z[l].conj() * kd(j, m) / s3
                                    - z[l].conj() * z[j].conj() * z[m] * (3.0 / s4));
                            t1 + t2 + t3
                        })
                    })
                    .collect()
            })
            .collect()))
    }
    fn label(&self) -> String {
        format!("fubini-study(n={})", self.n)
    }
}

/// Conformally flat metric `e^{φ} I` for a real scalar `φ`.
#[derive(Clone)]
pub struct Conformal<F> {
    pub phi: F,
}

impl<F: ScalarField> Conformal<F> {
    pub fn new(phi: F) -> Self {
        Self { phi }
    }
}

impl<F: ScalarField> MetricField for Conformal<F> {
    fn dim(&self) -> usize {
        self.phi.dim()
    }
    fn eval(&self, z: &[C64]) -> Result<CMat> {
        let n = self.dim();
        let v = field::real_value(&self.phi, z)?;
        Ok(CMat::identity(n, n) * cr(v.exp()))
    }
    fn contains(&self, z: &[C64]) -> bool {
        self.phi.contains(z)
    }
    fn first_deriv(&self, z: &[C64]) -> Option<Result<Vec<CMat>>> {
        let n = self.dim();
        Some((|| {
            let e = field::real_value(&self.phi, z)?.exp();
            let g = field::gradient(&self.phi, z)?;
            Ok((0..n).map(|l| CMat::identity(n, n) * (g.dz[l] * e)).collect())
        })())
    }
    fn second_deriv(&self, z: &[C64]) -> Option<Result<Vec<Vec<CMat>>>> {
        let n = self.dim();
        Some((|| {
            let e = field::real_value(&self.phi, z)?.exp();
            let g = field::gradient(&self.phi, z)?;
            let h = field::complex_hessian(&self.phi, z)?;
            Ok((0..n)
                .map(|l| {
                    (0..n)
                        .map(|m| CMat::identity(n, n) * ((h[(l, m)] + g.dz[l] * g.dzbar[m]) * e))
                        .collect()
                })
                .collect())
        })())
    }
    fn label(&self) -> String {
        format!("conformal({})", self.phi.label())
    }
}

/// Block-diagonal product of metrics on consecutive coordinate groups.
#[derive(Clone)]
pub struct ProductMetric {
    pub factors: Vec<std::sync::Arc<dyn MetricField>>,
}

impl ProductMetric {
    pub fn new(factors: Vec<std::sync::Arc<dyn MetricField>>) -> Self {
        Self { factors }
    }

    fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.factors.len());
        let mut acc = 0;
        for f in &self.factors {
            out.push(acc);
            acc += f.dim();
        }
        out
    }
}

impl MetricField for ProductMetric {
    fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim()).sum()
    }
    fn eval(&self, z: &[C64]) -> Result<CMat> {
        let n = self.dim();
        let mut g = CMat::zeros(n, n);
        for (f, off) in self.factors.iter().zip(self.offsets()) {
            let d = f.dim();
            let block = f.eval(&z[off..off + d])?;
            g.view_mut((off, off), (d, d)).copy_from(&block);
        }
        Ok(g)
    }
    fn contains(&self, z: &[C64]) -> bool {
        self.factors
            .iter()
            .zip(self.offsets())
            .all(|(f, off)| f.contains(&z[off..off + f.dim()]))
    }
    fn first_deriv(&self, z: &[C64]) -> Option<Result<Vec<CMat>>> {
        let n = self.dim();
        Some((|| {
            let mut out = vec![CMat::zeros(n, n); n];
            for (f, off) in self.factors.iter().zip(self.offsets()) {
                let d = f.dim();
                let parts = first_derivatives(f, &z[off..off + d])?;
                for (l, p) in parts.iter().enumerate() {
                    out[off + l].view_mut((off, off), (d, d)).copy_from(p);
                }
            }
            Ok(out)
        })())
    }
    fn second_deriv(&self, z: &[C64]) -> Option<Result<Vec<Vec<CMat>>>> {
        let n = self.dim();
        Some((|| {
            let mut out = vec![vec![CMat::zeros(n, n); n]; n];
            for (f, off) in self.factors.iter().zip(self.offsets()) {
                let d = f.dim();
                let parts = second_derivatives(f, &z[off..off + d])?;
                for l in 0..d {
                    for m in 0..d {
                        out[off + l][off + m]
                            .view_mut((off, off), (d, d))
                            .copy_from(&parts[l][m]);
                    }
                }
            }
            Ok(out)
        })())
    }
    fn label(&self) -> String {
        let names: Vec<String> = self.factors.iter().map(|f| f.label()).collect();
        format!("product({})", names.join(" x "))
    }
}

/// Pullback of a metric along the linear map `z = A w`:
/// `g′(w) = Aᵀ g(A w) Ā`.
#[derive(Clone)]
pub struct LinearPullback<M> {
    pub inner: M,
    pub a: CMat,
}

impl<M: MetricField> LinearPullback<M> {
    pub fn new(inner: M, a: CMat) -> Result<Self> {
        if a.nrows() != inner.dim() || a.ncols() != inner.dim() {
            return Err(Error::Dimension {
                expected: inner.dim(),
                got: a.nrows(),
            });
        }
        Ok(Self { inner, a })
    }

    pub fn push(&self, w: &[C64]) -> Vec<C64> {
        let n = self.a.nrows();
        (0..n)
            .map(|j| (0..n).map(|k| self.a[(j, k)] * w[k]).sum())
            .collect()
    }

    fn sandwich(&self, m: &CMat) -> CMat {
        self.a.transpose() * m * self.a.conjugate()
    }
}

impl<M: MetricField> MetricField for LinearPullback<M> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, w: &[C64]) -> Result<CMat> {
        Ok(self.sandwich(&self.inner.eval(&self.push(w))?))
    }
    fn contains(&self, w: &[C64]) -> bool {
        self.inner.contains(&self.push(w))
    }
    fn first_deriv(&self, w: &[C64]) -> Option<Result<Vec<CMat>>> {
        let n = self.dim();
        Some((|| {
            let d = first_derivatives(&self.inner, &self.push(w))?;
            Ok((0..n)
                .map(|i| {
                    let mut acc = CMat::zeros(n, n);
                    for (j, dj) in d.iter().enumerate() {
                        acc += dj * self.a[(j, i)];
                    }
                    self.sandwich(&acc)
                })
                .collect())
        })())
    }
    fn second_deriv(&self, w: &[C64]) -> Option<Result<Vec<Vec<CMat>>>> {
        let n = self.dim();
        Some((|| {
            let d = second_derivatives(&self.inner, &self.push(w))?;
            Ok((0..n)
                .map(|i| {
                    (0..n)
                        .map(|m| {
                            let mut acc = CMat::zeros(n, n);
                            for j in 0..n {
                                for l in 0..n {
                                    acc += &d[j][l] * (self.a[(j, i)] * self.a[(l, m)].conj());
                                }
                            }
                            self.sandwich(&acc)
                        })
                        .collect()
                })
                .collect())
        })())
    }
    fn deriv_mode(&self) -> crate::field::DerivMode {
        self.inner.deriv_mode()
    }
    fn label(&self) -> String {
        format!("pullback({})", self.inner.label())
    }
}
