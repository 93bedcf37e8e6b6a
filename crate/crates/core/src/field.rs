//! Scalar fields on a chart and their Wirtinger derivatives.

use std::sync::Arc;

use crate::error::{ensure_finite, Error, Result};
use crate::fd;
use crate::linalg::{c, cr, zeros, CMat, C64, I};
use crate::point::check_dim;
use crate::quadrature::SupportBox;

/// How derivatives are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivMode {
    /// Use analytic callbacks when present, central differences with
    /// [`fd::DEFAULT_STEP`] otherwise.
    Analytic,
    /// Always use central differences with step `h`.
    FiniteDifference { h: f64 },
}

impl DerivMode {
    pub fn step(self) -> f64 {
        match self {
            DerivMode::Analytic => fd::DEFAULT_STEP,
            DerivMode::FiniteDifference { h } => h,
        }
    }

    pub fn is_analytic(self) -> bool {
        matches!(self, DerivMode::Analytic)
    }
}

/// First Wirtinger derivatives `∂_{z_j} f` and `∂_{z̄_j} f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub dz: Vec<C64>,
    pub dzbar: Vec<C64>,
}

impl Gradient {
    pub fn zero(n: usize) -> Self {
        Self {
            dz: vec![cr(0.0); n],
            dzbar: vec![cr(0.0); n],
        }
    }
}

pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, z: &[C64]) -> Result<C64>;

    /// Real-valued fields (ρ, ψ, κ) return `true`.
    fn is_real(&self) -> bool {
        true
    }

    /// Domain of definition, used to reject finite-difference stencils.
    fn contains(&self, _z: &[C64]) -> bool {
        true
    }

    fn gradient(&self, _z: &[C64]) -> Option<Result<Gradient>> {
        None
    }

    /// `H[j][k] = ∂_{z_j} ∂_{z̄_k} f`.
    fn hessian(&self, _z: &[C64]) -> Option<Result<CMat>> {
        None
    }

    fn deriv_mode(&self) -> DerivMode {
        DerivMode::Analytic
    }

    fn label(&self) -> String {
        "scalar".into()
    }

    /// Box outside of which the field vanishes identically.
    fn support_box(&self) -> Option<SupportBox> {
        None
    }
}

impl<T: ScalarField + ?Sized> ScalarField for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, z: &[C64]) -> Result<C64> {
        (**self).value(z)
    }
    fn is_real(&self) -> bool {
        (**self).is_real()
    }
    fn contains(&self, z: &[C64]) -> bool {
        (**self).contains(z)
    }
    fn gradient(&self, z: &[C64]) -> Option<Result<Gradient>> {
        (**self).gradient(z)
    }
    fn hessian(&self, z: &[C64]) -> Option<Result<CMat>> {
        (**self).hessian(z)
    }
    fn deriv_mode(&self) -> DerivMode {
        (**self).deriv_mode()
    }
    fn label(&self) -> String {
        (**self).label()
    }
    fn support_box(&self) -> Option<SupportBox> {
        (**self).support_box()
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, z: &[C64]) -> Result<C64> {
        (**self).value(z)
    }
    fn is_real(&self) -> bool {
        (**self).is_real()
    }
    fn contains(&self, z: &[C64]) -> bool {
        (**self).contains(z)
    }
    fn gradient(&self, z: &[C64]) -> Option<Result<Gradient>> {
        (**self).gradient(z)
    }
    fn hessian(&self, z: &[C64]) -> Option<Result<CMat>> {
        (**self).hessian(z)
    }
    fn deriv_mode(&self) -> DerivMode {
        (**self).deriv_mode()
    }
    fn label(&self) -> String {
        (**self).label()
    }
    fn support_box(&self) -> Option<SupportBox> {
        (**self).support_box()
    }
}

pub type SharedScalar = Arc<dyn ScalarField>;

fn guarded_value<F: ScalarField + ?Sized>(f: &F, z: &[C64]) -> Result<C64> {
    if !f.contains(z) {
        return Err(Error::Domain(format!(
            "{} evaluated outside its domain at {z:?}",
            f.label()
        )));
    }
    let v = f.value(z)?;
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::Numerical(format!("{} is not finite at {z:?}", f.label())));
    }
    Ok(v)
}

/// Value with domain and finiteness checks.
pub fn value<F: ScalarField + ?Sized>(f: &F, z: &[C64]) -> Result<C64> {
    check_dim(f.dim(), z.len())?;
    guarded_value(f, z)
}

pub fn real_value<F: ScalarField + ?Sized>(f: &F, z: &[C64]) -> Result<f64> {
    ensure_finite(value(f, z)?.re, "real scalar")
}

fn finite_vec(v: &[C64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.re.is_finite() && x.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical(format!("{what} is not finite")))
    }
}

/// First Wirtinger derivatives, analytic or by central differences.
pub fn gradient<F: ScalarField + ?Sized>(f: &F, z: &[C64]) -> Result<Gradient> {
    check_dim(f.dim(), z.len())?;
    guarded_value(f, z)?;
    let mode = f.deriv_mode();
    if mode.is_analytic() {
        if let Some(g) = f.gradient(z) {
            let g = g?;
            finite_vec(&g.dz, "gradient")?;
            finite_vec(&g.dzbar, "gradient")?;
            return Ok(g);
        }
    }
    let h = mode.step();
    let wrapped = |p: &[C64]| guarded_value(f, p).map(|v| vec![v]);
    let (dz, dzb) = fd::wirtinger_first(&wrapped, z, h)?;
    let g = Gradient {
        dz: dz.into_iter().map(|v| v[0]).collect(),
        dzbar: dzb.into_iter().map(|v| v[0]).collect(),
    };
    finite_vec(&g.dz, "gradient")?;
    finite_vec(&g.dzbar, "gradient")?;
    Ok(g)
}

/// `H[j][k] = ∂_{z_j}∂_{z̄_k} f(z)`; analytic callback, else differences of
/// the analytic gradient, else a mixed four-point stencil.
pub fn complex_hessian<F: ScalarField + ?Sized>(f: &F, z: &[C64]) -> Result<CMat> {
    check_dim(f.dim(), z.len())?;
    guarded_value(f, z)?;
    let n = z.len();
    let mode = f.deriv_mode();
    let out = if mode.is_analytic() && f.hessian(z).is_some() {
        f.hessian(z).expect("checked")?
    } else if mode.is_analytic() && f.gradient(z).is_some() {
        let h = mode.step();
        let wrapped = |p: &[C64]| -> Result<Vec<C64>> {
            if !f.contains(p) {
                return Err(Error::Domain(format!("{} stencil left the domain", f.label())));
            }
            Ok(f.gradient(p).expect("gradient callback")?.dzbar)
        };
        let (dz, _) = fd::wirtinger_first(&wrapped, z, h)?;
        CMat::from_fn(n, n, |j, k| dz[j][k])
    } else {
        let h = mode.step();
        let wrapped = |p: &[C64]| guarded_value(f, p).map(|v| vec![v]);
        let mixed = fd::wirtinger_mixed(&wrapped, z, h)?;
        CMat::from_fn(n, n, |j, k| mixed[j][k][0])
    };
    if out.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::Numerical("complex Hessian is not finite".into()));
    }
    Ok(out)
}

/// Value, gradient and complex Hessian at one point.
#[derive(Debug, Clone)]
pub struct ScalarJet {
    pub value: C64,
    pub grad: Gradient,
    pub hess: CMat,
}

impl ScalarJet {
    pub fn new<F: ScalarField + ?Sized>(f: &F, z: &[C64]) -> Result<Self> {
        Ok(Self {
            value: value(f, z)?,
            grad: gradient(f, z)?,
            hess: complex_hessian(f, z)?,
        })
    }
}

/// Forces finite-difference derivatives with step `h`.
#[derive(Debug, Clone)]
pub struct FdScalar<F> {
    pub inner: F,
    pub h: f64,
}

impl<F: ScalarField> FdScalar<F> {
    pub fn new(inner: F, h: f64) -> Self {
        Self { inner, h }
    }
}

impl<F: ScalarField> ScalarField for FdScalar<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, z: &[C64]) -> Result<C64> {
        self.inner.value(z)
    }
    fn is_real(&self) -> bool {
        self.inner.is_real()
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
    fn support_box(&self) -> Option<SupportBox> {
        self.inner.support_box()
    }
}

#[derive(Debug, Clone)]
pub struct Constant {
    pub n: usize,
    pub c: f64,
}

impl Constant {
    pub fn new(n: usize, c: f64) -> Self {
        Self { n, c }
    }
}

impl ScalarField for Constant {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, _z: &[C64]) -> Result<C64> {
        Ok(cr(self.c))
    }
    fn gradient(&self, _z: &[C64]) -> Option<Result<Gradient>> {
        Some(Ok(Gradient::zero(self.n)))
    }
    fn hessian(&self, _z: &[C64]) -> Option<Result<CMat>> {
        Some(Ok(zeros(self.n)))
    }
    fn label(&self) -> String {
        format!("const({})", self.c)
    }
}

/// `scale·|z|²`.
#[derive(Debug, Clone)]
pub struct NormSquared {
    pub n: usize,
    pub scale: f64,
}

impl NormSquared {
    pub fn new(n: usize) -> Self {
        Self { n, scale: 1.0 }
    }
}

impl ScalarField for NormSquared {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, z: &[C64]) -> Result<C64> {
        Ok(cr(self.scale * z.iter().map(|v| v.norm_sqr()).sum::<f64>()))
    }
    fn gradient(&self, z: &[C64]) -> Option<Result<Gradient>> {
        Some(Ok(Gradient {
            dz: z.iter().map(|v| v.conj() * self.scale).collect(),
            dzbar: z.iter().map(|v| v * self.scale).collect(),
        }))
    }
    fn hessian(&self, _z: &[C64]) -> Option<Result<CMat>> {
        Some(Ok(CMat::identity(self.n, self.n) * cr(self.scale)))
    }
    fn label(&self) -> String {
        "norm-squared".into()
    }
}

/// `log |z|²`, defined off the origin.
#[derive(Debug, Clone)]
pub struct LogNormSquared {
    pub n: usize,
}

impl ScalarField for LogNormSquared {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, z: &[C64]) -> Result<C64> {
        let r2: f64 = z.iter().map(|v| v.norm_sqr()).sum();
        if r2 <= 0.0 {
            return Err(Error::Domain("log|z|^2 at the origin".into()));
        }
        Ok(cr(r2.ln()))
    }
    fn contains(&self, z: &[C64]) -> bool {
        z.iter().any(|v| v.norm_sqr() > 0.0)
    }
    fn gradient(&self, z: &[C64]) -> Option<Result<Gradient>> {
        let r2: f64 = z.iter().map(|v| v.norm_sqr()).sum();
        Some(Ok(Gradient {
            dz: z.iter().map(|v| v.conj() / r2).collect(),
            dzbar: z.iter().map(|v| v / r2).collect(),
        }))
    }
    fn hessian(&self, z: &[C64]) -> Option<Result<CMat>> {
        let r2: f64 = z.iter().map(|v| v.norm_sqr()).sum();
        let n = self.n;
        Some(Ok(CMat::from_fn(n, n, |j, k| {
            let d = if j == k { 1.0 / r2 } else { 0.0 };
            cr(d) - z[j].conj() * z[k] / (r2 * r2)
        })))
    }
    fn label(&self) -> String {
        "log-norm-squared".into()
    }
}

/// `Re(Σ a_j z_j) + c`, a pluriharmonic affine function.
#[derive(Debug, Clone)]
pub struct AffineRe {
    pub coeffs: Vec<C64>,
    pub constant: f64,
}

impl AffineRe {
    pub fn new(coeffs: Vec<C64>, constant: f64) -> Self {
        Self { coeffs, constant }
    }
}

impl ScalarField for AffineRe {
    fn dim(&self) -> usize {
        self.coeffs.len()
    }
    fn value(&self, z: &[C64]) -> Result<C64> {
        let s: C64 = self.coeffs.iter().zip(z).map(|(a, v)| a * v).sum();
        Ok(cr(s.re + self.constant))
    }
    fn gradient(&self, _z: &[C64]) -> Option<Result<Gradient>> {
        Some(Ok(Gradient {
            dz: self.coeffs.iter().map(|a| a * 0.5).collect(),
            dzbar: self.coeffs.iter().map(|a| a.conj() * 0.5).collect(),
        }))
    }
    fn hessian(&self, _z: &[C64]) -> Option<Result<CMat>> {
        Some(Ok(zeros(self.coeffs.len())))
    }
    fn label(&self) -> String {
        "affine-re".into()
    }
}

/// `Re(z_j²)`.
#[derive(Debug, Clone)]
pub struct ReSquare {
    pub n: usize,
    pub index: usize,
}

impl ScalarField for ReSquare {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, z: &[C64]) -> Result<C64> {
        Ok(cr((z[self.index] * z[self.index]).re))
    }
    fn gradient(&self, z: &[C64]) -> Option<Result<Gradient>> {
        let mut g = Gradient::zero(self.n);
        g.dz[self.index] = z[self.index];
        g.dzbar[self.index] = z[self.index].conj();
        Some(Ok(g))
    }
    fn hessian(&self, _z: &[C64]) -> Option<Result<CMat>> {
        Some(Ok(zeros(self.n)))
    }
    fn label(&self) -> String {
        "re-square".into()
    }
}

/// Compactly supported polynomial bump `(1 − |z−c|²/w²)^k` on the ball of
/// radius `w`, zero outside. `C^{k−1}` across the sphere.
///
/// An optional phase `p` multiplies by `exp(i Re Σ p_j (z_j − c_j))`, which
/// makes the bump complex valued and neither holomorphic nor antiholomorphic.
#[derive(Debug, Clone)]
pub struct Bump {
    pub center: Vec<C64>,
    pub width: f64,
    pub power: i32,
    pub amplitude: f64,
    pub phase: Option<Vec<C64>>,
}

impl Bump {
    pub fn new(center: Vec<C64>, width: f64, power: i32) -> Self {
        Self {
            center,
            width,
            power,
            amplitude: 1.0,
            phase: None,
        }
    }

    pub fn with_phase(mut self, phase: Vec<C64>) -> Self {
        self.phase = Some(phase);
        self
    }

    fn s(&self, z: &[C64]) -> f64 {
        z.iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            / (self.width * self.width)
    }

    pub fn in_support(&self, z: &[C64]) -> bool {
        self.s(z) < 1.0
    }

    // (e, ∂_j e / e) for the phase factor; ∂_j̄ e / e is i conj(p_j)/2.
    fn phase_factor(&self, z: &[C64]) -> (C64, Vec<C64>) {
        match &self.phase {
            None => (cr(1.0), vec![cr(0.0); self.dim()]),
            Some(p) => {
                let arg: f64 = p
                    .iter()
                    .zip(z.iter().zip(&self.center))
                    .map(|(pj, (zj, cj))| (pj * (zj - cj)).re)
                    .sum();
                (
                    C64::from_polar(1.0, arg),
                    p.iter().map(|pj| I * pj * 0.5).collect(),
                )
            }
        }
    }

    fn radial_gradient(&self, z: &[C64], t: f64) -> Vec<C64> {
        let k = self.power as f64;
        let f1 = -self.amplitude * k * t.powi(self.power - 1) / (self.width * self.width);
        (0..self.dim())
            .map(|j| (z[j] - self.center[j]).conj() * f1)
            .collect()
    }
}

impl ScalarField for Bump {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn is_real(&self) -> bool {
        self.phase.is_none()
    }
    fn value(&self, z: &[C64]) -> Result<C64> {
        let t = 1.0 - self.s(z);
        if t <= 0.0 {
            return Ok(cr(0.0));
        }
        let (e, _) = self.phase_factor(z);
        Ok(e * (self.amplitude * t.powi(self.power)))
    }
    fn gradient(&self, z: &[C64]) -> Option<Result<Gradient>> {
        let n = self.dim();
        let t = 1.0 - self.s(z);
        if t <= 0.0 {
            return Some(Ok(Gradient::zero(n)));
        }
        let g = self.amplitude * t.powi(self.power);
        let gz = self.radial_gradient(z, t);
        let (e, ez) = self.phase_factor(z);
        Some(Ok(Gradient {
            dz: (0..n).map(|j| e * (gz[j] + ez[j] * g)).collect(),
            dzbar: (0..n)
                .map(|j| e * (gz[j].conj() - ez[j].conj() * g))
                .collect(),
        }))
    }
    fn hessian(&self, z: &[C64]) -> Option<Result<CMat>> {
        let n = self.dim();
        let t = 1.0 - self.s(z);
        if t <= 0.0 {
            return Some(Ok(zeros(n)));
        }
        let k = self.power as f64;
        let w2 = self.width * self.width;
        let a = self.amplitude;
        let d: Vec<C64> = (0..n).map(|j| z[j] - self.center[j]).collect();
        let second = a * k * (k - 1.0) * t.powi(self.power - 2) / (w2 * w2);
        let first = -a * k * t.powi(self.power - 1) / w2;
        let g = a * t.powi(self.power);
        let gz = self.radial_gradient(z, t);
        let (e, ez) = self.phase_factor(z);
        // ∂_j̄ e / e = i conj(p_j)/2 = −conj(∂_j e / e)
        let ezb: Vec<C64> = ez.iter().map(|v| -v.conj()).collect();
        Some(Ok(CMat::from_fn(n, n, |j, l| {
            let diag = if j == l { first } else { 0.0 };
            let radial = d[j].conj() * d[l] * second + cr(diag);
            e * (radial + gz[j] * ezb[l] + gz[l].conj() * ez[j] + ez[j] * ezb[l] * g)
        })))
    }
    fn label(&self) -> String {
        "bump".into()
    }
    fn support_box(&self) -> Option<SupportBox> {
        Some(SupportBox::around(&self.center, self.width))
    }
}

type ValueFn = dyn Fn(&[C64]) -> Result<C64> + Send + Sync;
type GradFn = dyn Fn(&[C64]) -> Result<Gradient> + Send + Sync;
type HessFn = dyn Fn(&[C64]) -> Result<CMat> + Send + Sync;
type DomainFn = dyn Fn(&[C64]) -> bool + Send + Sync;

/// Scalar field assembled from closures.
#[derive(Clone)]
pub struct FnScalar {
    n: usize,
    label: String,
    real: bool,
    value: Arc<ValueFn>,
    grad: Option<Arc<GradFn>>,
    hess: Option<Arc<HessFn>>,
    domain: Option<Arc<DomainFn>>,
}

impl FnScalar {
    pub fn new(
        n: usize,
        label: impl Into<String>,
        value: impl Fn(&[C64]) -> Result<C64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            n,
            label: label.into(),
            real: true,
            value: Arc::new(value),
            grad: None,
            hess: None,
            domain: None,
        }
    }

    pub fn complex(mut self) -> Self {
        self.real = false;
        self
    }

    pub fn with_gradient(
        mut self,
        g: impl Fn(&[C64]) -> Result<Gradient> + Send + Sync + 'static,
    ) -> Self {
        self.grad = Some(Arc::new(g));
        self
    }

    pub fn with_hessian(
        mut self,
        h: impl Fn(&[C64]) -> Result<CMat> + Send + Sync + 'static,
    ) -> Self {
        self.hess = Some(Arc::new(h));
        self
    }

    pub fn with_domain(mut self, d: impl Fn(&[C64]) -> bool + Send + Sync + 'static) -> Self {
        self.domain = Some(Arc::new(d));
        self
    }
}

impl ScalarField for FnScalar {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, z: &[C64]) -> Result<C64> {
        (self.value)(z)
    }
    fn is_real(&self) -> bool {
        self.real
    }
    fn contains(&self, z: &[C64]) -> bool {
        self.domain.as_ref().map_or(true, |d| d(z))
    }
    fn gradient(&self, z: &[C64]) -> Option<Result<Gradient>> {
        self.grad.as_ref().map(|g| g(z))
    }
    fn hessian(&self, z: &[C64]) -> Option<Result<CMat>> {
        self.hess.as_ref().map(|h| h(z))
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `w ↦ f(A w)` for a constant matrix `A`.
#[derive(Clone)]
pub struct LinearPullbackScalar<F> {
    pub inner: F,
    pub a: CMat,
}

impl<F: ScalarField> LinearPullbackScalar<F> {
    pub fn new(inner: F, a: CMat) -> Self {
        Self { inner, a }
    }

    fn push(&self, w: &[C64]) -> Vec<C64> {
        let n = self.a.nrows();
        (0..n)
            .map(|j| (0..n).map(|k| self.a[(j, k)] * w[k]).sum())
            .collect()
    }
}

impl<F: ScalarField> ScalarField for LinearPullbackScalar<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, w: &[C64]) -> Result<C64> {
        self.inner.value(&self.push(w))
    }
    fn is_real(&self) -> bool {
        self.inner.is_real()
    }
    fn contains(&self, w: &[C64]) -> bool {
        self.inner.contains(&self.push(w))
    }
    fn gradient(&self, w: &[C64]) -> Option<Result<Gradient>> {
        let z = self.push(w);
        let n = self.a.nrows();
        let g = match gradient(&self.inner, &z) {
            Ok(g) => g,
            Err(e) => return Some(Err(e)),
        };
        Some(Ok(Gradient {
            dz: (0..n)
                .map(|i| (0..n).map(|j| g.dz[j] * self.a[(j, i)]).sum())
                .collect(),
            dzbar: (0..n)
                .map(|i| (0..n).map(|j| g.dzbar[j] * self.a[(j, i)].conj()).sum())
                .collect(),
        }))
    }
    fn hessian(&self, w: &[C64]) -> Option<Result<CMat>> {
        let z = self.push(w);
        Some(complex_hessian(&self.inner, &z).map(|h| self.a.transpose() * h * self.a.conjugate()))
    }
    fn deriv_mode(&self) -> DerivMode {
        self.inner.deriv_mode()
    }
    fn label(&self) -> String {
        format!("pullback({})", self.inner.label())
    }
}

/// Convenience constructor for the point `(re, im)` list used in tests.
pub fn pt(parts: &[(f64, f64)]) -> Vec<C64> {
    parts.iter().map(|&(a, b)| c(a, b)).collect()
}
