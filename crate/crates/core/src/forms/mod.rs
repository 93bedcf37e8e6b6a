//! (0,1)-forms, (1,0)-vector fields and the operators acting on them.

pub mod bkmkh;
pub mod ops;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fd;
use crate::field::{self, DerivMode, ScalarField};
use crate::linalg::{cr, CMat, C64};
use crate::point::check_dim;
use crate::quadrature::SupportBox;

pub use bkmkh::{bkmkh_residual, BkmkhResult};
pub use ops::{
    adjoint_bar_z, adjoint_ibp_residual, commutator_check, dbar_01, dbar_01_naive, dbar_star_psi,
    divergence, tau_identity_check, ZeroTwoForm,
};

/// Coefficients with first Wirtinger derivatives: `dz[j][k] = ∂_{z_j} c_k`,
/// `dzbar[j][k] = ∂_{z̄_j} c_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffJet {
    pub value: Vec<C64>,
    pub dz: Vec<Vec<C64>>,
    pub dzbar: Vec<Vec<C64>>,
}

impl CoeffJet {
    pub fn zero(n: usize) -> Self {
        Self {
            value: vec![cr(0.0); n],
            dz: vec![vec![cr(0.0); n]; n],
            dzbar: vec![vec![cr(0.0); n]; n],
        }
    }
}

/// `u = Σ u_j dz̄_j`.
pub trait ZeroOneForm: Send + Sync {
    fn dim(&self) -> usize;
    fn coeffs(&self, z: &[C64]) -> Result<Vec<C64>>;
    fn jet(&self, _z: &[C64]) -> Option<Result<CoeffJet>> {
        None
    }
    fn contains(&self, _z: &[C64]) -> bool {
        true
    }
    /// Box outside of which the form vanishes.
    fn support_box(&self) -> Option<SupportBox> {
        None
    }
    /// Cheap test for points where the form and its derivatives vanish.
    fn vanishes_at(&self, _z: &[C64]) -> bool {
        false
    }
    fn deriv_mode(&self) -> DerivMode {
        DerivMode::Analytic
    }
}

/// `Z = Σ Z^j ∂/∂z_j`.
pub trait VectorField10: Send + Sync {
    fn dim(&self) -> usize;
    fn coeffs(&self, z: &[C64]) -> Result<Vec<C64>>;
    fn jet(&self, _z: &[C64]) -> Option<Result<CoeffJet>> {
        None
    }
    fn contains(&self, _z: &[C64]) -> bool {
        true
    }
    fn is_holomorphic(&self) -> bool {
        false
    }
    fn deriv_mode(&self) -> DerivMode {
        DerivMode::Analytic
    }
}

fn fd_jet<C>(coeffs: C, z: &[C64], h: f64) -> Result<CoeffJet>
where
    C: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let value = coeffs(z)?;
    let (dz, dzbar) = fd::wirtinger_first(&coeffs, z, h)?;
    Ok(CoeffJet { value, dz, dzbar })
}

fn check_jet(j: &CoeffJet) -> Result<()> {
    let finite = |v: &C64| v.re.is_finite() && v.im.is_finite();
    if j.value.iter().all(finite) && j.dz.iter().flatten().all(finite) && j.dzbar.iter().flatten().all(finite) {
        Ok(())
    } else {
        Err(Error::Numerical("coefficient jet is not finite".into()))
    }
}

pub fn form_jet<U: ZeroOneForm + ?Sized>(u: &U, z: &[C64]) -> Result<CoeffJet> {
    check_dim(u.dim(), z.len())?;
    let mode = u.deriv_mode();
    let jet = match (mode.is_analytic(), u.jet(z)) {
        (true, Some(j)) => j?,
        _ => fd_jet(
            |p: &[C64]| {
                if !u.contains(p) {
                    return Err(Error::Domain("form stencil left the domain".into()));
                }
                u.coeffs(p)
            },
            z,
            mode.step(),
        )?,
    };
    check_jet(&jet)?;
    Ok(jet)
}

pub fn vector_jet<V: VectorField10 + ?Sized>(v: &V, z: &[C64]) -> Result<CoeffJet> {
    check_dim(v.dim(), z.len())?;
    let mode = v.deriv_mode();
    let jet = match (mode.is_analytic(), v.jet(z)) {
        (true, Some(j)) => j?,
        _ => fd_jet(
            |p: &[C64]| {
                if !v.contains(p) {
                    return Err(Error::Domain("vector field stencil left the domain".into()));
                }
                v.coeffs(p)
            },
            z,
            mode.step(),
        )?,
    };
    check_jet(&jet)?;
    Ok(jet)
}

/// `f · Σ c_j dz̄_j` for a scalar `f` and constant coefficients `c`.
#[derive(Clone)]
pub struct ScaledForm<F> {
    pub f: F,
    pub c: Vec<C64>,
}

impl<F: ScalarField> ScaledForm<F> {
    pub fn new(f: F, c: Vec<C64>) -> Result<Self> {
        check_dim(f.dim(), c.len())?;
        Ok(Self { f, c })
    }

    /// `f dz̄_k`.
    pub fn basis(f: F, k: usize) -> Self {
        let n = f.dim();
        let mut c = vec![cr(0.0); n];
        c[k] = cr(1.0);
        Self { f, c }
    }
}

impl<F: ScalarField> ZeroOneForm for ScaledForm<F> {
    fn dim(&self) -> usize {
        self.c.len()
    }
    fn coeffs(&self, z: &[C64]) -> Result<Vec<C64>> {
        let v = self.f.value(z)?;
        Ok(self.c.iter().map(|c| c * v).collect())
    }
    fn jet(&self, z: &[C64]) -> Option<Result<CoeffJet>> {
        let n = self.dim();
        Some((|| {
            let v = field::value(&self.f, z)?;
            let g = field::gradient(&self.f, z)?;
            Ok(CoeffJet {
                value: self.c.iter().map(|c| c * v).collect(),
                dz: (0..n).map(|j| self.c.iter().map(|c| c * g.dz[j]).collect()).collect(),
                dzbar: (0..n).map(|j| self.c.iter().map(|c| c * g.dzbar[j]).collect()).collect(),
            })
        })())
    }
    fn contains(&self, z: &[C64]) -> bool {
        self.f.contains(z)
    }
    fn support_box(&self) -> Option<SupportBox> {
        self.f.support_box()
    }
    fn vanishes_at(&self, z: &[C64]) -> bool {
        match self.f.support_box() {
            Some(b) => z.iter().enumerate().any(|(j, v)| {
                v.re <= b.lo[2 * j] || v.re >= b.hi[2 * j] || v.im <= b.lo[2 * j + 1] || v.im >= b.hi[2 * j + 1]
            }),
            None => false,
        }
    }
    fn deriv_mode(&self) -> DerivMode {
        self.f.deriv_mode()
    }
}

/// Form given by closures.
#[derive(Clone)]
pub struct FnForm {
    n: usize,
    coeffs: Arc<dyn Fn(&[C64]) -> Result<Vec<C64>> + Send + Sync>,
    jet: Option<Arc<dyn Fn(&[C64]) -> Result<CoeffJet> + Send + Sync>>,
    mode: DerivMode,
}

impl FnForm {
    pub fn new(n: usize, coeffs: impl Fn(&[C64]) -> Result<Vec<C64>> + Send + Sync + 'static) -> Self {
        Self {
            n,
            coeffs: Arc::new(coeffs),
            jet: None,
            mode: DerivMode::Analytic,
        }
    }

    pub fn with_jet(mut self, jet: impl Fn(&[C64]) -> Result<CoeffJet> + Send + Sync + 'static) -> Self {
        self.jet = Some(Arc::new(jet));
        self
    }

    pub fn with_mode(mut self, mode: DerivMode) -> Self {
        self.mode = mode;
        self
    }
}

impl ZeroOneForm for FnForm {
    fn dim(&self) -> usize {
        self.n
    }
    fn coeffs(&self, z: &[C64]) -> Result<Vec<C64>> {
        (self.coeffs)(z)
    }
    fn jet(&self, z: &[C64]) -> Option<Result<CoeffJet>> {
        self.jet.as_ref().map(|j| j(z))
    }
    fn deriv_mode(&self) -> DerivMode {
        self.mode
    }
}

/// `u = ∂̄f`, with derivatives of the analytic gradient taken by differences.
#[derive(Clone)]
pub struct DbarOf<F> {
    pub f: F,
    pub h: f64,
}

impl<F: ScalarField> ZeroOneForm for DbarOf<F> {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn coeffs(&self, z: &[C64]) -> Result<Vec<C64>> {
        Ok(field::gradient(&self.f, z)?.dzbar)
    }
    fn contains(&self, z: &[C64]) -> bool {
        self.f.contains(z)
    }
    fn deriv_mode(&self) -> DerivMode {
        DerivMode::FiniteDifference { h: self.h }
    }
}

/// Holomorphic affine field `Z^j = Σ_k A_{jk} z_k + b_j`.
#[derive(Debug, Clone)]
pub struct AffineVectorField {
    pub a: CMat,
    pub b: Vec<C64>,
}

impl AffineVectorField {
    /// Constant coordinate field `∂/∂z_k`.
    pub fn coordinate(n: usize, k: usize) -> Self {
        let mut b = vec![cr(0.0); n];
        b[k] = cr(1.0);
        Self { a: CMat::zeros(n, n), b }
    }

    /// Euler field `W₁ = Σ z_j ∂/∂z_j`.
    pub fn euler(n: usize) -> Self {
        Self {
            a: CMat::identity(n, n),
            b: vec![cr(0.0); n],
        }
    }
}

impl VectorField10 for AffineVectorField {
    fn dim(&self) -> usize {
        self.b.len()
    }
    fn coeffs(&self, z: &[C64]) -> Result<Vec<C64>> {
        let n = self.dim();
        Ok((0..n)
            .map(|j| (0..n).map(|k| self.a[(j, k)] * z[k]).sum::<C64>() + self.b[j])
            .collect())
    }
    fn jet(&self, z: &[C64]) -> Option<Result<CoeffJet>> {
        let n = self.dim();
        Some(self.coeffs(z).map(|value| CoeffJet {
            value,
            dz: (0..n).map(|j| (0..n).map(|k| self.a[(k, j)]).collect()).collect(),
            dzbar: vec![vec![cr(0.0); n]; n],
        }))
    }
    fn is_holomorphic(&self) -> bool {
        true
    }
}

/// Vector field from closures; holomorphy is declared by the caller.
#[derive(Clone)]
pub struct FnVectorField {
    n: usize,
    coeffs: Arc<dyn Fn(&[C64]) -> Result<Vec<C64>> + Send + Sync>,
    holomorphic: bool,
}

impl FnVectorField {
    pub fn new(n: usize, holomorphic: bool, coeffs: impl Fn(&[C64]) -> Result<Vec<C64>> + Send + Sync + 'static) -> Self {
        Self {
            n,
            coeffs: Arc::new(coeffs),
            holomorphic,
        }
    }
}

impl VectorField10 for FnVectorField {
    fn dim(&self) -> usize {
        self.n
    }
    fn coeffs(&self, z: &[C64]) -> Result<Vec<C64>> {
        (self.coeffs)(z)
    }
    fn is_holomorphic(&self) -> bool {
        self.holomorphic
    }
}
