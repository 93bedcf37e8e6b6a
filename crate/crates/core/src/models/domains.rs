//! Defining functions and sample builders for the model domains.

use std::sync::Arc;

use rand::Rng;

use crate::df::{DFProblem, DomainSample};
use crate::error::{Error, Result};
use crate::field::{Constant, Gradient, ScalarField};
use crate::linalg::{c, cr, outer_conj, CMat, C64};
use crate::metric::MetricField;
use crate::models::hopf::HopfChart;
use crate::models::metrics::{Euclidean, HopfMetric, ProductMetric};
use crate::models::square::SquareDefining;
use crate::point::ChartPoint;

/// `ρ = |z|² − R²` on `ℂⁿ`.
#[derive(Debug, Clone)]
pub struct BallDefining {
    pub n: usize,
    pub radius: f64,
}

impl BallDefining {
    pub fn unit(n: usize) -> Self {
        Self { n, radius: 1.0 }
    }
}

impl ScalarField for BallDefining {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, z: &[C64]) -> Result<C64> {
        Ok(cr(z.iter().map(|v| v.norm_sqr()).sum::<f64>() - self.radius * self.radius))
    }
    fn gradient(&self, z: &[C64]) -> Option<Result<Gradient>> {
        Some(Ok(Gradient {
            dz: z.iter().map(|v| v.conj()).collect(),
            dzbar: z.to_vec(),
        }))
    }
    fn hessian(&self, _z: &[C64]) -> Option<Result<CMat>> {
        Some(Ok(CMat::identity(self.n, self.n)))
    }
    fn label(&self) -> String {
        format!("ball(n={})", self.n)
    }
}

/// Planar annulus `r_in < |z| < r_out` with
/// `ρ = (|z|² − r_in²)(|z|² − r_out²) / (r_out² − r_in²)`.
#[derive(Debug, Clone)]
pub struct AnnulusDefining {
    pub r_in: f64,
    pub r_out: f64,
}

impl AnnulusDefining {
    pub fn new(r_in: f64, r_out: f64) -> Result<Self> {
        if !(r_in > 0.0 && r_out > r_in) {
            return Err(Error::InvalidInput(format!(
                "annulus needs 0 < r_in < r_out, got {r_in}, {r_out}"
            )));
        }
        Ok(Self { r_in, r_out })
    }
}

impl ScalarField for AnnulusDefining {
    fn dim(&self) -> usize {
        1
    }
    fn value(&self, z: &[C64]) -> Result<C64> {
        let t = z[0].norm_sqr();
        let (a, b) = (self.r_in * self.r_in, self.r_out * self.r_out);
        Ok(cr((t - a) * (t - b) / (b - a)))
    }
    fn gradient(&self, z: &[C64]) -> Option<Result<Gradient>> {
        let t = z[0].norm_sqr();
        let (a, b) = (self.r_in * self.r_in, self.r_out * self.r_out);
        let dt = (2.0 * t - a - b) / (b - a);
        Some(Ok(Gradient {
            dz: vec![z[0].conj() * dt],
            dzbar: vec![z[0] * dt],
        }))
    }
    fn hessian(&self, z: &[C64]) -> Option<Result<CMat>> {
        // ρ = φ(t), t = |z|²: ∂∂̄ρ = φ′ + φ″ t
        let t = z[0].norm_sqr();
        let (a, b) = (self.r_in * self.r_in, self.r_out * self.r_out);
        let d1 = (2.0 * t - a - b) / (b - a);
        let d2 = 2.0 / (b - a);
        Some(Ok(CMat::from_element(1, 1, cr(d1 + d2 * t))))
    }
    fn label(&self) -> String {
        "annulus".into()
    }
}

/// `Ω = D × ℍ^{n−1}`: product metric `diag(1, Hopf_{n−1})`, `ψ = 0` and
/// `ρ(z) = r(z₁)`.
pub fn product_domain_assemble(n: usize) -> Result<DFProblem> {
    if n < 2 {
        return Err(Error::InvalidInput("product domain needs n >= 2".into()));
    }
    let metric: Arc<dyn MetricField> = Arc::new(ProductMetric::new(vec![
        Arc::new(Euclidean::new(1)),
        Arc::new(HopfMetric::new(n - 1)),
    ]));
    DFProblem::new(
        metric,
        Arc::new(Constant::new(n, 0.0)),
        Arc::new(SquareDefining { n, index: 0 }),
        0.0,
    )
}

/// Cell midpoints of an `m × m` grid on the square `[-1, 1]²`.
pub fn square_grid(m: usize) -> Vec<C64> {
    let h = 2.0 / m as f64;
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            out.push(c(-1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h));
        }
    }
    out
}

/// Sample of `D × ℍ^{n−1}`: an `m × m` square grid times `hopf_count`
/// annulus points.
pub fn product_sample<R: Rng>(n: usize, m: usize, hopf_count: usize, margin: f64, rng: &mut R) -> Result<DomainSample> {
    let chart = HopfChart::standard(n - 1);
    let hopf = chart.samples(hopf_count, rng);
    let mut pts = Vec::with_capacity(m * m * hopf_count);
    for z1 in square_grid(m) {
        for h in &hopf {
            let mut v = vec![z1];
            v.extend_from_slice(h);
            pts.push(ChartPoint::new(v)?);
        }
    }
    DomainSample::from_points(&SquareDefining { n, index: 0 }, pts, margin)
}

/// Midpoint grid with `m` points per real axis on `[-R, R]^{2n}`, restricted to
/// `ρ ≤ −margin`.
pub fn box_grid_sample<F: ScalarField + ?Sized>(rho: &F, half_width: f64, m: usize, margin: f64) -> Result<DomainSample> {
    let n = rho.dim();
    let dims = 2 * n;
    let total = m.checked_pow(dims as u32).ok_or_else(|| Error::InvalidInput("grid too large".into()))?;
    let h = 2.0 * half_width / m as f64;
    let mut pts = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let mut coords = vec![C64::new(0.0, 0.0); n];
        for d in 0..dims {
            let i = rem % m;
            rem /= m;
            let x = -half_width + (i as f64 + 0.5) * h;
            if d % 2 == 0 {
                coords[d / 2].re = x;
            } else {
                coords[d / 2].im = x;
            }
        }
        pts.push(ChartPoint::new(coords)?);
    }
    DomainSample::from_points(rho, pts, margin)
}

/// Near-boundary shell `ρ ∈ {−1e−2, −3e−3, −1e−3}` of the product domain,
/// along rays in the first coordinate.
pub fn product_shell<R: Rng>(n: usize, rays: usize, hopf_count: usize, rng: &mut R) -> Result<DomainSample> {
    let chart = HopfChart::standard(n - 1);
    let hopf = chart.samples(hopf_count, rng);
    let mut list = Vec::new();
    for k in 0..rays {
        let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / rays as f64;
        for h in &hopf {
            let mut center = vec![cr(0.0)];
            center.extend_from_slice(h);
            let mut dir = vec![c(angle.cos(), angle.sin())];
            dir.extend(std::iter::repeat(cr(0.0)).take(n - 1));
            list.push((ChartPoint::new(center)?, dir));
        }
    }
    DomainSample::shell(&SquareDefining { n, index: 0 }, &list, &[-1e-2, -3e-3, -1e-3])
}

/// `∂ρ ⊗ ∂̄ρ` for a defining function at a point.
pub fn rank_one_of<F: ScalarField + ?Sized>(rho: &F, z: &[C64]) -> Result<CMat> {
    let g = crate::field::gradient(rho, z)?;
    Ok(outer_conj(&g.dz, &g.dz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{complex_hessian, gradient, FdScalar};

    #[test]
    fn annulus_derivatives() {
        let f = AnnulusDefining::new(0.5, 1.0).unwrap();
        let z = [c(0.4, 0.5)];
        let ga = gradient(&f, &z).unwrap();
        let gf = gradient(&FdScalar::new(&f, 1e-5), &z).unwrap();
        assert!((ga.dz[0] - gf.dz[0]).norm() < 1e-8);
        let ha = complex_hessian(&f, &z).unwrap();
        let hf = complex_hessian(&FdScalar::new(&f, 1e-4), &z).unwrap();
        assert!((ha[(0, 0)] - hf[(0, 0)]).norm() < 1e-5);
        assert!(f.value(&[c(0.75, 0.0)]).unwrap().re < 0.0);
    }

    #[test]
    fn product_needs_two_dims() {
        assert!(product_domain_assemble(1).is_err());
        assert_eq!(product_domain_assemble(3).unwrap().dim(), 3);
    }
}
