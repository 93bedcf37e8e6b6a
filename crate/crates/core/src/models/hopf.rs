//! Closed forms and sampling for the Hopf metric on the fundamental annulus.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{c, cr, CMat, C64};
use crate::point::ChartPoint;

/// Fundamental annulus `|a| < |z| ≤ 1` of `(ℂⁿ∖{0}) / (z ∼ a z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfChart {
    pub n: usize,
    pub a: C64,
}

impl HopfChart {
    pub fn new(n: usize, a: C64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidInput("Hopf chart needs n >= 1".into()));
        }
        let m = a.norm();
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::InvalidInput(format!(
                "Hopf modulus must satisfy 0 < |a| < 1, got {a}"
            )));
        }
        Ok(Self { n, a })
    }

    /// Default modulus `a = 1/2`.
    pub fn standard(n: usize) -> Self {
        Self { n, a: cr(0.5) }
    }

    pub fn contains(&self, z: &[C64]) -> bool {
        let r = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        r > self.a.norm() && r <= 1.0
    }

    /// Uniform in `log|z|` on `(log|a|, 0]` times uniform on the sphere.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> ChartPoint {
        let lo = self.a.norm().ln();
        let t: f64 = rng.gen::<f64>();
        // t ∈ [0,1) maps to log r ∈ (lo, 0]
        let radius = (lo + (1.0 - t) * (0.0 - lo)).exp();
        let radius = radius.max(self.a.norm() * (1.0 + 1e-12));
        let mut v: Vec<f64> = (0..2 * self.n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x *= radius / norm;
        }
        let coords = (0..self.n).map(|j| c(v[2 * j], v[2 * j + 1])).collect();
        ChartPoint::new(coords).expect("finite sample")
    }

    pub fn samples<R: Rng>(&self, count: usize, rng: &mut R) -> Vec<ChartPoint> {
        (0..count).map(|_| self.sample(rng)).collect()
    }
}

/// Closed-form curvature trace `Θ` and torsion form `Q` of the Hopf metric:
/// `Θ(Z,Z̄) = n|Z|² − n|⟨Z,W₁⟩|²`, `Q(Z,Z) = |Z|² − |⟨Z,W₁⟩|²`.
pub fn hopf_closed_forms(n: usize, z: &[C64]) -> Result<(CMat, CMat)> {
    if z.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: z.len(),
        });
    }
    let r2: f64 = z.iter().map(|v| v.norm_sqr()).sum();
    if r2 <= 0.0 {
        return Err(Error::Domain("Hopf closed forms at z = 0".into()));
    }
    let q = CMat::from_fn(n, n, |j, k| {
        let d = if j == k { 1.0 / r2 } else { 0.0 };
        cr(d) - z[j].conj() * z[k] / (r2 * r2)
    });
    let theta = &q * cr(n as f64);
    Ok((theta, q))
}

/// Coordinate vector of `W₁ = Σ z_j ∂/∂z_j`.
pub fn w1(z: &[C64]) -> Vec<C64> {
    z.to_vec()
}
