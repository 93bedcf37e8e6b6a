//! Midpoint tensor quadrature on boxes in `ℝ^{2n} ≅ ℂⁿ`.

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Axis-aligned box in the real coordinates `(x_1, y_1, …, x_n, y_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SupportBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() % 2 != 0 || lo.is_empty() {
            return Err(Error::InvalidInput("box needs 2n matching bounds".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidInput("box bounds must satisfy lo < hi".into()));
        }
        Ok(Self { lo, hi })
    }

    /// Cube of half-width `r` around a complex center.
    pub fn around(center: &[C64], r: f64) -> Self {
        let mut lo = Vec::with_capacity(2 * center.len());
        let mut hi = Vec::with_capacity(2 * center.len());
        for z in center {
            lo.push(z.re - r);
            lo.push(z.im - r);
            hi.push(z.re + r);
            hi.push(z.im + r);
        }
        Self { lo, hi }
    }

    pub fn complex_dim(&self) -> usize {
        self.lo.len() / 2
    }

    pub fn strictly_contains(&self, other: &SupportBox) -> bool {
        self.lo.len() == other.lo.len()
            && self.lo.iter().zip(&other.lo).all(|(a, b)| a < b)
            && self.hi.iter().zip(&other.hi).all(|(a, b)| a > b)
    }
}

/// Neumaier-compensated sum in a fixed order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Midpoint rule on a box with a per-axis resolution.
#[derive(Debug, Clone)]
pub struct QuadratureBox {
    pub bounds: SupportBox,
    pub resolution: Vec<usize>,
}

impl QuadratureBox {
    pub fn new(bounds: SupportBox, resolution: Vec<usize>) -> Result<Self> {
        if resolution.len() != bounds.lo.len() || resolution.iter().any(|&r| r == 0) {
            return Err(Error::InvalidInput("one positive resolution per real axis".into()));
        }
        Ok(Self { bounds, resolution })
    }

    pub fn uniform(bounds: SupportBox, res: usize) -> Result<Self> {
        let d = bounds.lo.len();
        Self::new(bounds, vec![res; d])
    }

    pub fn cell_volume(&self) -> f64 {
        self.bounds
            .lo
            .iter()
            .zip(&self.bounds.hi)
            .zip(&self.resolution)
            .map(|((a, b), &r)| (b - a) / r as f64)
            .product()
    }

    pub fn node_count(&self) -> usize {
        self.resolution.iter().product()
    }

    /// Calls `f(z, weight)` for every node in lexicographic order.
    pub fn for_each<F>(&self, mut f: F) -> Result<()>
    where
        F: FnMut(&[C64], f64) -> Result<()>,
    {
        let dims = self.resolution.len();
        let n = dims / 2;
        let w = self.cell_volume();
        let steps: Vec<f64> = (0..dims)
            .map(|d| (self.bounds.hi[d] - self.bounds.lo[d]) / self.resolution[d] as f64)
            .collect();
        let mut idx = vec![0usize; dims];
        let mut z = vec![C64::new(0.0, 0.0); n];
        loop {
            for d in 0..dims {
                let x = self.bounds.lo[d] + (idx[d] as f64 + 0.5) * steps[d];
                if d % 2 == 0 {
                    z[d / 2].re = x;
                } else {
                    z[d / 2].im = x;
                }
            }
            f(&z, w)?;
            let mut d = dims;
            loop {
                if d == 0 {
                    return Ok(());
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < self.resolution[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    pub fn integrate<F>(&self, mut f: F) -> Result<f64>
    where
        F: FnMut(&[C64]) -> Result<f64>,
    {
        let mut acc = CompensatedSum::default();
        self.for_each(|z, w| {
            acc.add(f(z)? * w);
            Ok(())
        })?;
        Ok(acc.value())
    }
}
