use std::ops::Deref;

use crate::error::{Error, Result};
use crate::linalg::C64;

/// A point in a coordinate chart `U ⊂ ℂⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    coords: Vec<C64>,
    chart_id: u32,
}

impl ChartPoint {
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        Self::with_chart(coords, 0)
    }

    pub fn with_chart(coords: Vec<C64>, chart_id: u32) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("chart point needs n >= 1".into()));
        }
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "chart point has non-finite coordinates: {coords:?}"
            )));
        }
        Ok(Self { coords, chart_id })
    }

    /// Builds a point from `(re, im)` pairs.
    pub fn from_parts(parts: &[(f64, f64)]) -> Result<Self> {
        Self::new(parts.iter().map(|&(re, im)| C64::new(re, im)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn chart_id(&self) -> u32 {
        self.chart_id
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|z| z.norm_sqr()).sum()
    }
}

impl Deref for ChartPoint {
    type Target = [C64];

    fn deref(&self) -> &[C64] {
        &self.coords
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_nan() {
        assert!(ChartPoint::new(vec![]).is_err());
        assert!(ChartPoint::new(vec![C64::new(f64::NAN, 0.0)]).is_err());
        assert!(ChartPoint::new(vec![C64::new(1.0, f64::INFINITY)]).is_err());
        let p = ChartPoint::from_parts(&[(1.0, 0.0), (0.0, 2.0)]).unwrap();
        assert_eq!(p.dim(), 2);
        assert!((p.norm_sqr() - 5.0).abs() < 1e-15);
    }
}
