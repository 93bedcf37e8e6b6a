//! The Lipschitz square `D = {|Re z| < 1, |Im z| < 1}` and its defining
//! function `r`.

use crate::error::Result;
use crate::field::{Gradient, ScalarField};
use crate::linalg::{cr, CMat, C64};

/// `r(z) = (y²−1)(x²−1)/(x²+y²−2)` on `D`, `max(y²−1, x²−1)` elsewhere
/// (including the boundary and corners).
pub fn square_defining(z: C64) -> f64 {
    let (x, y) = (z.re, z.im);
    if x.abs() < 1.0 && y.abs() < 1.0 {
        (y * y - 1.0) * (x * x - 1.0) / (x * x + y * y - 2.0)
    } else {
        (y * y - 1.0).max(x * x - 1.0)
    }
}

/// Real gradient `(r_x, r_y)` and Hessian `(r_xx, r_xy, r_yy)` of the inside
/// branch.
pub fn square_inside_derivatives(z: C64) -> ([f64; 2], [f64; 3]) {
    let (x, y) = (z.re, z.im);
    let (ax, ay) = (x * x - 1.0, y * y - 1.0);
    let d = x * x + y * y - 2.0;
    let (d2, d3) = (d * d, d * d * d);
    let rx = 2.0 * x * ay * ay / d2;
    let ry = 2.0 * y * ax * ax / d2;
    let rxx = 2.0 * ay * ay * (d - 4.0 * x * x) / d3;
    let ryy = 2.0 * ax * ax * (d - 4.0 * y * y) / d3;
    let rxy = 8.0 * x * y * ay * ax / d3;
    ([rx, ry], [rxx, rxy, ryy])
}

/// Distance to the boundary of the square (zero outside).
pub fn square_distance(z: C64) -> f64 {
    (1.0 - z.re.abs()).min(1.0 - z.im.abs()).max(0.0)
}

/// `ρ(z) = r(z_k)` on `ℂⁿ`, depending on one coordinate only.
#[derive(Debug, Clone)]
pub struct SquareDefining {
    pub n: usize,
    pub index: usize,
}

impl SquareDefining {
    pub fn planar() -> Self {
        Self { n: 1, index: 0 }
    }
}

impl ScalarField for SquareDefining {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, z: &[C64]) -> Result<C64> {
        Ok(cr(square_defining(z[self.index])))
    }
    fn gradient(&self, z: &[C64]) -> Option<Result<Gradient>> {
        let w = z[self.index];
        if !(w.re.abs() < 1.0 && w.im.abs() < 1.0) {
            return None;
        }
        let ([rx, ry], _) = square_inside_derivatives(w);
        let mut g = Gradient::zero(self.n);
        g.dz[self.index] = C64::new(0.5 * rx, -0.5 * ry);
        g.dzbar[self.index] = C64::new(0.5 * rx, 0.5 * ry);
        Some(Ok(g))
    }
    fn hessian(&self, z: &[C64]) -> Option<Result<CMat>> {
        let w = z[self.index];
        if !(w.re.abs() < 1.0 && w.im.abs() < 1.0) {
            return None;
        }
        let (_, [rxx, _, ryy]) = square_inside_derivatives(w);
        let mut h = CMat::zeros(self.n, self.n);
        h[(self.index, self.index)] = cr(0.25 * (rxx + ryy));
        Some(Ok(h))
    }
    fn label(&self) -> String {
        "square-defining".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{complex_hessian, gradient, FdScalar};
    use crate::linalg::c;

    #[test]
    fn spot_values() {
        assert!((square_defining(c(0.0, 0.0)) + 0.5).abs() < 1e-15);
        assert_eq!(square_defining(c(1.0, 0.0)), 0.0);
        assert!(square_defining(c(1.0 - 1e-9, 0.0)).abs() < 1e-8);
        assert_eq!(square_defining(c(2.0, 0.0)), 3.0);
        assert_eq!(square_defining(c(1.0, 1.0)), 0.0);
    }

    #[test]
    fn inside_derivatives_match_differences() {
        let f = SquareDefining::planar();
        for z in [c(0.3, -0.4), c(-0.7, 0.2), c(0.9, 0.85)] {
            let ga = gradient(&f, &[z]).unwrap();
            let gf = gradient(&FdScalar::new(&f, 1e-5), &[z]).unwrap();
            assert!((ga.dz[0] - gf.dz[0]).norm() < 1e-7);
            let ha = complex_hessian(&f, &[z]).unwrap();
            let hf = complex_hessian(&FdScalar::new(&f, 1e-4), &[z]).unwrap();
            assert!((ha[(0, 0)] - hf[(0, 0)]).norm() < 1e-4);
        }
    }
}
