//! Planar domains and their midpoint quadrature grids.

use std::sync::Arc;

use serde::Serialize;

use crate::df::{b_margin, DFProblem};
use crate::error::{Error, Result};
use crate::field::{Constant, SharedScalar};
use crate::linalg::{c, C64};
use crate::models::domains::{box_grid_sample, BallDefining};
use crate::models::metrics::Euclidean;
use crate::models::square::{square_defining, square_distance, square_inside_derivatives, SquareDefining};

/// The two planar domains of the laboratory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlanarDomain {
    /// `|z| < radius` with `ρ = |z|² − radius²`.
    Disc { radius: f64 },
    /// The square `D = {|Re z| < 1, |Im z| < 1}` with the defining function `r`.
    Square,
}

/// Weight used by the proxy norms: the boundary distance or `−ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Delta,
    NegRho,
}

impl PlanarDomain {
    pub fn unit_disc() -> Self {
        PlanarDomain::Disc { radius: 1.0 }
    }

    pub fn name(&self) -> String {
        match self {
            PlanarDomain::Disc { radius } if *radius == 1.0 => "disc".into(),
            PlanarDomain::Disc { radius } => format!("disc(r={radius})"),
            PlanarDomain::Square => "square".into(),
        }
    }

    /// Half-width of the bounding box `[−a, a]²`.
    pub fn half_width(&self) -> f64 {
        match self {
            PlanarDomain::Disc { radius } => *radius,
            PlanarDomain::Square => 1.0,
        }
    }

    pub fn rho(&self, z: C64) -> f64 {
        match self {
            PlanarDomain::Disc { radius } => z.norm_sqr() - radius * radius,
            PlanarDomain::Square => square_defining(z),
        }
    }

    /// `∂ρ/∂z̄` on the interior.
    pub fn drho_dzbar(&self, z: C64) -> C64 {
        match self {
            PlanarDomain::Disc { .. } => z,
            PlanarDomain::Square => {
                let ([rx, ry], _) = square_inside_derivatives(z);
                c(0.5 * rx, 0.5 * ry)
            }
        }
    }

    /// Exact distance to the boundary (zero outside).
    pub fn delta(&self, z: C64) -> f64 {
        match self {
            PlanarDomain::Disc { radius } => (radius - z.norm()).max(0.0),
            PlanarDomain::Square => square_distance(z),
        }
    }

    /// `ρ` as a scalar field on `ℂ¹`.
    pub fn defining_field(&self) -> SharedScalar {
        match self {
            PlanarDomain::Disc { radius } => Arc::new(BallDefining { n: 1, radius: *radius }),
            PlanarDomain::Square => Arc::new(SquareDefining::planar()),
        }
    }

    /// `inf B` for `κ = (−ρ)^η`, flat metric and ψ = 0, over an `m × m` box
    /// grid of interior points.
    pub fn b_estimate(&self, eta: f64, m: usize) -> Result<Option<f64>> {
        let rho = self.defining_field();
        let prob = DFProblem::new(Arc::new(Euclidean::new(1)), Arc::new(Constant::new(1, 0.0)), rho.clone(), eta)?;
        let sample = box_grid_sample(&*rho, self.half_width(), m, 1e-3)?;
        b_margin(&prob, &sample)
    }

    pub fn contains(&self, z: C64) -> bool {
        self.rho(z) < 0.0
    }

    /// Exact area of `[x0,x1]×[y0,y1] ∩ Ω`.
    pub fn rect_area(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
        match self {
            PlanarDomain::Disc { radius } => {
                let r = *radius;
                let f = |x: f64, y: f64| unit_disc_corner_area(x / r, y / r);
                let a = f(x1, y1) - f(x0, y1) - f(x1, y0) + f(x0, y0);
                (a * r * r).clamp(0.0, (x1 - x0) * (y1 - y0))
            }
            PlanarDomain::Square => {
                let w = (x1.min(1.0) - x0.max(-1.0)).max(0.0);
                let h = (y1.min(1.0) - y0.max(-1.0)).max(0.0);
                w * h
            }
        }
    }
}

/// Area of `{u ≤ x, v ≤ y} ∩ unit disc`.
fn unit_disc_corner_area(x: f64, y: f64) -> f64 {
    let x = x.clamp(-1.0, 1.0);
    if x <= -1.0 || y <= -1.0 {
        return 0.0;
    }
    // ∫ √(1−u²) du
    let g = |u: f64| 0.5 * (u * (1.0 - u * u).max(0.0).sqrt() + u.asin());
    let int_s = |lo: f64, hi: f64| if hi > lo { g(hi) - g(lo) } else { 0.0 };
    let len = |lo: f64, hi: f64| (hi - lo).max(0.0);
    if y >= 1.0 {
        return 2.0 * int_s(-1.0, x);
    }
    let a = (1.0 - y * y).sqrt();
    let mid = int_s(-a, x.min(a)) + y * len(-a, x.min(a));
    if y >= 0.0 {
        2.0 * int_s(-1.0, x.min(-a)) + mid + 2.0 * int_s(a, x)
    } else {
        mid
    }
}

const GAUSS8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

/// Mean of `max(0, α + β(x−xc) + γ(y−yc))^p` over the square cell of side `h`
/// centered at `(xc, yc)`; closed form along the steeper direction.
fn affine_power_mean(alpha: f64, beta: f64, gamma: f64, h: f64, p: f64) -> f64 {
    let (b, g) = if beta.abs() >= gamma.abs() { (beta, gamma) } else { (gamma, beta) };
    let half = 0.5 * h;
    if b.abs() * h < 1e-12 * alpha.abs().max(1e-300) {
        return alpha.max(0.0).powf(p);
    }
    let prim = |t: f64| t.max(0.0).powf(p + 1.0) / (b * (p + 1.0));
    let mut acc = 0.0;
    for (xi, wi) in GAUSS8 {
        let base = alpha + g * half * xi;
        acc += wi * (prim(base + b * half) - prim(base - b * half));
    }
    0.5 * acc / h
}

/// `∫₀^A ∫₀^B min(a, b)^p db da`.
fn min_power_integral(a: f64, b: f64, p: f64) -> f64 {
    let (m, big) = if a <= b { (a, b) } else { (b, a) };
    if m <= 0.0 {
        return 0.0;
    }
    2.0 * m.powf(p + 2.0) / ((p + 1.0) * (p + 2.0)) + (big - m) * m.powf(p + 1.0) / (p + 1.0)
}

/// Midpoint grid on the bounding box with interior nodes only.
///
/// Cells cut by the boundary keep their exact intersection area; their node
/// sits at the (sampled) centroid of the intersection, which lies inside by
/// convexity.
#[derive(Debug, Clone)]
pub struct Grid {
    pub domain: PlanarDomain,
    pub resolution: usize,
    pub h: f64,
    pub nodes: Vec<C64>,
    pub area: Vec<f64>,
    /// Cell index `(i, j)` with `x = −a + (i + ½)h`.
    pub cell: Vec<(usize, usize)>,
    /// Whether the whole cell lies in Ω.
    pub full: Vec<bool>,
    pub rho: Vec<f64>,
    pub delta: Vec<f64>,
    index: Vec<Option<usize>>,
}

/// Measured comparability constants `c₁ δ ≤ −ρ ≤ c₂ δ` over the nodes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Comparability {
    pub c1: f64,
    pub c2: f64,
}

impl Grid {
    pub fn new(domain: PlanarDomain, resolution: usize) -> Result<Self> {
        if resolution < 4 {
            return Err(Error::InvalidInput(format!("grid resolution {resolution} < 4")));
        }
        if let PlanarDomain::Disc { radius } = domain {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Error::InvalidInput(format!("disc radius {radius}")));
            }
        }
        let a = domain.half_width();
        let h = 2.0 * a / resolution as f64;
        let full_area = h * h;
        let mut g = Grid {
            domain,
            resolution,
            h,
            nodes: Vec::new(),
            area: Vec::new(),
            cell: Vec::new(),
            full: Vec::new(),
            rho: Vec::new(),
            delta: Vec::new(),
            index: vec![None; resolution * resolution],
        };
        for j in 0..resolution {
            for i in 0..resolution {
                let (x0, y0) = (-a + i as f64 * h, -a + j as f64 * h);
                let area = domain.rect_area(x0, x0 + h, y0, y0 + h);
                if area <= 1e-14 * full_area {
                    continue;
                }
                let mid = c(x0 + 0.5 * h, y0 + 0.5 * h);
                let full = area >= full_area * (1.0 - 1e-12) && domain.contains(mid);
                let node = if full { mid } else { partial_centroid(&domain, x0, y0, h) };
                if !domain.contains(node) || domain.delta(node) <= 0.0 {
                    continue;
                }
                g.index[j * resolution + i] = Some(g.nodes.len());
                g.nodes.push(node);
                g.area.push(if full { full_area } else { area });
                g.cell.push((i, j));
                g.full.push(full);
                g.rho.push(domain.rho(node));
                g.delta.push(domain.delta(node));
            }
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_at(&self, i: isize, j: isize) -> Option<usize> {
        let r = self.resolution as isize;
        if i < 0 || j < 0 || i >= r || j >= r {
            return None;
        }
        self.index[(j * r + i) as usize]
    }

    pub fn cell_center(&self, k: usize) -> C64 {
        let a = self.domain.half_width();
        let (i, j) = self.cell[k];
        c(-a + (i as f64 + 0.5) * self.h, -a + (j as f64 + 0.5) * self.h)
    }

    pub fn total_area(&self) -> f64 {
        self.area.iter().sum()
    }

    pub fn comparability(&self) -> Comparability {
        let mut c1 = f64::INFINITY;
        let mut c2: f64 = 0.0;
        for (r, d) in self.rho.iter().zip(&self.delta) {
            let q = -r / d;
            c1 = c1.min(q);
            c2 = c2.max(q);
        }
        Comparability { c1, c2 }
    }

    /// `∫_{cell ∩ Ω} w^p dA` for every node, with `w = δ` or `w = −ρ`.
    ///
    /// Cells within a few widths of the boundary integrate the singular factor
    /// `δ^p` in closed form (exactly for the square, on the linearized distance
    /// for the disc); `−ρ/δ` is smooth and taken at the node.
    pub fn power_mass(&self, flavor: Flavor, p: f64) -> Result<Vec<f64>> {
        if p <= -1.0 {
            return Err(Error::InvalidInput(format!("weight exponent {p} is not integrable")));
        }
        if p == 0.0 {
            return Ok(self.area.clone());
        }
        let near = 3.0 * self.h;
        let mut out = Vec::with_capacity(self.len());
        for k in 0..self.len() {
            let d = self.delta[k];
            let mut m = if d > near { self.area[k] * d.powf(p) } else { self.delta_mass_near(k, p) };
            if flavor == Flavor::NegRho {
                m *= (-self.rho[k] / d).powf(p);
            }
            out.push(m);
        }
        Ok(out)
    }

    fn delta_mass_near(&self, k: usize, p: f64) -> f64 {
        let h = self.h;
        let mid = self.cell_center(k);
        match self.domain {
            PlanarDomain::Square => {
                let (x0, x1) = (mid.re - 0.5 * h, mid.re + 0.5 * h);
                let (y0, y1) = (mid.im - 0.5 * h, mid.im + 0.5 * h);
                if x0 < 0.0 && x1 > 0.0 || y0 < 0.0 && y1 > 0.0 {
                    return self.area[k] * self.delta[k].powf(p);
                }
                let span = |lo: f64, hi: f64| {
                    let (u, v) = (1.0 - lo.abs(), 1.0 - hi.abs());
                    (u.min(v).max(0.0), u.max(v).max(0.0))
                };
                let (a0, a1) = span(x0, x1);
                let (b0, b1) = span(y0, y1);
                min_power_integral(a1, b1, p) - min_power_integral(a0, b1, p) - min_power_integral(a1, b0, p)
                    + min_power_integral(a0, b0, p)
            }
            PlanarDomain::Disc { radius } => {
                let r = mid.norm();
                if r == 0.0 {
                    return self.area[k] * self.delta[k].powf(p);
                }
                let (nx, ny) = (-mid.re / r, -mid.im / r);
                let alpha = radius - r;
                let mean_p = affine_power_mean(alpha, nx, ny, h, p);
                let mean_0 = affine_power_mean(alpha, nx, ny, h, 0.0);
                if mean_0 <= 0.0 {
                    return self.area[k] * self.delta[k].powf(p);
                }
                self.area[k] * mean_p / mean_0
            }
        }
    }

    /// Nodes whose four lattice neighbours are full cells and whose distance to
    /// the boundary is at least `margin`.
    pub fn interior_subgrid(&self, margin: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| {
                if !self.full[k] || self.delta[k] < margin {
                    return false;
                }
                let (i, j) = (self.cell[k].0 as isize, self.cell[k].1 as isize);
                [(1, 0), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .all(|(di, dj)| self.node_at(i + di, j + dj).is_some_and(|n| self.full[n]))
            })
            .collect()
    }

    /// Central-difference `∂/∂z̄` of grid values at a subgrid node.
    pub fn dbar_fd(&self, values: &[C64], k: usize) -> C64 {
        let (i, j) = (self.cell[k].0 as isize, self.cell[k].1 as isize);
        let at = |di: isize, dj: isize| values[self.node_at(i + di, j + dj).expect("interior subgrid node")];
        let dx = (at(1, 0) - at(-1, 0)) / (2.0 * self.h);
        let dy = (at(0, 1) - at(0, -1)) / (2.0 * self.h);
        0.5 * (dx + C64::i() * dy)
    }

    pub fn map<F: Fn(C64) -> C64>(&self, f: F) -> Vec<C64> {
        self.nodes.iter().map(|&z| f(z)).collect()
    }
}

fn partial_centroid(domain: &PlanarDomain, x0: f64, y0: f64, h: f64) -> C64 {
    const K: usize = 8;
    let mut acc = C64::new(0.0, 0.0);
    let mut n = 0usize;
    for b in 0..K {
        for a in 0..K {
            let z = c(x0 + (a as f64 + 0.5) * h / K as f64, y0 + (b as f64 + 0.5) * h / K as f64);
            if domain.contains(z) {
                acc += z;
                n += 1;
            }
        }
    }
    if n > 0 {
        return acc / n as f64;
    }
    // Sliver: the cell point nearest the center of the domain is inside.
    c(0.0f64.clamp(x0, x0 + h), 0.0f64.clamp(y0, y0 + h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_rect_area_matches_sampling() {
        let d = PlanarDomain::Disc { radius: 1.0 };
        let rects = [(-1.2, 1.2, -1.2, 1.2), (0.5, 0.9, 0.6, 0.95), (-0.95, -0.7, -0.3, 0.2), (0.0, 0.3, -1.1, -0.8)];
        for (x0, x1, y0, y1) in rects {
            let n = 2000;
            let mut hits = 0usize;
            for b in 0..n {
                for a in 0..n {
                    let x = x0 + (a as f64 + 0.5) * (x1 - x0) / n as f64;
                    let y = y0 + (b as f64 + 0.5) * (y1 - y0) / n as f64;
                    if x * x + y * y < 1.0 {
                        hits += 1;
                    }
                }
            }
            let sampled = hits as f64 / (n * n) as f64 * (x1 - x0) * (y1 - y0);
            let exact = d.rect_area(x0, x1, y0, y1);
            assert!((sampled - exact).abs() < 2e-5, "{exact} vs {sampled}");
        }
        assert!((d.rect_area(-1.0, 1.0, -1.0, 1.0) - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn min_power_integral_matches_quadrature() {
        let p = -0.5;
        let (a, b) = (0.3, 0.7);
        // x = u², y = v² removes the singularity at the axes
        let n = 2000;
        let (ua, vb) = (f64::sqrt(a), f64::sqrt(b));
        let mut acc = 0.0;
        for j in 0..n {
            for i in 0..n {
                let u = (i as f64 + 0.5) * ua / n as f64;
                let v = (j as f64 + 0.5) * vb / n as f64;
                acc += (u * u).min(v * v).powf(p) * 4.0 * u * v;
            }
        }
        acc *= ua * vb / (n * n) as f64;
        assert!((acc - min_power_integral(a, b, p)).abs() < 1e-5 * acc, "{acc}");
    }
}
