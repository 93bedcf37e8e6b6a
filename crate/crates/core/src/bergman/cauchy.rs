//! Cauchy-transform particular solutions of `∂̄w = g`.

use std::f64::consts::PI;

use super::domain::Grid;
use crate::error::{Error, Result};
use crate::linalg::{c, C64};

/// Antiderivative `F` with `∂²F/∂x∂y = 1/(x + iy)`.
fn cell_primitive(x: f64, y: f64) -> C64 {
    let r2 = x * x + y * y;
    if r2 == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let l = 0.5 * r2.ln();
    let xa = if x == 0.0 { 0.0 } else { x * (y / x).atan() };
    let ya = if y == 0.0 { 0.0 } else { y * (x / y).atan() };
    c(xa + y * l - y, -(ya + x * l - x))
}

/// `∫_{[a,b]×[c,d]} dA/(x + iy)` in closed form.
pub fn rect_kernel_integral(a: f64, b: f64, cc: f64, d: f64) -> C64 {
    cell_primitive(b, d) - cell_primitive(a, d) - cell_primitive(b, cc) + cell_primitive(a, cc)
}

/// Integrals of `1/(ζ − z)` over the cell at lattice offset `(di, dj)` from
/// the target cell, for `|di|, |dj| < R`, split into real and imaginary parts.
struct KernelTable {
    side: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl KernelTable {
    fn new(r: usize, h: f64) -> Self {
        let side = 2 * r - 1;
        let (mut re, mut im) = (Vec::with_capacity(side * side), Vec::with_capacity(side * side));
        for dj in 0..side {
            for di in 0..side {
                let (x, y) = ((di as f64 - (r - 1) as f64) * h, (dj as f64 - (r - 1) as f64) * h);
                let v = if di == r - 1 && dj == r - 1 {
                    // Symmetric cell around the pole.
                    C64::new(0.0, 0.0)
                } else {
                    rect_kernel_integral(x - 0.5 * h, x + 0.5 * h, y - 0.5 * h, y + 0.5 * h)
                };
                re.push(v.re);
                im.push(v.im);
            }
        }
        Self { side, re, im }
    }
}

const LANES: usize = 8;

/// `Σ (gr + i gi)(kr + i ki)` with independent lanes so the loop vectorizes.
#[inline]
fn complex_dot(gr: &[f64], gi: &[f64], kr: &[f64], ki: &[f64]) -> (f64, f64) {
    let n = gr.len();
    let (mut ar, mut ai) = ([0.0f64; LANES], [0.0f64; LANES]);
    let body = n - n % LANES;
    for (((a, b), x), y) in gr[..body]
        .chunks_exact(LANES)
        .zip(gi[..body].chunks_exact(LANES))
        .zip(kr[..body].chunks_exact(LANES))
        .zip(ki[..body].chunks_exact(LANES))
    {
        let a: &[f64; LANES] = a.try_into().unwrap();
        let b: &[f64; LANES] = b.try_into().unwrap();
        let x: &[f64; LANES] = x.try_into().unwrap();
        let y: &[f64; LANES] = y.try_into().unwrap();
        for l in 0..LANES {
            ar[l] += a[l] * x[l] - b[l] * y[l];
            ai[l] += a[l] * y[l] + b[l] * x[l];
        }
    }
    let (mut sr, mut si) = (ar.iter().sum::<f64>(), ai.iter().sum::<f64>());
    for k in body..n {
        sr += gr[k] * kr[k] - gi[k] * ki[k];
        si += gr[k] * ki[k] + gi[k] * kr[k];
    }
    (sr, si)
}

/// `w(z) = −(1/π) ∬_Ω g(ζ)/(ζ − z) dA(ζ)` at every node, given the cell
/// integrals `∫_{cell ∩ Ω} g dA` of the right-hand side.
///
/// Each source cell is treated as carrying its mean value; the kernel is
/// integrated exactly over the lattice cell, so the pole cell contributes 0.
pub fn cauchy_solve_masses(grid: &Grid, rhs_mass: &[C64]) -> Result<Vec<C64>> {
    if rhs_mass.len() != grid.len() {
        return Err(Error::Dimension { expected: grid.len(), got: rhs_mass.len() });
    }
    if rhs_mass.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Numerical("right-hand side is not finite on the grid".into()));
    }
    let r = grid.resolution;
    let table = KernelTable::new(r, grid.h);
    let cell_area = grid.h * grid.h;
    // Dense densities by lattice row with the occupied column range per row.
    let (mut dr, mut di) = (vec![0.0; r * r], vec![0.0; r * r]);
    let mut span: Vec<Option<(usize, usize)>> = vec![None; r];
    for (k, &(i, j)) in grid.cell.iter().enumerate() {
        let g = rhs_mass[k] / cell_area;
        if g == C64::new(0.0, 0.0) {
            continue;
        }
        dr[j * r + i] = g.re;
        di[j * r + i] = g.im;
        span[j] = Some(match span[j] {
            None => (i, i + 1),
            Some((a, b)) => (a.min(i), b.max(i + 1)),
        });
    }
    // Targets by lattice row, so each (target row, source row) pair reuses one
    // density row and one kernel row from cache.
    let mut targets: Vec<Vec<(usize, usize)>> = vec![Vec::new(); r];
    for (k, &(i, j)) in grid.cell.iter().enumerate() {
        targets[j].push((k, i));
    }
    let mut acc = vec![(0.0f64, 0.0f64); grid.len()];
    for (tj, trow) in targets.iter().enumerate() {
        if trow.is_empty() {
            continue;
        }
        for (sj, sp) in span.iter().enumerate() {
            let Some((a, b)) = *sp else { continue };
            let (gr, gi) = (&dr[sj * r + a..sj * r + b], &di[sj * r + a..sj * r + b]);
            let krow = (sj + r - 1 - tj) * table.side;
            for &(k, ti) in trow {
                let o = krow + r - 1 - ti;
                let (x, y) = complex_dot(gr, gi, &table.re[o + a..o + b], &table.im[o + a..o + b]);
                acc[k].0 += x;
                acc[k].1 += y;
            }
        }
    }
    let out: Vec<C64> = acc.into_iter().map(|(x, y)| C64::new(x, y) / -PI).collect();
    Ok(out)
}

/// [`cauchy_solve_masses`] for a right-hand side sampled at the nodes.
pub fn cauchy_solve(grid: &Grid, rhs: &[C64]) -> Result<Vec<C64>> {
    if rhs.len() != grid.len() {
        return Err(Error::Dimension { expected: grid.len(), got: rhs.len() });
    }
    let masses: Vec<C64> = rhs.iter().zip(&grid.area).map(|(g, a)| g * a).collect();
    cauchy_solve_masses(grid, &masses)
}

/// Relative `L²` residual `‖∂̄w − g‖ / ‖g‖` over subgrid nodes, with `∂̄` by
/// central differences (absolute when `g` vanishes there).
pub fn dbar_residual(grid: &Grid, w: &[C64], g: &[C64], subgrid: &[usize]) -> Result<f64> {
    if subgrid.is_empty() {
        return Err(Error::InvalidInput("empty interior subgrid".into()));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for &k in subgrid {
        let d = grid.dbar_fd(w, k) - g[k];
        num += d.norm_sqr() * grid.area[k];
        den += g[k].norm_sqr() * grid.area[k];
    }
    Ok(if den > 0.0 { (num / den).sqrt() } else { num.sqrt() })
}
