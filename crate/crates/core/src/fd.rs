//! Central finite differences in Wirtinger form.
//!
//! Functions are sampled on the 2n real coordinates `z_j = x_j + i y_j`;
//! `∂_{z_j} = (∂_{x_j} − i ∂_{y_j})/2` and `∂_{z̄_j} = (∂_{x_j} + i ∂_{y_j})/2`.
//! All helpers act on functions returning a flat vector of complex values so
//! that scalars, vectors and matrices share one implementation.

use crate::error::Result;
use crate::linalg::{C64, I};

/// Default step for metric and field derivatives.
pub const DEFAULT_STEP: f64 = 1e-4;

fn shifted(z: &[C64], axis: usize, delta: f64) -> Vec<C64> {
    let mut p = z.to_vec();
    let j = axis / 2;
    if axis % 2 == 0 {
        p[j].re += delta;
    } else {
        p[j].im += delta;
    }
    p
}

fn shifted2(z: &[C64], a: usize, da: f64, b: usize, db: f64) -> Vec<C64> {
    let p = shifted(z, a, da);
    shifted(&p, b, db)
}

fn axpy(out: &mut [C64], alpha: C64, x: &[C64]) {
    for (o, v) in out.iter_mut().zip(x) {
        *o += alpha * v;
    }
}

/// Real partial derivative along real axis `axis` (0 = x_1, 1 = y_1, ...).
pub fn real_partial<F>(f: &F, z: &[C64], axis: usize, h: f64) -> Result<Vec<C64>>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let plus = f(&shifted(z, axis, h))?;
    let minus = f(&shifted(z, axis, -h))?;
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| (p - m) / (2.0 * h))
        .collect())
}

/// Wirtinger first derivatives: `(dz[j], dzbar[j])`, each a flat vector.
pub type WirtingerFirst = (Vec<Vec<C64>>, Vec<Vec<C64>>);

pub fn wirtinger_first<F>(f: &F, z: &[C64], h: f64) -> Result<WirtingerFirst>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let n = z.len();
    let mut dz = Vec::with_capacity(n);
    let mut dzb = Vec::with_capacity(n);
    for j in 0..n {
        let dx = real_partial(f, z, 2 * j, h)?;
        let dy = real_partial(f, z, 2 * j + 1, h)?;
        dz.push(
            dx.iter()
                .zip(&dy)
                .map(|(a, b)| 0.5 * (a - I * b))
                .collect(),
        );
        dzb.push(
            dx.iter()
                .zip(&dy)
                .map(|(a, b)| 0.5 * (a + I * b))
                .collect(),
        );
    }
    Ok((dz, dzb))
}

/// Second real partial `∂_a ∂_b f` (three-point rule on the diagonal,
/// four-point rule off it).
pub fn real_second<F>(f: &F, z: &[C64], a: usize, b: usize, h: f64, f0: &[C64]) -> Result<Vec<C64>>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    if a == b {
        let p = f(&shifted(z, a, h))?;
        let m = f(&shifted(z, a, -h))?;
        Ok((0..f0.len())
            .map(|i| (p[i] - 2.0 * f0[i] + m[i]) / (h * h))
            .collect())
    } else {
        let pp = f(&shifted2(z, a, h, b, h))?;
        let pm = f(&shifted2(z, a, h, b, -h))?;
        let mp = f(&shifted2(z, a, -h, b, h))?;
        let mm = f(&shifted2(z, a, -h, b, -h))?;
        Ok((0..f0.len())
            .map(|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h))
            .collect())
    }
}

/// Mixed Wirtinger derivatives `[j][k] = ∂_{z_j} ∂_{z̄_k} f`.
pub fn wirtinger_mixed<F>(f: &F, z: &[C64], h: f64) -> Result<Vec<Vec<Vec<C64>>>>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let n = z.len();
    let f0 = f(z)?;
    let len = f0.len();
    let mut out = vec![vec![vec![C64::new(0.0, 0.0); len]; n]; n];
    for j in 0..n {
        for k in 0..n {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            let mut acc = vec![C64::new(0.0, 0.0); len];
            if j == k {
                axpy(&mut acc, C64::new(0.25, 0.0), &real_second(f, z, xj, xj, h, &f0)?);
                axpy(&mut acc, C64::new(0.25, 0.0), &real_second(f, z, yj, yj, h, &f0)?);
            } else {
                axpy(&mut acc, C64::new(0.25, 0.0), &real_second(f, z, xj, xk, h, &f0)?);
                axpy(&mut acc, C64::new(0.25, 0.0), &real_second(f, z, yj, yk, h, &f0)?);
                axpy(&mut acc, C64::new(0.0, 0.25), &real_second(f, z, xj, yk, h, &f0)?);
                axpy(&mut acc, C64::new(0.0, -0.25), &real_second(f, z, yj, xk, h, &f0)?);
            }
            out[j][k] = acc;
        }
    }
    Ok(out)
}
