//! Small dense complex linear algebra used by the pointwise geometry.
//!
//! Matrices here are tiny (n ≤ 4 in practice), so everything is a plain
//! `DMatrix<C64>`; nothing is tuned for large sizes.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

/// Pivot threshold below which a Cholesky factorization is declared singular.
pub const CHOLESKY_PIVOT_MIN: f64 = 1e-14;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// `(H + H†) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * cr(0.5)
}

/// Largest entrywise deviation from conjugate symmetry.
pub fn hermitian_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            worst = worst.max((m[(k, j)] - m[(j, k)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a - b))
}

/// Evaluates the (1,1)-form with coordinate matrix `h` on `Z`:
/// `Σ_{j,k} Z_j conj(Z_k) h[j][k]`.
pub fn form_eval(h: &CMat, z: &[C64]) -> f64 {
    form_pair(h, z, z).re
}

/// `Σ_{j,k} Z_j conj(W_k) h[j][k]`, i.e. `H(Z, W̄)`.
pub fn form_pair(h: &CMat, z: &[C64], w: &[C64]) -> C64 {
    let n = h.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            acc += z[j] * w[k].conj() * h[(j, k)];
        }
    }
    acc
}

/// Rank-one form `a ⊗ b̄` with entries `a_j conj(b_k)`.
pub fn outer_conj(a: &[C64], b: &[C64]) -> CMat {
    let n = a.len();
    CMat::from_fn(n, n, |j, k| a[j] * b[k].conj())
}

/// Eigenvalues (ascending) of the Hermitian part of `m`.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = hermitian_part(m);
    let eig = h.symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    vals
}

/// Eigen-decomposition of the Hermitian part: ascending eigenvalues with the
/// matching unit eigenvectors as columns.
pub fn hermitian_eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let h = hermitian_part(m);
    let n = h.nrows();
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (vals, vecs)
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m)
        .first()
        .copied()
        .unwrap_or(f64::INFINITY)
}

/// Lower-triangular `L` with `m = L L†`.
pub fn cholesky_lower(m: &CMat) -> Result<CMat> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            got: m.ncols(),
        });
    }
    let mut l = zeros(n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !d.is_finite() || d <= CHOLESKY_PIVOT_MIN {
            return Err(Error::SingularMetric(format!(
                "Cholesky pivot {d:e} at index {j}"
            )));
        }
        let djj = d.sqrt();
        l[(j, j)] = cr(djj);
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix by forward substitution.
pub fn lower_inverse(l: &CMat) -> CMat {
    let n = l.nrows();
    let mut inv = zeros(n);
    for col in 0..n {
        for i in col..n {
            let mut s = if i == col { cr(1.0) } else { cr(0.0) };
            for k in col..i {
                s -= l[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = s / l[(i, i)];
        }
    }
    inv
}

/// Factorization data of a Hermitian positive-definite matrix.
#[derive(Debug, Clone)]
pub struct HpdFactor {
    pub lower: CMat,
    pub lower_inv: CMat,
    pub inverse: CMat,
    pub log_det: f64,
}

impl HpdFactor {
    pub fn new(m: &CMat) -> Result<Self> {
        let lower = cholesky_lower(m)?;
        let lower_inv = lower_inverse(&lower);
        let inverse = lower_inv.adjoint() * &lower_inv;
        let log_det = 2.0 * (0..m.nrows()).map(|j| lower[(j, j)].re.ln()).sum::<f64>();
        Ok(Self {
            lower,
            lower_inv,
            inverse,
            log_det,
        })
    }

    pub fn det(&self) -> f64 {
        self.log_det.exp()
    }
}

pub fn log_det_hpd(m: &CMat) -> Result<f64> {
    Ok(HpdFactor::new(m)?.log_det)
}

pub fn trace(m: &CMat) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|j| m[(j, j)]).sum()
}

/// Inverse of a general square matrix, erroring when it is singular.
pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("matrix is not invertible".into()))
}
