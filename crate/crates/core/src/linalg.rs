//! Small dense helpers shared by the operator engine and the certificates.

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Largest absolute entry.
pub fn max_abs(a: MatRef<'_, C64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

/// `max |A - A*|` over entries.
pub fn hermitian_defect(a: MatRef<'_, C64>) -> f64 {
    let n = a.nrows();
    let mut m = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            m = m.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    m
}

/// Hermiticity test used for every input term and operator:
/// `max|A - A*| <= 1e-12 (1 + max|A|)`.
pub fn is_hermitian(a: MatRef<'_, C64>) -> bool {
    a.nrows() == a.ncols() && hermitian_defect(a) <= 1e-12 * (1.0 + max_abs(a))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(a: MatRef<'_, C64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenNonConvergence { dim: a.nrows(), max_entry: max_abs(a) })
}

/// Spectral norm of a Hermitian matrix (its spectral radius).
pub fn hermitian_norm(a: MatRef<'_, C64>) -> Result<f64> {
    let ev = hermitian_eigenvalues(a)?;
    Ok(ev.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

/// Operator norm (largest singular value).
///
/// Computed as the square root of the top eigenvalue of the Gram matrix on the
/// smaller side, which keeps rectangular projector blocks cheap.
pub fn opnorm(a: MatRef<'_, C64>) -> f64 {
    let (m, n) = (a.nrows(), a.ncols());
    if m == 0 || n == 0 {
        return 0.0;
    }
    if m == 1 || n == 1 {
        let mut s = 0.0;
        for j in 0..n {
            for i in 0..m {
                s += a[(i, j)].norm_sqr();
            }
        }
        return s.sqrt();
    }
    let gram = if n <= m { a.adjoint() * a } else { a * a.adjoint() };
    match gram.self_adjoint_eigenvalues(Side::Lower) {
        Ok(ev) => ev.last().copied().unwrap_or(0.0).max(0.0).sqrt(),
        // Fall back to the SVD route; both are exact up to rounding.
        Err(_) => a.singular_values().ok().and_then(|s| s.first().copied()).unwrap_or(f64::NAN),
    }
}

/// Smallest singular value of a tall (or square) matrix, via its Gram matrix.
pub fn min_singular_value(a: MatRef<'_, C64>) -> f64 {
    if a.ncols() == 0 {
        return f64::INFINITY;
    }
    if a.nrows() < a.ncols() {
        return 0.0;
    }
    let gram = a.adjoint() * a;
    match gram.self_adjoint_eigenvalues(Side::Lower) {
        Ok(ev) => ev[0].max(0.0).sqrt(),
        Err(_) => f64::NAN,
    }
}

/// Copy of the rows/columns of `a` selected by the two index lists.
pub fn select(a: MatRef<'_, C64>, rows: &[usize], cols: &[usize]) -> Mat<C64> {
    Mat::from_fn(rows.len(), cols.len(), |i, j| a[(rows[i], cols[j])])
}

/// Columns of `a` listed in `cols`.
pub fn select_cols(a: MatRef<'_, C64>, cols: &[usize]) -> Mat<C64> {
    Mat::from_fn(a.nrows(), cols.len(), |i, j| a[(i, cols[j])])
}

pub fn scaled(a: MatRef<'_, C64>, s: f64) -> Mat<C64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

/// Kronecker product with the left factor most significant.
pub fn kron(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> Mat<C64> {
    let (bm, bn) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * bm, a.ncols() * bn, |i, j| a[(i / bm, j / bn)] * b[(i % bm, j % bn)])
}

pub fn pauli_z() -> Mat<C64> {
    Mat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => ONE,
        (1, 1) => -ONE,
        _ => ZERO,
    })
}

pub fn pauli_x() -> Mat<C64> {
    Mat::from_fn(2, 2, |i, j| if i != j { ONE } else { ZERO })
}

/// Complex Gaussian matrix with independent standard normal real and
/// imaginary parts.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Mat<C64> {
    let mut m = Mat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m[(i, j)] = C64::new(re, im);
        }
    }
    m
}

/// `(G + G*) / 2` for a complex Gaussian `G`, with exactly Hermitian storage.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Mat<C64> {
    let g = gaussian(rng, n, n);
    let mut h = Mat::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = C64::new(g[(i, i)].re, 0.0);
        for j in 0..i {
            let v = (g[(i, j)] + g[(j, i)].conj()) * 0.5;
            h[(i, j)] = v;
            h[(j, i)] = v.conj();
        }
    }
    h
}

/// Orthonormalize the columns of `a` (modified Gram-Schmidt, two passes).
/// Columns that become numerically dependent are dropped.
pub fn orthonormalize(a: MatRef<'_, C64>) -> Mat<C64> {
    let n = a.nrows();
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for j in 0..a.ncols() {
        let mut v: Vec<C64> = (0..n).map(|i| a[(i, j)]).collect();
        let orig: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for _ in 0..2 {
            for u in &cols {
                let dot: C64 = u.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= dot * ui;
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-10 * orig.max(1e-300) {
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
    }
    Mat::from_fn(n, cols.len(), |i, j| cols[j][i])
}

/// Haar-ish random unitary from orthonormalized Gaussian columns.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Mat<C64> {
    loop {
        let q = orthonormalize(gaussian(rng, n, n).as_ref());
        if q.ncols() == n {
            return q;
        }
    }
}

/// `sum_k |a_k|^2` of a column slice.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
