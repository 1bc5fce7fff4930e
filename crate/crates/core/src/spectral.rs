//! Eigendecomposition, spectral projections and functional calculus.
//!
//! Interval membership uses a tie tolerance `τ = 1e-9 (1 + ‖H‖)`: a closed
//! endpoint includes eigenvalues within `τ` of it, an open endpoint excludes
//! them. Membership is decided per cluster of numerically degenerate
//! eigenvalues (consecutive gaps below `τ`), so a projector never splits a
//! degenerate eigenspace.

use std::ops::Range;

use faer::{Mat, MatRef, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::operator::HermitianOperator;

/// Relative tie tolerance for interval endpoints.
pub const TIE_RELATIVE: f64 = 1e-9;

/// Real interval with independent endpoint closure; endpoints may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub lower_closed: bool,
    pub upper: f64,
    pub upper_closed: bool,
}

impl Interval {
    pub fn new(lower: f64, lower_closed: bool, upper: f64, upper_closed: bool) -> Self {
        Self { lower, lower_closed, upper, upper_closed }
    }

    /// `[a, b]`
    pub fn closed(a: f64, b: f64) -> Self {
        Self::new(a, true, b, true)
    }

    /// `(a, b)`
    pub fn open(a: f64, b: f64) -> Self {
        Self::new(a, false, b, false)
    }

    /// `(-∞, b]`
    pub fn at_most(b: f64) -> Self {
        Self::new(f64::NEG_INFINITY, false, b, true)
    }

    /// `(-∞, b)`
    pub fn below(b: f64) -> Self {
        Self::new(f64::NEG_INFINITY, false, b, false)
    }

    /// `[a, ∞)`
    pub fn at_least(a: f64) -> Self {
        Self::new(a, true, f64::INFINITY, false)
    }

    /// `(a, ∞)`
    pub fn above(a: f64) -> Self {
        Self::new(a, false, f64::INFINITY, false)
    }

    /// `{x}`
    pub fn point(x: f64) -> Self {
        Self::closed(x, x)
    }

    pub fn everything() -> Self {
        Self::new(f64::NEG_INFINITY, false, f64::INFINITY, false)
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        let lower_ok = if self.lower == f64::NEG_INFINITY {
            true
        } else if self.lower_closed {
            x >= self.lower - tol
        } else {
            x > self.lower + tol
        };
        let upper_ok = if self.upper == f64::INFINITY {
            true
        } else if self.upper_closed {
            x <= self.upper + tol
        } else {
            x < self.upper - tol
        };
        lower_ok && upper_ok
    }

    /// True when `x` sits within `tol` of a finite endpoint.
    pub fn touches_endpoint(&self, x: f64, tol: f64) -> bool {
        (self.lower.is_finite() && (x - self.lower).abs() <= tol)
            || (self.upper.is_finite() && (x - self.upper).abs() <= tol)
    }
}

/// Ascending eigenvalues with an orthonormal eigenbasis (columns).
#[derive(Clone, Debug)]
pub struct SpectralData {
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<C64>,
    clusters: Vec<Range<usize>>,
    norm: f64,
}

pub fn eig(h: &HermitianOperator) -> Result<SpectralData> {
    let m = h.matrix();
    if h.dim() == 0 {
        return Ok(SpectralData::from_parts(Vec::new(), Mat::zeros(0, 0)));
    }
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenNonConvergence { dim: h.dim(), max_entry: linalg::max_abs(m) })?;
    let values: Vec<f64> = evd.S().column_vector().iter().map(|x| x.re).collect();
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenNonConvergence { dim: h.dim(), max_entry: linalg::max_abs(m) });
    }
    Ok(SpectralData::from_parts(values, evd.U().to_owned()))
}

impl SpectralData {
    /// Assembles spectral data from ascending eigenvalues and matching
    /// orthonormal eigenvector columns.
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: Mat<C64>) -> Self {
        debug_assert!(eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        debug_assert_eq!(eigenvalues.len(), eigenvectors.ncols());
        let norm = eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let clusters = cluster(&eigenvalues, TIE_RELATIVE * (1.0 + norm));
        Self { eigenvalues, eigenvectors, clusters, norm }
    }

    /// Spectral data of a diagonal operator with the given diagonal.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..diag.len()).collect();
        order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
        let values = order.iter().map(|&i| diag[i]).collect();
        let vecs = Mat::from_fn(diag.len(), diag.len(), |i, j| if order[j] == i { linalg::ONE } else { linalg::ZERO });
        Self::from_parts(values, vecs)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> MatRef<'_, C64> {
        self.eigenvectors.as_ref()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.col(k).iter().copied().collect()
    }

    /// `‖H‖ = max_k |λ_k|`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `τ = 1e-9 (1 + ‖H‖)`.
    pub fn tie_tolerance(&self) -> f64 {
        TIE_RELATIVE * (1.0 + self.norm)
    }

    /// Groups of numerically degenerate eigenvalues.
    pub fn clusters(&self) -> &[Range<usize>] {
        &self.clusters
    }

    /// Eigenvalues of `H + c I`; eigenvectors are shared.
    pub fn shifted(&self, c: f64) -> Self {
        Self::from_parts(self.eigenvalues.iter().map(|x| x + c).collect(), self.eigenvectors.clone())
    }

    /// Spectral data of `f(H)` for nondecreasing `f`, which keeps the order.
    pub fn map_monotone(&self, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]), "map_monotone needs a nondecreasing function");
        Self::from_parts(values, self.eigenvectors.clone())
    }

    /// Indices of eigenvalues in `interval`, decided per degenerate cluster.
    pub fn select(&self, interval: &Interval) -> Vec<usize> {
        let tol = self.tie_tolerance();
        let mut out = Vec::new();
        for c in &self.clusters {
            let mean = self.eigenvalues[c.clone()].iter().sum::<f64>() / c.len() as f64;
            if interval.contains(mean, tol) {
                out.extend(c.clone());
            }
        }
        out
    }

    /// Indices of eigenvalues outside `interval`; the range of `I - E(interval)`.
    pub fn select_complement(&self, interval: &Interval) -> Vec<usize> {
        let inside = self.select(interval);
        let mut mask = vec![true; self.dim()];
        for i in inside {
            mask[i] = false;
        }
        (0..self.dim()).filter(|&i| mask[i]).collect()
    }

    /// Eigenvalues lying within the tie tolerance of a finite endpoint.
    pub fn endpoint_hits(&self, interval: &Interval) -> Vec<usize> {
        let tol = self.tie_tolerance();
        (0..self.dim()).filter(|&k| interval.touches_endpoint(self.eigenvalues[k], tol)).collect()
    }

    /// `U* A U`: the matrix of `A` in this eigenbasis.
    pub fn in_basis(&self, a: MatRef<'_, C64>) -> Mat<C64> {
        let u = self.eigenvectors.as_ref();
        u.adjoint() * (a * u)
    }

    /// `max_k ‖H v_k - λ_k v_k‖`.
    pub fn residual(&self, h: &HermitianOperator) -> f64 {
        let hu = h.matrix() * self.eigenvectors.as_ref();
        let mut worst = 0.0f64;
        for k in 0..self.dim() {
            let mut s = 0.0;
            for i in 0..self.dim() {
                s += (hu[(i, k)] - self.eigenvectors[(i, k)] * self.eigenvalues[k]).norm_sqr();
            }
            worst = worst.max(s.sqrt());
        }
        worst
    }

    /// `max|U* U - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let u = self.eigenvectors.as_ref();
        let g = u.adjoint() * u;
        let mut worst = 0.0f64;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                let e = if i == j { linalg::ONE } else { linalg::ZERO };
                worst = worst.max((g[(i, j)] - e).norm());
            }
        }
        worst
    }
}

fn cluster(values: &[f64], tol: f64) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] >= tol {
            if k > start {
                out.push(start..k);
            }
            start = k;
        }
    }
    out
}

/// Orthogonal projector stored through an orthonormal basis of its range.
#[derive(Clone, Debug)]
pub struct Projector {
    basis: Mat<C64>,
    interval: Option<Interval>,
    indices: Vec<usize>,
}

impl Projector {
    /// Projector onto the span of orthonormal columns.
    pub fn from_basis(basis: Mat<C64>) -> Self {
        Self { basis, interval: None, indices: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> MatRef<'_, C64> {
        self.basis.as_ref()
    }

    pub fn interval(&self) -> Option<&Interval> {
        self.interval.as_ref()
    }

    /// Eigen-indices spanning the range, when built from spectral data.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Dense `B B*`.
    pub fn matrix(&self) -> Mat<C64> {
        self.basis.as_ref() * self.basis.adjoint()
    }

    /// `I - P` as an explicit projector.
    pub fn complement_matrix(&self) -> Mat<C64> {
        let mut m = self.matrix();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                m[(i, j)] = if i == j { linalg::ONE } else { linalg::ZERO } - m[(i, j)];
            }
        }
        m
    }
}

/// `E^H(I) = Σ_{λ_k ∈ I} |ψ_k⟩⟨ψ_k|`.
pub fn projector(s: &SpectralData, interval: Interval) -> Projector {
    let indices = s.select(&interval);
    let basis = linalg::select_cols(s.eigenvectors(), &indices);
    Projector { basis, interval: Some(interval), indices }
}

/// `f(H) = Σ_k f(λ_k) |ψ_k⟩⟨ψ_k|` for real-valued `f`.
pub fn apply_function(s: &SpectralData, f: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
    let values: Vec<f64> = s.eigenvalues().iter().map(|&x| f(x)).collect();
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::FunctionOverflow { eigenvalue: s.eigenvalues()[k] });
    }
    let u = s.eigenvectors();
    let scaled = Mat::from_fn(s.dim(), s.dim(), |i, j| u[(i, j)] * values[j]);
    Ok(HermitianOperator::from_hermitian_parts(scaled.as_ref() * u.adjoint()))
}

/// `e^{tK} A e^{-tK}` expressed in `K`'s eigenbasis (same norm as in any
/// unitary frame).
pub fn conjugate_in_eigenbasis(k: &SpectralData, a: MatRef<'_, C64>, t: f64) -> Result<Mat<C64>> {
    let spread = t.abs() * (k.max() - k.min());
    if !(spread < 700.0) {
        return Err(Error::FunctionOverflow { eigenvalue: if t >= 0.0 { k.max() } else { k.min() } });
    }
    // Center the exponent to keep both factors in range.
    let mid = 0.5 * (k.max() + k.min());
    let grow: Vec<f64> = k.eigenvalues().iter().map(|&x| (t * (x - mid)).exp()).collect();
    let ak = k.in_basis(a);
    Ok(Mat::from_fn(k.dim(), k.dim(), |i, j| ak[(i, j)] * (grow[i] / grow[j])))
}

/// `‖e^{tK} A e^{-tK}‖`, computed exactly through `K`'s eigenbasis.
pub fn conjugation_norm(k: &SpectralData, a: MatRef<'_, C64>, t: f64) -> Result<f64> {
    Ok(linalg::opnorm(conjugate_in_eigenbasis(k, a, t)?.as_ref()))
}

/// `U_a* U_b` for two spectral decompositions of the same space. Norms of
/// products of spectral projectors of `a` and `b` are norms of its blocks:
/// `‖E^a(I) E^b(J)‖ = ‖(U_a* U_b)[I, J]‖`.
#[derive(Clone, Debug)]
pub struct SpectralOverlap {
    gram: Mat<C64>,
}

impl SpectralOverlap {
    pub fn new(a: &SpectralData, b: &SpectralData) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
        }
        Ok(Self { gram: a.eigenvectors().adjoint() * b.eigenvectors() })
    }

    pub fn gram(&self) -> MatRef<'_, C64> {
        self.gram.as_ref()
    }

    /// Norm of the block with the given `a`-rows and `b`-columns.
    pub fn block_norm(&self, rows: &[usize], cols: &[usize]) -> f64 {
        if rows.is_empty() || cols.is_empty() {
            return 0.0;
        }
        linalg::opnorm(linalg::select(self.gram.as_ref(), rows, cols).as_ref())
    }
}

/// `‖P X Q‖` from the eigenbasis matrix of `X` and index lists.
pub fn block_norm(in_basis: MatRef<'_, C64>, rows: &[usize], cols: &[usize]) -> f64 {
    if rows.is_empty() || cols.is_empty() {
        return 0.0;
    }
    linalg::opnorm(linalg::select(in_basis, rows, cols).as_ref())
}
