//! Dense Hermitian operators on `⊗_{x∈Λ} C^d`.
//!
//! Basis ordering is lexicographic with site 0 the most significant tensor
//! factor: the global index of a configuration `(s_0, …, s_{n-1})` is
//! `Σ_k s_k d^{n-1-k}`.

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, Term};
use crate::linalg::{self, C64};

/// Largest Hilbert-space dimension the dense engine will allocate by default.
pub const DEFAULT_DENSE_CAP: usize = 1 << 12;

#[derive(Clone, Debug)]
pub struct HermitianOperator {
    matrix: Mat<C64>,
    label: Option<String>,
}

impl HermitianOperator {
    /// Wraps a matrix after checking Hermiticity within
    /// `1e-12 (1 + max|entry|)`.
    pub fn new(matrix: Mat<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { left: matrix.nrows(), right: matrix.ncols() });
        }
        if !linalg::is_hermitian(matrix.as_ref()) {
            return Err(Error::NonHermitian { term: 0, defect: linalg::hermitian_defect(matrix.as_ref()) });
        }
        Ok(Self { matrix, label: None })
    }

    /// Wraps a matrix known to be Hermitian (sums and functional calculus of
    /// Hermitian operators); the lower triangle is mirrored to remove rounding.
    pub(crate) fn from_hermitian_parts(mut matrix: Mat<C64>) -> Self {
        let n = matrix.nrows();
        for i in 0..n {
            matrix[(i, i)].im = 0.0;
            for j in 0..i {
                let v = (matrix[(i, j)] + matrix[(j, i)].conj()) * 0.5;
                matrix[(i, j)] = v;
                matrix[(j, i)] = v.conj();
            }
        }
        Self { matrix, label: None }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { matrix: Mat::zeros(dim, dim), label: None }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: Mat::identity(dim, dim), label: None }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, C64> {
        self.matrix.as_ref()
    }

    pub fn into_matrix(self) -> Mat<C64> {
        self.matrix
    }

    /// `‖A‖`, the spectral radius for a Hermitian operator.
    pub fn norm(&self) -> Result<f64> {
        linalg::hermitian_norm(self.matrix.as_ref())
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(self.matrix.as_ref())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        let m = Mat::from_fn(self.dim(), self.dim(), |i, j| self.matrix[(i, j)] + other.matrix[(i, j)] * sign);
        Ok(Self { matrix: m, label: None })
    }

    /// `A + c I`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.matrix.clone();
        for i in 0..self.dim() {
            m[(i, i)] += c;
        }
        Self { matrix: m, label: self.label.clone() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { matrix: linalg::scaled(self.matrix.as_ref(), c), label: self.label.clone() }
    }

    /// `A v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let mut out = vec![linalg::ZERO; n];
        for j in 0..n {
            let vj = v[j];
            if vj == linalg::ZERO {
                continue;
            }
            let col = self.matrix.col(j);
            for i in 0..n {
                out[i] += col[i] * vj;
            }
        }
        out
    }

    /// `max|A - B|` over entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.dim().min(other.dim());
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                m = m.max((self.matrix[(i, j)] - other.matrix[(i, j)]).norm());
            }
        }
        m
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| i == j || self.matrix[(i, j)] == linalg::ZERO))
    }
}

/// `Σ_X Φ(X) ⊗ I_{Λ∖X}` over the given terms, within [`DEFAULT_DENSE_CAP`].
pub fn assemble<'a>(terms: impl IntoIterator<Item = &'a Term>, lattice: &Lattice) -> Result<HermitianOperator> {
    assemble_with_cap(terms, lattice, DEFAULT_DENSE_CAP)
}

pub fn assemble_with_cap<'a>(
    terms: impl IntoIterator<Item = &'a Term>,
    lattice: &Lattice,
    cap: usize,
) -> Result<HermitianOperator> {
    let dim = lattice.hilbert_dim().ok_or(Error::DenseCapExceeded { dim: usize::MAX, cap })?;
    if dim > cap {
        return Err(Error::DenseCapExceeded { dim, cap });
    }
    let mut m = Mat::<C64>::zeros(dim, dim);
    for (idx, term) in terms.into_iter().enumerate() {
        if let Some(&site) = term.support().iter().find(|&&s| s >= lattice.len()) {
            return Err(Error::SupportOutsideLattice { term: idx, site });
        }
        embed_into(&mut m, term, lattice);
    }
    Ok(HermitianOperator::from_hermitian_parts(m))
}

/// Strides of each site in the global index.
pub(crate) fn site_strides(lattice: &Lattice) -> Vec<usize> {
    let n = lattice.len();
    let d = lattice.local_dim();
    let mut strides = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * d;
    }
    strides
}

fn embed_into(out: &mut Mat<C64>, term: &Term, lattice: &Lattice) {
    let d = lattice.local_dim();
    let strides = site_strides(lattice);
    let support = term.support();
    let k = support.len();
    let local_dim = term.matrix().nrows();
    // offset[l] = global index offset of local configuration l.
    let offsets: Vec<usize> = (0..local_dim)
        .map(|l| {
            let mut rem = l;
            let mut off = 0;
            for m in (0..k).rev() {
                off += (rem % d) * strides[support[m]];
                rem /= d;
            }
            off
        })
        .collect();
    let mat = term.matrix();
    let dim = out.nrows();
    for row in 0..dim {
        let mut li = 0;
        for &s in support {
            li = li * d + (row / strides[s]) % d;
        }
        let base = row - offsets[li];
        for (lc, &off) in offsets.iter().enumerate() {
            let v = mat[(li, lc)];
            if v != linalg::ZERO {
                out[(row, base + off)] += v;
            }
        }
    }
}

/// Dense vector of the product state `⊗_x φ_x`.
pub fn product_vector(state: &[Vec<C64>]) -> Vec<C64> {
    let mut v = vec![linalg::ONE];
    for phi in state {
        let mut next = Vec::with_capacity(v.len() * phi.len());
        for a in &v {
            for b in phi {
                next.push(a * b);
            }
        }
        v = next;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Interaction;
    use crate::linalg::{kron, pauli_z, random_hermitian};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sigma_z_on_first_site() {
        let lat = Lattice::chain(2, 2).unwrap();
        let int = Interaction::new(&lat, vec![(vec![0], pauli_z())]).unwrap();
        let h = assemble(int.terms(), &lat).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| h.matrix()[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
        assert!(h.is_diagonal());
    }

    #[test]
    fn embedding_matches_explicit_kronecker() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let lat = Lattice::chain(3, 2).unwrap();
        let t = random_hermitian(&mut rng, 4);
        let int = Interaction::new(&lat, vec![(vec![1, 2], t.clone())]).unwrap();
        let h = assemble(int.terms(), &lat).unwrap();
        let id = Mat::<C64>::identity(2, 2);
        let expect = kron(id.as_ref(), t.as_ref());
        for i in 0..8 {
            for j in 0..8 {
                assert!((h.matrix()[(i, j)] - expect[(i, j)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn reversed_support_order_swaps_factors() {
        let lat = Lattice::chain(2, 2).unwrap();
        let z = pauli_z();
        let id = Mat::<C64>::identity(2, 2);
        let zi = kron(z.as_ref(), id.as_ref());
        let a = Interaction::new(&lat, vec![(vec![1, 0], zi)]).unwrap();
        let h = assemble(a.terms(), &lat).unwrap();
        // Z acts on the first listed support site, which is site 1.
        let diag: Vec<f64> = (0..4).map(|i| h.matrix()[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, 1.0, -1.0]);
    }

    /// Per-entry oracle: `⟨r|Φ(X)⊗I|c⟩` is `Φ[r_X, c_X]` when `r` and `c`
    /// agree off `X`, zero otherwise.
    fn entry_oracle(terms: &[(Vec<usize>, Mat<C64>)], n: usize, r: usize, c: usize) -> C64 {
        let digit = |g: usize, site: usize| (g >> (n - 1 - site)) & 1;
        let mut acc = C64::new(0.0, 0.0);
        for (sup, m) in terms {
            let agree = (0..n).filter(|s| !sup.contains(s)).all(|s| digit(r, s) == digit(c, s));
            if !agree {
                continue;
            }
            let li = sup.iter().fold(0, |a, &s| a * 2 + digit(r, s));
            let lc = sup.iter().fold(0, |a, &s| a * 2 + digit(c, s));
            acc += m[(li, lc)];
        }
        acc
    }

    #[test]
    fn random_eight_site_model_matches_entry_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 8;
        let lat = Lattice::chain(n, 2).unwrap();
        let mut terms: Vec<_> = (0..n - 1).map(|i| (vec![i, i + 1], random_hermitian(&mut rng, 4))).collect();
        terms.push((vec![5, 2], random_hermitian(&mut rng, 4)));
        terms.push((vec![3], random_hermitian(&mut rng, 2)));
        let int = Interaction::new(&lat, terms.clone()).unwrap();
        let h = assemble(int.terms(), &lat).unwrap();
        for _ in 0..3 {
            let r = rng.random_range(0..256);
            let c = rng.random_range(0..256);
            let want = entry_oracle(&terms, n, r, c);
            assert!((h.matrix()[(r, c)] - want).norm() < 1e-12);
        }
        // Also a guaranteed nonzero off-diagonal entry (single flip on site 3).
        let r = 0b0001_0000;
        let c = 0b0000_0000;
        assert!((h.matrix()[(r, c)] - entry_oracle(&terms, n, r, c)).norm() < 1e-12);
    }

    #[test]
    fn dense_cap_is_enforced() {
        let lat = Lattice::chain(13, 2).unwrap();
        let int = Interaction::new(&lat, vec![(vec![0], pauli_z())]).unwrap();
        assert!(matches!(assemble(int.terms(), &lat), Err(Error::DenseCapExceeded { dim: 8192, cap: 4096 })));
        assert!(assemble_with_cap(int.terms(), &lat, 1 << 13).is_ok());
    }

    #[test]
    fn product_vector_ordering() {
        let up = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let down = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let v = product_vector(&[up, down]);
        assert_eq!(v[1], C64::new(1.0, 0.0));
        assert_eq!(v.iter().filter(|x| x.norm() > 0.0).count(), 1);
    }
}
