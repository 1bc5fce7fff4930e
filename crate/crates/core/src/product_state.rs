//! Matrix-free action of a term list on a product state.
//!
//! For `ψ = ⊗_x φ_x` and local energies `e_X = ⟨φ_X, Φ(X) φ_X⟩`, the residual
//! `‖(Σ_X Φ(X) - Σ_X e_X) ψ‖²` only receives contributions from pairs of
//! terms with overlapping supports: each `v_X = (Φ(X) - e_X) φ_X` is
//! orthogonal to `φ_X`, so disjoint pairs cancel. The cost is linear in the
//! number of terms for bounded-degree interactions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, Term};
use crate::linalg::{self, C64};

/// Outcome of applying a term sum to a product state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductStateAction {
    /// The sum acts as a scalar on the state (residual within tolerance).
    pub is_eigen: bool,
    /// `⟨ψ, H ψ⟩`.
    pub eigenvalue: f64,
    /// `‖H ψ - ⟨ψ, H ψ⟩ ψ‖`.
    pub residual: f64,
}

/// Normalization tolerance on each site vector.
const NORM_TOL: f64 = 1e-12;

pub fn product_state_apply<'a>(
    terms: impl IntoIterator<Item = &'a Term>,
    lattice: &Lattice,
    state: &[Vec<C64>],
) -> Result<ProductStateAction> {
    validate_state(lattice, state)?;
    let terms: Vec<&Term> = terms.into_iter().collect();
    let d = lattice.local_dim();

    let mut energy = 0.0;
    let mut scale = 0.0;
    let mut defects: Vec<Vec<C64>> = Vec::with_capacity(terms.len());
    for (idx, t) in terms.iter().enumerate() {
        if let Some(&site) = t.support().iter().find(|&&s| s >= lattice.len()) {
            return Err(Error::SupportOutsideLattice { term: idx, site });
        }
        let phi = local_product(t.support(), state, d);
        let hphi = matvec(t.matrix().as_ref(), &phi);
        let e = linalg::vdot(&phi, &hphi).re;
        energy += e;
        scale += t.norm();
        defects.push(hphi.iter().zip(&phi).map(|(h, p)| h - p * e).collect());
    }

    // Terms touching each site, to enumerate overlapping pairs.
    let mut by_site: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, t) in terms.iter().enumerate() {
        for &s in t.support() {
            by_site.entry(s).or_default().push(i);
        }
    }

    let mut sq = 0.0;
    for (i, ti) in terms.iter().enumerate() {
        if linalg::vec_norm(&defects[i]) == 0.0 {
            continue;
        }
        let mut partners: Vec<usize> = ti.support().iter().flat_map(|s| by_site[s].iter().copied()).collect();
        partners.sort_unstable();
        partners.dedup();
        for j in partners {
            if linalg::vec_norm(&defects[j]) == 0.0 {
                continue;
            }
            let tj = terms[j];
            let mut union: Vec<usize> = ti.support().iter().chain(tj.support()).copied().collect();
            union.sort_unstable();
            union.dedup();
            let a = lift(&defects[i], ti.support(), &union, state, d);
            let b = lift(&defects[j], tj.support(), &union, state, d);
            sq += linalg::vdot(&a, &b).re;
        }
    }
    let residual = sq.max(0.0).sqrt();
    Ok(ProductStateAction { is_eigen: residual <= 1e-10 * (1.0 + scale), eigenvalue: energy, residual })
}

fn validate_state(lattice: &Lattice, state: &[Vec<C64>]) -> Result<()> {
    if state.len() != lattice.len() {
        return Err(Error::InvalidProductState(format!(
            "{} site vectors for {} sites",
            state.len(),
            lattice.len()
        )));
    }
    for (x, phi) in state.iter().enumerate() {
        if phi.len() != lattice.local_dim() {
            return Err(Error::InvalidProductState(format!(
                "site {x}: vector of length {}, local dimension {}",
                phi.len(),
                lattice.local_dim()
            )));
        }
        let n = linalg::vec_norm(phi);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidProductState(format!("site {x}: norm {n}")));
        }
    }
    Ok(())
}

/// `⊗_{s ∈ support} φ_s` in support order, first site most significant.
fn local_product(support: &[usize], state: &[Vec<C64>], d: usize) -> Vec<C64> {
    let mut v = vec![linalg::ONE];
    for &s in support {
        let mut next = Vec::with_capacity(v.len() * d);
        for a in &v {
            for b in &state[s] {
                next.push(a * b);
            }
        }
        v = next;
    }
    v
}

fn matvec(m: faer::MatRef<'_, C64>, v: &[C64]) -> Vec<C64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

/// `w ⊗ φ_{union ∖ support}` as a vector over `union` (sorted order).
fn lift(w: &[C64], support: &[usize], union: &[usize], state: &[Vec<C64>], d: usize) -> Vec<C64> {
    let k = union.len();
    let pos: Vec<usize> = support.iter().map(|s| union.iter().position(|u| u == s).unwrap()).collect();
    let total = d.pow(k as u32);
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; k];
    for idx in 0..total {
        let mut rem = idx;
        for m in (0..k).rev() {
            digits[m] = rem % d;
            rem /= d;
        }
        let mut li = 0;
        for &p in &pos {
            li = li * d + digits[p];
        }
        let mut v = w[li];
        for (m, &site) in union.iter().enumerate() {
            if !pos.contains(&m) {
                v *= state[site][digits[m]];
            }
        }
        out.push(v);
    }
    out
}
