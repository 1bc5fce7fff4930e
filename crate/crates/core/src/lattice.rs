//! Finite lattices with the ℓ¹ metric, bounded interactions, and the
//! three-way split of a Hamiltonian around a cut.
//!
//! Sites are addressed by their index in [`Lattice::sites`]; coordinates are
//! only used for distances. A [`Term`]'s matrix acts on the tensor product of
//! its support sites in the order the support lists them.

use std::collections::BTreeSet;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};

pub type SiteSet = BTreeSet<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    sites: Vec<Vec<i64>>,
    local_dim: usize,
}

impl Lattice {
    pub fn new(sites: Vec<Vec<i64>>, local_dim: usize) -> Result<Self> {
        if local_dim < 2 {
            return Err(Error::InvalidLattice(format!("local dimension {local_dim} < 2")));
        }
        if sites.is_empty() {
            return Err(Error::InvalidLattice("no sites".into()));
        }
        let nu = sites[0].len();
        if nu == 0 {
            return Err(Error::InvalidLattice("zero-dimensional coordinates".into()));
        }
        let mut seen = BTreeSet::new();
        for s in &sites {
            if s.len() != nu {
                return Err(Error::InvalidLattice(format!("coordinate {s:?} is not {nu}-dimensional")));
            }
            if !seen.insert(s.clone()) {
                return Err(Error::InvalidLattice(format!("duplicate site {s:?}")));
            }
        }
        Ok(Self { sites, local_dim })
    }

    /// Open chain with coordinates `1..=n`.
    pub fn chain(n: usize, local_dim: usize) -> Result<Self> {
        Self::new((1..=n as i64).map(|x| vec![x]).collect(), local_dim)
    }

    /// Open chain with coordinates `first..=last`.
    pub fn chain_between(first: i64, last: i64, local_dim: usize) -> Result<Self> {
        Self::new((first..=last).map(|x| vec![x]).collect(), local_dim)
    }

    /// `width × height` rectangle, row-major site order.
    pub fn rectangle(width: usize, height: usize, local_dim: usize) -> Result<Self> {
        let mut sites = Vec::with_capacity(width * height);
        for y in 0..height as i64 {
            for x in 0..width as i64 {
                sites.push(vec![x, y]);
            }
        }
        Self::new(sites, local_dim)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    /// Spatial dimension ν.
    pub fn dimension(&self) -> usize {
        self.sites[0].len()
    }

    pub fn sites(&self) -> &[Vec<i64>] {
        &self.sites
    }

    pub fn coord(&self, site: usize) -> &[i64] {
        &self.sites[site]
    }

    pub fn index_of(&self, coord: &[i64]) -> Option<usize> {
        self.sites.iter().position(|s| s == coord)
    }

    /// Indices of the given 1-D coordinates; panics on unknown coordinates.
    pub fn chain_sites(&self, coords: impl IntoIterator<Item = i64>) -> SiteSet {
        coords
            .into_iter()
            .map(|c| self.index_of(&[c]).unwrap_or_else(|| panic!("no site at {c}")))
            .collect()
    }

    /// ℓ¹ distance.
    pub fn distance(&self, a: usize, b: usize) -> u64 {
        self.sites[a].iter().zip(&self.sites[b]).map(|(x, y)| x.abs_diff(*y)).sum()
    }

    pub fn all_sites(&self) -> SiteSet {
        (0..self.len()).collect()
    }

    /// `d^{|Λ|}`, or `None` on overflow.
    pub fn hilbert_dim(&self) -> Option<usize> {
        let mut dim = 1usize;
        for _ in 0..self.len() {
            dim = dim.checked_mul(self.local_dim)?;
        }
        Some(dim)
    }

    fn distance_to_set(&self, x: usize, set: &SiteSet) -> u64 {
        set.iter().map(|&y| self.distance(x, y)).min().unwrap_or(u64::MAX)
    }
}

/// A local term `Φ(X)`.
#[derive(Clone, Debug)]
pub struct Term {
    support: Vec<usize>,
    matrix: Mat<C64>,
    norm: f64,
}

impl Term {
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    /// Operator norm `‖Φ(X)‖`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_zero(&self) -> bool {
        self.norm == 0.0
    }

    pub fn diameter(&self, lattice: &Lattice) -> u64 {
        let mut d = 0;
        for (i, &a) in self.support.iter().enumerate() {
            for &b in &self.support[i + 1..] {
                d = d.max(lattice.distance(a, b));
            }
        }
        d
    }

    pub fn support_set(&self) -> SiteSet {
        self.support.iter().copied().collect()
    }
}

/// Finite map from supports to Hermitian local terms.
#[derive(Clone, Debug, Default)]
pub struct Interaction {
    terms: Vec<Term>,
}

impl Interaction {
    /// Validates every term against `lattice`: nonempty support of distinct
    /// in-range sites, matrix of size `d^{|X|}`, Hermitian within
    /// `1e-12 (1 + max|entry|)`.
    pub fn new(lattice: &Lattice, terms: Vec<(Vec<usize>, Mat<C64>)>) -> Result<Self> {
        let d = lattice.local_dim();
        let mut out = Vec::with_capacity(terms.len());
        for (idx, (support, matrix)) in terms.into_iter().enumerate() {
            if support.is_empty() {
                return Err(Error::InvalidTerm { term: idx, reason: "empty support".into() });
            }
            if let Some(&site) = support.iter().find(|&&s| s >= lattice.len()) {
                return Err(Error::SupportOutsideLattice { term: idx, site });
            }
            let distinct: SiteSet = support.iter().copied().collect();
            if distinct.len() != support.len() {
                return Err(Error::InvalidTerm { term: idx, reason: "repeated support site".into() });
            }
            let dim = d.checked_pow(support.len() as u32).ok_or_else(|| Error::InvalidTerm {
                term: idx,
                reason: "local dimension overflow".into(),
            })?;
            if matrix.nrows() != dim || matrix.ncols() != dim {
                return Err(Error::InvalidTerm {
                    term: idx,
                    reason: format!("matrix is {}x{}, expected {dim}x{dim}", matrix.nrows(), matrix.ncols()),
                });
            }
            if !linalg::is_hermitian(matrix.as_ref()) {
                return Err(Error::NonHermitian { term: idx, defect: linalg::hermitian_defect(matrix.as_ref()) });
            }
            let norm = linalg::hermitian_norm(matrix.as_ref())?;
            out.push(Term { support, matrix, norm });
        }
        Ok(Self { terms: out })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, idx: usize) -> &Term {
        &self.terms[idx]
    }

    /// Sub-interaction made of the listed terms (in the listed order).
    pub fn subset(&self, indices: &[usize]) -> Interaction {
        Interaction { terms: indices.iter().map(|&i| self.terms[i].clone()).collect() }
    }
}

/// `(𝔯, 𝔧, N)`: range, strength and locality of an interaction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionConstants {
    /// Largest support diameter over nonzero terms.
    pub range_r: u64,
    /// `max_x Σ_{X∋x} ‖Φ(X)‖`.
    pub strength_j: f64,
    /// Largest number of sites in an ℓ¹ ball of radius `range_r`.
    pub locality_n: usize,
}

pub fn derive_constants(interaction: &Interaction, lattice: &Lattice) -> Result<InteractionConstants> {
    if interaction.is_empty() {
        return Err(Error::EmptyInteraction);
    }
    let mut range_r = 0;
    let mut per_site = vec![0.0f64; lattice.len()];
    for (idx, term) in interaction.terms().iter().enumerate() {
        if let Some(&site) = term.support().iter().find(|&&s| s >= lattice.len()) {
            return Err(Error::SupportOutsideLattice { term: idx, site });
        }
        if term.is_zero() {
            continue;
        }
        range_r = range_r.max(term.diameter(lattice));
        for &s in term.support() {
            per_site[s] += term.norm();
        }
    }
    let strength_j = per_site.iter().copied().fold(0.0, f64::max);
    let locality_n = (0..lattice.len())
        .map(|x| (0..lattice.len()).filter(|&y| lattice.distance(x, y) <= range_r).count())
        .max()
        .unwrap_or(0);
    Ok(InteractionConstants { range_r, strength_j, locality_n })
}

/// Minimal boundary region of `region` for interaction range `range_r`:
/// sites of `L` within `range_r` of `L^c`, together with sites of `L^c`
/// within `range_r` of `L`.
pub fn boundary_region(region: &SiteSet, lattice: &Lattice, range_r: u64) -> Result<SiteSet> {
    if region.is_empty() {
        return Err(Error::InvalidSplit("L is empty".into()));
    }
    if let Some(&s) = region.iter().find(|&&s| s >= lattice.len()) {
        return Err(Error::InvalidSplit(format!("site {s} is outside the lattice")));
    }
    if region.len() == lattice.len() {
        return Err(Error::InvalidSplit("L is the whole lattice".into()));
    }
    let complement: SiteSet = (0..lattice.len()).filter(|s| !region.contains(s)).collect();
    let mut out = SiteSet::new();
    for &x in region {
        if lattice.distance_to_set(x, &complement) <= range_r {
            out.insert(x);
        }
    }
    for &y in &complement {
        if lattice.distance_to_set(y, region) <= range_r {
            out.insert(y);
        }
    }
    Ok(out)
}

/// `(L, ∂L, L^c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionSplit {
    region: SiteSet,
    boundary: SiteSet,
    complement: SiteSet,
}

impl RegionSplit {
    /// Split with the minimal admissible boundary.
    pub fn minimal(lattice: &Lattice, region: SiteSet, range_r: u64) -> Result<Self> {
        let boundary = boundary_region(&region, lattice, range_r)?;
        Ok(Self::from_parts(lattice, region, boundary))
    }

    /// Minimal boundary for the enlarged radius `range_r + extra`.
    pub fn widened(lattice: &Lattice, region: SiteSet, range_r: u64, extra: u64) -> Result<Self> {
        let boundary = boundary_region(&region, lattice, range_r + extra)?;
        Ok(Self::from_parts(lattice, region, boundary))
    }

    /// Split with a caller-chosen boundary; it must contain the minimal one.
    pub fn with_boundary(lattice: &Lattice, region: SiteSet, boundary: SiteSet, range_r: u64) -> Result<Self> {
        let minimal = boundary_region(&region, lattice, range_r)?;
        if let Some(s) = minimal.difference(&boundary).next() {
            return Err(Error::InvalidSplit(format!("boundary misses site {s} of the interaction boundary")));
        }
        if let Some(&s) = boundary.iter().find(|&&s| s >= lattice.len()) {
            return Err(Error::InvalidSplit(format!("boundary site {s} is outside the lattice")));
        }
        Ok(Self::from_parts(lattice, region, boundary))
    }

    fn from_parts(lattice: &Lattice, region: SiteSet, boundary: SiteSet) -> Self {
        let complement = (0..lattice.len()).filter(|s| !region.contains(s)).collect();
        Self { region, boundary, complement }
    }

    pub fn region(&self) -> &SiteSet {
        &self.region
    }

    pub fn boundary(&self) -> &SiteSet {
        &self.boundary
    }

    pub fn complement(&self) -> &SiteSet {
        &self.complement
    }
}

/// Term indices of `H'_L`, `H_{∂L}` and `H'_{L^c}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decomposition {
    pub inner_l: Vec<usize>,
    pub boundary: Vec<usize>,
    pub inner_lc: Vec<usize>,
}

impl Decomposition {
    /// Terms of `H'_L + H'_{L^c}`.
    pub fn environment(&self) -> Vec<usize> {
        let mut v = self.inner_l.clone();
        v.extend(&self.inner_lc);
        v.sort_unstable();
        v
    }
}

/// Assign each term to exactly one of the three sums: `Z ⊂ ∂L` goes to the
/// boundary, otherwise `Z ⊂ L` to `H'_L` and `Z ⊂ L^c` to `H'_{L^c}`.
pub fn decompose(interaction: &Interaction, split: &RegionSplit) -> Result<Decomposition> {
    let mut out = Decomposition::default();
    for (idx, term) in interaction.terms().iter().enumerate() {
        let sup = term.support();
        if sup.iter().all(|s| split.boundary.contains(s)) {
            out.boundary.push(idx);
        } else if sup.iter().all(|s| split.region.contains(s)) {
            out.inner_l.push(idx);
        } else if sup.iter().all(|s| split.complement.contains(s)) {
            out.inner_lc.push(idx);
        } else {
            return Err(Error::StraddlingTerm { term: idx });
        }
    }
    Ok(out)
}
