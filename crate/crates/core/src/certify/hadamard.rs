//! Finite-volume check of the derivation series
//! `exp(sδ)(H_X) = Σ_n (sⁿ/n!) δⁿ(H_X)` with `δ = [G, ·]`.

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::operator::HermitianOperator;
use crate::spectral::{self, SpectralData};

use super::{BoundCertificate, BoundKind, Claim, DEFAULT_TOL};

#[derive(Clone, Debug)]
pub struct HadamardReport {
    pub s: f64,
    pub s_x: f64,
    pub h_x_norm: f64,
    /// `‖(sⁿ/n!) δⁿ(H_X)‖` for `n = 0..=n_max`.
    pub term_norms: Vec<f64>,
    /// `(2𝔧|s|)ⁿ/n! ‖H_X‖ Π_{k≤n}(N k + |X|)`.
    pub term_bounds: Vec<f64>,
    /// Largest ratio of consecutive term bounds, including the tail beyond `n_max`.
    pub tail_ratio: f64,
    /// Bound on `Σ_{n > n_max}` of the term bounds.
    pub tail_allowance: f64,
    pub partial_sum_norm: f64,
    /// `‖e^{sG} H_X e^{-sG}‖` by functional calculus.
    pub exact_norm: f64,
    /// `‖e^{sG} H_X e^{-sG} - partial sum‖`.
    pub remainder_norm: f64,
    /// `‖H_X‖ / (1 - |s|/S_X)`.
    pub sum_bound: f64,
    pub certificates: Vec<BoundCertificate>,
}

/// Certifies the term-wise bounds for `n ≤ n_max` and the sum bound for the
/// partial sum and for the exact conjugation, and checks that the remainder
/// stays within the geometric tail allowance.
///
/// `generator` is `G` (the full Hamiltonian for `δ_Γ`, the terms leaving `X`
/// for `δ_{X^c}`), with spectral data `generator_spec`; `x_size` is `|X|`.
#[allow(clippy::too_many_arguments)]
pub fn hadamard_series_check(
    h_x: &HermitianOperator,
    x_size: usize,
    generator: &HermitianOperator,
    generator_spec: &SpectralData,
    strength_j: f64,
    locality_n: usize,
    s: f64,
    s_x: f64,
    n_max: usize,
) -> Result<HadamardReport> {
    if !(s.abs() < s_x) {
        return Err(Error::Precondition(format!("need |s| < S_X, got s = {s}, S_X = {s_x}")));
    }
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    if generator.dim() != h_x.dim() {
        return Err(Error::DimensionMismatch { left: generator.dim(), right: h_x.dim() });
    }
    let g = generator.matrix();
    let h_x_norm = h_x.norm()?;
    let step = |n: usize| 2.0 * strength_j * s.abs() * (locality_n as f64 * n as f64 + x_size as f64) / n as f64;

    let mut term = h_x.matrix().to_owned();
    let mut partial = term.clone();
    let mut term_norms = vec![h_x_norm];
    let mut term_bounds = vec![h_x_norm];
    let mut tail_ratio = 0.0f64;
    for n in 1..=n_max {
        // T_n = (s/n) [G, T_{n-1}].
        let gt = g * term.as_ref();
        let tg = term.as_ref() * g;
        let k = s / n as f64;
        term = Mat::from_fn(gt.nrows(), gt.ncols(), |i, j| (gt[(i, j)] - tg[(i, j)]) * k);
        partial = &partial + &term;
        term_norms.push(linalg::opnorm(term.as_ref()));
        let r = step(n);
        tail_ratio = tail_ratio.max(r);
        term_bounds.push(term_bounds[n - 1] * r);
    }
    // Beyond n_max the ratio is at most 2𝔧|s|(N + |X|/(n_max+1)).
    let r_tail = step(n_max + 1);
    tail_ratio = tail_ratio.max(r_tail);
    let tail_allowance = if r_tail < 1.0 { term_bounds[n_max] * r_tail / (1.0 - r_tail) } else { f64::INFINITY };

    let partial_sum_norm = linalg::opnorm(partial.as_ref());
    let exact = spectral::conjugate_in_eigenbasis(generator_spec, h_x.matrix(), s)?;
    let exact_norm = linalg::opnorm(exact.as_ref());
    let partial_in_basis = generator_spec.in_basis(partial.as_ref());
    let diff: Mat<C64> = &exact - &partial_in_basis;
    let remainder_norm = linalg::opnorm(diff.as_ref());
    let sum_bound = h_x_norm / (1.0 - s.abs() / s_x);

    let mut certificates = Vec::with_capacity(n_max + 4);
    for n in 0..=n_max {
        certificates.push(BoundCertificate::judge(
            Claim::HadamardTerm,
            &[("s", s), ("n", n as f64)],
            term_norms[n],
            term_bounds[n],
            BoundKind::Plain,
            DEFAULT_TOL,
        ));
    }
    let sum_params = |form: f64| [("s", s), ("S_X", s_x), ("n_max", n_max as f64), ("form", form), ("tail_ratio", tail_ratio)];
    certificates.push(BoundCertificate::judge(
        Claim::HadamardSum,
        &sum_params(0.0),
        partial_sum_norm,
        sum_bound,
        BoundKind::Plain,
        DEFAULT_TOL,
    ).with_note("partial sum"));
    certificates.push(BoundCertificate::judge(
        Claim::HadamardSum,
        &sum_params(1.0),
        exact_norm,
        sum_bound,
        BoundKind::Plain,
        DEFAULT_TOL,
    ).with_note("exact conjugation"));
    certificates.push(BoundCertificate::judge(
        Claim::HadamardSum,
        &sum_params(2.0),
        remainder_norm,
        tail_allowance,
        BoundKind::Plain,
        DEFAULT_TOL,
    ).with_note("remainder within geometric tail"));

    Ok(HadamardReport {
        s,
        s_x,
        h_x_norm,
        term_norms,
        term_bounds,
        tail_ratio,
        tail_allowance,
        partial_sum_norm,
        exact_norm,
        remainder_norm,
        sum_bound,
        certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{derive_constants, Interaction, Lattice, RegionSplit};
    use crate::linalg::{kron, pauli_x, pauli_z};
    use crate::truncation::DecomposedHamiltonian;

    /// Transverse-field Ising chain: the bond and field terms do not commute.
    fn tfim(n: usize) -> DecomposedHamiltonian {
        let lat = Lattice::chain(n, 2).unwrap();
        let zz = kron(pauli_z().as_ref(), pauli_z().as_ref());
        let mut terms: Vec<(Vec<usize>, Mat<C64>)> = (0..n - 1).map(|i| (vec![i, i + 1], linalg::scaled(zz.as_ref(), -1.0))).collect();
        terms.extend((0..n).map(|i| (vec![i], linalg::scaled(pauli_x().as_ref(), -0.7))));
        let int = Interaction::new(&lat, terms).unwrap();
        let c = derive_constants(&int, &lat).unwrap();
        let split = RegionSplit::minimal(&lat, lat.chain_sites(1..=(n as i64 / 2)), c.range_r).unwrap();
        DecomposedHamiltonian::new(lat, int, split).unwrap()
    }

    #[test]
    fn zero_time_returns_the_term() {
        let h = tfim(5);
        let spec = spectral::eig(h.full()).unwrap();
        let c = h.constants();
        let x = h.split().boundary().len();
        let s_x = 1.0 / (2.0 * c.strength_j * (c.locality_n + x) as f64);
        let r = hadamard_series_check(h.boundary(), x, h.full(), &spec, c.strength_j, c.locality_n, 0.0, s_x, 3).unwrap();
        assert!((r.partial_sum_norm - r.h_x_norm).abs() < 1e-12);
        assert!((r.exact_norm - r.h_x_norm).abs() < 1e-10);
        assert_eq!(r.sum_bound, r.h_x_norm);
        assert!(r.term_norms[1..].iter().all(|&t| t == 0.0));
    }

    #[test]
    fn first_commutator_bound() {
        let h = tfim(6);
        let spec = spectral::eig(h.full()).unwrap();
        let c = h.constants();
        let x = h.split().boundary().len();
        let s_x = 1.0 / (2.0 * c.strength_j * (c.locality_n + x) as f64);
        let s = 0.3 * s_x;
        let r = hadamard_series_check(h.boundary(), x, h.full(), &spec, c.strength_j, c.locality_n, s, s_x, 1).unwrap();
        let direct = 2.0 * c.strength_j * s * (c.locality_n + x) as f64 * r.h_x_norm;
        assert!((r.term_bounds[1] - direct).abs() <= 1e-12 * direct);
        assert!(r.term_norms[1] > 0.0);
        assert!(r.term_norms[1] <= direct);
    }

    #[test]
    fn half_radius_series_passes() {
        let h = tfim(7);
        let c = h.constants();
        let x = h.split().boundary().len();
        let s_x = 1.0 / (2.0 * c.strength_j * (c.locality_n + x) as f64);
        for (gen, label) in [(h.full(), "full"), (h.env(), "outside")] {
            let spec = spectral::eig(gen).unwrap();
            let r = hadamard_series_check(h.boundary(), x, gen, &spec, c.strength_j, c.locality_n, s_x / 2.0, s_x, 20).unwrap();
            assert!(r.certificates.iter().all(|c| c.passed()), "{label}");
            assert!(r.tail_ratio <= 0.5 + 1e-12, "{}", r.tail_ratio);
        }
    }

    #[test]
    fn radius_is_enforced() {
        let h = tfim(4);
        let spec = spectral::eig(h.full()).unwrap();
        let r = hadamard_series_check(h.boundary(), 2, h.full(), &spec, 1.0, 3, 0.2, 0.1, 5);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
