//! Ferromagnetic Ising chain on `2N` sites, cut between `N` and `N+1`.
//!
//! With `h_j = I - σ^Z_j σ^Z_{j+1}` the operator-norm quantity
//! `‖(H - H̄) E^{H̄}[0, M]‖` grows like `4N - 4 - M`: the alternating
//! product state `χ ⊗ χ` has environment energy `4N - 4`, is annihilated by
//! the cut bond and is therefore an eigenvector of `H̄` with eigenvalue `M`.
//! A volume-independent constant is eventually crossed.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::certify::{BoundCertificate, BoundKind, Claim};
use crate::error::{Error, Result};
use crate::lattice::{Interaction, InteractionConstants, Lattice, RegionSplit};
use crate::linalg::{self, C64};
use crate::operator::HermitianOperator;
use crate::product_state::{product_state_apply, ProductStateAction};
use crate::spectral::{self, Interval};
use crate::truncation::Prepared;

/// `I - σ^Z ⊗ σ^Z = diag(0, 2, 2, 0)`.
pub fn bond() -> Mat<C64> {
    let z = linalg::pauli_z();
    let zz = linalg::kron(z.as_ref(), z.as_ref());
    Mat::from_fn(4, 4, |i, j| if i == j { linalg::ONE - zz[(i, j)] } else { -zz[(i, j)] })
}

#[derive(Clone, Debug)]
pub struct IsingInstance {
    half_length: usize,
    cutoff: f64,
    lattice: Lattice,
    interaction: Interaction,
    split: RegionSplit,
}

/// `N` odd and at least 3, `M > ‖h_N‖ = 2`.
pub fn build_instance(half_length: usize, cutoff: f64) -> Result<IsingInstance> {
    check_half_length(half_length)?;
    if !(cutoff > 2.0) {
        return Err(Error::CutoffTooSmall { cutoff, boundary_norm: 2.0 });
    }
    let n = 2 * half_length;
    let lattice = Lattice::chain(n, 2)?;
    let terms = (0..n - 1).map(|i| (vec![i, i + 1], bond())).collect();
    let interaction = Interaction::new(&lattice, terms)?;
    let split = RegionSplit::minimal(&lattice, lattice.chain_sites(1..=half_length as i64), 1)?;
    Ok(IsingInstance { half_length, cutoff, lattice, interaction, split })
}

fn check_half_length(n: usize) -> Result<()> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Precondition(format!("N must be odd and at least 3, got {n}")));
    }
    Ok(())
}

impl IsingInstance {
    pub fn half_length(&self) -> usize {
        self.half_length
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn interaction(&self) -> &Interaction {
        &self.interaction
    }

    pub fn split(&self) -> &RegionSplit {
        &self.split
    }

    /// Normalized dense decomposition with spectra (within the dense cap).
    pub fn prepare(&self) -> Result<Prepared> {
        Prepared::new(self.lattice.clone(), self.interaction.clone(), self.split.clone())
    }
}

/// Alternating spins `|↑↓↑…↓↑⟩` on `N` sites, twice; sites `N` and `N+1`
/// are both up. `true` is up.
pub fn witness_spins(half_length: usize) -> Vec<bool> {
    let chi: Vec<bool> = (0..half_length).map(|k| k % 2 == 0).collect();
    chi.iter().chain(chi.iter()).copied().collect()
}

fn spin_vector(up: bool) -> Vec<C64> {
    if up {
        vec![linalg::ONE, linalg::ZERO]
    } else {
        vec![linalg::ZERO, linalg::ONE]
    }
}

/// Matrix-free actions of the environment, the cut bond and the full
/// Hamiltonian on `χ ⊗ χ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessReport {
    pub env: ProductStateAction,
    pub boundary: ProductStateAction,
    pub full: ProductStateAction,
}

pub fn alternating_witness(inst: &IsingInstance) -> Result<WitnessReport> {
    let state: Vec<Vec<C64>> = witness_spins(inst.half_length).into_iter().map(spin_vector).collect();
    let dec = crate::lattice::decompose(&inst.interaction, &inst.split)?;
    let pick = |idx: Vec<usize>| idx.into_iter().map(|i| inst.interaction.term(i)).collect::<Vec<_>>();
    Ok(WitnessReport {
        env: product_state_apply(pick(dec.environment()), &inst.lattice, &state)?,
        boundary: product_state_apply(pick(dec.boundary.clone()), &inst.lattice, &state)?,
        full: product_state_apply(inst.interaction.terms(), &inst.lattice, &state)?,
    })
}

/// Exact `(environment, boundary)` energies of a computational basis state:
/// each bond contributes 2 when its spins differ.
pub fn diagonal_energies(spins: &[bool], half_length: usize) -> (u64, u64) {
    let mut env = 0;
    let mut boundary = 0;
    for j in 0..spins.len() - 1 {
        if spins[j] != spins[j + 1] {
            if j + 1 == half_length {
                boundary += 2;
            } else {
                env += 2;
            }
        }
    }
    (env, boundary)
}

/// Exact environment energy of the witness, `4N - 4`, by counting bonds.
pub fn witness_env_energy(half_length: usize) -> u64 {
    diagonal_energies(&witness_spins(half_length), half_length).0
}

/// `λ_AKL = 1 / (2𝔧N)`.
pub fn akl_lambda(constants: &InteractionConstants) -> f64 {
    1.0 / (2.0 * constants.strength_j * constants.locality_n as f64)
}

/// `(6 / λ_AKL^{3/2}) e^{66 λ_AKL}`.
pub fn akl_rhs(constants: &InteractionConstants) -> f64 {
    let l = akl_lambda(constants);
    6.0 / l.powf(1.5) * (66.0 * l).exp()
}

/// Constants of every Ising instance.
pub fn ising_constants() -> InteractionConstants {
    InteractionConstants { range_r: 1, strength_j: 4.0, locality_n: 3 }
}

/// Smallest odd `N ≥ 3` with `4N - 4 - M > threshold`.
pub fn crossing_half_length(cutoff: f64, threshold: f64) -> usize {
    // 4N > threshold + M + 4, then round up to the next odd integer.
    let mut n = ((threshold + cutoff + 4.0) / 4.0).floor().max(1.0) as usize;
    while !(4.0 * n as f64 - 4.0 - cutoff > threshold) || n % 2 == 0 || n < 3 {
        n += 1;
    }
    n
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormMethod {
    /// General dense engine: eigendecomposition of `H̄`.
    Dense,
    /// Exhaustive scan of the computational basis (`H` is diagonal).
    Diagonal,
    /// Witness lower bound from exact integer arithmetic.
    Witness,
}

impl NormMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            NormMethod::Dense => "dense",
            NormMethod::Diagonal => "diagonal",
            NormMethod::Witness => "witness",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub half_length: usize,
    /// `4N - 4 - M`.
    pub lower_bound: f64,
    pub measured_norm: f64,
    pub method: NormMethod,
    pub akl_rhs: f64,
    pub crossed: bool,
}

/// Dense `‖(H - H̄) E^{H̄}[0, M]‖` and the witness residual
/// `‖(H - H̄)ψ - (4N - 4 - M)ψ‖`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DenseMeasurement {
    pub norm: f64,
    pub witness_residual: f64,
    /// `‖H̄ψ - Mψ‖`.
    pub eigen_residual: f64,
}

pub fn dense_norm(inst: &IsingInstance) -> Result<DenseMeasurement> {
    let prep = inst.prepare()?;
    let t = prep.truncate(inst.cutoff)?;
    let hb = spectral::eig(&t.h_bar)?;
    let p = spectral::projector(&hb, Interval::closed(0.0, inst.cutoff));
    let diff = prep.ham.full().sub(&t.h_bar)?;
    let leak = diff.matrix() * p.basis();
    let norm = linalg::opnorm(leak.as_ref());

    let state: Vec<Vec<C64>> = witness_spins(inst.half_length).into_iter().map(spin_vector).collect();
    let psi = crate::operator::product_vector(&state);
    let target = witness_env_energy(inst.half_length) as f64 - inst.cutoff;
    let r = diff.apply(&psi);
    let witness_residual = linalg::vec_norm(&r.iter().zip(&psi).map(|(a, b)| a - b * target).collect::<Vec<_>>());
    let hbpsi = t.h_bar.apply(&psi);
    let eigen_residual =
        linalg::vec_norm(&hbpsi.iter().zip(&psi).map(|(a, b)| a - b * inst.cutoff).collect::<Vec<_>>());
    Ok(DenseMeasurement { norm, witness_residual, eigen_residual })
}

/// `‖(H - H̄) E^{H̄}[0, M]‖` by scanning all `2^{2N}` computational states:
/// every operator involved is diagonal, so the norm is
/// `max { (env - M)_+ : boundary + min(env, M) ∈ [0, M] }`.
pub fn diagonal_norm(inst: &IsingInstance) -> Result<f64> {
    let n = 2 * inst.half_length;
    if n > 24 {
        return Err(Error::DenseCapExceeded { dim: 1usize << n.min(63), cap: 1 << 24 });
    }
    let m = inst.cutoff;
    let mut best = 0.0f64;
    let mut spins = vec![false; n];
    for config in 0u64..(1u64 << n) {
        for (k, s) in spins.iter_mut().enumerate() {
            // Site k is the k-th most significant bit.
            *s = (config >> (n - 1 - k)) & 1 == 0;
        }
        let (env, boundary) = diagonal_energies(&spins, inst.half_length);
        let h_bar = boundary as f64 + (env as f64).min(m);
        if (0.0..=m).contains(&h_bar) {
            best = best.max(env as f64 - m);
        }
    }
    Ok(best)
}

/// Rows for each odd `N` with `4N - 4 > M`. With `cross_check`, instances
/// within the dense cap use the dense engine and `2N ≤ 20` uses the
/// exhaustive diagonal scan; all others use the witness.
pub fn divergence_scan(half_lengths: &[usize], cutoff: f64, cross_check: bool) -> Result<Vec<DivergenceRow>> {
    let rhs = akl_rhs(&ising_constants());
    let mut rows = Vec::with_capacity(half_lengths.len());
    for &n in half_lengths {
        check_half_length(n)?;
        let env = witness_env_energy(n);
        if !(env as f64 > cutoff) {
            return Err(Error::Precondition(format!("need 4N - 4 > M, got N = {n}, M = {cutoff}")));
        }
        let lower_bound = env as f64 - cutoff;
        let (measured_norm, method) = if cross_check && 2 * n <= 12 {
            (dense_norm(&build_instance(n, cutoff)?)?.norm, NormMethod::Dense)
        } else if cross_check && 2 * n <= 20 {
            (diagonal_norm(&build_instance(n, cutoff)?)?, NormMethod::Diagonal)
        } else {
            (lower_bound, NormMethod::Witness)
        };
        rows.push(DivergenceRow { half_length: n, lower_bound, measured_norm, method, akl_rhs: rhs, crossed: lower_bound > rhs });
    }
    Ok(rows)
}

/// Odd `N` from 5 to `n_max` inclusive.
pub fn odd_range(n_max: usize) -> Vec<usize> {
    (5..=n_max).step_by(2).collect()
}

impl DivergenceRow {
    pub fn certificate(&self, cutoff: f64) -> BoundCertificate {
        BoundCertificate::judge(
            Claim::IsingNorm,
            &[("N", self.half_length as f64), ("M", cutoff)],
            self.lower_bound,
            self.measured_norm,
            BoundKind::Plain,
            crate::certify::DEFAULT_TOL,
        )
        .with_note(self.method.as_str())
    }
}

/// `(x, y, series)` triples: lower bound, measured norm and the constant line.
pub fn plot_data(rows: &[DivergenceRow]) -> Vec<(f64, f64, &'static str)> {
    let mut out = Vec::with_capacity(3 * rows.len());
    for r in rows {
        let x = r.half_length as f64;
        out.push((x, r.lower_bound, "lower_bound"));
        out.push((x, r.measured_norm, "measured_norm"));
        out.push((x, r.akl_rhs, "akl_rhs"));
    }
    out
}

/// Dense check that `Ω₊ = |↑…↑⟩` is annihilated by `H`.
pub fn aligned_state_residual(inst: &IsingInstance) -> Result<f64> {
    let h = crate::operator::assemble(inst.interaction.terms(), &inst.lattice)?;
    let mut psi = vec![linalg::ZERO; h.dim()];
    psi[0] = linalg::ONE;
    Ok(linalg::vec_norm(&h.apply(&psi)))
}

/// The cut bond as a dense operator.
pub fn boundary_operator(inst: &IsingInstance) -> Result<HermitianOperator> {
    let dec = crate::lattice::decompose(&inst.interaction, &inst.split)?;
    crate::operator::assemble(dec.boundary.iter().map(|&i| inst.interaction.term(i)), &inst.lattice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::derive_constants;

    #[test]
    fn instance_shape() {
        let inst = build_instance(3, 10.0).unwrap();
        assert_eq!(inst.interaction().len(), 5);
        assert_eq!(inst.lattice().len(), 6);
        let c = derive_constants(inst.interaction(), inst.lattice()).unwrap();
        assert_eq!(c, ising_constants());
        let dec = crate::lattice::decompose(inst.interaction(), inst.split()).unwrap();
        assert_eq!(dec.boundary, vec![2]);
        assert_eq!(inst.split().boundary().iter().copied().collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn instance_preconditions() {
        assert!(build_instance(4, 10.0).is_err());
        assert!(build_instance(1, 10.0).is_err());
        assert!(matches!(build_instance(5, 2.0), Err(Error::CutoffTooSmall { .. })));
    }

    #[test]
    fn bond_spectrum() {
        let b = HermitianOperator::new(bond()).unwrap();
        assert_eq!(b.eigenvalues().unwrap(), vec![0.0, 0.0, 2.0, 2.0]);
        assert_eq!(b.norm().unwrap(), 2.0);
    }

    #[test]
    fn aligned_state_is_a_zero_mode() {
        assert_eq!(aligned_state_residual(&build_instance(3, 10.0).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn witness_actions() {
        for n in [3usize, 5, 7, 101] {
            let r = alternating_witness(&build_instance(n, 10.0).unwrap()).unwrap();
            let want = (4 * n - 4) as f64;
            assert!(r.env.is_eigen && r.boundary.is_eigen && r.full.is_eigen);
            assert_eq!(r.env.eigenvalue, want);
            assert_eq!(r.boundary.eigenvalue, 0.0);
            assert_eq!(r.full.eigenvalue, want);
            assert_eq!(r.env.residual, 0.0);
        }
    }

    #[test]
    fn witness_matches_six_site_dense_oracle() {
        let inst = build_instance(3, 5.0).unwrap();
        let prep = inst.prepare().unwrap();
        let state: Vec<Vec<C64>> = witness_spins(3).into_iter().map(spin_vector).collect();
        let psi = crate::operator::product_vector(&state);
        let e = prep.ham.env().apply(&psi);
        let r: Vec<C64> = e.iter().zip(&psi).map(|(a, b)| a - b * 8.0).collect();
        assert!(linalg::vec_norm(&r) < 1e-12);
    }

    #[test]
    fn boundary_null_for_large_odd_n() {
        for n in (3..=10_001).step_by(2) {
            let spins = witness_spins(n);
            assert!(spins[n - 1] && spins[n]);
            let (env, boundary) = diagonal_energies(&spins, n);
            assert_eq!(boundary, 0);
            assert_eq!(env, 4 * n as u64 - 4);
        }
    }

    #[test]
    fn akl_constant() {
        let c = ising_constants();
        assert_eq!(akl_lambda(&c), 1.0 / 24.0);
        // 6 · 24^{3/2} · e^{11/4} in 40-digit arithmetic.
        let want = 11_035.142_308_930_183_213_481_371_288_864_827;
        assert!((akl_rhs(&c) - want).abs() <= 1e-11 * want);
    }

    #[test]
    fn crossing_point() {
        let rhs = akl_rhs(&ising_constants());
        assert_eq!(crossing_half_length(10.0, rhs), 2763);
        assert!(4.0 * 2761.0 - 14.0 <= rhs);
    }

    #[test]
    fn scan_rejects_bad_rows() {
        assert!(divergence_scan(&[5], 16.0, false).is_err());
        assert!(divergence_scan(&[6], 10.0, false).is_err());
    }

    #[test]
    fn diagonal_path_matches_dense_engine_at_n5() {
        let inst = build_instance(5, 10.0).unwrap();
        let dense = dense_norm(&inst).unwrap();
        let diag = diagonal_norm(&inst).unwrap();
        assert!((dense.norm - diag).abs() < 1e-9);
        assert!(dense.witness_residual <= 1e-10);
        assert!(dense.eigen_residual <= 1e-10);
    }

    #[test]
    fn scan_rows() {
        let rows = divergence_scan(&odd_range(101), 10.0, false).unwrap();
        assert_eq!(rows.len(), (101 - 5) / 2 + 1);
        assert!(rows.iter().all(|r| !r.crossed));
        for w in rows.windows(2) {
            assert_eq!(w[1].lower_bound - w[0].lower_bound, 8.0);
        }
        assert_eq!(plot_data(&rows).len(), 3 * rows.len());
    }
}
