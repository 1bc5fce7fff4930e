//! Energy truncation of the environment part of a decomposed Hamiltonian.
//!
//! With `env = H'_L + H'_{L^c}`, the truncated environment is
//! `min(env, M)` through the spectral decomposition of `env`, and
//! `H̄ = H_{∂L} + min(env, M)`. The clamp is continuous at `M`, so the
//! `(-M, M)` / `[M, ∞)` split in the definition is value-unambiguous;
//! eigenvalues within the tie tolerance of `M` are still reported.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, Decomposition, Interaction, InteractionConstants, Lattice, RegionSplit};
use crate::operator::{assemble_with_cap, HermitianOperator, DEFAULT_DENSE_CAP};
use crate::spectral::{self, SpectralData};

/// Relative tolerance for the structural invariants, applied to
/// `scale = max(1, ‖H‖)`.
pub const INVARIANT_TOL: f64 = 1e-8;

/// `H = H'_L + H_{∂L} + H'_{L^c}` assembled on a fixed tensor-product space.
///
/// After [`DecomposedHamiltonian::normalize`], the ground energy is zero:
/// the shift is subtracted from the environment part, leaving `H_{∂L}`
/// untouched.
#[derive(Clone, Debug)]
pub struct DecomposedHamiltonian {
    lattice: Lattice,
    interaction: Interaction,
    split: RegionSplit,
    decomposition: Decomposition,
    constants: InteractionConstants,
    boundary: HermitianOperator,
    env: HermitianOperator,
    full: HermitianOperator,
    boundary_norm: f64,
    shift: f64,
}

impl DecomposedHamiltonian {
    pub fn new(lattice: Lattice, interaction: Interaction, split: RegionSplit) -> Result<Self> {
        Self::with_cap(lattice, interaction, split, DEFAULT_DENSE_CAP)
    }

    pub fn with_cap(lattice: Lattice, interaction: Interaction, split: RegionSplit, cap: usize) -> Result<Self> {
        let constants = lattice::derive_constants(&interaction, &lattice)?;
        let decomposition = lattice::decompose(&interaction, &split)?;
        let pick = |idx: &[usize]| idx.iter().map(|&i| interaction.term(i)).collect::<Vec<_>>();
        let boundary =
            assemble_with_cap(pick(&decomposition.boundary), &lattice, cap)?.with_label("boundary");
        let env = assemble_with_cap(pick(&decomposition.environment()), &lattice, cap)?.with_label("environment");
        let full = boundary.add(&env)?.with_label("full");
        let boundary_norm = boundary.norm()?;
        Ok(Self { lattice, interaction, split, decomposition, constants, boundary, env, full, boundary_norm, shift: 0.0 })
    }

    /// Shifts so the ground energy of `H` is zero, given `ε_0` of the current `H`.
    pub fn normalize(mut self, ground_energy: f64) -> Self {
        self.env = self.env.shifted(-ground_energy).with_label("environment");
        self.full = self.full.shifted(-ground_energy).with_label("full");
        self.shift += ground_energy;
        self
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

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomposition
    }

    pub fn constants(&self) -> &InteractionConstants {
        &self.constants
    }

    /// `H_{∂L}`.
    pub fn boundary(&self) -> &HermitianOperator {
        &self.boundary
    }

    /// `H'_L + H'_{L^c}` (shifted).
    pub fn env(&self) -> &HermitianOperator {
        &self.env
    }

    /// `H` (shifted).
    pub fn full(&self) -> &HermitianOperator {
        &self.full
    }

    /// `‖H_{∂L}‖`.
    pub fn boundary_norm(&self) -> f64 {
        self.boundary_norm
    }

    /// Total energy subtracted from the environment part.
    pub fn shift(&self) -> f64 {
        self.shift
    }
}

/// A normalized decomposition with the spectra of `H` and of the environment.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub ham: DecomposedHamiltonian,
    pub h: SpectralData,
    pub env: SpectralData,
}

impl Prepared {
    /// Assembles, normalizes so `ε_0 = 0` and diagonalizes `H` and `env`.
    pub fn new(lattice: Lattice, interaction: Interaction, split: RegionSplit) -> Result<Self> {
        let ham = DecomposedHamiltonian::new(lattice, interaction, split)?;
        let h = spectral::eig(ham.full())?;
        let e0 = h.min();
        let ham = ham.normalize(e0);
        let h = h.shifted(-e0);
        let env = spectral::eig(ham.env())?;
        Ok(Self { ham, h, env })
    }

    /// `max(1, ‖H‖)`.
    pub fn scale(&self) -> f64 {
        self.h.norm().max(1.0)
    }

    pub fn truncate(&self, cutoff: f64) -> Result<TruncationResult> {
        TruncationResult::new(&self.ham, &self.env, cutoff)
    }
}

/// `min(env, M)` from the spectral data of `env`, with the spectral data of
/// the result and the indices of eigenvalues tied with `M`.
pub fn truncate_env(
    env: &SpectralData,
    cutoff: f64,
    boundary_norm: f64,
) -> Result<(HermitianOperator, SpectralData, Vec<usize>)> {
    if !(cutoff > boundary_norm) {
        return Err(Error::CutoffTooSmall { cutoff, boundary_norm });
    }
    let tau = env.tie_tolerance();
    let ties: Vec<usize> = (0..env.dim()).filter(|&k| (env.eigenvalues()[k] - cutoff).abs() <= tau).collect();
    let clamp = |x: f64| if x >= cutoff - tau { cutoff } else { x };
    let op = spectral::apply_function(env, clamp)?.with_label("truncated environment");
    Ok((op, env.map_monotone(clamp), ties))
}

/// `H̄ = H_{∂L} + truncated_env`.
pub fn build_truncated(boundary: &HermitianOperator, truncated_env: &HermitianOperator) -> Result<HermitianOperator> {
    Ok(boundary.add(truncated_env)?.with_label("truncated"))
}

#[derive(Clone, Debug)]
pub struct TruncationResult {
    pub cutoff: f64,
    pub boundary_norm: f64,
    pub truncated_env: HermitianOperator,
    pub truncated_env_spectral: SpectralData,
    pub h_bar: HermitianOperator,
    /// Environment eigen-indices within the tie tolerance of `M`.
    pub ties: Vec<usize>,
}

impl TruncationResult {
    pub fn new(ham: &DecomposedHamiltonian, env: &SpectralData, cutoff: f64) -> Result<Self> {
        let (truncated_env, truncated_env_spectral, ties) = truncate_env(env, cutoff, ham.boundary_norm())?;
        let h_bar = build_truncated(ham.boundary(), &truncated_env)?;
        Ok(Self { cutoff, boundary_norm: ham.boundary_norm(), truncated_env, truncated_env_spectral, h_bar, ties })
    }
}

/// Measured values of the structural invariants of one truncation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub cutoff: f64,
    pub scale: f64,
    /// `min σ(H - H̄)`; must be `≥ -tol`.
    pub domination_floor: f64,
    /// `‖H̄‖`; must be `≤ ‖H_{∂L}‖ + M + tol`.
    pub h_bar_norm: f64,
    pub boundary_norm: f64,
    /// `min σ(env)`; must be `≥ -‖H_{∂L}‖ - tol`.
    pub env_floor: f64,
    /// Spectrum of the truncated environment; must lie in
    /// `[-‖H_{∂L}‖ - tol, M + tol]`.
    pub truncated_env_min: f64,
    pub truncated_env_max: f64,
}

impl InvariantReport {
    pub fn tolerance(&self) -> f64 {
        INVARIANT_TOL * self.scale
    }

    pub fn domination_ok(&self) -> bool {
        self.domination_floor >= -self.tolerance()
    }

    pub fn norm_cap_ok(&self) -> bool {
        self.h_bar_norm <= self.boundary_norm + self.cutoff + self.tolerance()
    }

    pub fn env_floor_ok(&self) -> bool {
        self.env_floor >= -self.boundary_norm - self.tolerance()
    }

    pub fn truncated_range_ok(&self) -> bool {
        self.truncated_env_min >= -self.boundary_norm - self.tolerance()
            && self.truncated_env_max <= self.cutoff + self.tolerance()
    }

    pub fn holds(&self) -> bool {
        self.domination_ok() && self.norm_cap_ok() && self.env_floor_ok() && self.truncated_range_ok()
    }
}

/// Measures the invariants, given the spectrum of `H̄` (`None` diagonalizes it).
pub fn check_invariants(prep: &Prepared, result: &TruncationResult, h_bar: Option<&SpectralData>) -> Result<InvariantReport> {
    let diff = prep.ham.full().sub(&result.h_bar)?;
    let domination_floor = diff.eigenvalues()?.first().copied().unwrap_or(0.0);
    let h_bar_norm = match h_bar {
        Some(s) => s.norm(),
        None => result.h_bar.norm()?,
    };
    Ok(InvariantReport {
        cutoff: result.cutoff,
        scale: prep.scale(),
        domination_floor,
        h_bar_norm,
        boundary_norm: result.boundary_norm,
        env_floor: prep.env.min(),
        truncated_env_min: result.truncated_env_spectral.min(),
        truncated_env_max: result.truncated_env_spectral.max(),
    })
}

/// `min σ(upper - lower)`: nonnegative up to tolerance when `lower ⪯ upper`.
pub fn order_floor(lower: &HermitianOperator, upper: &HermitianOperator) -> Result<f64> {
    Ok(upper.sub(lower)?.eigenvalues()?.first().copied().unwrap_or(0.0))
}
