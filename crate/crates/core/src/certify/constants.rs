use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::InteractionConstants;

/// Bound constants of one truncation: `λ = 1 / (4𝔧(N + |∂L|))`,
/// `b = ‖H_{∂L}‖`, the cutoff `M` and `S_X = 2λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub lambda: f64,
    pub boundary_norm: f64,
    pub cutoff: f64,
    pub s_x: f64,
}

impl Constants {
    pub fn new(interaction: &InteractionConstants, boundary_size: usize, boundary_norm: f64, cutoff: f64) -> Result<Self> {
        let denom = 4.0 * interaction.strength_j * (interaction.locality_n + boundary_size) as f64;
        if !(denom > 0.0) {
            return Err(Error::Precondition(format!("λ undefined: 4𝔧(N + |∂L|) = {denom}")));
        }
        Ok(Self::from_lambda(1.0 / denom, boundary_norm, cutoff))
    }

    pub fn from_lambda(lambda: f64, boundary_norm: f64, cutoff: f64) -> Self {
        Self { lambda, boundary_norm, cutoff, s_x: 2.0 * lambda }
    }

    pub fn with_cutoff(self, cutoff: f64) -> Self {
        Self { cutoff, ..self }
    }

    /// `δ(p,q) = 2√2 (M + 5b + q) e^{-λ(M - 2p - 18b)}`.
    pub fn delta_pq(&self, p: f64, q: f64) -> f64 {
        let (m, b) = (self.cutoff, self.boundary_norm);
        2.0 * std::f64::consts::SQRT_2 * (m + 5.0 * b + q) * (-self.lambda * (m - 2.0 * p - 18.0 * b)).exp()
    }

    /// `δ_j = δ(ε_j, ε_j)`.
    pub fn delta_j(&self, eps_j: f64) -> f64 {
        self.delta_pq(eps_j, eps_j)
    }

    /// `η(ε,δ) = 2√2 (M + b + δ) e^{-λ(M - 2ε - 10b)}`.
    pub fn eta(&self, eps: f64, delt: f64) -> f64 {
        self.eta_shifted(eps, delt, 0.0)
    }

    /// `2√2 (M + b + |ξ| + δ) e^{-λ(M - 2ε - 2|ξ| - 10b)}`.
    pub fn eta_shifted(&self, eps: f64, delt: f64, xi: f64) -> f64 {
        let (m, b) = (self.cutoff, self.boundary_norm);
        let x = xi.abs();
        2.0 * std::f64::consts::SQRT_2 * (m + b + x + delt) * (-self.lambda * (m - 2.0 * eps - 2.0 * x - 10.0 * b)).exp()
    }

    /// Right-hand side of the low-energy overlap bound.
    pub fn overlap_low_rhs(&self, p: f64, q: f64) -> f64 {
        let b2 = 2.0 * self.boundary_norm;
        (p + b2 + self.delta_pq(p, q)) / (q + b2)
    }

    /// Right-hand side of the window bound centred at `ξ`.
    pub fn overlap_shifted_rhs(&self, eps: f64, delt: f64, xi: f64) -> f64 {
        (eps + self.eta_shifted(eps, delt, xi)) / delt
    }

    /// `2√2 e^{-λ(N - 2ε - c b)}` for the tail bounds.
    pub fn tail_rhs(&self, n_cut: f64, eps: f64, c: f64) -> f64 {
        2.0 * std::f64::consts::SQRT_2 * (-self.lambda * (n_cut - 2.0 * eps - c * self.boundary_norm)).exp()
    }

    /// `e^{-λ(M - N - c b)}` for the off-diagonal bounds.
    pub fn offdiag_factor(&self, m_cut: f64, n_cut: f64, c: f64) -> f64 {
        (-self.lambda * (m_cut - n_cut - c * self.boundary_norm)).exp()
    }
}
