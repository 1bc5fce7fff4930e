//! Off-diagonal decay, spectral tails and the projection-overlap lemma.

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::spectral::{self, Interval, Projector, SpectralData, SpectralOverlap};

use super::{BoundCertificate, BoundKind, Claim, Constants, Status, DEFAULT_TOL};

/// Which operator supplies the spectral windows; the conjugating operator
/// is its partner (`H` ↔ `env`, `H̄` ↔ truncated `env`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OffDiagVariant {
    H,
    Env,
    HBar,
    EnvBar,
}

impl OffDiagVariant {
    pub fn claim(self) -> Claim {
        match self {
            OffDiagVariant::H => Claim::OffDiagH,
            OffDiagVariant::Env => Claim::OffDiagEnv,
            OffDiagVariant::HBar => Claim::OffDiagHBar,
            OffDiagVariant::EnvBar => Claim::OffDiagEnvBar,
        }
    }

    /// Multiple of `b` in the exponent.
    pub fn boundary_multiple(self) -> f64 {
        match self {
            OffDiagVariant::H | OffDiagVariant::Env => 4.0,
            OffDiagVariant::HBar | OffDiagVariant::EnvBar => 8.0,
        }
    }
}

/// `‖E^W[M,∞) A E^W(-∞,N]‖ ≤ e^{-λ(M - N - c b)} ‖e^{λK} A e^{-λK}‖` for a
/// fixed observable, evaluated over many `(M, N)` pairs.
pub struct OffDiagProbe<'a> {
    variant: OffDiagVariant,
    windows: &'a SpectralData,
    a_in_basis: Mat<C64>,
    a_norm: f64,
    conjugated_norm: f64,
    constants: Constants,
}

impl<'a> OffDiagProbe<'a> {
    /// `windows` is `W`, `conjugator` is `K`.
    pub fn new(
        variant: OffDiagVariant,
        windows: &'a SpectralData,
        conjugator: &SpectralData,
        a: MatRef<'_, C64>,
        constants: Constants,
    ) -> Result<Self> {
        if windows.dim() != a.nrows() || conjugator.dim() != a.nrows() {
            return Err(Error::DimensionMismatch { left: windows.dim(), right: a.nrows() });
        }
        let conjugated_norm = spectral::conjugation_norm(conjugator, a, constants.lambda)?;
        Ok(Self {
            variant,
            windows,
            a_in_basis: windows.in_basis(a),
            a_norm: linalg::opnorm(a),
            conjugated_norm,
            constants,
        })
    }

    /// `‖e^{λK} A e^{-λK}‖`.
    pub fn conjugated_norm(&self) -> f64 {
        self.conjugated_norm
    }

    pub fn certify(&self, m_cut: f64, n_cut: f64) -> BoundCertificate {
        let rows = self.windows.select(&Interval::at_least(m_cut));
        let cols = self.windows.select(&Interval::at_most(n_cut));
        let lhs = spectral::block_norm(self.a_in_basis.as_ref(), &rows, &cols);
        let factor = self.constants.offdiag_factor(m_cut, n_cut, self.variant.boundary_multiple());
        let rhs = factor * self.conjugated_norm;
        let params = [
            ("M", self.constants.cutoff),
            ("M_cut", m_cut),
            ("N_cut", n_cut),
            ("conj_norm", self.conjugated_norm),
            ("A_norm", self.a_norm),
        ];
        BoundCertificate::judge(self.variant.claim(), &params, lhs, rhs, BoundKind::Trivial(self.a_norm), DEFAULT_TOL)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailVariant {
    /// `‖(I - E^{env}(-N,N)) E^H[-ε,ε]‖ ≤ 2√2 e^{-λ(N - 2ε - 6b)}`.
    Plain,
    /// Truncated environment and `H̄`, `10b`.
    Truncated,
    /// `N = M` with the untruncated environment projector and `H̄`.
    AtCutoff,
}

impl TailVariant {
    pub fn claim(self) -> Claim {
        match self {
            TailVariant::Plain => Claim::TailPlain,
            TailVariant::Truncated => Claim::TailTruncated,
            TailVariant::AtCutoff => Claim::TailAtCutoff,
        }
    }

    pub fn boundary_multiple(self) -> f64 {
        match self {
            TailVariant::Plain => 6.0,
            TailVariant::Truncated | TailVariant::AtCutoff => 10.0,
        }
    }
}

/// Tail certificate. `env_windows` supplies the `(-N, N)` projector, `target`
/// the `[-ε, ε]` projector, and `gram` is `U_env* U_target`.
///
/// For [`TailVariant::AtCutoff`] the value of `n_cut` is ignored and `M` is
/// used. For [`TailVariant::Truncated`] with `N > M` the complement
/// projector vanishes and the certificate is VACUOUS-BY-STRUCTURE.
pub fn tail(
    variant: TailVariant,
    env_windows: &SpectralData,
    target: &SpectralData,
    gram: &SpectralOverlap,
    eps: f64,
    n_cut: f64,
    constants: &Constants,
) -> Result<BoundCertificate> {
    let n_cut = if variant == TailVariant::AtCutoff { constants.cutoff } else { n_cut };
    if !(n_cut > 0.0 && eps >= 0.0) {
        return Err(Error::Precondition(format!("need N > 0 and eps >= 0, got N = {n_cut}, eps = {eps}")));
    }
    let rows = env_windows.select_complement(&Interval::open(-n_cut, n_cut));
    let cols = target.select(&Interval::closed(-eps, eps));
    let lhs = gram.block_norm(&rows, &cols);
    let rhs = constants.tail_rhs(n_cut, eps, variant.boundary_multiple());
    let params = [("M", constants.cutoff), ("N_cut", n_cut), ("eps", eps)];
    let mut cert = BoundCertificate::judge(variant.claim(), &params, lhs, rhs, BoundKind::ProjectorNorm, DEFAULT_TOL);
    if variant == TailVariant::Truncated && n_cut > constants.cutoff + env_windows.tie_tolerance() {
        cert.status = if rows.is_empty() { Status::VacuousByStructure } else { Status::Fail };
        cert.note = "N > M: truncated environment has no spectrum outside (-N, N)".into();
    }
    Ok(cert)
}

/// Result of checking `rank P ≤ rank Q` and `‖Qψ‖ ≥ √(1-c²)‖ψ‖` on the
/// range of `P` when `c = ‖(I - Q)P‖ < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapLemmaReport {
    pub c: f64,
    pub rank_p: usize,
    pub rank_q: usize,
    /// `c < 1`.
    pub applicable: bool,
    pub rank_ok: bool,
    /// `min_{ψ ∈ ran P, ‖ψ‖=1} ‖Qψ‖`, from the Gram route.
    pub min_gain: f64,
    /// The same minimum from an SVD.
    pub min_gain_svd: f64,
    /// `√(1 - c²)`.
    pub bound: f64,
    pub norm_ok: bool,
}

impl OverlapLemmaReport {
    pub fn certificate(&self) -> BoundCertificate {
        let params = [("c", self.c), ("rank_P", self.rank_p as f64), ("rank_Q", self.rank_q as f64)];
        if !self.applicable {
            return BoundCertificate::with_status(Claim::OverlapLemma, &params, Status::NotApplicable, "c >= 1");
        }
        let mut cert = BoundCertificate::judge_abs(
            Claim::OverlapLemma,
            &params,
            self.bound,
            self.min_gain,
            BoundKind::UnitLowerBound,
            DEFAULT_TOL,
        );
        if !self.rank_ok {
            cert.status = Status::Fail;
            cert.note = "rank(P) > rank(Q)".into();
        }
        cert
    }
}

pub fn overlap_lemma_check(p: &Projector, q: &Projector) -> OverlapLemmaReport {
    let bp = p.basis();
    let bq = q.basis();
    let (rank_p, rank_q) = (p.rank(), q.rank());
    // (I - Q) B_P = B_P - B_Q (B_Q* B_P); its norm is ‖(I - Q)P‖.
    let coeff = bq.adjoint() * bp;
    let leak = bp - bq * coeff.as_ref();
    let c = linalg::opnorm(leak.as_ref());
    // rank P > rank Q forces c = 1 exactly; rounding can leave c a few ulps below.
    let applicable = rank_p <= rank_q && c < 1.0;
    let (min_gain, min_gain_svd) = if rank_p == 0 {
        (f64::INFINITY, f64::INFINITY)
    } else if rank_q < rank_p {
        (0.0, 0.0)
    } else {
        let svd = coeff.singular_values().map(|s| s.last().copied().unwrap_or(0.0)).unwrap_or(f64::NAN);
        (linalg::min_singular_value(coeff.as_ref()), svd)
    };
    let bound = (1.0 - c * c).max(0.0).sqrt();
    OverlapLemmaReport {
        c,
        rank_p,
        rank_q,
        applicable,
        rank_ok: rank_p <= rank_q,
        min_gain,
        min_gain_svd,
        bound,
        norm_ok: min_gain >= bound - DEFAULT_TOL,
    }
}
