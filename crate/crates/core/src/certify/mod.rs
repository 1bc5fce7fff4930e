//! Certificates: one bound instantiated on concrete matrices, with the
//! measured left-hand side, the closed-form right-hand side and a status.
//!
//! Comparisons are `lhs <= rhs + tol` with `tol = 1e-8 (1 + |rhs|)` unless a
//! claim states its own tolerance; the right-hand side is never inflated.
//! Lower-bound claims are recorded with the bound as `lhs` and the measured
//! quantity as `rhs`, so the same comparison applies.

mod constants;
mod hadamard;
mod lemmas;
mod theorems;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use constants::Constants;
pub use hadamard::{hadamard_series_check, HadamardReport};
pub use lemmas::{overlap_lemma_check, tail, OffDiagProbe, OffDiagVariant, OverlapLemmaReport, TailVariant};
pub use theorems::{ground_overlap, overlap_i, overlap_ii, overlap_shifted, sandwich, TheoremContext};

/// Default comparison tolerance relative to `1 + |rhs|`.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Fail,
    /// Passed, but the bound is at least the trivial bound.
    Vacuous,
    /// The measured operator is zero by construction.
    VacuousByStructure,
    /// A hypothesis gate is closed.
    Skipped,
    NotApplicable,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Vacuous => "VACUOUS",
            Status::VacuousByStructure => "VACUOUS-BY-STRUCTURE",
            Status::Skipped => "SKIPPED",
            Status::NotApplicable => "NOT-APPLICABLE",
            Status::Error => "ERROR",
        }
    }

    /// Passing statuses for exit-code purposes.
    pub fn is_ok(self) -> bool {
        !matches!(self, Status::Fail | Status::Error)
    }

    /// A passing comparison whose bound carries information.
    pub fn is_informative(self) -> bool {
        self == Status::Pass
    }
}

impl std::str::FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_STATUSES
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown status {s:?}")))
    }
}

pub const ALL_STATUSES: [Status; 7] = [
    Status::Pass,
    Status::Fail,
    Status::Vacuous,
    Status::VacuousByStructure,
    Status::Skipped,
    Status::NotApplicable,
    Status::Error,
];

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Which bound a certificate instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Claim {
    /// `‖(I - E^H(-∞,q)) E^{H̄}(-∞,p]‖ ≤ (p + 2b + δ(p,q)) / (q + 2b)`.
    OverlapLow,
    /// `‖(I - E^H(-δ,δ)) E^{H̄}[-ε,ε]‖ ≤ (ε + η(ε,δ)) / δ`.
    OverlapWindow,
    /// The window bound centred at `ξ`.
    OverlapShifted,
    /// `ε̄_j ≤ ε_j`.
    SandwichUpper,
    /// `ε_j - 2δ_j ≤ ε̄_j`.
    SandwichLower,
    /// `|⟨ψ_0, ψ̄_0⟩|² ≥ 1 - ((2δ_0 + η)/Δ)²`.
    GroundOverlap,
    /// Windows of `H`, conjugation by `env`.
    OffDiagH,
    /// Windows of `env`, conjugation by `H`.
    OffDiagEnv,
    /// Windows of `H̄`, conjugation by the truncated environment.
    OffDiagHBar,
    /// Windows of the truncated environment, conjugation by `H̄`.
    OffDiagEnvBar,
    /// `‖(I - E^{env}(-N,N)) E^H[-ε,ε]‖ ≤ 2√2 e^{-λ(N - 2ε - 6b)}`.
    TailPlain,
    /// Truncated operators, `10b` in the exponent.
    TailTruncated,
    /// Truncated tail at `N = M` with the untruncated environment projector.
    TailAtCutoff,
    /// `‖Qψ‖ ≥ √(1 - c²)‖ψ‖` on the range of `P` when `‖(I-Q)P‖ = c < 1`.
    OverlapLemma,
    /// Term-wise bound on `(sⁿ/n!) δⁿ(H_X)`.
    HadamardTerm,
    /// `‖exp(sδ)(H_X)‖ ≤ ‖H_X‖ / (1 - |s|/S_X)`.
    HadamardSum,
    /// `‖(H - H̄) E^{H̄}[0,M]‖ ≥ 4N - 4 - M` on the Ising chain.
    IsingNorm,
    /// `Σ_{Z∈𝓘} ‖Φ(Z)‖ ≤ 8qJ(1+ℓ)^{2-α}`.
    RangeDecaySum,
    /// `‖δH‖ ≤ Σ_{Z∈𝓘} ‖Φ(Z)‖`.
    RangeDecayNorm,
    /// Spectrum of `H - δH` inside `[-‖δH‖, ‖δH‖] ∪ [Δ - ‖δH‖, ∞)`.
    GapInclusion,
    /// One eigenvalue in the low window.
    GapRank,
    /// `√(1 - |⟨Ω,Ω̃⟩|²) ≤ ‖δH‖/(Δ - ‖δH‖)`.
    GapFidelity,
    /// `‖Ω - Ω̃‖ ≤ √2 ‖δH‖/(Δ - ‖δH‖)`.
    GapDistance,
    /// `Δ̃ ≥ Δ - 2‖δH‖`.
    GapDerived,
    /// Structural invariants of one truncation.
    TruncationDomination,
    TruncationNormCap,
    TruncationEnvFloor,
    TruncationMonotone,
}

impl Claim {
    pub fn id(self) -> &'static str {
        match self {
            Claim::OverlapLow => "overlap-low",
            Claim::OverlapWindow => "overlap-window",
            Claim::OverlapShifted => "overlap-shifted",
            Claim::SandwichUpper => "sandwich-upper",
            Claim::SandwichLower => "sandwich-lower",
            Claim::GroundOverlap => "ground-overlap",
            Claim::OffDiagH => "offdiag-h",
            Claim::OffDiagEnv => "offdiag-env",
            Claim::OffDiagHBar => "offdiag-hbar",
            Claim::OffDiagEnvBar => "offdiag-envbar",
            Claim::TailPlain => "tail-plain",
            Claim::TailTruncated => "tail-truncated",
            Claim::TailAtCutoff => "tail-at-cutoff",
            Claim::OverlapLemma => "overlap-lemma",
            Claim::HadamardTerm => "hadamard-term",
            Claim::HadamardSum => "hadamard-sum",
            Claim::IsingNorm => "ising-norm",
            Claim::RangeDecaySum => "range-decay-sum",
            Claim::RangeDecayNorm => "range-decay-norm",
            Claim::GapInclusion => "gap-inclusion",
            Claim::GapRank => "gap-rank",
            Claim::GapFidelity => "gap-fidelity",
            Claim::GapDistance => "gap-distance",
            Claim::GapDerived => "gap-derived",
            Claim::TruncationDomination => "truncation-domination",
            Claim::TruncationNormCap => "truncation-norm-cap",
            Claim::TruncationEnvFloor => "truncation-env-floor",
            Claim::TruncationMonotone => "truncation-monotone",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.id())
    }
}

/// How the comparison is read when it passes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundKind {
    /// `lhs` is a norm of a product of projections, so `lhs ≤ 1` always and
    /// `rhs ≥ 1` carries no information.
    ProjectorNorm,
    /// `lhs` is a lower bound on a quantity in `[0, 1]`; `lhs ≤ 0` is vacuous.
    UnitLowerBound,
    /// `lhs ≤ trivial` always holds; `rhs ≥ trivial` is vacuous.
    Trivial(f64),
    Plain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub claim: Claim,
    pub model_id: String,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub status: Status,
    pub note: String,
    #[serde(skip)]
    kind: Option<BoundKind>,
}

impl BoundCertificate {
    /// Judges `lhs ≤ rhs + tol` with `tol = rel_tol (1 + |rhs|)`.
    pub fn judge(claim: Claim, params: &[(&str, f64)], lhs: f64, rhs: f64, kind: BoundKind, rel_tol: f64) -> Self {
        Self::judge_abs(claim, params, lhs, rhs, kind, rel_tol * (1.0 + rhs.abs()))
    }

    /// Judges `lhs ≤ rhs + tolerance` with an absolute tolerance.
    pub fn judge_abs(claim: Claim, params: &[(&str, f64)], lhs: f64, rhs: f64, kind: BoundKind, tolerance: f64) -> Self {
        Self {
            claim,
            model_id: String::new(),
            seed: None,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            lhs,
            rhs,
            tolerance,
            status: classify(lhs, rhs, kind, tolerance),
            note: String::new(),
            kind: Some(kind),
        }
    }

    /// Re-judges an evaluated certificate with `tol = rel_tol (1 + |rhs|)`.
    /// Unevaluated rows are left alone.
    pub fn retolerance(&mut self, rel_tol: f64) {
        if let Some(kind) = self.kind {
            self.tolerance = rel_tol * (1.0 + self.rhs.abs());
            self.status = classify(self.lhs, self.rhs, kind, self.tolerance);
        }
    }

    /// A certificate that was not evaluated.
    pub fn with_status(claim: Claim, params: &[(&str, f64)], status: Status, note: impl Into<String>) -> Self {
        Self {
            claim,
            model_id: String::new(),
            seed: None,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            tolerance: 0.0,
            status,
            note: note.into(),
            kind: None,
        }
    }

    pub fn for_model(mut self, model_id: impl Into<String>, seed: Option<u64>) -> Self {
        self.model_id = model_id.into();
        self.seed = seed;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    /// `rhs - lhs`.
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn passed(&self) -> bool {
        self.status.is_ok()
    }

    /// Parameters as `k=v` pairs joined by `;` in key order.
    pub fn params_string(&self) -> String {
        self.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }

    /// Canonical sort key: claim, model, seed, then parameters.
    pub fn sort_key(&self) -> (Claim, String, Option<u64>, String) {
        (self.claim, self.model_id.clone(), self.seed, self.params_string())
    }
}

fn classify(lhs: f64, rhs: f64, kind: BoundKind, tolerance: f64) -> Status {
    // NaN on either side fails the comparison.
    if !(lhs <= rhs + tolerance) {
        return Status::Fail;
    }
    match kind {
        BoundKind::ProjectorNorm if rhs >= 1.0 => Status::Vacuous,
        BoundKind::UnitLowerBound if lhs <= 0.0 => Status::Vacuous,
        BoundKind::Trivial(t) if rhs >= t => Status::Vacuous,
        _ => Status::Pass,
    }
}

/// Column order of the certificate CSV.
pub const CSV_HEADER: [&str; 9] = ["claim_id", "model_id", "seed", "params", "lhs", "rhs", "status", "margin", "note"];

/// Writes certificates as CSV rows in the given order.
pub fn write_csv<W: Write>(out: W, certs: &[BoundCertificate]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for c in certs {
        w.write_record([
            c.claim.id().to_string(),
            c.model_id.clone(),
            c.seed.map(|s| s.to_string()).unwrap_or_default(),
            c.params_string(),
            c.lhs.to_string(),
            c.rhs.to_string(),
            c.status.as_str().to_string(),
            c.margin().to_string(),
            c.note.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Counts per status.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub vacuous: usize,
    pub vacuous_by_structure: usize,
    pub skipped: usize,
    pub not_applicable: usize,
    pub error: usize,
}

impl Tally {
    pub fn of(certs: &[BoundCertificate]) -> Self {
        let mut t = Self::default();
        for c in certs {
            t.add(c.status);
        }
        t
    }

    pub fn add(&mut self, s: Status) {
        match s {
            Status::Pass => self.pass += 1,
            Status::Fail => self.fail += 1,
            Status::Vacuous => self.vacuous += 1,
            Status::VacuousByStructure => self.vacuous_by_structure += 1,
            Status::Skipped => self.skipped += 1,
            Status::NotApplicable => self.not_applicable += 1,
            Status::Error => self.error += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.pass + self.fail + self.vacuous + self.vacuous_by_structure + self.skipped + self.not_applicable + self.error
    }

    pub fn all_ok(&self) -> bool {
        self.fail == 0 && self.error == 0
    }
}
