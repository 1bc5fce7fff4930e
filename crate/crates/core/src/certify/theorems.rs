//! Spectral-overlap and eigenvalue-comparison certificates for `H` and `H̄`.

use crate::error::{Error, Result};
use crate::spectral::{Interval, SpectralData, SpectralOverlap};

use super::{BoundCertificate, BoundKind, Claim, Constants, Status, DEFAULT_TOL};

/// Absolute tolerance of `ε̄_j ≤ ε_j`.
pub const SANDWICH_UPPER_TOL: f64 = 1e-9;
/// Absolute tolerance of `ε_j - 2δ_j ≤ ε̄_j`.
pub const SANDWICH_LOWER_TOL: f64 = 1e-8;

/// Spectra of `H` (ground energy 0) and `H̄` with their eigenbasis overlap.
pub struct TheoremContext<'a> {
    pub h: &'a SpectralData,
    pub h_bar: &'a SpectralData,
    pub constants: Constants,
    gram: SpectralOverlap,
}

impl<'a> TheoremContext<'a> {
    pub fn new(h: &'a SpectralData, h_bar: &'a SpectralData, constants: Constants) -> Result<Self> {
        Ok(Self { h, h_bar, constants, gram: SpectralOverlap::new(h, h_bar)? })
    }

    /// `‖(I - E^H(keep)) E^{H̄}(window)‖`.
    pub fn leakage(&self, keep: &Interval, window: &Interval) -> f64 {
        self.gram.block_norm(&self.h.select_complement(keep), &self.h_bar.select(window))
    }

    fn endpoint_note(&self, keep: &Interval, window: &Interval) -> String {
        let a = self.h.endpoint_hits(keep).len();
        let b = self.h_bar.endpoint_hits(window).len();
        if a + b == 0 {
            String::new()
        } else {
            format!("endpoint ties: {a} of H, {b} of H_bar")
        }
    }
}

/// `‖(I - E^H(-∞,q)) E^{H̄}(-∞,p]‖ ≤ (p + 2b + δ(p,q)) / (q + 2b)` for `q > p ≥ -2b`.
pub fn overlap_i(ctx: &TheoremContext<'_>, p: f64, q: f64) -> Result<BoundCertificate> {
    let b = ctx.constants.boundary_norm;
    if !(q > p && p >= -2.0 * b) {
        return Err(Error::Precondition(format!("need q > p >= -2b, got p = {p}, q = {q}, b = {b}")));
    }
    let keep = Interval::below(q);
    let window = Interval::at_most(p);
    let lhs = ctx.leakage(&keep, &window);
    let rhs = ctx.constants.overlap_low_rhs(p, q);
    let params = [("M", ctx.constants.cutoff), ("p", p), ("q", q), ("delta_pq", ctx.constants.delta_pq(p, q))];
    Ok(BoundCertificate::judge(Claim::OverlapLow, &params, lhs, rhs, BoundKind::ProjectorNorm, DEFAULT_TOL)
        .with_note(ctx.endpoint_note(&keep, &window)))
}

/// `‖(I - E^H(-δ,δ)) E^{H̄}[-ε,ε]‖ ≤ (ε + η(ε,δ)) / δ` for `δ > ε ≥ 0`.
pub fn overlap_ii(ctx: &TheoremContext<'_>, eps: f64, delt: f64) -> Result<BoundCertificate> {
    window_certificate(ctx, Claim::OverlapWindow, eps, delt, 0.0)
}

/// The window bound centred at `ξ`:
/// `‖(I - E^H(ξ-δ,ξ+δ)) E^{H̄}[ξ-ε,ξ+ε]‖ ≤ (ε + 2√2(M+b+|ξ|+δ) e^{-λ(M-2ε-2|ξ|-10b)}) / δ`.
pub fn overlap_shifted(ctx: &TheoremContext<'_>, eps: f64, delt: f64, xi: f64) -> Result<BoundCertificate> {
    window_certificate(ctx, Claim::OverlapShifted, eps, delt, xi)
}

fn window_certificate(ctx: &TheoremContext<'_>, claim: Claim, eps: f64, delt: f64, xi: f64) -> Result<BoundCertificate> {
    if !(delt > eps && eps >= 0.0) {
        return Err(Error::Precondition(format!("need delta > eps >= 0, got eps = {eps}, delta = {delt}")));
    }
    let keep = Interval::open(xi - delt, xi + delt);
    let window = Interval::closed(xi - eps, xi + eps);
    let lhs = ctx.leakage(&keep, &window);
    let rhs = ctx.constants.overlap_shifted_rhs(eps, delt, xi);
    let mut params = vec![("M", ctx.constants.cutoff), ("eps", eps), ("delta", delt)];
    if claim == Claim::OverlapShifted {
        params.push(("xi", xi));
    }
    Ok(BoundCertificate::judge(claim, &params, lhs, rhs, BoundKind::ProjectorNorm, DEFAULT_TOL)
        .with_note(ctx.endpoint_note(&keep, &window)))
}

/// `ε_j - 2δ_j ≤ ε̄_j ≤ ε_j` for `j < j_max`; two certificates per `j`.
///
/// `gate = δ(ε_j - 2δ_j, ε_j)` is recorded for information; the finite
/// statement needs no gate.
pub fn sandwich(ctx: &TheoremContext<'_>, j_max: usize) -> Vec<BoundCertificate> {
    let c = &ctx.constants;
    let n = j_max.min(ctx.h.dim()).min(ctx.h_bar.dim());
    let mut out = Vec::with_capacity(2 * n);
    for j in 0..n {
        let e = ctx.h.eigenvalues()[j];
        let e_bar = ctx.h_bar.eigenvalues()[j];
        let dj = c.delta_j(e);
        let gate = c.delta_pq(e - 2.0 * dj, e);
        let params = [("M", c.cutoff), ("j", j as f64), ("eps_j", e), ("delta_j", dj), ("gate", gate)];
        out.push(BoundCertificate::judge_abs(Claim::SandwichUpper, &params, e_bar, e, BoundKind::Plain, SANDWICH_UPPER_TOL));
        out.push(BoundCertificate::judge_abs(
            Claim::SandwichLower,
            &params,
            e - 2.0 * dj,
            e_bar,
            BoundKind::Plain,
            SANDWICH_LOWER_TOL,
        ));
    }
    out
}

/// `|⟨ψ_0, ψ̄_0⟩|² ≥ 1 - ((2δ_0 + η)/Δ)²` with `η = η(2δ_0, Δ)`, when
/// `Δ = ε_1 > 2δ_0 + η`. Closed gates and degenerate ground spaces are
/// SKIPPED.
pub fn ground_overlap(ctx: &TheoremContext<'_>) -> BoundCertificate {
    let c = &ctx.constants;
    if ctx.h.dim() < 2 {
        return BoundCertificate::with_status(Claim::GroundOverlap, &[("M", c.cutoff)], Status::NotApplicable, "one-dimensional space");
    }
    let gap = ctx.h.eigenvalues()[1] - ctx.h.eigenvalues()[0];
    let d0 = c.delta_j(ctx.h.eigenvalues()[0]);
    let eta = c.eta(2.0 * d0, gap);
    let params = [("M", c.cutoff), ("Delta", gap), ("delta_0", d0), ("eta", eta)];
    if gap <= ctx.h.tie_tolerance() {
        return BoundCertificate::with_status(Claim::GroundOverlap, &params, Status::Skipped, "degenerate ground space");
    }
    if !(gap > 2.0 * d0 + eta) {
        return BoundCertificate::with_status(
            Claim::GroundOverlap,
            &params,
            Status::Skipped,
            format!("gate closed: Delta = {gap} <= 2 delta_0 + eta = {}", 2.0 * d0 + eta),
        );
    }
    let bound = 1.0 - ((2.0 * d0 + eta) / gap).powi(2);
    let overlap = ctx.gram.gram()[(0, 0)].norm_sqr();
    BoundCertificate::judge(Claim::GroundOverlap, &params, bound, overlap, BoundKind::UnitLowerBound, DEFAULT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Interaction, Lattice, RegionSplit};
    use crate::linalg::random_hermitian;
    use crate::spectral::eig;
    use crate::truncation::Prepared;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    struct Fixture {
        prep: Prepared,
        constants: Constants,
    }

    fn fixture(seed: u64) -> Fixture {
        let n = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lat = Lattice::chain(n, 2).unwrap();
        let terms = (0..n - 1).map(|i| (vec![i, i + 1], random_hermitian(&mut rng, 4))).collect();
        let int = Interaction::new(&lat, terms).unwrap();
        let split = RegionSplit::minimal(&lat, lat.chain_sites(1..=3), 1).unwrap();
        let prep = Prepared::new(lat, int, split).unwrap();
        let constants = Constants::new(
            prep.ham.constants(),
            prep.ham.split().boundary().len(),
            prep.ham.boundary_norm(),
            0.0,
        )
        .unwrap();
        Fixture { prep, constants }
    }

    fn spectra(f: &Fixture, m: f64) -> (SpectralData, Constants) {
        let t = f.prep.truncate(m).unwrap();
        (eig(&t.h_bar).unwrap(), f.constants.with_cutoff(m))
    }

    #[test]
    fn identity_truncation_saturates() {
        let f = fixture(1);
        let m = f.prep.env.max() + 1.0;
        let (hb, c) = spectra(&f, m);
        let ctx = TheoremContext::new(&f.prep.h, &hb, c).unwrap();
        for cert in sandwich(&ctx, 64) {
            assert!(cert.passed());
            if cert.claim == Claim::SandwichUpper {
                assert!((cert.lhs - cert.rhs).abs() < 1e-10);
            }
        }
        let g = ground_overlap(&ctx);
        if g.status == Status::Pass || g.status == Status::Vacuous {
            assert!((g.rhs - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn empty_windows_give_zero() {
        let f = fixture(2);
        let b = f.prep.ham.boundary_norm();
        let (hb, c) = spectra(&f, b + 1.0);
        let ctx = TheoremContext::new(&f.prep.h, &hb, c).unwrap();
        let p = -2.0 * b;
        if hb.min() > p + hb.tie_tolerance() {
            assert_eq!(overlap_i(&ctx, p, p + 1.0).unwrap().lhs, 0.0);
        }
        let top = f.prep.h.max() + 1.0;
        assert_eq!(overlap_i(&ctx, 0.0, top).unwrap().lhs, 0.0);
    }

    #[test]
    fn preconditions_are_enforced() {
        let f = fixture(3);
        let (hb, c) = spectra(&f, f.prep.ham.boundary_norm() + 1.0);
        let ctx = TheoremContext::new(&f.prep.h, &hb, c).unwrap();
        assert!(overlap_i(&ctx, 1.0, 1.0).is_err());
        assert!(overlap_i(&ctx, -100.0, 1.0).is_err());
        assert!(overlap_ii(&ctx, 1.0, 0.5).is_err());
        assert!(overlap_ii(&ctx, -0.1, 0.5).is_err());
    }

    #[test]
    fn shift_covariance() {
        let f = fixture(4);
        let b = f.prep.ham.boundary_norm();
        for frac in [0.2, 0.6] {
            let m = b + 0.5 + frac * (f.prep.env.max() - b);
            let (hb, c) = spectra(&f, m);
            let ctx = TheoremContext::new(&f.prep.h, &hb, c).unwrap();
            for (p, q) in [(0.0, 0.5), (0.3, 2.0), (1.0, 4.0)] {
                let a = overlap_i(&ctx, p, q).unwrap();
                let s = overlap_shifted(&ctx, p + 2.0 * b, q + 2.0 * b, -2.0 * b).unwrap();
                assert!((a.lhs - s.lhs).abs() <= 1e-9, "{} vs {}", a.lhs, s.lhs);
                assert!((a.rhs - s.rhs).abs() <= 1e-9 * a.rhs);
            }
        }
    }

    #[test]
    fn certificates_hold_on_a_small_grid() {
        for seed in 5..8 {
            let f = fixture(seed);
            let b = f.prep.ham.boundary_norm();
            for frac in [0.1, 0.5, 0.9] {
                let m = b + 0.5 + frac * (f.prep.env.max() - b);
                let (hb, c) = spectra(&f, m);
                let ctx = TheoremContext::new(&f.prep.h, &hb, c).unwrap();
                for p in [0.0, 0.5, 1.5] {
                    for dq in [0.25, 1.0, 3.0] {
                        assert!(overlap_i(&ctx, p, p + dq).unwrap().passed());
                        assert!(overlap_ii(&ctx, p, p + dq).unwrap().passed());
                        for xi in [-1.0, 0.7, 2.0] {
                            assert!(overlap_shifted(&ctx, p, p + dq, xi).unwrap().passed());
                        }
                    }
                }
                assert!(sandwich(&ctx, usize::MAX).iter().all(|c| c.passed()));
                assert!(ground_overlap(&ctx).passed());
            }
        }
    }
}
