//! Block-wise range truncation of an algebraically decaying chain
//! interaction, the norm bound on the discarded part and the resulting
//! gap stability on finite matrices.
//!
//! Blocks are the integer intervals `[c + jℓ, c + (j+1)ℓ]` for `c ∈ {a, b}` and
//! `j = -q, …, q-1`. A term is discarded when it meets a block and leaves that
//! block's neighbourhood `[c + (j-1)ℓ, c + (j+2)ℓ]`.

use std::collections::HashMap;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certify::{BoundCertificate, BoundKind, Claim, Status, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::lattice::{Interaction, Lattice, Term};
use crate::linalg::{self, C64};
use crate::operator::{assemble_with_cap, HermitianOperator, DEFAULT_DENSE_CAP};
use crate::spectral::{self, Interval, SpectralData};

/// Whether the chain is the whole system or a window cut out of `ℤ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainOrigin {
    FiniteChain,
    /// Discarded terms must stay clear of the two end sites.
    Window,
}

/// Interaction on a contiguous chain with `J = sup_{x,y} Σ_{Z∋x,y} ‖Φ(Z)‖ (1 + d(x,y))^α`
/// (pairs with `x = y` included).
#[derive(Clone, Debug)]
pub struct DecayInteraction {
    lattice: Lattice,
    interaction: Interaction,
    alpha: f64,
    coupling_j: f64,
    origin: ChainOrigin,
}

impl DecayInteraction {
    pub fn new(lattice: Lattice, interaction: Interaction, alpha: f64, origin: ChainOrigin) -> Result<Self> {
        if !(alpha > 2.0) {
            return Err(Error::Precondition(format!("decay exponent must exceed 2, got {alpha}")));
        }
        let first = lattice.coord(0).first().copied();
        let contiguous = lattice.sites().iter().enumerate().all(|(i, c)| c.len() == 1 && Some(c[0] - i as i64) == first);
        if !contiguous {
            return Err(Error::InvalidLattice("range truncation needs a contiguous one-dimensional chain".into()));
        }
        let coupling_j = coupling_constant(&lattice, &interaction, alpha);
        Ok(Self { lattice, interaction, alpha, coupling_j, origin })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn interaction(&self) -> &Interaction {
        &self.interaction
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn coupling_j(&self) -> f64 {
        self.coupling_j
    }

    pub fn origin(&self) -> ChainOrigin {
        self.origin
    }

    fn first(&self) -> i64 {
        self.lattice.coord(0)[0]
    }

    fn last(&self) -> i64 {
        self.lattice.coord(self.lattice.len() - 1)[0]
    }
}

fn coupling_constant(lattice: &Lattice, interaction: &Interaction, alpha: f64) -> f64 {
    let mut acc: HashMap<(usize, usize), f64> = HashMap::new();
    for t in interaction.terms() {
        for &x in t.support() {
            for &y in t.support() {
                if x <= y {
                    *acc.entry((x, y)).or_default() += t.norm();
                }
            }
        }
    }
    acc.into_iter()
        .map(|((x, y), s)| s * (1.0 + lattice.distance(x, y) as f64).powf(alpha))
        .fold(0.0, f64::max)
}

/// Seeded pair interaction `Φ({x,y}) = g_{xy} (1 + |x-y|)^{-α} U_{xy}` with
/// `g_{xy} ∈ [0.5, 1]` and `U_{xy}` a random Hermitian of unit norm, for
/// `1 ≤ |x-y| ≤ max_range`, plus an optional one-site field `-h σ^X`.
pub fn decaying_pair_model(
    first: i64,
    last: i64,
    alpha: f64,
    max_range: usize,
    field: f64,
    seed: u64,
    origin: ChainOrigin,
) -> Result<DecayInteraction> {
    let lattice = Lattice::chain_between(first, last, 2)?;
    let n = lattice.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms: Vec<(Vec<usize>, Mat<C64>)> = Vec::new();
    for x in 0..n {
        for y in x + 1..n.min(x + max_range + 1) {
            let g: f64 = rng.random_range(0.5..=1.0);
            let u = linalg::random_hermitian(&mut rng, 4);
            let un = linalg::hermitian_norm(u.as_ref())?;
            let w = g / (1.0 + (y - x) as f64).powf(alpha) / un;
            terms.push((vec![x, y], linalg::scaled(u.as_ref(), w)));
        }
    }
    if field != 0.0 {
        let fx = linalg::scaled(linalg::pauli_x().as_ref(), -field);
        terms.extend((0..n).map(|x| (vec![x], fx.clone())));
    }
    let interaction = Interaction::new(&lattice, terms)?;
    DecayInteraction::new(lattice, interaction, alpha, origin)
}

/// Padding of a window around `[a, b]`: `3ℓ(q+2)` sites on each side.
pub fn window_padding(ell: i64, q: i64) -> i64 {
    3 * ell * (q + 2)
}

/// Largest pair range that keeps every discarded term away from the window
/// ends: `padding - qℓ - 1`.
pub fn window_max_range(ell: i64, q: i64) -> usize {
    (window_padding(ell, q) - q * ell - 1) as usize
}

/// Window of `ℤ` around `[a, b]` carrying a seeded decaying pair model.
pub fn decaying_window(geom: &TruncationGeometry, alpha: f64, seed: u64) -> Result<DecayInteraction> {
    let pad = window_padding(geom.ell, geom.q);
    decaying_pair_model(geom.a - pad, geom.b + pad, alpha, window_max_range(geom.ell, geom.q), 0.0, seed, ChainOrigin::Window)
}

/// `I = [a, b]`, block length `ℓ` and block count `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationGeometry {
    pub a: i64,
    pub b: i64,
    pub ell: i64,
    pub q: i64,
}

impl TruncationGeometry {
    /// Requires `ℓ, q ≥ 1` and `[a + (q+1)ℓ, b - (q+1)ℓ] ≠ ∅`.
    pub fn new(a: i64, b: i64, ell: i64, q: i64) -> Result<Self> {
        if ell < 1 || q < 1 {
            return Err(Error::InvalidGeometry(format!("need ell >= 1 and q >= 1, got ell = {ell}, q = {q}")));
        }
        if a + (q + 1) * ell > b - (q + 1) * ell {
            return Err(Error::InvalidGeometry(format!(
                "[a + (q+1)ell, b - (q+1)ell] = [{}, {}] is empty",
                a + (q + 1) * ell,
                b - (q + 1) * ell
            )));
        }
        Ok(Self { a, b, ell, q })
    }

    /// Smallest admissible interval length for `(ℓ, q)`: `b - a = 2(q+1)ℓ`.
    pub fn centered(ell: i64, q: i64) -> Result<Self> {
        Self::new(0, 2 * (q + 1) * ell, ell, q)
    }

    /// Blocks `[c + jℓ, c + (j+1)ℓ]` in order `c = a` then `c = b`, `j` ascending.
    pub fn blocks(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::with_capacity(4 * self.q as usize);
        for c in [self.a, self.b] {
            for j in -self.q..self.q {
                out.push((c + j * self.ell, c + (j + 1) * self.ell));
            }
        }
        out
    }

    /// Neighbourhood `[c + (j-1)ℓ, c + (j+2)ℓ]` of each block.
    pub fn neighbourhoods(&self) -> Vec<(i64, i64)> {
        self.blocks().into_iter().map(|(lo, hi)| (lo - self.ell, hi + self.ell)).collect()
    }

    /// `[a - qℓ, a + qℓ] ∪ [b - qℓ, b + qℓ]`.
    pub fn boundary_region(&self) -> [(i64, i64); 2] {
        let w = self.q * self.ell;
        [(self.a - w, self.a + w), (self.b - w, self.b + w)]
    }

    /// `8qJ(1 + ℓ)^{2-α}`.
    pub fn norm_bound(&self, coupling_j: f64, alpha: f64) -> f64 {
        8.0 * self.q as f64 * coupling_j * (1.0 + self.ell as f64).powf(2.0 - alpha)
    }
}

fn is_discarded(coords: &[i64], geom: &TruncationGeometry) -> bool {
    geom.blocks().into_iter().zip(geom.neighbourhoods()).any(|((lo, hi), (nlo, nhi))| {
        coords.iter().any(|&x| lo <= x && x <= hi) && coords.iter().any(|&x| x < nlo || x > nhi)
    })
}

/// `(kept, discarded)` term indices.
pub fn classify_terms(model: &DecayInteraction, geom: &TruncationGeometry) -> Result<(Vec<usize>, Vec<usize>)> {
    let [(lo, _), (_, hi)] = geom.boundary_region();
    let (first, last) = (model.first(), model.last());
    if lo - geom.ell < first || hi + geom.ell > last {
        return Err(Error::InvalidGeometry(format!(
            "block neighbourhoods [{}, {}] exceed the chain [{first}, {last}]",
            lo - geom.ell,
            hi + geom.ell
        )));
    }
    let mut kept = Vec::new();
    let mut discarded = Vec::new();
    for (idx, t) in model.interaction.terms().iter().enumerate() {
        let coords: Vec<i64> = t.support().iter().map(|&s| model.lattice.coord(s)[0]).collect();
        if is_discarded(&coords, geom) {
            if model.origin == ChainOrigin::Window && coords.iter().any(|&x| x == first || x == last) {
                return Err(Error::ClippedWindow(format!("discarded term {idx} touches the window edge")));
            }
            discarded.push(idx);
        } else {
            kept.push(idx);
        }
    }
    Ok((kept, discarded))
}

#[derive(Clone, Debug)]
pub struct RangeTruncationResult {
    pub geometry: TruncationGeometry,
    pub kept: Vec<usize>,
    pub discarded: Vec<usize>,
    /// `Σ_{Z∈𝓘} ‖Φ(Z)‖`.
    pub discarded_norm_sum: f64,
    /// `8qJ(1+ℓ)^{2-α}`.
    pub norm_bound: f64,
    pub coupling_j: f64,
    pub alpha: f64,
    /// `δH`, when the chain fits the dense cap.
    pub delta_h: Option<HermitianOperator>,
    /// `‖δH‖`, when `δH` was assembled.
    pub delta_h_norm: Option<f64>,
}

pub fn range_truncate(model: &DecayInteraction, geom: &TruncationGeometry) -> Result<RangeTruncationResult> {
    let (kept, discarded) = classify_terms(model, geom)?;
    let discarded_norm_sum = discarded.iter().map(|&i| model.interaction.term(i).norm()).sum();
    let fits = model.lattice.hilbert_dim().is_some_and(|d| d <= DEFAULT_DENSE_CAP);
    let delta_h = if fits {
        Some(assemble_with_cap(discarded.iter().map(|&i| model.interaction.term(i)), &model.lattice, DEFAULT_DENSE_CAP)?)
    } else {
        None
    };
    let delta_h_norm = delta_h.as_ref().map(|d| d.norm()).transpose()?;
    Ok(RangeTruncationResult {
        geometry: *geom,
        kept,
        discarded,
        discarded_norm_sum,
        norm_bound: geom.norm_bound(model.coupling_j, model.alpha),
        coupling_j: model.coupling_j,
        alpha: model.alpha,
        delta_h,
        delta_h_norm,
    })
}

impl RangeTruncationResult {
    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("alpha", self.alpha),
            ("ell", self.geometry.ell as f64),
            ("q", self.geometry.q as f64),
            ("J", self.coupling_j),
            ("discarded", self.discarded.len() as f64),
        ]
    }

    /// `H̃ = H - δH` from the kept terms.
    pub fn kept_terms<'a>(&self, model: &'a DecayInteraction) -> Vec<&'a Term> {
        self.kept.iter().map(|&i| model.interaction.term(i)).collect()
    }
}

/// `‖δH‖ ≤ Σ‖Φ(Z)‖` (when measured) and `Σ‖Φ(Z)‖ ≤ 8qJ(1+ℓ)^{2-α}`.
pub fn decay_bound_certificate(result: &RangeTruncationResult) -> Vec<BoundCertificate> {
    let params = result.params();
    let sum = BoundCertificate::judge(
        Claim::RangeDecaySum,
        &params,
        result.discarded_norm_sum,
        result.norm_bound,
        BoundKind::Plain,
        DEFAULT_TOL,
    );
    let norm = match result.delta_h_norm {
        Some(n) => BoundCertificate::judge(Claim::RangeDecayNorm, &params, n, result.discarded_norm_sum, BoundKind::Plain, DEFAULT_TOL),
        None => BoundCertificate::with_status(Claim::RangeDecayNorm, &params, Status::Skipped, "delta H beyond the dense cap"),
    };
    vec![norm, sum]
}

/// Measured quantities of the gap-stability bundle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapStability {
    pub gap: f64,
    pub perturbation_norm: f64,
    /// Largest distance of a perturbed eigenvalue from the two windows.
    pub inclusion_violation: f64,
    pub low_rank: usize,
    /// `|⟨Ω, Ω̃⟩|`.
    pub overlap: f64,
    /// `‖Ω - Ω̃‖` after phase fixing.
    pub distance: f64,
    pub perturbed_gap: f64,
}

/// Spectral inclusion, rank one, fidelity, distance and derived gap for
/// `H̃ = H - δH`, with `H` shifted to ground energy 0. Hypotheses
/// (nondegenerate ground state, `Δ > 2‖δH‖`) failing gives SKIPPED rows.
pub fn gap_stability_certificate(
    h: &HermitianOperator,
    h_spec: &SpectralData,
    delta_h: &HermitianOperator,
) -> Result<(Vec<BoundCertificate>, Option<GapStability>)> {
    let claims = [Claim::GapInclusion, Claim::GapRank, Claim::GapFidelity, Claim::GapDistance, Claim::GapDerived];
    let e0 = h_spec.min();
    let d = delta_h.norm()?;
    if h_spec.dim() < 2 {
        let rows = claims.iter().map(|&c| BoundCertificate::with_status(c, &[], Status::NotApplicable, "one-dimensional space")).collect();
        return Ok((rows, None));
    }
    let gap = h_spec.eigenvalues()[1] - e0;
    let params = [("Delta", gap), ("dH", d)];
    let skip = |why: String| claims.iter().map(|&c| BoundCertificate::with_status(c, &params, Status::Skipped, why.clone())).collect();
    if gap <= h_spec.tie_tolerance() {
        return Ok((skip("degenerate ground state".into()), None));
    }
    if !(gap > 2.0 * d) {
        return Ok((skip(format!("gate closed: Delta = {gap} <= 2 |dH| = {}", 2.0 * d)), None));
    }

    let perturbed = h.shifted(-e0).sub(delta_h)?;
    let p_spec = spectral::eig(&perturbed)?;
    let scale = h_spec.norm().max(1.0);
    let tau = p_spec.tie_tolerance();
    let inclusion_violation = p_spec
        .eigenvalues()
        .iter()
        .map(|&x| {
            if x < -d {
                -d - x
            } else if x <= d || x >= gap - d {
                0.0
            } else {
                (x - d).min(gap - d - x)
            }
        })
        .fold(0.0, f64::max);
    let low_rank = p_spec.select(&Interval::closed(-d, d)).len();
    let omega = h_spec.eigenvector(0);
    let omega_t = p_spec.eigenvector(0);
    let inner = linalg::vdot(&omega, &omega_t);
    let overlap = inner.norm();
    // Phase-fix so that ⟨Ω, Ω̃⟩ ≥ 0.
    let phase = if overlap > 0.0 { inner.conj() / overlap } else { linalg::ONE };
    let distance = linalg::vec_norm(&omega.iter().zip(&omega_t).map(|(a, b)| a - b * phase).collect::<Vec<_>>());
    let perturbed_gap = p_spec.eigenvalues()[1] - p_spec.eigenvalues()[0];

    let ratio = d / (gap - d);
    let rows = vec![
        BoundCertificate::judge_abs(Claim::GapInclusion, &params, inclusion_violation, 0.0, BoundKind::Plain, tau.max(DEFAULT_TOL * scale)),
        BoundCertificate::judge_abs(Claim::GapRank, &params, (low_rank as f64 - 1.0).abs(), 0.0, BoundKind::Plain, 0.0)
            .with_param("rank", low_rank as f64),
        BoundCertificate::judge(
            Claim::GapFidelity,
            &params,
            (1.0 - overlap * overlap).max(0.0).sqrt(),
            ratio,
            BoundKind::Trivial(1.0),
            DEFAULT_TOL,
        ),
        BoundCertificate::judge(
            Claim::GapDistance,
            &params,
            distance,
            std::f64::consts::SQRT_2 * ratio,
            BoundKind::Trivial(std::f64::consts::SQRT_2),
            DEFAULT_TOL,
        ),
        BoundCertificate::judge(Claim::GapDerived, &params, gap - 2.0 * d, perturbed_gap, BoundKind::Plain, DEFAULT_TOL),
    ];
    Ok((rows, Some(GapStability { gap, perturbation_norm: d, inclusion_violation, low_rank, overlap, distance, perturbed_gap })))
}

/// Seeded `H = diag(0, Δ, Δ + u_2, …)` with `u_k ∈ [0, 2]` and a random
/// Hermitian `δH` with `‖δH‖ ∈ [0.02, 0.98] Δ/2`; dimension in `8..=32`.
pub fn synthetic_gapped_instance(seed: u64) -> Result<(HermitianOperator, HermitianOperator)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: usize = rng.random_range(8..=32);
    let gap: f64 = rng.random_range(0.5..=2.0);
    let mut diag = vec![0.0, gap];
    diag.extend((2..n).map(|_| gap + rng.random_range(0.0..=2.0)));
    let h = Mat::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { linalg::ZERO });
    let v = linalg::random_hermitian(&mut rng, n);
    let target = rng.random_range(0.02..=0.98) * gap / 2.0;
    let v = linalg::scaled(v.as_ref(), target / linalg::hermitian_norm(v.as_ref())?);
    Ok((HermitianOperator::new(h)?, HermitianOperator::new(v)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_validation_and_tiling() {
        assert!(TruncationGeometry::new(0, 10, 2, 2).is_err());
        let g = TruncationGeometry::new(0, 12, 2, 2).unwrap();
        let blocks = g.blocks();
        assert_eq!(blocks.len(), 8);
        assert_eq!(blocks[0], (-4, -2));
        assert_eq!(blocks[3], (2, 4));
        // Consecutive blocks share an endpoint and cover [a - qℓ, a + qℓ].
        for w in blocks[..4].windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
        assert_eq!((blocks[0].0, blocks[3].1), g.boundary_region()[0]);
        assert_eq!((blocks[4].0, blocks[7].1), g.boundary_region()[1]);
        assert!(TruncationGeometry::new(0, 12, 0, 1).is_err());
    }

    #[test]
    fn membership_clauses() {
        let g = TruncationGeometry::new(0, 40, 4, 2).unwrap();
        // Inside the neighbourhood [-4, 8] of block [0, 4].
        assert!(!is_discarded(&[1, 6], &g));
        // From the block to 2ℓ beyond it.
        assert!(is_discarded(&[2, 2 + 10], &g));
        // Far from every block.
        assert!(!is_discarded(&[18, 22], &g));
    }

    #[test]
    fn bound_arithmetic() {
        let g = TruncationGeometry::new(0, 40, 4, 2).unwrap();
        assert!((g.norm_bound(1.0, 3.0) - 3.2).abs() < 1e-15);
        for alpha in [2.5, 3.0, 4.0] {
            let g2 = TruncationGeometry::new(0, 80, 8, 2).unwrap();
            let ratio = g.norm_bound(1.0, alpha) / g2.norm_bound(1.0, alpha);
            assert!((ratio - (9.0f64 / 5.0).powf(alpha - 2.0)).abs() < 1e-12);
            assert!(ratio > 1.0);
        }
    }

    #[test]
    fn nearest_neighbour_model_discards_nothing() {
        let model = decaying_pair_model(1, 40, 3.0, 1, 0.0, 1, ChainOrigin::FiniteChain).unwrap();
        let g = TruncationGeometry::new(12, 30, 2, 2).unwrap();
        let r = range_truncate(&model, &g).unwrap();
        assert!(r.discarded.is_empty());
        assert_eq!(r.discarded_norm_sum, 0.0);
    }

    #[test]
    fn sixty_site_chain_sum_within_bound() {
        for seed in 0..3 {
            let model = decaying_pair_model(1, 60, 3.0, 59, 0.0, seed, ChainOrigin::FiniteChain).unwrap();
            let g = TruncationGeometry::new(15, 45, 4, 2).unwrap();
            let r = range_truncate(&model, &g).unwrap();
            // Exhaustive oracle over all terms.
            let oracle: f64 = model
                .interaction()
                .terms()
                .iter()
                .filter(|t| {
                    let c: Vec<i64> = t.support().iter().map(|&s| model.lattice().coord(s)[0]).collect();
                    is_discarded(&c, &g)
                })
                .map(|t| t.norm())
                .sum();
            assert!((oracle - r.discarded_norm_sum).abs() < 1e-12);
            assert!(r.discarded_norm_sum <= r.norm_bound);
            assert!(!r.discarded.is_empty());
        }
    }

    #[test]
    fn coupling_constant_includes_diagonal_pairs() {
        let lat = Lattice::chain(3, 2).unwrap();
        let z = linalg::pauli_z();
        let zz = linalg::kron(z.as_ref(), z.as_ref());
        let int = Interaction::new(&lat, vec![(vec![0, 1], zz.clone()), (vec![1, 2], zz)]).unwrap();
        // Site 1 carries two unit terms; the pairs weigh 1 · 2^α.
        let j = coupling_constant(&lat, &int, 3.0);
        assert_eq!(j, 8.0);
        let int1 = Interaction::new(&lat, vec![(vec![1], linalg::scaled(z.as_ref(), 5.0))]).unwrap();
        assert_eq!(coupling_constant(&lat, &int1, 3.0), 5.0);
    }

    #[test]
    fn window_never_clips() {
        let g = TruncationGeometry::centered(2, 2).unwrap();
        let model = decaying_window(&g, 2.5, 4).unwrap();
        let r = range_truncate(&model, &g).unwrap();
        assert!(r.delta_h.is_none());
        let certs = decay_bound_certificate(&r);
        assert_eq!(certs[0].status, Status::Skipped);
        assert!(certs[1].passed());
    }

    #[test]
    fn clipping_is_detected() {
        let g = TruncationGeometry::centered(2, 1).unwrap();
        let pad = window_padding(2, 1);
        let model =
            decaying_pair_model(g.a - pad, g.b + pad, 3.0, (2 * pad) as usize, 0.0, 1, ChainOrigin::Window).unwrap();
        assert!(matches!(classify_terms(&model, &g), Err(Error::ClippedWindow(_))));
    }

    #[test]
    fn dense_norm_link_on_ten_sites() {
        let model = decaying_pair_model(1, 10, 3.0, 9, 0.0, 2, ChainOrigin::FiniteChain).unwrap();
        let g = TruncationGeometry::new(3, 8, 1, 1).unwrap();
        let r = range_truncate(&model, &g).unwrap();
        let certs = decay_bound_certificate(&r);
        assert!(certs.iter().all(|c| c.status == Status::Pass), "{certs:?}");
        assert!(r.delta_h_norm.unwrap() > 0.0);
    }

    #[test]
    fn zero_perturbation_saturates() {
        let h = HermitianOperator::new(Mat::from_fn(4, 4, |i, j| if i == j { C64::new([0.0, 1.0, 1.5, 2.0][i], 0.0) } else { linalg::ZERO }))
            .unwrap();
        let spec = spectral::eig(&h).unwrap();
        let (rows, m) = gap_stability_certificate(&h, &spec, &HermitianOperator::zeros(4)).unwrap();
        // The gate Δ > 2‖δH‖ = 0 is open.
        let m = m.unwrap();
        assert_eq!(m.overlap, 1.0);
        assert_eq!(m.distance, 0.0);
        assert!(rows.iter().all(|r| r.status == Status::Pass || r.status == Status::Vacuous));
    }

    #[test]
    fn synthetic_gapped_instances() {
        for seed in 0..50 {
            let (h, dh) = synthetic_gapped_instance(seed).unwrap();
            let spec = spectral::eig(&h).unwrap();
            let (rows, m) = gap_stability_certificate(&h, &spec, &dh).unwrap();
            assert!(rows.iter().all(|r| r.status == Status::Pass), "{rows:?}");
            let m = m.unwrap();
            assert!(2.0 * m.perturbation_norm < m.gap);
            assert!((m.distance.powi(2) - 2.0 * (1.0 - m.overlap)).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_gate_is_skipped() {
        let h = HermitianOperator::new(Mat::from_fn(2, 2, |i, j| if i == j && i == 1 { linalg::ONE } else { linalg::ZERO })).unwrap();
        let spec = spectral::eig(&h).unwrap();
        let big = HermitianOperator::new(linalg::pauli_x()).unwrap();
        let (rows, m) = gap_stability_certificate(&h, &spec, &big).unwrap();
        assert!(m.is_none());
        assert!(rows.iter().all(|r| r.status == Status::Skipped));
    }
}
