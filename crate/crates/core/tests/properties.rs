//! Property tests over seeded random models and operators.

use effham::cache;
use effham::certify::{overlap_i, overlap_ii, overlap_shifted, BoundCertificate, BoundKind, Claim, Constants, Status, TheoremContext};
use effham::corpus::random_nearest_neighbour;
use effham::lattice::{decompose, derive_constants, SiteSet};
use effham::linalg::{self, random_hermitian};
use effham::model_file::Model;
use effham::range::{self, TruncationGeometry};
use effham::runner::ModelRun;
use effham::spectral::{self, Interval};
use effham::truncation::{check_invariants, order_floor};
use effham::{HermitianOperator, Lattice, RegionSplit};
use faer::Mat;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hermitian(seed: u64, n: usize) -> HermitianOperator {
    HermitianOperator::new(random_hermitian(&mut ChaCha8Rng::seed_from_u64(seed), n)).unwrap()
}

fn small_run(seed: u64, sites: usize) -> ModelRun {
    ModelRun::first_half(random_nearest_neighbour(sites, seed, None).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn metric_is_symmetric_and_triangular(w in 1usize..5, h in 1usize..5, picks in prop::collection::vec(0usize..25, 3)) {
        let lat = Lattice::rectangle(w, h, 2).unwrap();
        let n = lat.len();
        let (x, y, z) = (picks[0] % n, picks[1] % n, picks[2] % n);
        prop_assert_eq!(lat.distance(x, y), lat.distance(y, x));
        prop_assert!(lat.distance(x, z) <= lat.distance(x, y) + lat.distance(y, z));
        prop_assert_eq!(lat.distance(x, x), 0);
    }

    #[test]
    fn split_projectors_resolve_identity(seed in any::<u64>(), n in 2usize..24, c in -3.0f64..3.0) {
        let h = hermitian(seed, n);
        let s = spectral::eig(&h).unwrap();
        let lo = spectral::projector(&s, Interval::at_most(c));
        let hi = spectral::projector(&s, Interval::above(c));
        prop_assert_eq!(lo.rank() + hi.rank(), n);
        let p = lo.matrix();
        let sum = &p + hi.matrix();
        prop_assert!(linalg::max_abs((sum - Mat::<linalg::C64>::identity(n, n)).as_ref()) <= 1e-9);
        prop_assert!(linalg::opnorm((&p * &p - &p).as_ref()) <= 1e-9);
        prop_assert!(linalg::hermitian_defect(p.as_ref()) <= 1e-12);
        let trace: f64 = (0..n).map(|i| p[(i, i)].re).sum();
        prop_assert!((trace - lo.rank() as f64).abs() <= 1e-8);
    }

    #[test]
    fn functional_calculus_is_multiplicative(seed in any::<u64>(), n in 2usize..16) {
        let s = spectral::eig(&hermitian(seed, n)).unwrap();
        let f = spectral::apply_function(&s, |x| x.sin()).unwrap();
        let g = spectral::apply_function(&s, |x| x * x + 1.0).unwrap();
        let fg = spectral::apply_function(&s, |x| x.sin() * (x * x + 1.0)).unwrap();
        let prod = f.matrix() * g.matrix();
        prop_assert!(linalg::max_abs((prod - fg.matrix()).as_ref()) <= 1e-8 * (1.0 + linalg::max_abs(fg.matrix())));
    }

    #[test]
    fn verdict_matches_comparison(lhs in -2.0f64..3.0, rhs in -2.0f64..3.0, tol in 0.0f64..1e-3) {
        let c = BoundCertificate::judge_abs(Claim::OverlapLow, &[], lhs, rhs, BoundKind::ProjectorNorm, tol);
        prop_assert_eq!(c.status == Status::Fail, !(lhs <= rhs + tol));
        if c.status == Status::Vacuous {
            prop_assert!(lhs <= rhs + tol);
        }
    }

    #[test]
    fn sandwich_gate_contracts(lambda in 0.001f64..0.2, b in 0.0f64..3.0, extra in 0.1f64..50.0, eps in 0.0f64..20.0) {
        let c = Constants::from_lambda(lambda, b, b + extra);
        let dj = c.delta_j(eps);
        let gated = c.delta_pq(eps - 2.0 * dj, eps);
        prop_assert!(gated <= dj * (1.0 + 1e-12));
        prop_assert!((gated - dj * (-4.0 * lambda * dj).exp()).abs() <= 1e-12 * dj.max(1e-300));
    }

    #[test]
    fn model_files_round_trip(seed in 0..=i64::MAX as u64, n in 2usize..8) {
        let m = random_nearest_neighbour(n, seed, None).unwrap();
        let text = m.to_toml().unwrap();
        let back = Model::parse(&text).unwrap();
        prop_assert_eq!(back.to_toml().unwrap(), text);
        prop_assert_eq!(back.constants().unwrap(), m.constants().unwrap());
    }

    #[test]
    fn cache_containers_round_trip(seed in any::<u64>(), n in 1usize..12) {
        let h = hermitian(seed, n);
        prop_assert_eq!(cache::decode_operator(&cache::encode_operator(&h)).unwrap().max_abs_diff(&h), 0.0);
        let s = spectral::eig(&h).unwrap();
        let bytes = cache::encode_spectral(&s);
        prop_assert_eq!(cache::encode_spectral(&cache::decode_spectral(&bytes).unwrap()), bytes);
    }

    #[test]
    fn decomposition_partitions_terms(seed in any::<u64>(), n in 3usize..12, cut in 1usize..11) {
        let m = random_nearest_neighbour(n, seed, None).unwrap();
        let region: SiteSet = (0..cut.min(n - 1)).collect();
        let split = RegionSplit::minimal(&m.lattice, region, 1).unwrap();
        let d = decompose(&m.interaction, &split).unwrap();
        let mut all: Vec<usize> = d.inner_l.iter().chain(&d.boundary).chain(&d.inner_lc).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..m.interaction.len()).collect::<Vec<_>>());
    }

    #[test]
    fn decay_sum_stays_below_bound(alpha in 2.05f64..6.0, ell in 1i64..6, q in 1i64..4, seed in 0u64..1000) {
        let geom = TruncationGeometry::centered(ell, q).unwrap();
        let model = range::decaying_window(&geom, alpha, seed).unwrap();
        let r = range::range_truncate(&model, &geom).unwrap();
        prop_assert!(r.discarded_norm_sum <= r.norm_bound + 1e-8);
        if let Some(n) = r.delta_h_norm {
            prop_assert!(n <= r.discarded_norm_sum + 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn truncation_invariants_hold(seed in any::<u64>(), n in 4usize..8, f1 in 0.0f64..1.0, f2 in 0.0f64..1.0) {
        let run = small_run(seed, n);
        let b = run.prep.ham.boundary_norm();
        let top = run.prep.env.max();
        let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
        let (m1, m2) = (b + 1e-3 + lo * (top - b), b + 1e-3 + hi * (top - b + 1.0));
        let t1 = run.prep.truncate(m1).unwrap();
        let t2 = run.prep.truncate(m2).unwrap();
        for t in [&t1, &t2] {
            let rep = check_invariants(&run.prep, t, None).unwrap();
            prop_assert!(rep.holds(), "{:?}", rep);
        }
        let tol = 1e-8 * run.prep.scale();
        prop_assert!(order_floor(&t1.h_bar, &t2.h_bar).unwrap() >= -tol);
        prop_assert!(order_floor(&t2.h_bar, run.prep.ham.full()).unwrap() >= -tol);
    }

    #[test]
    fn shifted_window_reproduces_low_energy_bound(seed in any::<u64>(), n in 4usize..7, frac in 0.1f64..1.0, p in 0.0f64..3.0, gap in 0.05f64..4.0) {
        let run = small_run(seed, n);
        let b = run.prep.ham.boundary_norm();
        let m = b + 0.5 + frac * (run.prep.env.max() - b);
        let t = run.prep.truncate(m).unwrap();
        let hb = spectral::eig(&t.h_bar).unwrap();
        let c = run.constants(m).unwrap();
        let ctx = TheoremContext::new(&run.prep.h, &hb, c).unwrap();
        let q = p + gap;
        let a = overlap_i(&ctx, p, q).unwrap();
        let s = overlap_shifted(&ctx, p + 2.0 * b, q + 2.0 * b, -2.0 * b).unwrap();
        prop_assert!((a.lhs - s.lhs).abs() <= 1e-9);
        prop_assert!((a.rhs - s.rhs).abs() <= 1e-9 * a.rhs);
        for cert in [&a, &s, &overlap_ii(&ctx, p, q).unwrap()] {
            prop_assert!(cert.lhs <= 1.0 + 1e-9);
            prop_assert!(cert.passed());
        }
    }
}

#[test]
fn constants_follow_from_the_term_map() {
    let m = random_nearest_neighbour(7, 3, Some(2.0)).unwrap();
    let c = derive_constants(&m.interaction, &m.lattice).unwrap();
    assert_eq!((c.range_r, c.locality_n), (1, 3));
    assert!((c.strength_j - 2.0).abs() < 1e-12);
}
