//! Off-diagonal decay, spectral tails and the projector overlap lemma on a
//! small random chain.

use effham::certify::{overlap_lemma_check, tail, OffDiagProbe, OffDiagVariant, TailVariant};
use effham::corpus::random_nearest_neighbour;
use effham::runner::ModelRun;
use effham::spectral::{self, Interval, SpectralOverlap};

fn main() -> effham::Result<()> {
    let run = ModelRun::first_half(random_nearest_neighbour(7, 3, Some(1.0))?)?;
    let b = run.prep.ham.boundary_norm();
    let m = run.prep.env.max() + 1.0;
    let c = run.constants(m)?;

    // A = spectral projector of H onto its lower half.
    let a = spectral::projector(&run.prep.h, Interval::at_most(run.prep.h.max() / 2.0)).matrix();
    let probe = OffDiagProbe::new(OffDiagVariant::H, &run.prep.h, &run.prep.h, a.as_ref(), c)?;
    for (m_cut, n_cut) in [(8.0, 1.0), (16.0, 1.0), (24.0, 0.0)] {
        let r = probe.certify(m_cut + 4.0 * b, n_cut);
        println!("{:<14} M_cut {m_cut:>5} N_cut {n_cut:>4}  lhs {:.3e}  rhs {:.3e}  {}", r.claim, r.lhs, r.rhs, r.status);
    }

    let gram = SpectralOverlap::new(&run.prep.env, &run.prep.h)?;
    for n_cut in [5.0, 20.0, 60.0] {
        let r = tail(TailVariant::Plain, &run.prep.env, &run.prep.h, &gram, 0.0, n_cut, &c)?;
        println!("{:<14} N {n_cut:>5}  lhs {:.3e}  rhs {:.3e}  {}", r.claim, r.lhs, r.rhs, r.status);
    }

    let p = spectral::projector(&run.prep.h, Interval::at_most(1.0));
    let q = spectral::projector(&run.prep.env, Interval::at_most(1.0 + 4.0 * b));
    let rep = overlap_lemma_check(&p, &q);
    println!("overlap lemma: c = {:.4}  ranks {} <= {}  min gain {:.4} >= {:.4}", rep.c, rep.rank_p, rep.rank_q, rep.min_gain, rep.bound);
    Ok(())
}
