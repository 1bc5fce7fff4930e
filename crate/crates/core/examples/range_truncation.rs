//! Drop the long-range terms of a decaying pair interaction near two cut
//! points, compare with the decay bound and check gap stability.

use effham::range::{self, TruncationGeometry};
use effham::runner;

fn main() -> effham::Result<()> {
    for (alpha, ell, q) in [(2.5, 2, 1), (3.0, 4, 2), (4.0, 8, 3)] {
        let geom = TruncationGeometry::centered(ell, q)?;
        let model = range::decaying_window(&geom, alpha, 1)?;
        let r = range::range_truncate(&model, &geom)?;
        println!(
            "α {alpha}  ℓ {ell}  q {q}: dropped {} of {} terms, Σ‖Φ‖ {:.3e} <= {:.3e}",
            r.discarded.len(),
            r.kept.len() + r.discarded.len(),
            r.discarded_norm_sum,
            r.norm_bound
        );
    }

    for row in runner::range_finite_rows(10, 3.0, 1, 1, 1, 2.0)? {
        println!("{:<16} lhs {:.4e}  rhs {:.4e}  {}", row.claim, row.lhs, row.rhs, row.status);
    }
    Ok(())
}
