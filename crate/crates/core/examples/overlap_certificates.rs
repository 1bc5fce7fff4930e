//! Certify the low-energy and window overlap bounds, the eigenvalue
//! sandwich and the ground-state overlap on a gapped transverse-field chain.

use effham::certify::{ground_overlap, overlap_i, overlap_ii, overlap_shifted, sandwich, TheoremContext};
use effham::corpus::transverse_field_chain;
use effham::runner::ModelRun;
use effham::spectral;

fn main() -> effham::Result<()> {
    let run = ModelRun::first_half(transverse_field_chain(8, 2.5, 1)?)?;
    let auto = run.auto_grid()?;
    let m = *auto.cutoffs().last().unwrap();
    let t = run.prep.truncate(m)?;
    let h_bar = spectral::eig(&t.h_bar)?;
    let ctx = TheoremContext::new(&run.prep.h, &h_bar, run.constants(m)?)?;
    println!("M = {m:.2}  λ = {:.5}", ctx.constants.lambda);

    let rows = [
        overlap_i(&ctx, 0.0, 1.0)?,
        overlap_ii(&ctx, 0.1, 1.0)?,
        overlap_shifted(&ctx, 0.1, 1.0, 0.5)?,
        ground_overlap(&ctx),
    ];
    for r in rows.iter().chain(&sandwich(&ctx, 3)) {
        println!("{:<16} {:<48} lhs {:.3e}  rhs {:.3e}  {}", r.claim, r.params_string(), r.lhs, r.rhs, r.status);
    }
    Ok(())
}
