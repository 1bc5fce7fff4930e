//! Ferromagnetic Ising chain cut in the middle: the truncation error grows
//! linearly in the half-length and crosses the analytic bound.

use effham::ising;

fn main() -> effham::Result<()> {
    let m = 10.0;
    let inst = ising::build_instance(5, m)?;
    let dense = ising::dense_norm(&inst)?;
    println!("N = 5 dense norm {:.10}  witness residual {:.1e}", dense.norm, dense.witness_residual);

    let rows = ising::divergence_scan(&ising::odd_range(10_001), m, false)?;
    for r in rows.iter().step_by(500) {
        println!("N = {:5}  lower bound {:8}  bound {:.3}  crossed {}", r.half_length, r.lower_bound, r.akl_rhs, r.crossed);
    }
    let first = rows.iter().find(|r| r.crossed).map(|r| r.half_length);
    println!("first crossing at N = {first:?}");
    Ok(())
}
