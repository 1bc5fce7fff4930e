//! Nested-commutator series of the boundary term in imaginary time, term
//! by term against the analytic bound.

use effham::certify::hadamard_series_check;
use effham::corpus::transverse_field_chain;
use effham::runner::ModelRun;

fn main() -> effham::Result<()> {
    let run = ModelRun::first_half(transverse_field_chain(8, 0.7, 2)?)?;
    let ham = &run.prep.ham;
    let k = ham.constants();
    let s_x = run.constants(ham.boundary_norm() + 1.0)?.s_x;
    let report = hadamard_series_check(ham.boundary(), run.boundary_size, ham.full(), &run.prep.h, k.strength_j, k.locality_n, s_x / 2.0, s_x, 20)?;
    for (n, (norm, bound)) in report.term_norms.iter().zip(&report.term_bounds).enumerate().take(8) {
        println!("n = {n:2}  ‖term‖ {norm:.3e}  bound {bound:.3e}");
    }
    println!("tail ratio {:.4}  allowance {:.3e}", report.tail_ratio, report.tail_allowance);
    println!("all certificates pass: {}", report.certificates.iter().all(|c| c.passed()));
    Ok(())
}
