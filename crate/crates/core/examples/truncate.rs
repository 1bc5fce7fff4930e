//! Truncate the environment of a random chain at a few cutoffs and check
//! the structural invariants of each truncated Hamiltonian.

use effham::corpus::random_nearest_neighbour;
use effham::runner::ModelRun;
use effham::truncation::{check_invariants, order_floor};

fn main() -> effham::Result<()> {
    let run = ModelRun::first_half(random_nearest_neighbour(8, 7, None)?)?;
    let b = run.prep.ham.boundary_norm();
    let top = run.prep.env.max();
    println!("‖H_∂L‖ = {b:.4}  env spectrum [{:.4}, {top:.4}]", run.prep.env.min());

    let mut previous = None;
    for frac in [0.1, 0.4, 0.8, 1.2] {
        let m = b + frac * (top - b);
        let t = run.prep.truncate(m)?;
        let rep = check_invariants(&run.prep, &t, None)?;
        let monotone = match &previous {
            Some(p) => format!("{:.2e}", order_floor(p, &t.h_bar)?),
            None => "-".into(),
        };
        println!(
            "M = {m:8.4}  H - H̄ floor {:+.2e}  ‖H̄‖ {:.4} <= {:.4}  ties {}  monotone floor {monotone}  ok {}",
            rep.domination_floor,
            rep.h_bar_norm,
            b + m,
            t.ties.len(),
            rep.holds()
        );
        previous = Some(t.h_bar);
    }
    Ok(())
}
