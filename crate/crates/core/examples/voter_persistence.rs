//! Persistence of the voter model at the origin, estimated forward in time and
//! through the backward walks, plus the exact value on a tiny instance.
//!
//! cargo run --release --example voter_persistence -- [reps]

use pairweb::observables::{voter_dual_oracle, voter_enumerate, voter_forward_persistence, VoterWindow};

fn main() -> pairweb::Result<()> {
    let reps: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    for alpha in [0.125, 0.25, 0.5] {
        let est = voter_forward_persistence(alpha, 0.1, reps, 9)?;
        println!(
            "alpha {alpha:<5} rows {}..{}: forward {:.4} +- {:.4}, dual {:.4} +- {:.4}, z = {:.2}",
            est.window.start_row,
            est.window.final_row,
            est.forward.value,
            est.forward.stderr,
            est.dual.value,
            est.dual.stderr,
            est.z_distance()
        );
    }

    let tiny = VoterWindow::new(0.5, 0.5)?;
    println!(
        "\ntiny window rows {}..{}: enumeration {} , walker-set recursion {}",
        tiny.start_row,
        tiny.final_row,
        voter_enumerate(&tiny)?,
        voter_dual_oracle(&tiny)
    );
    Ok(())
}
