//! Approximate coalescing Brownian motions: one ensemble in detail, then the
//! probability that two motions 0.2 apart stay apart up to time 1.
//!
//! cargo run --release --example brownian_ensemble -- [replicas]

use pairweb::brownian::{bridge_cross_prob, simulate_ensemble, EnsembleConfig};
use pairweb::make_pair;
use pairweb::stats::proportion;

fn main() -> pairweb::Result<()> {
    let reps: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);

    let starts = vec![(-0.5, 0.0), (0.0, 0.0), (0.5, 0.0), (0.1, 0.2)];
    let cfg = EnsembleConfig::new(starts, 0.01, 1.0, 3)?;
    let run = simulate_ensemble(&cfg)?;
    for pair in run.pair_set()?.iter().filter(|p| !p.is_degenerate()) {
        println!(
            "({:+.2} @ {:.2}) & ({:+.2} @ {:.2}): t_coal = {:.3}",
            pair.left().x0(),
            pair.left().t0(),
            pair.right().x0(),
            pair.right().t0(),
            pair.t_coal()
        );
    }

    println!("\nbridge crossing probability for gaps 0.1, 0.1 over h = 0.005: {:.4}", bridge_cross_prob(0.1, 0.1, 0.005)?);

    let apart = (0..reps)
        .filter(|&seed| {
            let cfg = EnsembleConfig::new(vec![(-0.1, 0.0), (0.1, 0.0)], 0.005, 1.0, seed).unwrap();
            let run = simulate_ensemble(&cfg).unwrap();
            make_pair(run.paths[0].clone(), run.paths[1].clone()).unwrap().t_coal() > 1.0
        })
        .count() as u64;
    let (p, se) = proportion(apart, reps);
    println!("P(t_coal > 1) = {p:.4} +- {se:.4} over {reps} ensembles (erf(0.1) = 0.11246)");
    Ok(())
}
