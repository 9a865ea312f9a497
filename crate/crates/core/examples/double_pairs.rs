//! Double pairs and gamma-region diameters of the time-zero slice for shrinking
//! windows epsilon, compared with epsilon^(1/3).
//!
//! cargo run --release --example double_pairs -- [seeds]

use pairweb::lattice::ArrowField;
use pairweb::observables::double_pair_diagnostics;

fn main() -> pairweb::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let delta = 0.01;
    let eps = [0.04, 0.02, 0.01];
    let mut above = [0u64; 3];
    let mut pairs = [0u64; 3];
    for seed in 0..seeds {
        let field = ArrowField::for_scale(seed, delta, 0.04)?;
        for (k, &e) in eps.iter().enumerate() {
            let report = double_pair_diagnostics(&field, delta, e)?;
            pairs[k] += report.double_pair_count;
            above[k] += (report.max_gamma_diameter > e.cbrt()) as u64;
        }
    }
    for (k, e) in eps.iter().enumerate() {
        println!(
            "epsilon {e:<5} mean double pairs {:>6.2}  fraction with max diameter > {:.3}: {:.2}",
            pairs[k] as f64 / seeds as f64,
            e.cbrt(),
            above[k] as f64 / seeds as f64
        );
    }
    Ok(())
}
