//! Silo weights on a small periodic field, the same numbers as enclosed bead
//! counts and as river outputs, and the rescaled weight measure.
//!
//! cargo run --release --example silo_weights -- [seed]

use pairweb::lattice::{sample_arrow_field, ArrowField};
use pairweb::observables::{
    dp_weights, enclosed_region, integrate_against, river_outputs, weight_measure, MeasureKind,
};

fn main() -> pairweb::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let field = sample_arrow_field(seed, 16, 12)?;
    let weights = dp_weights(&field);
    let water = river_outputs(&field);
    println!("site  weight  enclosed  closed_at  river");
    for (&site, &w) in &weights {
        let region = enclosed_region(&field, site)?;
        println!("{site:>4}  {w:>6}  {:>8}  {:>9}  {:>5}", region.beads, format!("{:?}", region.closed_at), water[&site]);
    }
    println!("total {} = 8 x 12 beads", weights.values().sum::<u64>());

    let delta = 0.05;
    let big = ArrowField::for_scale(seed, delta, 1.0)?;
    let mu = weight_measure(&big, delta, (-1.0, 1.0), MeasureKind::GeometricArea, Some(1.0))?;
    println!(
        "\ngeometric-area measure at delta = {delta}: {} atoms, total mass {:.4}, integral of cos(pi x) {:.4}",
        mu.atoms.len(),
        mu.total_mass(),
        integrate_against(&mu, |x| (std::f64::consts::PI * x).cos())
    );
    println!("{}", pairweb::observables::WeightMeasure::CSV_HEADER);
    for row in mu.csv_rows().take(5) {
        println!("{row}");
    }
    Ok(())
}
