//! Coalescing walks on a seeded arrow field: a time slice, a vertical segment and
//! the persistence functional computed two ways.
//!
//! cargo run --release --example discrete_web -- [seed]

use pairweb::lattice::{build_segment_web, build_slice_web, extreme_pair_time, ArrowField, LatticeSite};
use pairweb::observables::persistence_sup;

fn main() -> pairweb::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let delta = 0.1;
    let field = ArrowField::for_scale(seed, delta, 2.0)?;
    println!("{field:?}");

    // a few walks, unwrapped lattice columns for the first 12 rows
    for i in [-4, -2, 0, 2, 4] {
        let walk = field.trace_up(LatticeSite::new(i, 0), 12)?;
        println!("walk from {i:>3}: {walk:?}");
    }

    let slice = build_slice_web(&field, 0.0, delta, (-0.4, 0.4))?;
    println!("\nslice at t = 0 over [-0.4, 0.4]: {} paths, {} ordered pairs", slice.paths().len(), slice.len());
    for (k, pair) in slice.iter().enumerate().filter(|(_, p)| !p.is_degenerate()).take(6) {
        println!("  pair {k}: x = ({:+.1}, {:+.1}), t_coal = {}", pair.left().x0(), pair.right().x0(), pair.t_coal());
    }

    let alpha = 0.25;
    let segment = build_segment_web(&field, alpha, delta)?;
    println!("\nsegment web up to alpha = {alpha}: {} paths", segment.paths().len());
    println!("  sup of coalescence times       = {}", persistence_sup(&segment)?);
    println!("  extreme-pair coalescence time  = {}", extreme_pair_time(&field, alpha, delta)?);
    Ok(())
}
