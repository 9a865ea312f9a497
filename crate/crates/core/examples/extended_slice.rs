//! Distance between the time-zero slice of the discrete web and its extension by
//! interpolated starts, for a few lattice spacings.
//!
//! cargo run --release --example extended_slice -- [seeds]

use std::time::Instant;

use pairweb::lattice::{ArrowField, ExtendedSlice};
use pairweb::metrics::{hausdorff_distance, MetricParams};

fn main() -> pairweb::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let params = MetricParams::default();
    for delta in [0.1, 0.05, 0.025] {
        let clock = Instant::now();
        let mut values = Vec::new();
        for seed in 0..seeds {
            let field = ArrowField::for_scale(seed, delta, 2.0)?;
            let ext = ExtendedSlice::build(&field, delta, 4)?;
            values.push(hausdorff_distance(&ext.extended, &ext.slice, &params)?);
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        println!(
            "delta = {delta:<6} median d_H = {:.5}  max = {:.5}  ({:.1?} for {seeds} fields)",
            sorted[sorted.len() / 2],
            sorted[sorted.len() - 1],
            clock.elapsed()
        );
    }
    Ok(())
}
