//! Running a subcommand from code: resolve a configuration, compute the tables
//! and write the run directory with its manifest.
//!
//! cargo run --release --example run_experiment -- [output dir]

use pairweb::experiments::{emit_outputs, parse_config, run_experiment};

fn main() -> pairweb::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().join("pairweb").display().to_string());
    let config = parse_config(["pairweb", "silo", "--reps", "10", "--seed", "1", "--out", out.as_str()])?;
    let output = run_experiment(&config)?;
    for (name, body) in &output.files {
        println!("{name}: {} lines", body.lines().count());
    }
    let dir = emit_outputs(&config, &output)?;
    println!("wrote {}", dir.display());
    println!("{}", std::fs::read_to_string(dir.join("manifest.json"))?);
    Ok(())
}
