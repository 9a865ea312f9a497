//! Experiment configuration, the command-line front end, and output emission.
//!
//! A run resolves an [`ExperimentConfig`] from flags and an optional JSON file,
//! computes every table in memory, then writes
//! `<output_dir>/<command>_<timestamp>/{data.csv, summary.json, config.json, manifest.json}`.

mod runs;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use runs::{
    converge_samples, converge_summary, diagnose_rows, fixed_start_sites, persistence_samples, silo_rows,
    ConvergeSample, DiagnoseRow, PersistenceSample, SiloRow,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Metrics,
    Converge,
    Persistence,
    Silo,
    River,
    Diagnose,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Metrics => "metrics",
            Command::Converge => "converge",
            Command::Persistence => "persistence",
            Command::Silo => "silo",
            Command::River => "river",
            Command::Diagnose => "diagnose",
        }
    }
}

/// Fully resolved configuration; echoed to stdout and written as `config.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub delta_list: Vec<f64>,
    pub alpha: f64,
    pub reps: u64,
    pub seed: u64,
    pub horizon: f64,
    pub n_max: u32,
    pub grid_m: usize,
    pub output_dir: PathBuf,
    /// Pair files for `metrics`.
    pub inputs: Vec<PathBuf>,
    /// Field size for `silo` and `river`.
    pub width: i64,
    pub height: i64,
    /// Time windows for `diagnose`.
    pub epsilon_list: Vec<f64>,
}

impl ExperimentConfig {
    /// Defaults for `command` before any file or flag is applied.
    pub fn defaults(command: Command) -> Self {
        let (delta_list, reps) = match command {
            Command::Metrics => (vec![], 1),
            Command::Converge => (vec![0.1, 0.05, 0.025], 50),
            Command::Persistence => (vec![0.05], 10_000),
            Command::Silo | Command::River => (vec![], 100),
            Command::Diagnose => (vec![0.01], 100),
        };
        ExperimentConfig {
            command,
            delta_list,
            alpha: 0.25,
            reps,
            seed: 0,
            horizon: 2.0,
            n_max: 24,
            grid_m: 512,
            output_dir: PathBuf::from("out"),
            inputs: vec![],
            width: 64,
            height: 64,
            epsilon_list: vec![0.04, 0.02, 0.01],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |msg: String| Err(Error::Usage(msg));
        let needs_delta = matches!(self.command, Command::Converge | Command::Persistence | Command::Diagnose);
        if needs_delta && self.delta_list.is_empty() {
            return usage(format!("{} needs at least one --delta", self.command.name()));
        }
        if let Some(d) = self.delta_list.iter().find(|d| !(**d > 0.0 && **d <= 0.5)) {
            return usage(format!("delta {d} outside (0, 0.5]"));
        }
        if self.reps < 1 {
            return usage("reps must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return usage(format!("alpha {} outside [0, 1)", self.alpha));
        }
        if !(self.horizon >= 1.0 && self.horizon.is_finite()) {
            return usage(format!("horizon {} must be finite and at least 1", self.horizon));
        }
        if self.n_max < 1 || self.grid_m < 1 {
            return usage("n_max and grid_m must be positive".into());
        }
        if self.width < 4 || self.width % 2 != 0 || self.height < 1 {
            return usage(format!("field {}x{} must be even-width >= 4, height >= 1", self.width, self.height));
        }
        if let Some(e) = self.epsilon_list.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
            return usage(format!("epsilon {e} outside (0, 1]"));
        }
        if self.command == Command::Diagnose && self.epsilon_list.is_empty() {
            return usage("diagnose needs at least one --epsilon".into());
        }
        if self.command == Command::Metrics && self.inputs.is_empty() {
            return usage("metrics needs at least one --input pair file".into());
        }
        Ok(())
    }
}

/// Keys accepted in a `--config` JSON file; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<Command>,
    delta_list: Option<Vec<f64>>,
    alpha: Option<f64>,
    reps: Option<u64>,
    seed: Option<u64>,
    horizon: Option<f64>,
    n_max: Option<u32>,
    grid_m: Option<usize>,
    output_dir: Option<PathBuf>,
    inputs: Option<Vec<PathBuf>>,
    width: Option<i64>,
    height: Option<i64>,
    epsilon_list: Option<Vec<f64>>,
}

#[derive(Debug, Parser)]
#[command(name = "pairweb", version, about = "Coalescing pair webs: metrics, samplers and lattice experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Pairwise metric table for the pairs of one or more pair files
    Metrics(Flags),
    /// Lattice slice webs against Brownian references across delta
    Converge(Flags),
    /// Forward and dual voter persistence estimates, and samples of S
    Persistence(Flags),
    /// Silo weights, enclosed bead counts and conservation checks
    Silo(Flags),
    /// River outputs by routing unit water volumes downward
    River(Flags),
    /// Double pairs and gamma-region diameters across epsilon
    Diagnose(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<u64>,
    /// Lattice scale; repeat for several values
    #[arg(long = "delta")]
    delta: Vec<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long = "n-max")]
    n_max: Option<u32>,
    #[arg(long = "grid-m")]
    grid_m: Option<usize>,
    /// Parent directory of the run directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with configuration keys; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pair file (metrics); repeat for several
    #[arg(long = "input")]
    input: Vec<PathBuf>,
    #[arg(long)]
    width: Option<i64>,
    #[arg(long)]
    height: Option<i64>,
    /// Time window (diagnose); repeat for several
    #[arg(long = "epsilon")]
    epsilon: Vec<f64>,
}

impl Sub {
    fn split(self) -> (Command, Flags) {
        match self {
            Sub::Metrics(f) => (Command::Metrics, f),
            Sub::Converge(f) => (Command::Converge, f),
            Sub::Persistence(f) => (Command::Persistence, f),
            Sub::Silo(f) => (Command::Silo, f),
            Sub::River(f) => (Command::River, f),
            Sub::Diagnose(f) => (Command::Diagnose, f),
        }
    }
}

fn resolve(cli: Cli) -> Result<ExperimentConfig> {
    let (command, flags) = cli.command.split();
    let mut cfg = ExperimentConfig::defaults(command);
    if let Some(path) = &flags.config {
        let text = fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
        let file: ConfigFile =
            serde_json::from_str(&text).map_err(|e| Error::Usage(format!("bad config file {}: {e}", path.display())))?;
        if let Some(c) = file.command.filter(|c| *c != command) {
            return Err(Error::Usage(format!("config file is for `{}`, not `{}`", c.name(), command.name())));
        }
        macro_rules! take {
            ($($field:ident),*) => { $(if let Some(v) = file.$field { cfg.$field = v; })* };
        }
        take!(delta_list, alpha, reps, seed, horizon, n_max, grid_m, output_dir, inputs, width, height, epsilon_list);
    }
    macro_rules! over {
        ($($flag:ident => $field:ident),*) => { $(if let Some(v) = flags.$flag { cfg.$field = v; })* };
    }
    over!(seed => seed, reps => reps, alpha => alpha, horizon => horizon, n_max => n_max, grid_m => grid_m,
          out => output_dir, width => width, height => height);
    if !flags.delta.is_empty() {
        cfg.delta_list = flags.delta;
    }
    if !flags.input.is_empty() {
        cfg.inputs = flags.input;
    }
    if !flags.epsilon.is_empty() {
        cfg.epsilon_list = flags.epsilon;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `argv` (program name first) and an optional `--config` file.
pub fn parse_config<I, T>(argv: I) -> Result<ExperimentConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Usage(e.to_string().trim().to_owned()))?;
    resolve(cli)
}

/// In-memory results of one run, written by [`emit_outputs`].
#[derive(Clone, Debug, Default)]
pub struct ExperimentOutput {
    /// `(file name, contents)`, written in order.
    pub files: Vec<(String, String)>,
    pub summary: Option<serde_json::Value>,
}

impl ExperimentOutput {
    fn push_csv(&mut self, name: &str, header: &str, rows: impl IntoIterator<Item = String>) {
        let mut body = String::from(header);
        body.push('\n');
        for row in rows {
            let _ = writeln!(body, "{row}");
        }
        self.files.push((name.to_owned(), body));
    }
}

/// Runs the configured experiment and returns its tables.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    match config.command {
        Command::Metrics => runs::metrics(config),
        Command::Converge => runs::converge(config),
        Command::Persistence => runs::persistence(config),
        Command::Silo | Command::River => runs::silo(config),
        Command::Diagnose => runs::diagnose(config),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: Command,
    pub created_unix_ms: u128,
    pub files: Vec<ManifestEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Writes `config.json`, the run's files and `summary.json` into a fresh
/// `<command>_<timestamp>` directory under `config.output_dir`, then the manifest.
/// The directory is removed again if any write fails.
pub fn emit_outputs(config: &ExperimentConfig, output: &ExperimentOutput) -> Result<PathBuf> {
    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
    fs::create_dir_all(&config.output_dir)?;
    let mut dir = config.output_dir.join(format!("{}_{created}", config.command.name()));
    let mut bump = 0;
    while dir.exists() {
        bump += 1;
        dir = config.output_dir.join(format!("{}_{created}_{bump}", config.command.name()));
    }
    fs::create_dir(&dir)?;
    let written = write_run(&dir, config, output, created);
    if written.is_err() {
        let _ = fs::remove_dir_all(&dir);
    }
    written.map(|_| dir)
}

fn write_run(dir: &FsPath, config: &ExperimentConfig, output: &ExperimentOutput, created: u128) -> Result<()> {
    let mut files = vec![("config.json".to_owned(), serde_json::to_string_pretty(config)? + "\n")];
    files.extend(output.files.iter().cloned());
    if let Some(summary) = &output.summary {
        files.push(("summary.json".to_owned(), serde_json::to_string_pretty(summary)? + "\n"));
    }
    let mut entries = Vec::with_capacity(files.len());
    for (name, body) in &files {
        fs::write(dir.join(name), body)?;
        entries.push(ManifestEntry {
            path: name.clone(),
            sha256: sha256_hex(body.as_bytes()),
            bytes: body.len() as u64,
        });
    }
    let manifest = Manifest {
        command: config.command,
        created_unix_ms: created,
        files: entries,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Entry point of the `pairweb` binary; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let config = match resolve(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match serde_json::to_string_pretty(&config) {
        Ok(text) => println!("{text}"),
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_RUNTIME;
        }
    }
    match run_experiment(&config).and_then(|out| emit_outputs(&config, &out)) {
        Ok(dir) => {
            println!("wrote {}", dir.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_parse_into_a_config() {
        let c = parse_config(["pairweb", "persistence", "--alpha", "0.25", "--delta", "0.05", "--reps", "10000", "--seed", "7"])
            .unwrap();
        assert_eq!(c.command, Command::Persistence);
        assert_eq!((c.alpha, c.reps, c.seed), (0.25, 10_000, 7));
        assert_eq!(c.delta_list, vec![0.05]);
    }

    #[test]
    fn out_of_range_delta_is_a_usage_error() {
        let e = parse_config(["pairweb", "converge", "--delta", "0.7"]).unwrap_err();
        assert!(matches!(e, Error::Usage(_)), "{e}");
        assert_eq!(main_with_args(["pairweb", "converge", "--delta", "0.7"]), EXIT_USAGE);
        assert_eq!(main_with_args(["pairweb", "bogus"]), EXIT_USAGE);
    }

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"reps": 100, "seed": 3}"#).unwrap();
        let c = parse_config(["pairweb", "silo", "--config", path.to_str().unwrap(), "--reps", "200"]).unwrap();
        assert_eq!((c.reps, c.seed), (200, 3));
        fs::write(&path, r#"{"reps": 100, "colour": 3}"#).unwrap();
        assert!(parse_config(["pairweb", "silo", "--config", path.to_str().unwrap()]).is_err());
    }

    #[test]
    fn empty_output_has_config_only() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::defaults(Command::Silo);
        cfg.output_dir = dir.path().to_owned();
        let run = emit_outputs(&cfg, &ExperimentOutput::default()).unwrap();
        let manifest: Manifest = serde_json::from_str(&fs::read_to_string(run.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest.files.len(), 1);
        assert_eq!(manifest.files[0].path, "config.json");
        let body = fs::read(run.join("config.json")).unwrap();
        assert_eq!(manifest.files[0].sha256, sha256_hex(&body));
    }

    #[test]
    fn sha256_known_vector() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
