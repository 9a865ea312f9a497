pub mod brownian;
pub mod error;
pub mod experiments;
pub mod io;
pub mod lattice;
pub mod metrics;
pub mod observables;
pub mod paths;
pub mod pods;
pub mod stats;

pub use error::{Error, Result};
pub use paths::{coalescence_time, eval_path, make_pair, CoalescingPair, PairSet, Path};
