//! Functionals of pair webs and the lattice models read off an arrow field:
//! persistence, silo weights and river outputs, voter persistence, and
//! double-pair statistics.

mod diagnostics;
mod silo;
mod voter;

pub use diagnostics::{double_pair_diagnostics, DiagnosticsReport};
pub use silo::{
    dp_weights, enclosed_bead_count, enclosed_region, integrate_against, river_outputs, weight_measure,
    EnclosedRegion, MeasureKind, WeightMeasure,
};
pub use voter::{
    voter_dual_once, voter_dual_oracle, voter_enumerate, voter_forward_once, voter_forward_persistence,
    PersistenceEstimates, VoterWindow,
};

use crate::error::{Error, Result};
use crate::lattice::{ArrowField, LatticeSite};
use crate::paths::{make_pair, PairSet};

/// Largest coalescence time over the pairs of `set`; infinity propagates.
pub fn persistence_sup(set: &PairSet) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(set.iter().map(|p| p.t_coal()).fold(f64::NEG_INFINITY, f64::max))
}

/// Coalescence time of the pair formed by the leftmost and rightmost paths of
/// `set` at the latest start time; among paths at an extreme position the one
/// started last is taken.
pub fn extreme_pair_reduction(set: &PairSet) -> Result<f64> {
    let paths = set.paths();
    if paths.is_empty() {
        return Err(Error::EmptySet);
    }
    let level = paths.iter().map(|p| p.t0()).fold(f64::NEG_INFINITY, f64::max);
    let mut at_level = Vec::with_capacity(paths.len());
    for p in paths {
        at_level.push((p.eval(level)?, p.t0()));
    }
    let pick = |better: &dyn Fn(f64, f64) -> bool| {
        (0..paths.len())
            .reduce(|k, j| {
                let (xk, tk) = at_level[k];
                let (xj, tj) = at_level[j];
                if better(xj, xk) || (xj == xk && tj > tk) {
                    j
                } else {
                    k
                }
            })
            .unwrap()
    };
    let left = pick(&|a, b| a < b);
    let right = pick(&|a, b| a > b);
    Ok(make_pair(paths[left].clone(), paths[right].clone())?.t_coal())
}

/// First step at which the upward walks from `(i, 0)` and `(i + gap, 0)` meet, within `rows`.
pub fn meeting_step(field: &ArrowField, i: i64, gap: i64, rows: i64) -> Result<Option<usize>> {
    let a = field.trace_up(LatticeSite::new(i, 0), rows)?;
    let b = field.trace_up(LatticeSite::new(i + gap, 0), rows)?;
    Ok(a.iter().zip(&b).position(|(x, y)| x == y))
}

/// Exact probability that two walks `gap` lattice units apart (even) have not met
/// after `n` steps: the gap moves by -2, 0, +2 with probabilities 1/4, 1/2, 1/4.
pub fn gap_survival(gap: i64, n: usize) -> f64 {
    assert!(gap > 0 && gap % 2 == 0, "gap must be positive and even");
    let start = (gap / 2) as usize;
    let mut p = vec![0.0; start + n + 2];
    p[start] = 1.0;
    for _ in 0..n {
        let mut q = vec![0.0; p.len()];
        for k in 1..p.len() - 1 {
            q[k - 1] += 0.25 * p[k];
            q[k] += 0.5 * p[k];
            q[k + 1] += 0.25 * p[k];
        }
        q[0] = 0.0;
        p = q;
    }
    p.iter().sum()
}
