//! Voter model on the alternating sublattice: the voter at `(i, ell)`, `ell >= 1`,
//! copies the opinion of `(i + d, ell - 1)` where `d` is its arrow. Every voter of
//! row 0 starts with its own opinion. The origin is persistent when its opinion is
//! the same at every even row of the observation window.
//!
//! Read backwards, the copying arrows are walks; the origin is persistent exactly
//! when the backward walks from the column `{(0, ell)}` of the window have merged
//! by row 0.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::lattice::{rows_until, sample_arrow_field, ArrowField, Dir};
use crate::stats::Estimate;

/// Observation rows `start_row, start_row + 2, ..., final_row` of the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoterWindow {
    pub delta: f64,
    pub alpha: f64,
    /// `floor(1 / delta^2)` rounded down to even.
    pub final_row: i64,
    /// `floor(alpha / delta^2)` rounded down to even, at most `final_row`.
    pub start_row: i64,
}

impl VoterWindow {
    pub fn new(alpha: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::Domain(format!("delta = {delta} outside (0, 1/2]")));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!("alpha = {alpha} outside [0, 1]")));
        }
        let final_row = rows_until(1.0, delta) / 2 * 2;
        let start_row = (rows_until(alpha, delta) / 2 * 2).min(final_row);
        Ok(VoterWindow {
            delta,
            alpha,
            final_row,
            start_row,
        })
    }

    /// Width of a field that holds the whole backward cone of the window without wrapping.
    pub fn field_width(&self) -> i64 {
        2 * (self.final_row + 2)
    }

    pub fn field(&self, seed: u64) -> Result<ArrowField> {
        sample_arrow_field(seed, self.field_width(), self.final_row + 1)
    }

    fn observed(&self, ell: i64) -> bool {
        ell % 2 == 0 && ell >= self.start_row && ell <= self.final_row
    }

    fn check_field(&self, field: &ArrowField) -> Result<()> {
        if field.height() <= self.final_row || field.width() < self.field_width() {
            return Err(Error::BadDimensions(format!(
                "voter window needs a {}x{} field, got {}x{}",
                self.field_width(),
                self.final_row + 1,
                field.width(),
                field.height()
            )));
        }
        Ok(())
    }
}

/// Runs the forward dynamics on the cone below `(0, final_row)` and reports whether
/// the origin kept one opinion over the window.
pub fn voter_forward_once(field: &ArrowField, window: &VoterWindow) -> Result<bool> {
    window.check_field(field)?;
    let n = window.final_row;
    let offset = n + 1;
    // opinions indexed by column + offset; row 0 voters hold their own column
    let mut row: Vec<i64> = (-offset..=offset).collect();
    let mut next = row.clone();
    let mut held = None;
    for ell in 0..=n {
        if ell > 0 {
            let reach = n - ell;
            let first = if (reach + ell) % 2 == 0 { -reach } else { -reach + 1 };
            for i in (first..=reach).step_by(2) {
                let src = i + field.arrow_unchecked(i, ell).offset();
                next[(i + offset) as usize] = row[(src + offset) as usize];
            }
            std::mem::swap(&mut row, &mut next);
        }
        if window.observed(ell) {
            let op = row[offset as usize];
            if *held.get_or_insert(op) != op {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Traces the backward walks from the window column and reports whether they merged by row 0.
pub fn voter_dual_once(field: &ArrowField, window: &VoterWindow) -> Result<bool> {
    window.check_field(field)?;
    let mut walkers: Vec<i64> = Vec::new();
    for ell in (0..=window.final_row).rev() {
        if window.observed(ell) && !walkers.contains(&0) {
            walkers.push(0);
            walkers.sort_unstable();
        }
        if ell == 0 {
            break;
        }
        for i in walkers.iter_mut() {
            *i += field.arrow_unchecked(*i, ell).offset();
        }
        walkers.dedup();
    }
    Ok(walkers.len() == 1)
}

/// Exact persistence probability: a distribution over sorted walker sets, each walker
/// stepping by +-1 independently until it meets another.
pub fn voter_dual_oracle(window: &VoterWindow) -> f64 {
    let mut dist: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    dist.insert(Vec::new(), 1.0);
    for ell in (0..=window.final_row).rev() {
        if window.observed(ell) {
            dist = dist
                .into_iter()
                .map(|(mut set, p)| {
                    if !set.contains(&0) {
                        set.push(0);
                        set.sort_unstable();
                    }
                    (set, p)
                })
                .fold(BTreeMap::new(), |mut acc, (s, p)| {
                    *acc.entry(s).or_insert(0.0) += p;
                    acc
                });
        }
        if ell == 0 {
            break;
        }
        let mut moved = BTreeMap::new();
        for (set, p) in dist {
            let k = set.len();
            let weight = p / (1u64 << k) as f64;
            for bits in 0..(1u64 << k) {
                let mut s: Vec<i64> = set
                    .iter()
                    .enumerate()
                    .map(|(j, &x)| if bits >> j & 1 == 1 { x + 1 } else { x - 1 })
                    .collect();
                s.dedup();
                *moved.entry(s).or_insert(0.0) += weight;
            }
        }
        dist = moved;
    }
    dist.iter().filter(|(s, _)| s.len() == 1).map(|(_, p)| p).sum()
}

/// Runs the forward dynamics on every arrow configuration of the cone and returns
/// the fraction of persistent ones. Feasible for `final_row <= 6`.
pub fn voter_enumerate(window: &VoterWindow) -> Result<f64> {
    let n = window.final_row;
    let mut index = BTreeMap::new();
    for ell in 1..=n {
        let reach = n - ell;
        let first = if (reach + ell) % 2 == 0 { -reach } else { -reach + 1 };
        for i in (first..=reach).step_by(2) {
            let len = index.len();
            index.insert((i, ell), len);
        }
    }
    let bits = index.len();
    if bits > 24 {
        return Err(Error::Domain(format!("{bits} arrows are too many to enumerate")));
    }
    let width = window.field_width();
    let index = std::sync::Arc::new(index);
    let hits = (0..1u64 << bits)
        .into_par_iter()
        .map(|config| {
            let index = index.clone();
            let field = ArrowField::from_rule(width, n + 1, move |col, ell| {
                let i = if col > width / 2 { col - width } else { col };
                match index.get(&(i, ell)) {
                    Some(&b) if config >> b & 1 == 1 => Dir::Right,
                    _ => Dir::Left,
                }
            })?;
            voter_forward_once(&field, window).map(u64::from)
        })
        .sum::<Result<u64>>()?;
    Ok(hits as f64 / (1u64 << bits) as f64)
}

/// Forward and dual estimates of the persistence probability from independent fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistenceEstimates {
    pub window: VoterWindow,
    pub forward: Estimate,
    pub dual: Estimate,
}

impl PersistenceEstimates {
    /// Difference of the two estimates in combined standard errors.
    pub fn z_distance(&self) -> f64 {
        self.forward.z_distance(&self.dual)
    }
}

fn replica_seed(seed: u64, rep: u64, stream: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ rep.wrapping_mul(0xC2B2_AE3D_27D4_EB4F) ^ stream
}

/// Estimates the persistence probability by forward simulation and, on independent
/// fields, by the backward-walk criterion.
pub fn voter_forward_persistence(alpha: f64, delta: f64, reps: u64, seed: u64) -> Result<PersistenceEstimates> {
    if reps == 0 {
        return Err(Error::Domain("reps must be at least 1".into()));
    }
    let window = VoterWindow::new(alpha, delta)?;
    let count = |stream: u64, run: fn(&ArrowField, &VoterWindow) -> Result<bool>| -> Result<u64> {
        let hits: Vec<bool> = (0..reps)
            .into_par_iter()
            .map(|rep| run(&window.field(replica_seed(seed, rep, stream))?, &window))
            .collect::<Result<_>>()?;
        Ok(hits.iter().filter(|h| **h).count() as u64)
    };
    let params = json!({
        "alpha": alpha,
        "delta": delta,
        "start_row": window.start_row,
        "final_row": window.final_row,
    });
    let forward = count(0, voter_forward_once)?;
    let dual = count(1, voter_dual_once)?;
    Ok(PersistenceEstimates {
        window,
        forward: Estimate::proportion("persistence_forward", forward, reps, seed, params.clone()),
        dual: Estimate::proportion("persistence_dual", dual, reps, seed, params),
    })
}
