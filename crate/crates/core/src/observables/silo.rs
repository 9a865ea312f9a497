//! Silo weights on a periodic bead lattice, river outputs, and the measures of
//! the regions enclosed by dual upward paths.
//!
//! The bead at `(i, ell)`, `ell >= 1`, rests on `(i + d, ell - 1)` where `d` is its
//! arrow. The top row of the field carries no load.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::lattice::{dual_arrow_field, rows_until, ArrowField};

/// Bottom-row weights: each bead weighs one plus the weight of the beads resting on it.
pub fn dp_weights(field: &ArrowField) -> BTreeMap<i64, u64> {
    let w = field.width();
    let h = field.height();
    let mut cur = vec![1u64; (w / 2) as usize];
    for ell in (1..h).rev() {
        let mut below = vec![1u64; cur.len()];
        for (k, &load) in cur.iter().enumerate() {
            let i = 2 * k as i64 + ell.rem_euclid(2);
            let j = (i + field.arrow_unchecked(i, ell).offset()).rem_euclid(w);
            below[(j / 2) as usize] += load;
        }
        cur = below;
    }
    cur.iter().enumerate().map(|(k, &v)| (2 * k as i64, v)).collect()
}

/// Routes one unit of water from every bead down its chain of supports and
/// counts the arrivals at each bottom site.
pub fn river_outputs(field: &ArrowField) -> BTreeMap<i64, u64> {
    let w = field.width();
    let mut out: BTreeMap<i64, u64> = (0..w).step_by(2).map(|i| (i, 0)).collect();
    for ell in 0..field.height() {
        for i in (ell.rem_euclid(2)..w).step_by(2) {
            let mut j = i;
            for row in (1..=ell).rev() {
                j = (j + field.arrow_unchecked(j, row).offset()).rem_euclid(w);
            }
            *out.get_mut(&j).unwrap() += 1;
        }
    }
    out
}

/// The region between the dual upward paths from `(i - 1, 0)` and `(i + 1, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnclosedRegion {
    /// Beads strictly between the two dual paths, row by row.
    pub beads: u64,
    /// Row at which the dual paths meet, `None` when they reach the top row apart.
    pub closed_at: Option<i64>,
    /// Unwrapped dual positions `(left, right)` per row up to closure or the top row.
    pub boundary: Vec<(i64, i64)>,
}

/// Traces the dual paths around bottom site `i`; the top row of the field acts as a lid.
pub fn enclosed_region(field: &ArrowField, i: i64) -> Result<EnclosedRegion> {
    if i.rem_euclid(2) != 0 {
        return Err(Error::Parity { i, ell: 0 });
    }
    let h = field.height();
    let dual = (h > 1).then(|| dual_arrow_field(field)).transpose()?;
    let (mut l, mut r) = (i - 1, i + 1);
    let mut beads = 0u64;
    let mut boundary = vec![(l, r)];
    let mut closed_at = None;
    for ell in 0..h {
        beads += ((r - l) / 2) as u64;
        if ell == h - 1 {
            break;
        }
        let d = dual.as_ref().unwrap();
        l += d.arrow_unchecked(l, ell).offset();
        r += d.arrow_unchecked(r, ell).offset();
        boundary.push((l, r));
        if l == r {
            closed_at = Some(ell + 1);
            break;
        }
    }
    Ok(EnclosedRegion {
        beads,
        closed_at,
        boundary,
    })
}

/// Number of beads enclosed by the dual upward paths around bottom site `i`.
pub fn enclosed_bead_count(field: &ArrowField, i: i64) -> Result<u64> {
    Ok(enclosed_region(field, i)?.beads)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    /// Space-time area between the rescaled dual paths.
    GeometricArea,
    /// Enclosed bead count.
    BeadCount,
}

impl MeasureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasureKind::GeometricArea => "geometric-area",
            MeasureKind::BeadCount => "bead-count",
        }
    }
}

/// Atoms at positions `2 * delta * k` of the window.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMeasure {
    pub delta: f64,
    pub kind: MeasureKind,
    pub atoms: Vec<(f64, f64)>,
}

impl WeightMeasure {
    pub const CSV_HEADER: &'static str = "position,mass,kind";

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn csv_rows(&self) -> impl Iterator<Item = String> + '_ {
        self.atoms
            .iter()
            .map(move |(x, m)| format!("{},{},{}", fmt_f64(*x), fmt_f64(*m), self.kind.as_str()))
    }
}

/// Weight measure of the bottom sites whose rescaled position lies in `window`.
///
/// With `horizon = None` every enclosed region must close inside the field and
/// [`Error::PathsDidNotCoalesce`] is returned otherwise. With `Some(t)` the
/// regions are cut at time `t`.
pub fn weight_measure(
    field: &ArrowField,
    delta: f64,
    window: (f64, f64),
    kind: MeasureKind,
    horizon: Option<f64>,
) -> Result<WeightMeasure> {
    let (lo, hi) = window;
    let lid_row = match horizon {
        Some(t) => {
            let r = rows_until(t, delta);
            if r > field.height() - 1 {
                return Err(Error::BadDimensions(format!(
                    "horizon {t} needs {} rows, field has {}",
                    r + 1,
                    field.height()
                )));
            }
            r
        }
        None => field.height() - 1,
    };
    let first = 2 * ((lo / (2.0 * delta) - 1e-9).ceil() as i64);
    let last = 2 * ((hi / (2.0 * delta) + 1e-9).floor() as i64);
    let mut atoms = Vec::new();
    for i in (first..=last).step_by(2) {
        let region = enclosed_region(field, i)?;
        let closed = region.closed_at.filter(|&c| c <= lid_row);
        if horizon.is_none() && closed.is_none() {
            return Err(Error::PathsDidNotCoalesce { site: i });
        }
        let rows = &region.boundary[..=(closed.unwrap_or(lid_row) as usize).min(region.boundary.len() - 1)];
        let mass = match kind {
            MeasureKind::BeadCount => rows.iter().map(|(l, r)| ((r - l) / 2) as f64).sum(),
            MeasureKind::GeometricArea => {
                let dt = delta * delta;
                rows.windows(2)
                    .map(|w| 0.5 * dt * delta * ((w[0].1 - w[0].0) + (w[1].1 - w[1].0)) as f64)
                    .sum()
            }
        };
        atoms.push((delta * i as f64, mass));
    }
    Ok(WeightMeasure { delta, kind, atoms })
}

/// `sum mass * h(position)` over the atoms of `mu`.
pub fn integrate_against(mu: &WeightMeasure, h: impl Fn(f64) -> f64) -> f64 {
    mu.atoms.iter().map(|&(x, m)| m * h(x)).sum()
}
