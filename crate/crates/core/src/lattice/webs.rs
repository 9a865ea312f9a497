//! Pair sets built from rescaled lattice walks: time slices, the extended slice at
//! time zero, and vertical segments at the origin.

use std::sync::Arc;

use super::{check_no_wrap, rescale, rows_until, ArrowField, LatticeSite};
use crate::error::{Error, Result};
use crate::paths::{CoalescingPair, PairSet, Path};

const WINDOW_SLACK: f64 = 1e-9;

/// Walks started from consecutive primal sites of one row, with adjacent merge indices.
#[derive(Clone, Debug)]
pub struct SliceWalks {
    pub delta: f64,
    pub row: i64,
    /// Starting columns, increasing in steps of 2.
    pub sites: Vec<i64>,
    /// Unwrapped positions from `row` to the top of the field.
    pub positions: Vec<Vec<i64>>,
    /// `merge[k]`: first index at which walks `k` and `k + 1` coincide.
    pub merge: Vec<Option<usize>>,
}

impl SliceWalks {
    /// Traces walks from every primal site of `row` with columns in `lo..=hi`.
    pub fn trace(field: &ArrowField, row: i64, lo: i64, hi: i64, delta: f64) -> Result<Self> {
        let first = if (lo + row).rem_euclid(2) == 0 { lo } else { lo + 1 };
        let sites: Vec<i64> = (first..=hi).step_by(2).collect();
        if sites.is_empty() {
            return Err(Error::NoStartingSites);
        }
        let rows = field.height() - 1 - row;
        let positions = sites
            .iter()
            .map(|&i| {
                let pos = field.trace_up(LatticeSite::new(i, row), rows)?;
                check_no_wrap(&pos, field.width())?;
                Ok(pos)
            })
            .collect::<Result<Vec<_>>>()?;
        let merge = positions
            .windows(2)
            .map(|w| w[0].iter().zip(&w[1]).position(|(a, b)| a == b))
            .collect();
        Ok(SliceWalks {
            delta,
            row,
            sites,
            positions,
            merge,
        })
    }

    /// First index from which walks `a <= b` coincide.
    pub fn merge_index(&self, a: usize, b: usize) -> Option<usize> {
        if a == b {
            return Some(0);
        }
        self.merge[a..b].iter().try_fold(0usize, |acc, m| m.map(|m| acc.max(m)))
    }

    pub fn path(&self, k: usize) -> Result<Path> {
        rescale(&self.positions[k], self.row, self.delta)
    }

    /// All ordered pairs of the walks `range`, coalescence read off the merge indices.
    fn pair_set(&self, range: std::ops::Range<usize>) -> Result<PairSet> {
        let paths: Vec<Arc<Path>> = range.clone().map(|k| self.path(k).map(Arc::new)).collect::<Result<_>>()?;
        let base = range.start;
        let mut pairs = Vec::with_capacity(paths.len() * (paths.len() + 1) / 2);
        for a in 0..paths.len() {
            for b in a..paths.len() {
                let t_coal = self
                    .merge_index(base + a, base + b)
                    .map_or(f64::INFINITY, |j| paths[a].time_at(j));
                pairs.push((a, b, CoalescingPair::from_parts(paths[a].clone(), paths[b].clone(), t_coal)));
            }
        }
        Ok(PairSet::from_indexed(paths, pairs))
    }
}

fn column_range(window: (f64, f64), delta: f64) -> Result<(i64, i64)> {
    let (lo, hi) = window;
    if !(lo <= hi && lo >= -1.0 && hi <= 1.0) {
        return Err(Error::Domain(format!("window [{lo}, {hi}] not inside [-1, 1]")));
    }
    Ok(((lo / delta - WINDOW_SLACK).ceil() as i64, (hi / delta + WINDOW_SLACK).floor() as i64))
}

/// Ordered pairs (diagonal included) of walks started on row `floor(tau / delta^2)`
/// from every primal site whose rescaled position lies in `window`.
pub fn build_slice_web(field: &ArrowField, tau: f64, delta: f64, window: (f64, f64)) -> Result<PairSet> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Domain(format!("tau = {tau} outside [0, 1]")));
    }
    let (lo, hi) = column_range(window, delta)?;
    let walks = SliceWalks::trace(field, rows_until(tau, delta), lo, hi, delta)?;
    walks.pair_set(0..walks.sites.len())
}

/// The slice at time zero over `[-1, 1]` together with its extension by
/// interpolated starts on a grid of spacing `delta / fine`.
#[derive(Clone, Debug)]
pub struct ExtendedSlice {
    pub slice: PairSet,
    pub extended: PairSet,
}

/// One path of the extended slice: a start on the fine grid running linearly
/// into the walk `parent` at time `delta^2`.
#[derive(Clone, Copy, Debug)]
struct Entry {
    m: i64,
    parent: usize,
}

impl ExtendedSlice {
    pub fn build(field: &ArrowField, delta: f64, fine: i64) -> Result<Self> {
        if fine < 1 {
            return Err(Error::Domain("fine grid subdivision must be positive".into()));
        }
        let (lo, hi) = column_range((-1.0, 1.0), delta)?;
        let m_max = (fine as f64 / delta + WINDOW_SLACK).floor() as i64;
        // parent walks cover every fine point, including one even site beyond each edge
        let parent_lo = 2 * (-m_max).div_euclid(2 * fine);
        let parent_hi = 2 * (m_max + 2 * fine - 1).div_euclid(2 * fine);
        let walks = SliceWalks::trace(field, 0, parent_lo, parent_hi, delta)?;
        let index_of = |site: i64| ((site - walks.sites[0]) / 2) as usize;

        let first_in = walks.sites.iter().position(|&i| i >= lo).ok_or(Error::NoStartingSites)?;
        let last_in = walks.sites.iter().rposition(|&i| i <= hi).ok_or(Error::NoStartingSites)?;
        let slice = walks.pair_set(first_in..last_in + 1)?;

        let mut entries = Vec::new();
        for m in -m_max..=m_max {
            let o = m.rem_euclid(2 * fine);
            let below = 2 * m.div_euclid(2 * fine);
            if o == 0 {
                entries.push(Entry { m, parent: index_of(below) });
            } else if o == fine {
                let (l, r) = (index_of(below), index_of(below + 2));
                entries.push(Entry { m, parent: l });
                if walks.positions[l][1] != walks.positions[r][1] {
                    entries.push(Entry { m, parent: r });
                }
            } else if o < fine {
                entries.push(Entry { m, parent: index_of(below) });
            } else {
                entries.push(Entry { m, parent: index_of(below + 2) });
            }
        }

        let paths: Vec<Arc<Path>> = entries
            .iter()
            .map(|e| {
                let src = &walks.positions[e.parent];
                if e.m.rem_euclid(2 * fine) == 0 {
                    return walks.path(e.parent).map(Arc::new);
                }
                let step = delta * delta;
                let x0 = (e.m as f64 * delta / fine as f64).clamp(-1.0, 1.0);
                let values = std::iter::once(x0).chain(src[1..].iter().map(|&i| delta * i as f64)).collect();
                Path::frozen(0.0, step, values).map(Arc::new)
            })
            .collect::<Result<_>>()?;
        let mut pairs = Vec::with_capacity(paths.len() * (paths.len() + 1) / 2);
        for a in 0..paths.len() {
            for b in a..paths.len() {
                let (pa, pb) = (entries[a].parent, entries[b].parent);
                let t_coal = if a == b {
                    0.0
                } else if pa == pb {
                    paths[a].time_at(1)
                } else {
                    walks.merge_index(pa, pb).map_or(f64::INFINITY, |j| paths[a].time_at(j))
                };
                pairs.push((a, b, CoalescingPair::from_parts(paths[a].clone(), paths[b].clone(), t_coal)));
            }
        }
        Ok(ExtendedSlice {
            slice,
            extended: PairSet::from_indexed(paths, pairs),
        })
    }
}

/// The slice at time zero enlarged by starts on a `delta / 4` grid of `[-1, 1]`.
pub fn build_extended_slice(field: &ArrowField, delta: f64) -> Result<PairSet> {
    Ok(ExtendedSlice::build(field, delta, 4)?.extended)
}

/// Even rows `ell` with `delta^2 * ell <= alpha`; alpha is rounded down to the lattice.
pub fn segment_start_rows(alpha: f64, delta: f64) -> Result<Vec<i64>> {
    if !(alpha >= 0.0) {
        return Err(Error::AlphaTooSmall(alpha));
    }
    let top = rows_until(alpha, delta);
    Ok((0..=top).step_by(2).collect())
}

fn segment_positions(field: &ArrowField, rows: &[i64]) -> Result<Vec<Vec<i64>>> {
    rows.iter()
        .map(|&ell| {
            let pos = field.trace_up(LatticeSite::new(0, ell), field.height() - 1 - ell)?;
            check_no_wrap(&pos, field.width())?;
            Ok(pos)
        })
        .collect()
}

/// Ordered pairs of walks started at the origin column from every even row up to `alpha`.
pub fn build_segment_web(field: &ArrowField, alpha: f64, delta: f64) -> Result<PairSet> {
    let rows = segment_start_rows(alpha, delta)?;
    let paths = segment_positions(field, &rows)?
        .iter()
        .zip(&rows)
        .map(|(pos, &ell)| rescale(pos, ell, delta).map(Arc::new))
        .collect::<Result<Vec<_>>>()?;
    PairSet::all_pairs(paths)
}

/// Coalescence time of the walks through the leftmost and rightmost positions
/// reached at the top start row by the segment walks.
pub fn extreme_pair_time(field: &ArrowField, alpha: f64, delta: f64) -> Result<f64> {
    let rows = segment_start_rows(alpha, delta)?;
    let top = *rows.last().unwrap();
    let at_top: Vec<i64> = segment_positions(field, &rows)?
        .iter()
        .zip(&rows)
        .map(|(pos, &ell)| pos[(top - ell) as usize])
        .collect();
    let left = *at_top.iter().min().unwrap();
    let right = *at_top.iter().max().unwrap();
    let rest = field.height() - 1 - top;
    let a = field.trace_up(LatticeSite::new(left, top), rest)?;
    let b = field.trace_up(LatticeSite::new(right, top), rest)?;
    let step = delta * delta;
    Ok(a.iter()
        .zip(&b)
        .position(|(x, y)| x == y)
        .map_or(f64::INFINITY, |k| (top + k as i64) as f64 * step))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::sample_arrow_field;
    use crate::paths::make_pair;

    #[test]
    fn slice_pair_count_and_start_times() {
        let field = ArrowField::for_scale(3, 0.1, 2.0).unwrap();
        let set = build_slice_web(&field, 0.35, 0.1, (-0.1, 0.1)).unwrap();
        // row 35 is odd: sites -1 and 1 only
        assert_eq!(set.paths().len(), 2);
        assert_eq!(set.len(), 3);
        for p in set.paths() {
            assert!((p.t0() - 0.35).abs() < 1e-12);
            assert_eq!(p.t0(), 35.0 * (0.1 * 0.1));
        }
        let set = build_slice_web(&field, 0.0, 0.1, (-0.2, 0.2)).unwrap();
        assert_eq!(set.paths().len(), 3);
        assert_eq!(set.len(), 6);
        assert!(matches!(
            build_slice_web(&field, 0.0, 0.1, (0.01, 0.05)),
            Err(Error::NoStartingSites)
        ));
    }

    #[test]
    fn slice_pairs_agree_with_make_pair() {
        for seed in 0..5 {
            let field = ArrowField::for_scale(seed, 0.1, 2.0).unwrap();
            let set = build_slice_web(&field, 0.0, 0.1, (-1.0, 1.0)).unwrap();
            assert_eq!(set.paths().len(), 11);
            for pair in set.iter() {
                let check = make_pair(pair.left().clone(), pair.right().clone()).unwrap();
                assert_eq!(check, *pair);
            }
        }
    }

    #[test]
    fn extended_slice_structure() {
        let delta = 0.1;
        for seed in 0..4 {
            let field = ArrowField::for_scale(seed, delta, 2.0).unwrap();
            let ext = ExtendedSlice::build(&field, delta, 4).unwrap();
            assert_eq!(ext.slice.paths().len(), 11);
            // every walk is in the extended table, unchanged
            for p in ext.slice.paths() {
                assert!(ext.extended.paths().iter().any(|q| **q == **p));
            }
            for pair in ext.extended.iter() {
                let check = make_pair(pair.left().clone(), pair.right().clone()).unwrap();
                assert_eq!(check, *pair);
            }
            // odd lattice points carry two paths unless their parents meet at once
            let odd: Vec<_> = ext.extended.paths().iter().filter(|p| (p.x0() - 0.1).abs() < 1e-12).collect();
            assert!(odd.len() == 1 || odd.len() == 2);
            if odd.len() == 2 {
                assert_ne!(odd[0].values()[1], odd[1].values()[1]);
            }
        }
    }

    #[test]
    fn segment_web_examples() {
        let delta = 0.1;
        let field = ArrowField::for_scale(1, delta, 2.0).unwrap();
        let set = build_segment_web(&field, 0.0, delta).unwrap();
        assert_eq!(set.len(), 1);
        assert!(set.pairs()[0].is_degenerate());
        let set = build_segment_web(&field, 4.0 * delta * delta, delta).unwrap();
        assert_eq!(segment_start_rows(4.0 * delta * delta, delta).unwrap(), vec![0, 2, 4]);
        assert_eq!(set.len(), 6);
        set.validate().unwrap();
        assert!(matches!(segment_start_rows(-0.1, delta), Err(Error::AlphaTooSmall(_))));
    }

    #[test]
    fn narrow_cylinder_is_reported() {
        let field = sample_arrow_field(0, 8, 400).unwrap();
        assert!(matches!(
            build_slice_web(&field, 0.0, 0.1, (-0.2, 0.2)),
            Err(Error::WidthTooSmall { .. })
        ));
    }
}
