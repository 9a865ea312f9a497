//! Arrow fields on the even sublattice of a cylinder and the walks they drive.
//!
//! An arrow at site `(i, ell)` is a left/right choice. Depending on the model it is
//! read as an upward step (`(i, ell) -> (i + d, ell + 1)`), a voter copying its
//! neighbour `(i + d, ell - 1)`, or a silo bead resting on `(i + d, ell - 1)`.

mod webs;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paths::Path;

pub use webs::{
    build_extended_slice, build_segment_web, build_slice_web, extreme_pair_time, segment_start_rows,
    ExtendedSlice, SliceWalks,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    Left,
    Right,
}

impl Dir {
    #[inline]
    pub fn offset(self) -> i64 {
        match self {
            Dir::Left => -1,
            Dir::Right => 1,
        }
    }

    #[inline]
    pub fn flip(self) -> Dir {
        match self {
            Dir::Left => Dir::Right,
            Dir::Right => Dir::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSite {
    pub i: i64,
    pub ell: i64,
}

impl LatticeSite {
    pub fn new(i: i64, ell: i64) -> Self {
        LatticeSite { i, ell }
    }

    pub fn is_primal(self) -> bool {
        (self.i + self.ell).rem_euclid(2) == 0
    }

    /// Rescaled space-time point `(delta * i, delta^2 * ell)`.
    pub fn rescaled(self, delta: f64) -> (f64, f64) {
        (delta * self.i as f64, self.ell as f64 * (delta * delta))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Primal,
    Dual,
}

type Rule = Arc<dyn Fn(i64, i64) -> Dir + Send + Sync>;

#[derive(Clone)]
enum Source {
    Hashed(u64),
    Rule(Rule),
}

/// A seeded periodic field of left/right arrows.
#[derive(Clone)]
pub struct ArrowField {
    source: Source,
    width: i64,
    height: i64,
    parity: Parity,
}

impl fmt::Debug for ArrowField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let src = match &self.source {
            Source::Hashed(seed) => format!("seed {seed}"),
            Source::Rule(_) => "rule".to_owned(),
        };
        write!(f, "ArrowField({src}, {}x{}, {:?})", self.width, self.height, self.parity)
    }
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic fair bit for `(seed, i, ell)`.
#[inline]
fn hashed_bit(seed: u64, i: u64, ell: u64) -> bool {
    let h = splitmix64(seed ^ splitmix64(i.wrapping_mul(0xD6E8_FEB8_6659_FD93) ^ splitmix64(ell)));
    h >> 63 == 1
}

fn check_dims(width: i64, height: i64) -> Result<()> {
    if width < 4 || width % 2 != 0 {
        return Err(Error::BadDimensions(format!("width {width} must be even and at least 4")));
    }
    if height < 1 {
        return Err(Error::BadDimensions(format!("height {height} must be positive")));
    }
    Ok(())
}

/// Samples a primal field whose arrows are derived from `seed` on demand.
pub fn sample_arrow_field(seed: u64, width: i64, height: i64) -> Result<ArrowField> {
    check_dims(width, height)?;
    Ok(ArrowField {
        source: Source::Hashed(seed),
        width,
        height,
        parity: Parity::Primal,
    })
}

/// Upward dual field: the arrow at dual site `(i, ell)` is opposite to the primal
/// arrow at `(i, ell + 1)`, so no dual edge crosses a primal downward edge.
pub fn dual_arrow_field(field: &ArrowField) -> Result<ArrowField> {
    if field.parity != Parity::Primal {
        return Err(Error::Domain("dual of a dual field".into()));
    }
    if field.height < 2 {
        return Err(Error::BadDimensions("dual field needs a primal field of height >= 2".into()));
    }
    let primal = field.clone();
    Ok(ArrowField {
        source: Source::Rule(Arc::new(move |i, ell| primal.arrow_unchecked(i, ell + 1).flip())),
        width: field.width,
        height: field.height - 1,
        parity: Parity::Dual,
    })
}

impl ArrowField {
    /// A primal field with arrows given by `rule(i, ell)`; `i` is reduced modulo the width.
    pub fn from_rule(
        width: i64,
        height: i64,
        rule: impl Fn(i64, i64) -> Dir + Send + Sync + 'static,
    ) -> Result<Self> {
        check_dims(width, height)?;
        Ok(ArrowField {
            source: Source::Rule(Arc::new(rule)),
            width,
            height,
            parity: Parity::Primal,
        })
    }

    /// Default field for rescaled experiments: width `16 / delta` rounded up to an
    /// even number, rows up to time `horizon`.
    pub fn for_scale(seed: u64, delta: f64, horizon: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::Domain(format!("delta = {delta} outside (0, 1/2]")));
        }
        let width = 2 * (8.0 / delta).ceil() as i64;
        sample_arrow_field(seed, width.max(4), rows_until(horizon, delta) + 1)
    }

    pub fn seed(&self) -> Option<u64> {
        match self.source {
            Source::Hashed(seed) => Some(seed),
            Source::Rule(_) => None,
        }
    }

    pub fn width(&self) -> i64 {
        self.width
    }

    pub fn height(&self) -> i64 {
        self.height
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    fn has_parity(&self, i: i64, ell: i64) -> bool {
        let even = (i + ell).rem_euclid(2) == 0;
        even == (self.parity == Parity::Primal)
    }

    /// Arrow at `(i, ell)` with `i` taken modulo the width.
    pub fn arrow(&self, i: i64, ell: i64) -> Result<Dir> {
        if !self.has_parity(i, ell) {
            return Err(Error::Parity { i, ell });
        }
        if ell < 0 || ell >= self.height {
            return Err(Error::OutOfField { i, ell });
        }
        Ok(self.arrow_unchecked(i, ell))
    }

    #[inline]
    pub(crate) fn arrow_unchecked(&self, i: i64, ell: i64) -> Dir {
        let col = i.rem_euclid(self.width);
        match &self.source {
            Source::Hashed(seed) => {
                if hashed_bit(*seed, col as u64, ell as u64) {
                    Dir::Right
                } else {
                    Dir::Left
                }
            }
            Source::Rule(rule) => rule(col, ell),
        }
    }

    /// Unwrapped positions of the upward walk from `start` for `rows` steps.
    pub fn trace_up(&self, start: LatticeSite, rows: i64) -> Result<Vec<i64>> {
        if !self.has_parity(start.i, start.ell) {
            return Err(Error::Parity { i: start.i, ell: start.ell });
        }
        if start.ell < 0 || rows < 0 || start.ell + rows > self.height {
            return Err(Error::OutOfField {
                i: start.i,
                ell: start.ell + rows,
            });
        }
        let mut out = Vec::with_capacity(rows as usize + 1);
        let mut i = start.i;
        out.push(i);
        for ell in start.ell..start.ell + rows {
            i += self.arrow_unchecked(i, ell).offset();
            out.push(i);
        }
        Ok(out)
    }

    pub fn stub(&self) -> Option<FieldStub> {
        self.seed().map(|seed| FieldStub {
            seed,
            width: self.width,
            height: self.height,
        })
    }
}

/// The persisted form of a hashed field; arrows are re-derived from the seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldStub {
    pub seed: u64,
    pub width: i64,
    pub height: i64,
}

impl FieldStub {
    pub fn field(&self) -> Result<ArrowField> {
        sample_arrow_field(self.seed, self.width, self.height)
    }
}

/// `floor(t / delta^2)` with a guard against `1/0.1^2 = 99.999...`.
pub fn rows_until(t: f64, delta: f64) -> i64 {
    (t / (delta * delta) + 1e-9).floor() as i64
}

/// Rescales unwrapped walk positions into a frozen path started at row `ell`.
pub(crate) fn rescale(positions: &[i64], ell: i64, delta: f64) -> Result<Path> {
    let step = delta * delta;
    let mut values: Vec<f64> = positions.iter().map(|&i| delta * i as f64).collect();
    // sites on the window edge can land one ulp outside it
    if values[0].abs() > 1.0 && values[0].abs() < 1.0 + 1e-12 {
        values[0] = values[0].clamp(-1.0, 1.0);
    }
    Path::frozen(ell as f64 * step, step, values)
}

/// Upward walk from `start`, rescaled by `delta`, for `horizon_rows` steps.
pub fn walk_from(field: &ArrowField, start: LatticeSite, delta: f64, horizon_rows: i64) -> Result<Path> {
    if field.parity != Parity::Primal {
        return Err(Error::Parity { i: start.i, ell: start.ell });
    }
    let pos = field.trace_up(start, horizon_rows)?;
    rescale(&pos, start.ell, delta)
}

/// Fails when a walk from `start` strays half the circumference away.
pub(crate) fn check_no_wrap(positions: &[i64], width: i64) -> Result<()> {
    let start = positions[0];
    if let Some(&reached) = positions.iter().find(|&&i| (i - start).abs() >= width / 2) {
        return Err(Error::WidthTooSmall { start, reached, width });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_field() {
        let a = sample_arrow_field(42, 64, 64).unwrap();
        let b = sample_arrow_field(42, 64, 64).unwrap();
        for ell in 0..64 {
            for i in (ell % 2..64).step_by(2) {
                assert_eq!(a.arrow(i, ell).unwrap(), b.arrow(i, ell).unwrap());
            }
        }
    }

    #[test]
    fn arrows_are_fair() {
        let f = sample_arrow_field(7, 1000, 200).unwrap();
        let mut right = 0u64;
        let mut n = 0u64;
        for ell in 0..200 {
            for i in (ell % 2..1000).step_by(2) {
                n += 1;
                right += (f.arrow(i, ell).unwrap() == Dir::Right) as u64;
            }
        }
        assert_eq!(n, 100_000);
        let frac = right as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.005, "{frac}");
    }

    #[test]
    fn parity_and_bounds_are_checked() {
        let f = sample_arrow_field(1, 8, 4).unwrap();
        assert!(matches!(f.arrow(1, 0), Err(Error::Parity { .. })));
        assert!(matches!(f.arrow(0, 4), Err(Error::OutOfField { .. })));
        assert!(matches!(sample_arrow_field(1, 7, 4), Err(Error::BadDimensions(_))));
        assert!(matches!(sample_arrow_field(1, 2, 4), Err(Error::BadDimensions(_))));
        assert!(f.arrow(-2, 0).is_ok());
    }

    #[test]
    fn all_right_walk_is_a_straight_line() {
        let f = ArrowField::from_rule(16, 10, |_, _| Dir::Right).unwrap();
        let delta = 0.1;
        let p = walk_from(&f, LatticeSite::new(0, 0), delta, 5).unwrap();
        for k in 0..=5 {
            assert!((p.values()[k] - delta * k as f64).abs() < 1e-15);
        }
        let slope = (p.values()[5] - p.values()[0]) / (p.time_at(5) - p.time_at(0));
        assert!((slope - 1.0 / delta).abs() < 1e-9);
    }

    #[test]
    fn walks_share_suffix_after_meeting() {
        let f = sample_arrow_field(3, 32, 40).unwrap();
        let a = f.trace_up(LatticeSite::new(0, 0), 39).unwrap();
        let b = f.trace_up(LatticeSite::new(2, 0), 39).unwrap();
        if let Some(k) = (0..a.len()).find(|&k| a[k] == b[k]) {
            assert_eq!(a[k..], b[k..]);
        }
        assert!(a.iter().zip(&b).all(|(x, y)| x <= y));
    }

    #[test]
    fn rescaling_maps_sites() {
        let (x, t) = LatticeSite::new(3, 5).rescaled(0.1);
        assert!((x - 0.3).abs() < 1e-15);
        assert!((t - 0.05).abs() < 1e-15);
        let f = sample_arrow_field(5, 16, 10).unwrap();
        let p = walk_from(&f, LatticeSite::new(3, 5), 0.1, 4).unwrap();
        assert_eq!(p.t0(), 5.0 * (0.1 * 0.1));
        assert_eq!(p.x0(), 0.1 * 3.0);
    }

    #[test]
    fn dual_arrows_oppose_primal_and_never_cross() {
        let all_left = ArrowField::from_rule(8, 6, |_, _| Dir::Left).unwrap();
        let dual = dual_arrow_field(&all_left).unwrap();
        for ell in 0..5 {
            for i in ((ell + 1) % 2..8).step_by(2) {
                assert_eq!(dual.arrow(i, ell).unwrap(), Dir::Right);
            }
        }
        let f = sample_arrow_field(11, 64, 64).unwrap();
        let d = dual_arrow_field(&f).unwrap();
        let mut crossings = 0;
        for ell in 0..63 {
            for i in ((ell + 1) % 2..64).step_by(2) {
                let e = d.arrow(i, ell).unwrap().offset();
                // primal beads of row ell + 1 near the dual edge, each resting on row ell
                for j in [i - 2, i, i + 2] {
                    let below = j + f.arrow(j, ell + 1).unwrap().offset();
                    let (lo, hi) = (i - below, i + e - j);
                    if lo * hi < 0 {
                        crossings += 1;
                    }
                }
            }
        }
        assert_eq!(crossings, 0);
    }

    #[test]
    fn stub_round_trip() {
        let f = sample_arrow_field(9, 12, 5).unwrap();
        let stub = f.stub().unwrap();
        let text = serde_json::to_string(&stub).unwrap();
        assert_eq!(text, r#"{"seed":9,"width":12,"height":5}"#);
        let g: FieldStub = serde_json::from_str(&text).unwrap();
        assert_eq!(g.field().unwrap().arrow(4, 2).unwrap(), f.arrow(4, 2).unwrap());
    }
}
