//! Pods of coalescing pairs and the reciprocal-gap metric between standard pods.
//!
//! The pod of a pair is its gap `right - left` between the later start time and
//! the coalescence time, read in compressed time `x = tanh(t)`. The standard pod
//! re-centres it on `[0, 1)`: the first half of the pod is placed at the left end,
//! the second half at the right end, and the middle is filled linearly through a
//! peak at `x = 1/2`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paths::{CoalescingPair, Path};

/// Value at `x = 1/2` of a standard pod.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MidValueRule {
    /// `anchor + 1/2 - h`: the infill has slopes exactly `+1` and `-1`.
    #[default]
    SlopeConsistent,
    /// `anchor + (1 - h) / 2`, the literal closed form; the infill slopes then
    /// exceed one in magnitude whenever `h > 0`.
    Verbatim,
}

/// How pods of pairs with `t_plus == t_coal` enter the reciprocal metric.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegenerateRule {
    /// The standard pod is the tent `min(x, 1 - x)` produced by the general
    /// construction with an empty pod.
    #[default]
    Tent,
    /// `1/p` is `+inf` everywhere: two degenerate pods are at distance 0 and a
    /// degenerate pod saturates every term against a non-degenerate one.
    InfiniteReciprocal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PodConventions {
    pub mid_value: MidValueRule,
    pub degenerate: DegenerateRule,
}

thread_local! {
    static TANH_GRIDS: RefCell<HashMap<(u64, u64), Rc<Vec<f64>>>> = RefCell::new(HashMap::new());
}

/// `tanh(path.time_at(k))` for `k < n`, memoised per `(t0, step)`.
fn tanh_grid(path: &Path, n: usize) -> Rc<Vec<f64>> {
    let key = (path.t0().to_bits(), path.step().to_bits());
    TANH_GRIDS.with(|cell| {
        let mut cache = cell.borrow_mut();
        let entry = cache.entry(key).or_insert_with(|| Rc::new(Vec::new()));
        if entry.len() < n {
            let start = entry.len();
            let grid = Rc::make_mut(entry);
            grid.extend((start..n.max(2 * start)).map(|k| path.time_at(k).tanh()));
        }
        entry.clone()
    })
}

/// The gap profile of a pair in compressed time.
#[derive(Clone, Debug)]
pub struct Pod {
    t_plus: f64,
    t_coal: f64,
    t_plus_tilde: f64,
    t_coal_tilde: f64,
    /// Sample abscissae in compressed time, starting at `t_plus_tilde`.
    xs: Vec<f64>,
    gaps: Vec<f64>,
    degenerate: bool,
}

impl Pod {
    /// Builds a pod from gap samples at real times `times[0] = t_plus < ...`.
    ///
    /// With a finite `t_coal` the last sample must sit at `t_coal` with gap 0.
    /// With `t_coal = inf` the last gap is held up to `x = 1`.
    pub fn from_samples(t_plus: f64, t_coal: f64, times: &[f64], gaps: &[f64]) -> Result<Self> {
        if times.is_empty() || times.len() != gaps.len() {
            return Err(Error::Domain("pod needs matching, non-empty samples".into()));
        }
        if times[0] != t_plus || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("pod sample times must increase from t_plus".into()));
        }
        if !(t_coal >= t_plus) || gaps.iter().any(|g| !(*g >= 0.0)) {
            return Err(Error::Domain("pod gaps must be non-negative and t_coal >= t_plus".into()));
        }
        if t_coal.is_finite() && (*times.last().unwrap() != t_coal || *gaps.last().unwrap() != 0.0) {
            return Err(Error::Domain("finite pod must end at t_coal with gap 0".into()));
        }
        Ok(Self::assemble(
            t_plus,
            t_coal,
            times.iter().map(|t| t.tanh()).collect(),
            gaps.to_vec(),
        ))
    }

    fn assemble(t_plus: f64, t_coal: f64, xs: Vec<f64>, mut gaps: Vec<f64>) -> Self {
        let degenerate = t_plus == t_coal;
        if degenerate {
            gaps.truncate(1);
            gaps[0] = 0.0;
        }
        let mut xs = xs;
        xs.truncate(gaps.len());
        Pod {
            t_plus,
            t_coal,
            t_plus_tilde: t_plus.tanh(),
            t_coal_tilde: if t_coal.is_finite() { t_coal.tanh() } else { 1.0 },
            xs,
            gaps,
            degenerate,
        }
    }

    pub fn t_plus_tilde(&self) -> f64 {
        self.t_plus_tilde
    }

    pub fn t_coal_tilde(&self) -> f64 {
        self.t_coal_tilde
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Compressed-time sample abscissae and the gaps there.
    pub fn samples(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.gaps)
    }

    /// `t_coal - t_plus`, infinite for pairs that never coalesce.
    pub fn length(&self) -> f64 {
        self.t_coal - self.t_plus
    }

    pub fn diameter(&self) -> f64 {
        self.gaps.iter().copied().fold(0.0, f64::max)
    }

    pub fn dimension(&self) -> f64 {
        self.length().max(self.diameter())
    }

    /// The gap at compressed time `x`, linear between samples and held after the last one.
    pub fn gap(&self, x: f64) -> f64 {
        interp(&self.xs, &self.gaps, x)
    }
}

/// Pod of a coalescing pair, sampled on the later path's grid.
pub fn build_pod(pair: &CoalescingPair) -> Pod {
    let gaps = pair.grid_gaps();
    let xs = tanh_grid(pair.later(), gaps.len());
    Pod::assemble(pair.t_plus(), pair.t_coal(), xs[..gaps.len()].to_vec(), gaps)
}

/// Piecewise-linear interpolation on sorted `xs`, clamped at both ends.
fn interp(xs: &[f64], vs: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return vs[0];
    }
    if x >= xs[n - 1] {
        return vs[n - 1];
    }
    let k = xs.partition_point(|&a| a <= x) - 1;
    let (x0, x1) = (xs[k], xs[k + 1]);
    if x == x0 {
        return vs[k];
    }
    vs[k] + (x - x0) / (x1 - x0) * (vs[k + 1] - vs[k])
}

/// A pod re-centred on `[0, 1)`.
#[derive(Clone, Debug)]
pub struct StandardPod {
    t_mid_tilde: f64,
    /// Half the compressed pod length, `t_mid_tilde - t_plus_tilde`.
    half: f64,
    anchor: f64,
    seg_a_x: Vec<f64>,
    seg_a_v: Vec<f64>,
    seg_b_x: Vec<f64>,
    seg_b_v: Vec<f64>,
    mid_value: f64,
    degenerate: bool,
    infinite_reciprocal: bool,
}

impl StandardPod {
    pub fn t_mid_tilde(&self) -> f64 {
        self.t_mid_tilde
    }

    pub fn half_width(&self) -> f64 {
        self.half
    }

    pub fn mid_value(&self) -> f64 {
        self.mid_value
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Samples on `[0, t_mid_tilde - t_plus_tilde]`.
    pub fn segment_a(&self) -> (&[f64], &[f64]) {
        (&self.seg_a_x, &self.seg_a_v)
    }

    /// Samples on `[1 - (t_coal_tilde - t_mid_tilde), 1]`.
    pub fn segment_b(&self) -> (&[f64], &[f64]) {
        (&self.seg_b_x, &self.seg_b_v)
    }

    /// True when `1/p` is treated as `+inf`.
    pub fn has_infinite_reciprocal(&self) -> bool {
        self.infinite_reciprocal
    }

    /// `p(x)` for `x` in `[0, 1]`; `p(1) = 0` for coalescing pairs.
    pub fn eval(&self, x: f64) -> f64 {
        if x == 0.5 {
            return self.mid_value;
        }
        if x <= self.half {
            return interp(&self.seg_a_x, &self.seg_a_v, x);
        }
        if x >= self.seg_b_x[0] {
            return interp(&self.seg_b_x, &self.seg_b_v, x);
        }
        if x < 0.5 {
            let w = (x - self.half) / (0.5 - self.half);
            self.anchor + w * (self.mid_value - self.anchor)
        } else {
            let w = (x - 0.5) / (self.seg_b_x[0] - 0.5);
            self.mid_value + w * (self.anchor - self.mid_value)
        }
    }

    /// `p` at sorted abscissae, written into `out`.
    pub(crate) fn eval_sorted(&self, xs: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.reserve(xs.len());
        let (mut ka, mut kb) = (0usize, 0usize);
        let b0 = self.seg_b_x[0];
        for &x in xs {
            let v = if x == 0.5 {
                self.mid_value
            } else if x <= self.half {
                cursor_interp(&self.seg_a_x, &self.seg_a_v, &mut ka, x)
            } else if x >= b0 {
                cursor_interp(&self.seg_b_x, &self.seg_b_v, &mut kb, x)
            } else if x < 0.5 {
                let w = (x - self.half) / (0.5 - self.half);
                self.anchor + w * (self.mid_value - self.anchor)
            } else {
                let w = (x - 0.5) / (b0 - 0.5);
                self.mid_value + w * (self.anchor - self.mid_value)
            };
            out.push(v);
        }
    }

    /// Every abscissa where `p` changes slope, in increasing order.
    pub fn abscissae(&self) -> impl Iterator<Item = f64> + '_ {
        self.seg_a_x
            .iter()
            .copied()
            .chain(std::iter::once(0.5))
            .chain(self.seg_b_x.iter().copied())
    }
}

/// Interpolation with a forward-only cursor for non-decreasing queries.
/// Agrees bit for bit with [`interp`].
#[inline]
fn cursor_interp(xs: &[f64], vs: &[f64], k: &mut usize, x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return vs[0];
    }
    if x >= xs[n - 1] {
        return vs[n - 1];
    }
    while *k + 1 < n && xs[*k + 1] <= x {
        *k += 1;
    }
    let (x0, x1) = (xs[*k], xs[*k + 1]);
    if x == x0 {
        return vs[*k];
    }
    vs[*k] + (x - x0) / (x1 - x0) * (vs[*k + 1] - vs[*k])
}

/// Standard pod of `pod` under the given conventions.
pub fn build_standard_pod(pod: &Pod, conventions: PodConventions) -> StandardPod {
    let (tp, tc) = (pod.t_plus_tilde, pod.t_coal_tilde);
    let half = if pod.degenerate { 0.0 } else { 0.5 * (tc - tp) };
    let t_mid = tp + half;
    let anchor = if pod.degenerate { 0.0 } else { pod.gap(t_mid) };

    let mut seg_a_x = Vec::new();
    let mut seg_a_v = Vec::new();
    let mut seg_b_x = vec![1.0 - half];
    let mut seg_b_v = vec![anchor];
    for (&x, &v) in pod.xs.iter().zip(&pod.gaps) {
        if x < t_mid {
            seg_a_x.push(x - tp);
            seg_a_v.push(v);
        } else if x > t_mid {
            let shifted = x + (1.0 - tc);
            if shifted > seg_b_x[seg_b_x.len() - 1] {
                seg_b_x.push(shifted);
                seg_b_v.push(v);
            }
        }
    }
    if seg_a_x.last().is_none_or(|&x| x < half) {
        seg_a_x.push(half);
        seg_a_v.push(anchor);
    }
    if pod.degenerate {
        seg_b_x.truncate(1);
        seg_b_v.truncate(1);
    }

    let mid_value = match conventions.mid_value {
        MidValueRule::SlopeConsistent => anchor + 0.5 - half,
        MidValueRule::Verbatim => anchor + 0.5 * (1.0 - half),
    };
    StandardPod {
        t_mid_tilde: t_mid,
        half,
        anchor,
        seg_a_x,
        seg_a_v,
        seg_b_x,
        seg_b_v,
        mid_value,
        degenerate: pod.degenerate,
        infinite_reciprocal: pod.degenerate && conventions.degenerate == DegenerateRule::InfiniteReciprocal,
    }
}

/// Uniform evaluation points for the reciprocal metric, tagged with the first
/// interval `[1/n, 1 - 1/n]` that contains them.
#[derive(Clone, Debug)]
pub struct DeltaGrid {
    n_max: u32,
    grid_m: usize,
    points: Vec<f64>,
    levels: Vec<u32>,
}

impl DeltaGrid {
    pub fn new(n_max: u32, grid_m: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::Domain(format!("n_max = {n_max} must be at least 2")));
        }
        if grid_m < 2 {
            return Err(Error::Domain(format!("grid_m = {grid_m} must be at least 2")));
        }
        let mut points = Vec::with_capacity((n_max as usize - 1) * grid_m);
        for n in 2..=n_max {
            let lo = 1.0 / n as f64;
            let hi = 1.0 - lo;
            let dx = (hi - lo) / (grid_m - 1) as f64;
            points.extend((0..grid_m - 1).map(|k| lo + k as f64 * dx));
            points.push(hi);
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        let levels = points
            .iter()
            .map(|&x| level_of(x, n_max).expect("grid point inside the outermost interval"))
            .collect();
        Ok(DeltaGrid {
            n_max,
            grid_m,
            points,
            levels,
        })
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn grid_m(&self) -> usize {
        self.grid_m
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `1/p` on the grid points.
    pub(crate) fn reciprocals(&self, p: &StandardPod) -> Vec<f64> {
        let mut out = Vec::new();
        p.eval_sorted(&self.points, &mut out);
        out.iter_mut().for_each(|v| *v = v.recip());
        out
    }
}

/// Smallest `n` in `2..=n_max` with `x` in `[1/n, 1 - 1/n]`.
pub(crate) fn level_of(x: f64, n_max: u32) -> Option<u32> {
    let inside = |n: u32| {
        let lo = 1.0 / n as f64;
        x >= lo && x <= 1.0 - lo
    };
    let m = x.min(1.0 - x);
    if !(m > 0.0) {
        return None;
    }
    let mut n = ((1.0 / m).ceil() as u32).clamp(2, n_max);
    while n > 2 && inside(n - 1) {
        n -= 1;
    }
    while n <= n_max && !inside(n) {
        n += 1;
    }
    (n <= n_max).then_some(n)
}

/// Folds per-level maxima into `sum_n 2^-n (S_n ∧ 1)` with `S_n` the running max.
fn capped_series(level_max: &[f64], n_max: u32) -> f64 {
    let mut sup = 0.0_f64;
    let mut total = 0.0;
    for n in 2..=n_max {
        sup = sup.max(level_max[n as usize]);
        total += 0.5f64.powi(n as i32) * sup.min(1.0);
    }
    total
}

/// `sum_{n=2}^{n_max} 2^-n`.
pub(crate) fn saturated_series(n_max: u32) -> f64 {
    (2..=n_max).map(|n| 0.5f64.powi(n as i32)).sum()
}

/// Reciprocal-gap distance between two standard pods, suprema taken on `grid`
/// plus every slope-change abscissa of either pod.
pub fn delta_on_grid(p: &StandardPod, q: &StandardPod, grid: &DeltaGrid) -> f64 {
    if let Some(v) = degenerate_shortcut(p, q, grid.n_max) {
        return v;
    }
    let rp = grid.reciprocals(p);
    let rq = grid.reciprocals(q);
    delta_with_reciprocals(p, &rp, q, &rq, grid)
}

pub(crate) fn degenerate_shortcut(p: &StandardPod, q: &StandardPod, n_max: u32) -> Option<f64> {
    match (p.infinite_reciprocal, q.infinite_reciprocal) {
        (true, true) => Some(0.0),
        (true, false) | (false, true) => Some(saturated_series(n_max)),
        (false, false) => None,
    }
}

/// Same as [`delta_on_grid`] with the grid reciprocals of both pods precomputed.
pub(crate) fn delta_with_reciprocals(
    p: &StandardPod,
    rp: &[f64],
    q: &StandardPod,
    rq: &[f64],
    grid: &DeltaGrid,
) -> f64 {
    let n_max = grid.n_max;
    let mut level_max = vec![0.0_f64; n_max as usize + 1];
    for ((&a, &b), &lvl) in rp.iter().zip(rq).zip(&grid.levels) {
        let d = (a - b).abs();
        let slot = &mut level_max[lvl as usize];
        if d > *slot {
            *slot = d;
        }
    }
    let mut xs = Vec::new();
    let mut vp = Vec::new();
    let mut vq = Vec::new();
    for (own, other) in [(p, q), (q, p)] {
        xs.clear();
        xs.extend(own.abscissae().filter(|&x| level_of(x, n_max).is_some()));
        own.eval_sorted(&xs, &mut vp);
        other.eval_sorted(&xs, &mut vq);
        for ((&x, &a), &b) in xs.iter().zip(&vp).zip(&vq) {
            let d = (a.recip() - b.recip()).abs();
            let lvl = level_of(x, n_max).unwrap() as usize;
            if d > level_max[lvl] {
                level_max[lvl] = d;
            }
        }
    }
    capped_series(&level_max, n_max)
}

/// Reciprocal-gap distance with a fresh uniform grid of `grid_m` points per interval.
pub fn delta(p: &StandardPod, q: &StandardPod, n_max: u32, grid_m: usize) -> Result<f64> {
    let grid = DeltaGrid::new(n_max, grid_m)?;
    Ok(delta_on_grid(p, q, &grid))
}

/// Bound on the reciprocal-gap distance between standard pods of pods whose
/// length and diameter are both at most `sigma`.
pub fn phi_bound(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma <= 0.5) {
        return Err(Error::Domain(format!("sigma = {sigma} outside (0, 1/2]")));
    }
    let core = 2.0 * sigma / (sigma.powf(2.0 / 3.0) - sigma * sigma);
    // first integer n with n >= sigma^(-1/3), i.e. n^3 * sigma >= 1
    let mut n = 1u32;
    while (n as f64).powi(3) * sigma < 1.0 {
        n += 1;
    }
    let tail = 0.5f64.powi(n as i32 - 1);
    Ok(core + tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::make_pair;

    fn pod_const(gap: f64, t_coal: f64, n: usize) -> Pod {
        let times: Vec<f64> = (0..=n).map(|k| t_coal * k as f64 / n as f64).collect();
        let mut gaps = vec![gap; n + 1];
        gaps[n] = 0.0;
        Pod::from_samples(0.0, t_coal, &times, &gaps).unwrap()
    }

    #[test]
    fn diagonal_pair_has_degenerate_pod() {
        let p = Path::frozen(0.0, 0.1, vec![0.1, 0.2, 0.3]).unwrap();
        let pair = make_pair(p.clone(), p).unwrap();
        let pod = build_pod(&pair);
        assert!(pod.is_degenerate());
        assert_eq!(pod.dimension(), 0.0);
        let sp = build_standard_pod(&pod, PodConventions::default());
        assert!(sp.is_degenerate());
        assert_eq!(sp.eval(1.0), 0.0);
        assert_eq!(sp.eval(0.25), 0.25);
        assert_eq!(sp.eval(0.5), 0.5);
    }

    #[test]
    fn never_coalescing_pair_maps_to_one() {
        let a = Path::frozen(0.0, 0.5, vec![0.0, 0.0]).unwrap();
        let b = Path::frozen(0.0, 0.5, vec![0.5, 0.5]).unwrap();
        let pod = build_pod(&make_pair(a, b).unwrap());
        assert_eq!(pod.t_coal_tilde(), 1.0);
        assert_eq!(pod.length(), f64::INFINITY);
        assert_eq!(pod.gap(0.999), 0.5);
    }

    #[test]
    fn unit_coalescence_time_maps_through_tanh() {
        let a = Path::frozen(0.0, 0.5, vec![0.0, 0.0, 0.0]).unwrap();
        let b = Path::frozen(0.0, 0.5, vec![0.2, 0.1, 0.0]).unwrap();
        let pod = build_pod(&make_pair(a, b).unwrap());
        assert!((pod.t_coal_tilde() - 0.7615941559557649).abs() < 1e-15);
        assert_eq!(pod.t_plus_tilde(), 0.0);
        assert!((pod.diameter() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn verbatim_mid_value_for_constant_gap() {
        let pod = pod_const(0.3, 1.0, 64);
        let conv = PodConventions {
            mid_value: MidValueRule::Verbatim,
            ..Default::default()
        };
        let sp = build_standard_pod(&pod, conv);
        let (tc, tm) = (1f64.tanh(), 0.5 * 1f64.tanh());
        assert!(sp.segment_a().1.iter().all(|&v| v == 0.3));
        let expected = 0.3 + 0.5 * (1.0 - (tc - tm));
        assert!((sp.mid_value() - expected).abs() < 1e-15);
        assert_eq!(sp.eval(0.5), sp.mid_value());
    }

    #[test]
    fn slope_consistent_infill_has_unit_slopes() {
        let a = Path::frozen(0.0, 0.05, vec![0.0; 9]).unwrap();
        let b = Path::frozen(0.0, 0.05, vec![0.2, 0.3, 0.25, 0.4, 0.3, 0.2, 0.1, 0.05, 0.0]).unwrap();
        let pod = build_pod(&make_pair(a, b).unwrap());
        let sp = build_standard_pod(&pod, PodConventions::default());
        let h = sp.half_width();
        let (x1, x2) = (h + 0.5 * (0.5 - h), 0.5 + 0.25 * (0.5 - h));
        let left_slope = (sp.eval(0.5) - sp.eval(x1)) / (0.5 - x1);
        let right_slope = (sp.eval(x2) - sp.eval(0.5)) / (x2 - 0.5);
        assert!((left_slope - 1.0).abs() < 1e-9, "{left_slope}");
        assert!((right_slope + 1.0).abs() < 1e-9, "{right_slope}");
        assert_eq!(sp.eval(0.0), 0.2);
        assert!(sp.eval(1.0).abs() < 1e-15);
    }

    #[test]
    fn delta_identity_and_degenerate_conventions() {
        let inf = PodConventions {
            degenerate: DegenerateRule::InfiniteReciprocal,
            ..Default::default()
        };
        let p = build_standard_pod(&pod_const(0.3, 1.0, 16), inf);
        assert_eq!(delta(&p, &p, 24, 64).unwrap(), 0.0);

        let d = Pod::from_samples(0.4, 0.4, &[0.4], &[0.0]).unwrap();
        let dp = build_standard_pod(&d, inf);
        assert_eq!(delta(&dp, &dp, 24, 64).unwrap(), 0.0);
        let expected: f64 = (2..=24).map(|n| 0.5f64.powi(n)).sum();
        assert_eq!(delta(&dp, &p, 24, 64).unwrap(), expected);
        assert!((expected - 0.5).abs() < 1e-7);

        let tent = build_standard_pod(&d, PodConventions::default());
        assert!(!tent.has_infinite_reciprocal());
        assert_eq!(delta(&tent, &tent, 24, 64).unwrap(), 0.0);
    }

    #[test]
    fn delta_truncation_monotone() {
        let conv = PodConventions::default();
        let p = build_standard_pod(&pod_const(0.3, 1.0, 16), conv);
        let q = build_standard_pod(&pod_const(0.1, 0.4, 16), conv);
        for n in 2..30 {
            let a = delta(&p, &q, n, 64).unwrap();
            let b = delta(&p, &q, n + 1, 64).unwrap();
            assert!(b >= a);
            assert!(b - a <= 0.5f64.powi(n as i32) + 1e-15);
        }
    }

    #[test]
    fn levels_match_interval_membership() {
        for &x in &[0.5, 0.3, 1.0 / 3.0, 0.25, 0.75, 0.05, 0.95, 1.0 / 24.0, 0.01] {
            let lvl = level_of(x, 24);
            let brute = (2..=24u32).find(|&n| x >= 1.0 / n as f64 && x <= 1.0 - 1.0 / n as f64);
            assert_eq!(lvl, brute, "x = {x}");
        }
    }

    #[test]
    fn phi_closed_form() {
        let v = phi_bound(0.125).unwrap();
        assert!((v - (0.25 / 0.234375 + 0.5)).abs() < 1e-12);
        assert!((v - 1.5667).abs() < 1e-3);
        let grid = [0.2, 0.1, 0.05, 0.01];
        let vals: Vec<f64> = grid.iter().map(|&s| phi_bound(s).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
        assert!(phi_bound(1e-9).unwrap() < 1e-2);
        assert!(phi_bound(0.0).is_err());
        assert!(phi_bound(0.6).is_err());
    }
}
