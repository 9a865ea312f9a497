//! Distances between paths, between coalescing pairs, and between finite pair sets.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::paths::{CoalescingPair, PairSet, Path};
use crate::pods::{
    build_pod, build_standard_pod, degenerate_shortcut, delta_with_reciprocals, DeltaGrid,
    PodConventions, StandardPod,
};

/// Truncation and pod conventions shared by every metric evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub n_max: u32,
    pub grid_m: usize,
    #[serde(default)]
    pub conventions: PodConventions,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams {
            n_max: 24,
            grid_m: 512,
            conventions: PodConventions::default(),
        }
    }
}

impl MetricParams {
    pub fn new(n_max: u32, grid_m: usize) -> Self {
        MetricParams {
            n_max,
            grid_m,
            ..Default::default()
        }
    }

    pub fn with_conventions(mut self, conventions: PodConventions) -> Self {
        self.conventions = conventions;
        self
    }
}

/// `sup |f - g|` over `[0, n]` for `n = 1..=n_max`, both paths hat-extended.
fn running_sups(f: &Path, g: &Path, n_max: u32) -> Result<Vec<f64>> {
    let mut sups = Vec::with_capacity(n_max as usize);
    let mut m = 0.0_f64;
    let mut next_int = 1u32;

    if f.t0() == g.t0() && f.step() == g.step() {
        let last = f.last_index().max(g.last_index());
        for k in 0..=last {
            let t = f.time_at(k);
            while next_int <= n_max && (next_int as f64) < t {
                m = m.max((f.eval(next_int as f64)? - g.eval(next_int as f64)?).abs());
                sups.push(m);
                next_int += 1;
            }
            if next_int > n_max {
                break;
            }
            if k > f.last_index() || k > g.last_index() {
                // one side has run past its grid: only frozen paths get here
                m = m.max((f.eval(t)? - g.eval(t)?).abs());
            } else {
                m = m.max((f.values()[k] - g.values()[k]).abs());
            }
        }
    } else {
        let mut kf = 0usize;
        let mut kg = 0usize;
        let mut prev = f64::NEG_INFINITY;
        m = (f.x0() - g.x0()).abs().max(m);
        loop {
            let tf = (kf <= f.last_index()).then(|| f.time_at(kf));
            let tg = (kg <= g.last_index()).then(|| g.time_at(kg));
            let t = match (tf, tg) {
                (Some(a), Some(b)) => a.min(b),
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => break,
            };
            if tf == Some(t) {
                kf += 1;
            }
            if tg == Some(t) {
                kg += 1;
            }
            while next_int <= n_max && (next_int as f64) < t {
                m = m.max((f.eval(next_int as f64)? - g.eval(next_int as f64)?).abs());
                sups.push(m);
                next_int += 1;
            }
            if next_int > n_max {
                break;
            }
            if t > prev {
                m = m.max((f.eval(t)? - g.eval(t)?).abs());
                prev = t;
            }
        }
    }
    while next_int <= n_max {
        m = m.max((f.eval(next_int as f64)? - g.eval(next_int as f64)?).abs());
        sups.push(m);
        next_int += 1;
    }
    Ok(sups)
}

/// `|t0 - s0| ∨ sum_{n=1}^{n_max} 2^-n (sup_{[0,n]} |f - g| ∧ 1)` with hat-extended paths.
pub fn d_prime(f: &Path, g: &Path, n_max: u32) -> Result<f64> {
    if n_max < 1 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let sups = running_sups(f, g, n_max)?;
    let series: f64 = sups
        .iter()
        .enumerate()
        .map(|(k, s)| 0.5f64.powi(k as i32 + 1) * s.min(1.0))
        .sum();
    Ok((f.t0() - g.t0()).abs().max(series))
}

/// Max-min over the two paths of `a` against those of `b`, given the four path distances
/// `[ll, lr, rl, rr]` (first letter from `a`).
#[inline]
fn directed_from(d: [f64; 4]) -> f64 {
    d[0].min(d[1]).max(d[2].min(d[3]))
}

/// Symmetric Hausdorff-type distance between pairs seen as two-point sets of paths.
#[inline]
fn bar_from(d: [f64; 4]) -> f64 {
    directed_from(d).max(directed_from([d[0], d[2], d[1], d[3]]))
}

/// Hausdorff distance between `{a.left, a.right}` and `{b.left, b.right}` under [`d_prime`].
pub fn bar_d(a: &CoalescingPair, b: &CoalescingPair, n_max: u32) -> Result<f64> {
    let d = [
        d_prime(a.left(), b.left(), n_max)?,
        d_prime(a.left(), b.right(), n_max)?,
        d_prime(a.right(), b.left(), n_max)?,
        d_prime(a.right(), b.right(), n_max)?,
    ];
    Ok(bar_from(d))
}

/// Reciprocal-gap distance between the standard pods of two pairs.
pub fn pod_distance(a: &CoalescingPair, b: &CoalescingPair, params: &MetricParams) -> Result<f64> {
    let grid = DeltaGrid::new(params.n_max, params.grid_m)?;
    let p = build_standard_pod(&build_pod(a), params.conventions);
    let q = build_standard_pod(&build_pod(b), params.conventions);
    Ok(crate::pods::delta_on_grid(&p, &q, &grid))
}

/// `bar_d + delta` on the pairs' standard pods.
pub fn tilde_d(a: &CoalescingPair, b: &CoalescingPair, params: &MetricParams) -> Result<f64> {
    Ok(bar_d(a, b, params.n_max)? + pod_distance(a, b, params)?)
}

/// One row of a metric table.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricRecord {
    pub id_a: String,
    pub id_b: String,
    pub bar_d: f64,
    pub delta: f64,
    pub tilde_d: f64,
}

impl MetricRecord {
    pub const CSV_HEADER: &'static str = "id_a,id_b,bar_d,delta,tilde_d";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.id_a,
            self.id_b,
            fmt_f64(self.bar_d),
            fmt_f64(self.delta),
            fmt_f64(self.tilde_d)
        )
    }
}

/// Metric records for every unordered pair `(i, j)`, `i <= j`, of the named pairs.
pub fn metric_table(pairs: &[(String, CoalescingPair)], params: &MetricParams) -> Result<Vec<MetricRecord>> {
    let grid = DeltaGrid::new(params.n_max, params.grid_m)?;
    let pods: Vec<StandardPod> = pairs
        .iter()
        .map(|(_, p)| build_standard_pod(&build_pod(p), params.conventions))
        .collect();
    let index: Vec<(usize, usize)> = (0..pairs.len())
        .flat_map(|i| (i..pairs.len()).map(move |j| (i, j)))
        .collect();
    index
        .par_iter()
        .map(|&(i, j)| {
            let bar = bar_d(&pairs[i].1, &pairs[j].1, params.n_max)?;
            let delta = crate::pods::delta_on_grid(&pods[i], &pods[j], &grid);
            Ok(MetricRecord {
                id_a: pairs[i].0.clone(),
                id_b: pairs[j].0.clone(),
                bar_d: bar,
                delta,
                tilde_d: bar + delta,
            })
        })
        .collect()
}

/// Exhaustive double loop over [`tilde_d`]; the reference for [`hausdorff_distance`].
pub fn hausdorff_distance_exhaustive(k1: &PairSet, k2: &PairSet, params: &MetricParams) -> Result<f64> {
    if k1.is_empty() || k2.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut table = vec![vec![0.0; k2.len()]; k1.len()];
    for (i, a) in k1.iter().enumerate() {
        for (j, b) in k2.iter().enumerate() {
            table[i][j] = tilde_d(a, b, params)?;
        }
    }
    let forward = table
        .iter()
        .map(|row| row.iter().copied().fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let backward = (0..k2.len())
        .map(|j| table.iter().map(|row| row[j]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Ok(forward.max(backward))
}

/// Hausdorff distance between two finite pair sets under [`tilde_d`].
///
/// Candidates are visited in increasing `bar_d` order, which lower-bounds `tilde_d`,
/// and each inner search stops once it cannot raise the running maximum. The
/// result equals [`hausdorff_distance_exhaustive`] exactly.
pub fn hausdorff_distance(k1: &PairSet, k2: &PairSet, params: &MetricParams) -> Result<f64> {
    HausdorffEngine::new(k1, k2, params)?.distance()
}

struct PodCache {
    pod: StandardPod,
    reciprocals: OnceLock<Vec<f64>>,
}

/// Shared state for one Hausdorff evaluation.
pub struct HausdorffEngine<'a> {
    k1: &'a PairSet,
    k2: &'a PairSet,
    params: MetricParams,
    grid: DeltaGrid,
    /// `d_prime` between path `i` of `k1` and path `j` of `k2`, row-major.
    path_dist: Vec<f64>,
    pods1: Vec<OnceLock<PodCache>>,
    pods2: Vec<OnceLock<PodCache>>,
}

impl<'a> HausdorffEngine<'a> {
    pub fn new(k1: &'a PairSet, k2: &'a PairSet, params: &MetricParams) -> Result<Self> {
        if k1.is_empty() || k2.is_empty() {
            return Err(Error::EmptySet);
        }
        let grid = DeltaGrid::new(params.n_max, params.grid_m)?;
        let (p1, p2) = (k1.paths(), k2.paths());
        let rows: Vec<Vec<f64>> = p1
            .par_iter()
            .map(|f| p2.iter().map(|g| d_prime(f, g, params.n_max)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(HausdorffEngine {
            k1,
            k2,
            params: *params,
            grid,
            path_dist: rows.concat(),
            pods1: (0..k1.len()).map(|_| OnceLock::new()).collect(),
            pods2: (0..k2.len()).map(|_| OnceLock::new()).collect(),
        })
    }

    #[inline]
    fn pd(&self, i: usize, j: usize) -> f64 {
        self.path_dist[i * self.k2.paths().len() + j]
    }

    /// `bar_d` between pair `a` of `k1` and pair `b` of `k2`.
    pub fn bar(&self, a: usize, b: usize) -> f64 {
        let (al, ar) = self.k1.members(a);
        let (bl, br) = self.k2.members(b);
        bar_from([self.pd(al, bl), self.pd(al, br), self.pd(ar, bl), self.pd(ar, br)])
    }

    fn pod<'s>(&'s self, side: u8, k: usize) -> &'s PodCache {
        let (cells, set) = if side == 1 { (&self.pods1, self.k1) } else { (&self.pods2, self.k2) };
        cells[k].get_or_init(|| PodCache {
            pod: build_standard_pod(&build_pod(&set.pairs()[k]), self.params.conventions),
            reciprocals: OnceLock::new(),
        })
    }

    fn delta(&self, a: usize, b: usize) -> f64 {
        let pa = self.pod(1, a);
        let pb = self.pod(2, b);
        if let Some(v) = degenerate_shortcut(&pa.pod, &pb.pod, self.params.n_max) {
            return v;
        }
        if cores_equal(&pa.pod, &pb.pod, self.params.n_max) {
            return 0.0;
        }
        let ra = pa.reciprocals.get_or_init(|| self.grid.reciprocals(&pa.pod));
        let rb = pb.reciprocals.get_or_init(|| self.grid.reciprocals(&pb.pod));
        delta_with_reciprocals(&pa.pod, ra, &pb.pod, rb, &self.grid)
    }

    /// `tilde_d` between pair `a` of `k1` and pair `b` of `k2`.
    pub fn tilde(&self, a: usize, b: usize) -> f64 {
        self.bar(a, b) + self.delta(a, b)
    }

    /// Directed part: `sup_a inf_b` with `a` in `k1` when `forward`, else in `k2`.
    fn directed(&self, forward: bool) -> f64 {
        let (n_outer, n_inner) = if forward {
            (self.k1.len(), self.k2.len())
        } else {
            (self.k2.len(), self.k1.len())
        };
        let tilde = |o: usize, i: usize| if forward { self.tilde(o, i) } else { self.tilde(i, o) };
        let bar = |o: usize, i: usize| if forward { self.bar(o, i) } else { self.bar(i, o) };
        let running = AtomicU64::new(0f64.to_bits());
        (0..n_outer).into_par_iter().for_each_init(Vec::new, |bars, o| {
            bars.clear();
            bars.extend((0..n_inner).map(|i| (bar(o, i), i)));
            // cheapest candidate first: usually settles the minimum at once
            let (_, i0) = bars
                .iter()
                .copied()
                .fold((f64::INFINITY, usize::MAX), |acc, c| if c.0 < acc.0 { c } else { acc });
            let mut best = tilde(o, i0);
            if best <= f64::from_bits(running.load(Ordering::Relaxed)) {
                return;
            }
            bars.retain(|&(b, i)| i != i0 && b < best);
            bars.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            let floor = f64::from_bits(running.load(Ordering::Relaxed));
            for &(b, i) in bars.iter() {
                if b >= best {
                    break;
                }
                let t = tilde(o, i);
                if t < best {
                    best = t;
                    if best <= floor {
                        return;
                    }
                }
            }
            running.fetch_max(best.to_bits(), Ordering::Relaxed);
        });
        f64::from_bits(running.load(Ordering::Relaxed))
    }

    pub fn distance(&self) -> Result<f64> {
        Ok(self.directed(true).max(self.directed(false)))
    }

    /// `sup_{a in k1} inf_{b in k2} tilde_d(a, b)`.
    pub fn directed_forward(&self) -> f64 {
        self.directed(true)
    }
}

/// True when two standard pods agree wherever the reciprocal metric looks at them.
fn cores_equal(p: &StandardPod, q: &StandardPod, n_max: u32) -> bool {
    let lo = 1.0 / n_max as f64;
    let hi = 1.0 - lo;
    let same = |a: f64, b: f64| a.to_bits() == b.to_bits();
    let slices_equal = |a: &[f64], b: &[f64]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| same(*x, *y));
    if !(same(p.half_width(), q.half_width()) && same(p.mid_value(), q.mid_value())) {
        return false;
    }
    fn core_a(s: &StandardPod, lo: f64) -> (&[f64], &[f64]) {
        let (xs, vs) = s.segment_a();
        let start = xs.partition_point(|&x| x <= lo).saturating_sub(1);
        (&xs[start..], &vs[start..])
    }
    fn core_b(s: &StandardPod, hi: f64) -> (&[f64], &[f64]) {
        let (xs, vs) = s.segment_b();
        let end = (xs.partition_point(|&x| x < hi) + 1).min(xs.len());
        (&xs[..end], &vs[..end])
    }
    let (pa, qa) = (core_a(p, lo), core_a(q, lo));
    let (pb, qb) = (core_b(p, hi), core_b(q, hi));
    slices_equal(pa.0, qa.0) && slices_equal(pa.1, qa.1) && slices_equal(pb.0, qb.0) && slices_equal(pb.1, qb.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::make_pair;

    fn constant(t0: f64, x: f64) -> Path {
        Path::constant(t0, x).unwrap()
    }

    #[test]
    fn d_prime_examples() {
        let f = constant(0.0, 0.0);
        assert_eq!(d_prime(&f, &f, 24).unwrap(), 0.0);
        let g = constant(0.0, 1.0);
        let series: f64 = (1..=24).map(|n| 0.5f64.powi(n)).sum();
        assert_eq!(d_prime(&f, &g, 24).unwrap(), series);
        assert!((series - 1.0).abs() < 1e-7);
        let h = constant(0.25, 0.0);
        assert_eq!(d_prime(&f, &h, 24).unwrap(), 0.25);
    }

    #[test]
    fn d_prime_sees_interior_peaks_and_hat_extension() {
        // g rises to 0.4 at t = 0.5 and comes back; f is zero
        let f = Path::frozen(0.0, 0.25, vec![0.0; 5]).unwrap();
        let g = Path::frozen(0.0, 0.5, vec![0.0, 0.4, 0.0]).unwrap();
        let v = d_prime(&f, &g, 4).unwrap();
        assert!((v - 0.4 * (0.5 + 0.25 + 0.125 + 0.0625)).abs() < 1e-15);
        // a late start is held at its first value before it starts
        let late = Path::frozen(0.5, 0.25, vec![0.3, 0.3]).unwrap();
        let v = d_prime(&f, &late, 2).unwrap();
        assert!((v - 0.5f64.max(0.3 * 0.75)).abs() < 1e-15);
    }

    #[test]
    fn d_prime_fast_path_matches_merge_path() {
        let vals: Vec<f64> = (0..60).map(|k| ((k * 37) % 17) as f64 / 40.0 - 0.2).collect();
        let f = Path::frozen(0.0, 0.05, vals.clone()).unwrap();
        let g = Path::frozen(0.0, 0.05, vals.iter().rev().copied().collect()).unwrap();
        let fast = d_prime(&f, &g, 8).unwrap();
        // same function on a refined grid goes through the merge path
        let mut fine = Vec::new();
        for w in g.values().windows(2) {
            fine.push(w[0]);
            fine.push(0.5 * (w[0] + w[1]));
        }
        fine.push(*g.values().last().unwrap());
        let g2 = Path::frozen(0.0, 0.025, fine).unwrap();
        let merged = d_prime(&f, &g2, 8).unwrap();
        assert!((fast - merged).abs() < 1e-14, "{fast} vs {merged}");
    }

    #[test]
    fn bar_d_hand_computation() {
        // shared right path at 0.5; left paths at -0.5 and 0.5 (distance 1 apart)
        let r = constant(0.0, 0.5);
        let a = make_pair(constant(0.0, -0.5), r.clone()).unwrap();
        let b = make_pair(r.clone(), r.clone()).unwrap();
        let one: f64 = (1..=24).map(|n| 0.5f64.powi(n)).sum();
        // a.left is at distance `one` from both paths of b; b's paths match a.right exactly
        assert_eq!(bar_d(&a, &b, 24).unwrap(), one);
        assert_eq!(bar_d(&b, &a, 24).unwrap(), one);
        assert_eq!(bar_d(&a, &a, 24).unwrap(), 0.0);
    }

    fn pair(step: f64, l: &[f64], r: &[f64]) -> CoalescingPair {
        make_pair(
            Path::frozen(0.0, step, l.to_vec()).unwrap(),
            Path::frozen(0.0, step, r.to_vec()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn tilde_d_is_sum_of_parts() {
        let params = MetricParams::new(12, 64);
        let a = pair(0.1, &[0.0, 0.1, 0.1, 0.1], &[0.3, 0.2, 0.2, 0.1]);
        let b = pair(0.1, &[0.0, 0.0, 0.0, 0.0], &[0.2, 0.3, 0.1, 0.0]);
        let t = tilde_d(&a, &b, &params).unwrap();
        let parts = bar_d(&a, &b, 12).unwrap() + pod_distance(&a, &b, &params).unwrap();
        assert_eq!(t, parts);
        assert_eq!(tilde_d(&a, &a, &params).unwrap(), 0.0);
    }

    #[test]
    fn identical_pods_give_bar_d() {
        let params = MetricParams::new(12, 64);
        let a = pair(0.1, &[0.0, 0.0, 0.0], &[0.2, 0.1, 0.0]);
        let b = pair(0.1, &[0.1, 0.1, 0.1], &[0.3, 0.2, 0.1]);
        assert_eq!(pod_distance(&a, &b, &params).unwrap(), 0.0);
        assert_eq!(tilde_d(&a, &b, &params).unwrap(), bar_d(&a, &b, 12).unwrap());
    }

    fn random_set(seed: u64, n: usize) -> PairSet {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pairs = (0..n).map(|_| {
            let len = rng.gen_range(2..8);
            let base: Vec<f64> = (0..len).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let meet = rng.gen_range(1..=len);
            let top: Vec<f64> = (0..len)
                .map(|k| if k < meet { base[k] + rng.gen_range(0.01..0.4) } else { base[k] })
                .collect();
            pair(0.125, &base, &top)
        });
        PairSet::from_pairs(pairs.collect::<Vec<_>>())
    }

    #[test]
    fn hausdorff_examples_and_pruning() {
        let params = MetricParams::new(10, 32);
        let k = random_set(1, 4);
        assert_eq!(hausdorff_distance(&k, &k, &params).unwrap(), 0.0);
        let a = random_set(2, 1);
        let b = random_set(3, 1);
        assert_eq!(
            hausdorff_distance(&a, &b, &params).unwrap(),
            tilde_d(&a.pairs()[0], &b.pairs()[0], &params).unwrap()
        );
        for seed in 0..20 {
            let k1 = random_set(10 + seed, 2);
            let k2 = random_set(100 + seed, 3);
            let pruned = hausdorff_distance(&k1, &k2, &params).unwrap();
            let brute = hausdorff_distance_exhaustive(&k1, &k2, &params).unwrap();
            assert_eq!(pruned.to_bits(), brute.to_bits());
        }
        let empty = PairSet::default();
        assert!(matches!(hausdorff_distance(&empty, &k, &params), Err(Error::EmptySet)));
    }

    #[test]
    fn shrinking_family_converges_in_tilde_d() {
        // left path fixed at 0, right path starting at 0.5 and decaying linearly to the
        // left path by t = 1; perturbations of size eps vanish as eps -> 0
        let steps = 40;
        let step = 1.0 / steps as f64;
        let base_l = vec![0.0; steps + 1];
        let base_r: Vec<f64> = (0..=steps).map(|k| 0.5 * (1.0 - k as f64 / steps as f64)).collect();
        let target = pair(step, &base_l, &base_r);
        let params = MetricParams::default();
        let mut prev = f64::INFINITY;
        for eps in [0.1, 0.03, 0.01, 0.003, 0.001] {
            let r: Vec<f64> = base_r
                .iter()
                .enumerate()
                .map(|(k, v)| if k < steps { v + eps * (1.0 - k as f64 / steps as f64) } else { 0.0 })
                .collect();
            let a = pair(step, &base_l, &r);
            assert_eq!(a.t_coal(), target.t_coal());
            let d = tilde_d(&a, &target, &params).unwrap();
            assert!(d < prev, "eps = {eps}: {d} !< {prev}");
            prev = d;
        }
        assert!(prev < 0.01, "{prev}");
    }

    #[test]
    fn metric_records_render_as_csv() {
        let a = pair(0.1, &[0.0, 0.0], &[0.1, 0.0]);
        let t = metric_table(&[("a".into(), a.clone()), ("b".into(), a)], &MetricParams::new(4, 8)).unwrap();
        assert_eq!(t.len(), 3);
        assert!(t[1].csv_row().starts_with("a,b,0.0000000000000000e0,"));
    }
}
