//! Coalescing Brownian motions from finitely many space-time starts.
//!
//! Paths move with independent Gaussian increments on a uniform grid. After each
//! step, neighbours whose gap closed, or whose gap bridge touched zero inside the
//! step, merge and share one trajectory from the end of that step on.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paths::{PairSet, Path};

/// Probability that the gap between two independent unit-rate Brownian motions
/// reaches zero within a step of length `h`, given gaps `a` and `b` at its ends.
///
/// The gap has variance `2` per unit time; conditioned on its endpoints it is a
/// bridge whose minimum falls below zero with probability `exp(-2ab / (2h))`.
pub fn bridge_cross_prob(a: f64, b: f64, h: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::Domain(format!("gaps must be non-negative, got {a} and {b}")));
    }
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step {h} must be positive")));
    }
    Ok((-a * b / h).exp().clamp(0.0, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    /// `(position, time)` starts inside `[-1, 1] x [0, 1]`; times must sit on the step grid.
    pub starts: Vec<(f64, f64)>,
    pub step_h: f64,
    pub horizon: f64,
    pub seed: u64,
}

impl EnsembleConfig {
    pub fn new(starts: Vec<(f64, f64)>, step_h: f64, horizon: f64, seed: u64) -> Result<Self> {
        let mut config = EnsembleConfig {
            starts,
            step_h,
            horizon,
            seed,
        };
        config.starts.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_h > 0.0 && self.step_h.is_finite()) {
            return Err(Error::Domain(format!("step_h = {} must be positive", self.step_h)));
        }
        if self.starts.is_empty() {
            return Err(Error::Domain("ensemble needs at least one start".into()));
        }
        for &(x, t) in &self.starts {
            if !(-1.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&t) {
                return Err(Error::Domain(format!("start ({x}, {t}) outside [-1, 1] x [0, 1]")));
            }
            self.row_of(t)?;
            if t > self.horizon {
                return Err(Error::Domain(format!("start time {t} beyond horizon {}", self.horizon)));
            }
        }
        Ok(())
    }

    fn row_of(&self, t: f64) -> Result<u64> {
        let u = t / self.step_h;
        let r = u.round();
        if (u - r).abs() > 1e-9 * r.max(1.0) {
            return Err(Error::Domain(format!("start time {t} is not on the step grid {}", self.step_h)));
        }
        Ok(r as u64)
    }

    fn rows(&self) -> u64 {
        (self.horizon / self.step_h + 1e-9).floor() as u64
    }
}

/// One simulated ensemble: a path per start, in the order of `config.starts`.
#[derive(Clone, Debug)]
pub struct EnsembleRun {
    pub paths: Vec<Arc<Path>>,
}

impl EnsembleRun {
    pub fn pair_set(&self) -> Result<PairSet> {
        PairSet::all_pairs(self.paths.clone())
    }
}

struct Group {
    pos: f64,
    members: Vec<usize>,
}

/// Simulates the coalescing ensemble and returns the individual paths.
pub fn simulate_ensemble(config: &EnsembleConfig) -> Result<EnsembleRun> {
    config.validate()?;
    let h = config.step_h;
    let normal = Normal::new(0.0, h.sqrt()).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let rows = config.rows();
    let start_rows: Vec<u64> = config.starts.iter().map(|s| config.row_of(s.1)).collect::<Result<_>>()?;
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); config.starts.len()];
    let mut groups: Vec<Group> = Vec::new();
    let mut next = 0usize;

    for k in 0..=rows {
        while next < start_rows.len() && start_rows[next] == k {
            let x = config.starts[next].0;
            let at = groups.partition_point(|g| g.pos < x);
            match groups.get_mut(at) {
                Some(g) if g.pos == x => g.members.push(next),
                _ => groups.insert(
                    at,
                    Group {
                        pos: x,
                        members: vec![next],
                    },
                ),
            }
            next += 1;
        }
        for g in &groups {
            for &m in &g.members {
                values[m].push(g.pos);
            }
        }
        if k == rows {
            break;
        }
        let old: Vec<f64> = groups.iter().map(|g| g.pos).collect();
        for g in groups.iter_mut() {
            g.pos += normal.sample(&mut rng);
        }
        let mut join = vec![false; groups.len().saturating_sub(1)];
        for (j, flag) in join.iter_mut().enumerate() {
            let u: f64 = rng.gen();
            let a = old[j + 1] - old[j];
            let b = groups[j + 1].pos - groups[j].pos;
            *flag = b <= 0.0 || u < bridge_cross_prob(a, b, h)?;
        }
        groups = merge_flagged(groups, &join);
        // a merged block sits at its leftmost member; restore order if a neighbour overtook it
        while let Some(j) = (0..groups.len().saturating_sub(1)).find(|&j| groups[j + 1].pos <= groups[j].pos) {
            let right = groups.remove(j + 1);
            groups[j].members.extend(right.members);
        }
    }

    let paths = values
        .into_iter()
        .zip(&start_rows)
        .map(|(v, &r)| Path::frozen(r as f64 * h, h, v).map(Arc::new))
        .collect::<Result<_>>()?;
    Ok(EnsembleRun { paths })
}

fn merge_flagged(groups: Vec<Group>, join: &[bool]) -> Vec<Group> {
    let mut out: Vec<Group> = Vec::with_capacity(groups.len());
    for (j, g) in groups.into_iter().enumerate() {
        if j > 0 && join[j - 1] {
            out.last_mut().unwrap().members.extend(g.members);
        } else {
            out.push(g);
        }
    }
    out
}

/// All ordered pairs of the paths of one simulated ensemble.
pub fn sample_coalescing_ensemble(config: &EnsembleConfig) -> Result<PairSet> {
    simulate_ensemble(config)?.pair_set()
}

/// Ensemble started from `(0, k * spacing)` for `0 <= k * spacing <= alpha`.
/// The starts of `config` are ignored; its step, horizon and seed are used.
pub fn build_brownian_segment(alpha: f64, spacing: f64, config: &EnsembleConfig) -> Result<PairSet> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} outside [0, 1)")));
    }
    let mut starts = vec![(0.0, 0.0)];
    if alpha > 0.0 {
        if !(spacing > 0.0) {
            return Err(Error::Domain("spacing must be positive".into()));
        }
        let count = (alpha / spacing).round();
        if (count * spacing - alpha).abs() > 1e-9 {
            return Err(Error::Domain(format!("spacing {spacing} does not divide alpha {alpha}")));
        }
        // start times on the step grid, computed from integer rows
        let per = (spacing / config.step_h).round();
        if (per * config.step_h - spacing).abs() > 1e-9 {
            return Err(Error::Domain(format!("spacing {spacing} is not a multiple of the step")));
        }
        starts = (0..=count as u64).map(|k| (0.0, (k * per as u64) as f64 * config.step_h)).collect();
    }
    let cfg = EnsembleConfig::new(starts, config.step_h, config.horizon, config.seed)?;
    sample_coalescing_ensemble(&cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bridge_examples() {
        assert_eq!(bridge_cross_prob(0.0, 0.3, 0.01).unwrap(), 1.0);
        let h: f64 = 0.01;
        let v = bridge_cross_prob(h.sqrt(), h.sqrt(), h).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
        assert!(bridge_cross_prob(0.1, 0.1, 1e-6).unwrap() < 1e-300);
        assert!(bridge_cross_prob(-0.1, 0.1, 0.01).is_err());
    }

    #[test]
    fn bridge_matches_fine_subdivision() {
        // gap bridge from a to b over [0, h] with variance 2 per unit time, sampled on
        // 1024 substeps; the chance it touches zero approaches exp(-ab/h) from below
        let (a, b, h) = (0.1, 0.1, 0.01);
        let n = 1024;
        let dt = h / n as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let normal = Normal::new(0.0, (2.0 * dt).sqrt()).unwrap();
        let reps = 20_000;
        let mut hits = 0;
        let mut w = vec![0.0; n + 1];
        for _ in 0..reps {
            for k in 1..=n {
                w[k] = w[k - 1] + normal.sample(&mut rng);
            }
            let end = w[n];
            let touched = (0..=n).any(|k| {
                let s = k as f64 / n as f64;
                a + (b - a) * s + w[k] - s * end <= 0.0
            });
            hits += touched as u32;
        }
        let p = hits as f64 / reps as f64;
        let exact = bridge_cross_prob(a, b, h).unwrap();
        let se = (exact * (1.0 - exact) / reps as f64).sqrt();
        // discrete monitoring misses about 0.58 * sqrt(2 dt) of barrier on each side
        assert!(p <= exact + 3.0 * se, "{p} vs {exact}");
        assert!(p >= exact - 0.03, "{p} vs {exact}");
    }

    #[test]
    fn single_start_gives_one_diagonal_pair() {
        let cfg = EnsembleConfig::new(vec![(0.1, 0.0)], 0.01, 1.0, 3).unwrap();
        let set = sample_coalescing_ensemble(&cfg).unwrap();
        assert_eq!(set.len(), 1);
        assert!(set.pairs()[0].is_degenerate());
    }

    #[test]
    fn ordering_is_preserved_and_merges_are_final() {
        let starts: Vec<(f64, f64)> = (0..7).map(|k| (-0.6 + 0.2 * k as f64, 0.0)).collect();
        for seed in 0..1000 {
            let cfg = EnsembleConfig::new(starts.clone(), 0.01, 0.5, seed).unwrap();
            let run = simulate_ensemble(&cfg).unwrap();
            let n = run.paths[0].values().len();
            let mut distinct_prev = usize::MAX;
            for k in 0..n {
                let col: Vec<f64> = run.paths.iter().map(|p| p.values()[k]).collect();
                assert!(col.windows(2).all(|w| w[0] <= w[1]), "seed {seed} inversion at {k}");
                let mut d = col.clone();
                d.dedup();
                assert!(d.len() <= distinct_prev);
                distinct_prev = d.len();
            }
            if seed < 20 {
                run.pair_set().unwrap().validate().unwrap();
            }
        }
    }

    #[test]
    fn increments_have_variance_h() {
        let h = 0.004;
        let mut incs = Vec::new();
        for seed in 0..400 {
            let cfg = EnsembleConfig::new(vec![(0.0, 0.0)], h, 1.0, seed).unwrap();
            let run = simulate_ensemble(&cfg).unwrap();
            incs.extend(run.paths[0].values().windows(2).map(|w| w[1] - w[0]));
        }
        assert!(incs.len() >= 100_000);
        let n = incs.len() as f64;
        let mean = incs.iter().sum::<f64>() / n;
        let var = incs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var / h - 1.0).abs() <= 0.02, "{}", var / h);
    }

    #[test]
    fn segment_starts_and_validation() {
        let cfg = EnsembleConfig::new(vec![(0.0, 0.0)], 0.01, 1.0, 1).unwrap();
        let set = build_brownian_segment(0.0, 0.05, &cfg).unwrap();
        assert_eq!(set.len(), 1);
        let set = build_brownian_segment(0.2, 0.05, &cfg).unwrap();
        assert_eq!(set.paths().len(), 5);
        set.validate().unwrap();
        assert!(build_brownian_segment(0.2, 0.03, &cfg).is_err());
        assert!(EnsembleConfig::new(vec![(0.0, 0.005)], 0.01, 1.0, 1).is_err());
        assert!(EnsembleConfig::new(vec![(1.5, 0.0)], 0.01, 1.0, 1).is_err());
    }
}
