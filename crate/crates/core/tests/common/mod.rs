#![allow(dead_code)]

use pairweb::pods::Pod;
use pairweb::{make_pair, CoalescingPair, Path};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random valid pair: two frozen paths on a shared grid, started at random rows,
/// that either merge at a random index or keep a positive gap.
pub fn random_pair(rng: &mut impl Rng) -> CoalescingPair {
    loop {
        if let Some(p) = try_random_pair(rng) {
            return p;
        }
    }
}

fn try_random_pair(rng: &mut impl Rng) -> Option<CoalescingPair> {
    let step = [0.1, 0.05, 0.04][rng.gen_range(0..3)];
    let ka: usize = rng.gen_range(0..12);
    let kb: usize = rng.gen_range(0..12);
    let end = ka.max(kb) + rng.gen_range(1..30);
    let mut f = vec![rng.gen_range(-0.8..0.8)];
    for _ in ka..end {
        let last = *f.last().unwrap();
        f.push(last + rng.gen_range(-0.2..0.2));
    }
    let merge = if rng.gen_bool(0.7) { Some(rng.gen_range(kb.max(ka)..=end)) } else { None };
    let mut gap: f64 = rng.gen_range(0.01..0.6);
    let mut g = Vec::with_capacity(end - kb + 1);
    for k in kb..=end {
        let fk = if k >= ka { f[k - ka] } else { f[0] + rng.gen_range(-0.3..0.3) };
        if merge.is_some_and(|m| k >= m) && k >= ka {
            g.push(fk);
        } else {
            g.push(fk + gap);
            gap = (gap + rng.gen_range(-0.1..0.1)).max(0.01);
        }
    }
    // starts outside [-1, 1] x [0, 1] are rejected and redrawn
    let fp = Path::frozen(ka as f64 * step, step, f).ok()?;
    let gp = Path::frozen(kb as f64 * step, step, g).ok()?;
    let (a, b) = if rng.gen_bool(0.5) { (fp, gp) } else { (gp, fp) };
    make_pair(a, b).ok()
}

/// A synthetic pod whose length and diameter are both at most `sigma`.
pub fn random_small_pod(rng: &mut impl Rng, sigma: f64) -> Pod {
    let t_plus = rng.gen_range(0.0..1.5);
    let length = rng.gen_range(0.0..=sigma);
    if length < 1e-6 || rng.gen_bool(0.05) {
        return Pod::from_samples(t_plus, t_plus, &[t_plus], &[0.0]).unwrap();
    }
    let n = rng.gen_range(2..40);
    let mut times: Vec<f64> = (0..=n).map(|k| t_plus + length * k as f64 / n as f64).collect();
    times[n] = t_plus + length;
    let top = rng.gen_range(0.0..=sigma);
    let mut gaps: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.0..=top)).collect();
    gaps[n] = 0.0;
    Pod::from_samples(t_plus, times[n], &times, &gaps).unwrap()
}

/// Verdict line for the acceptance report.
pub fn report(name: &str, pass: bool, detail: impl std::fmt::Display) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}
