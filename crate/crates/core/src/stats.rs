//! Small Monte Carlo helpers: means with standard errors, two-sample KS, bootstrap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A Monte Carlo estimate in the JSON form written by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    pub stderr: f64,
    pub reps: u64,
    pub seed: u64,
    pub params: serde_json::Value,
}

impl Estimate {
    /// Estimate of a probability from `hits` successes out of `reps`.
    pub fn proportion(name: &str, hits: u64, reps: u64, seed: u64, params: serde_json::Value) -> Self {
        let (value, stderr) = proportion(hits, reps);
        Estimate {
            name: name.to_owned(),
            value,
            stderr,
            reps,
            seed,
            params,
        }
    }

    /// Estimate of a mean from i.i.d. samples.
    pub fn mean(name: &str, samples: &[f64], seed: u64, params: serde_json::Value) -> Self {
        let (value, stderr) = mean_stderr(samples);
        Estimate {
            name: name.to_owned(),
            value,
            stderr,
            reps: samples.len() as u64,
            seed,
            params,
        }
    }

    /// `|a - b| / sqrt(se_a^2 + se_b^2)`.
    pub fn z_distance(&self, other: &Estimate) -> f64 {
        let se = self.stderr.hypot(other.stderr);
        let diff = (self.value - other.value).abs();
        if se == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / se
        }
    }
}

pub fn proportion(hits: u64, reps: u64) -> (f64, f64) {
    let n = reps as f64;
    let p = hits as f64 / n;
    (p, (p * (1.0 - p) / n).sqrt())
}

/// Sample mean and its standard error (unbiased variance).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
///
/// Infinite values are ordinary atoms at the top of the order.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0_f64;
    while i < a.len() && j < b.len() {
        let x = if a[i].total_cmp(&b[j]).is_le() { a[i] } else { b[j] };
        while i < a.len() && a[i].total_cmp(&x).is_eq() {
            i += 1;
        }
        while j < b.len() && b[j].total_cmp(&x).is_eq() {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Bootstrap standard error of `stat` over independent resamples of each sample.
pub fn bootstrap_se(samples: &[&[f64]], stat: impl Fn(&[Vec<f64>]) -> f64, resamples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..resamples)
        .map(|_| {
            let drawn: Vec<Vec<f64>> = samples
                .iter()
                .map(|s| (0..s.len()).map(|_| s[rng.gen_range(0..s.len())]).collect())
                .collect();
            stat(&drawn)
        })
        .collect();
    let (_, se) = mean_stderr(&values);
    se * (resamples as f64).sqrt()
}
