//! The computations behind each subcommand. Replicas run in parallel with seeds
//! derived from `(seed, replica, delta)`; results are collected in replica order so
//! the tables do not depend on the thread count.

use std::f64::consts::PI;
use std::fs;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{ExperimentConfig, ExperimentOutput};
use crate::brownian::{sample_coalescing_ensemble, EnsembleConfig};
use crate::error::Result;
use crate::io::{fmt_f64, read_pair_file};
use crate::lattice::{check_no_wrap, extreme_pair_time, rescale, sample_arrow_field, ArrowField, LatticeSite};
use crate::metrics::{hausdorff_distance, metric_table, MetricParams, MetricRecord};
use crate::observables::{
    dp_weights, double_pair_diagnostics, enclosed_bead_count, integrate_against, persistence_sup, river_outputs,
    voter_forward_persistence, weight_measure, MeasureKind,
};
use crate::paths::{PairSet, Path};
use crate::stats::{bootstrap_se, ks_two_sample, median, Estimate};

const BOOTSTRAP_RESAMPLES: usize = 200;

fn mix(seed: u64, rep: u64, delta: f64, stream: u64) -> u64 {
    let mut z = seed ^ 0x5851_F42D_4C95_7F2D;
    for v in [rep, delta.to_bits(), stream] {
        z = (z ^ v).wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

fn truncation(cfg: &ExperimentConfig) -> String {
    format!("{},{},{}", cfg.n_max, cfg.grid_m, fmt_f64(cfg.horizon))
}

fn params(cfg: &ExperimentConfig) -> MetricParams {
    MetricParams::new(cfg.n_max, cfg.grid_m)
}

// ---------------------------------------------------------------- metrics

pub(super) fn metrics(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let params = params(cfg);
    let mut sets = Vec::new();
    let mut named = Vec::new();
    for path in &cfg.inputs {
        let pairs = read_pair_file(&fs::read_to_string(path)?)?;
        sets.push(PairSet::from_pairs(pairs.iter().map(|(_, p)| p.clone())));
        named.extend(pairs);
    }
    let records = metric_table(&named, &params)?;
    let tail = truncation(cfg);
    let mut out = ExperimentOutput::default();
    out.push_csv(
        "data.csv",
        &format!("{},n_max,grid_m,horizon", MetricRecord::CSV_HEADER),
        records.iter().map(|r| format!("{},{tail}", r.csv_row())),
    );
    let hausdorff = match sets.as_slice() {
        [a, b] => Some(hausdorff_distance(a, b, &params)?),
        _ => None,
    };
    out.summary = Some(json!({
        "pairs": named.len(),
        "records": records.len(),
        "hausdorff": hausdorff.map(fmt_f64),
        "n_max": cfg.n_max,
        "grid_m": cfg.grid_m,
    }));
    Ok(out)
}

// ---------------------------------------------------------------- converge

/// Lattice columns of the fixed start grid `-1, -0.8, ..., 1`.
pub fn fixed_start_sites(delta: f64) -> Vec<i64> {
    (0..=10)
        .map(|k| {
            let x = -1.0 + 0.2 * k as f64;
            2 * (x / (2.0 * delta)).round() as i64
        })
        .collect()
}

/// Per-replica observables of one converge run at scale `delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergeSample {
    pub delta: f64,
    pub rep: u64,
    /// Hausdorff distance between the lattice slice and an independent Brownian reference.
    pub d_h: f64,
    /// Largest coalescence time of the lattice slice.
    pub s: f64,
    /// `integral of cos(pi x)` against the geometric-area weight measure.
    pub cos_integral: f64,
}

impl ConvergeSample {
    const CSV_HEADER: &'static str = "delta,rep,d_h,s,cos_integral";

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            fmt_f64(self.delta),
            self.rep,
            fmt_f64(self.d_h),
            fmt_f64(self.s),
            fmt_f64(self.cos_integral)
        )
    }
}

fn lattice_slice(field: &ArrowField, sites: &[i64], delta: f64) -> Result<PairSet> {
    let rows = field.height() - 1;
    let paths = sites
        .iter()
        .map(|&i| {
            let pos = field.trace_up(LatticeSite::new(i, 0), rows)?;
            check_no_wrap(&pos, field.width())?;
            rescale(&pos, 0, delta).map(Arc::new)
        })
        .collect::<Result<Vec<Arc<Path>>>>()?;
    PairSet::all_pairs(paths)
}

/// Replicas of the converge observables at one scale. With `with_hausdorff = false`
/// the Brownian reference is skipped and `d_h` is NaN.
pub fn converge_samples(
    delta: f64,
    reps: u64,
    seed: u64,
    horizon: f64,
    params: &MetricParams,
    with_hausdorff: bool,
) -> Result<Vec<ConvergeSample>> {
    let sites = fixed_start_sites(delta);
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let field = ArrowField::for_scale(mix(seed, rep, delta, 0), delta, horizon)?;
            let lattice = lattice_slice(&field, &sites, delta)?;
            let s = persistence_sup(&lattice)?;
            let mu = weight_measure(&field, delta, (-1.0, 1.0), MeasureKind::GeometricArea, Some(horizon))?;
            let cos_integral = integrate_against(&mu, |x| (PI * x).cos());
            let d_h = if with_hausdorff {
                let starts = sites.iter().map(|&i| ((delta * i as f64).clamp(-1.0, 1.0), 0.0)).collect();
                let reference = EnsembleConfig::new(starts, delta * delta, horizon, mix(seed, rep, delta, 1))?;
                hausdorff_distance(&lattice, &sample_coalescing_ensemble(&reference)?, params)?
            } else {
                f64::NAN
            };
            Ok(ConvergeSample {
                delta,
                rep,
                d_h,
                s,
                cos_integral,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleSummary {
    pub delta: f64,
    pub d_h: Estimate,
    pub s_median: f64,
    pub s_infinite_fraction: f64,
    pub cos_integral: Estimate,
}

/// Two-sample statistics between consecutive scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleComparison {
    pub delta_coarse: f64,
    pub delta_fine: f64,
    pub ks_d_h: f64,
    pub ks_s: f64,
    pub ks_cos_integral: f64,
    /// Difference of the cos-integral means in combined standard errors.
    pub cos_integral_z: f64,
}

/// Change of the S-distribution KS statistic between two consecutive comparisons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsTrendStep {
    pub ks_before: f64,
    pub ks_after: f64,
    /// Bootstrap standard error of `ks_after - ks_before`.
    pub bootstrap_se: f64,
    pub non_increasing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergeSummary {
    pub note: String,
    pub scales: Vec<ScaleSummary>,
    pub comparisons: Vec<ScaleComparison>,
    pub ks_trend: Vec<KsTrendStep>,
}

fn column(samples: &[ConvergeSample], f: impl Fn(&ConvergeSample) -> f64) -> Vec<f64> {
    samples.iter().map(f).collect()
}

/// Summaries per scale, comparisons of consecutive scales and the KS trend of S.
pub fn converge_summary(by_scale: &[Vec<ConvergeSample>], seed: u64) -> ConvergeSummary {
    let scales = by_scale
        .iter()
        .map(|samples| {
            let delta = samples.first().map_or(f64::NAN, |s| s.delta);
            let s = column(samples, |x| x.s);
            let p = json!({ "delta": delta });
            ScaleSummary {
                delta,
                d_h: Estimate::mean("d_h", &column(samples, |x| x.d_h), seed, p.clone()),
                s_median: median(&s),
                s_infinite_fraction: s.iter().filter(|v| v.is_infinite()).count() as f64 / s.len() as f64,
                cos_integral: Estimate::mean("cos_integral", &column(samples, |x| x.cos_integral), seed, p),
            }
        })
        .collect::<Vec<_>>();
    let comparisons = by_scale
        .windows(2)
        .zip(scales.windows(2))
        .map(|(w, sc)| {
            let ks = |f: fn(&ConvergeSample) -> f64| ks_two_sample(&column(&w[0], f), &column(&w[1], f));
            ScaleComparison {
                delta_coarse: sc[0].delta,
                delta_fine: sc[1].delta,
                ks_d_h: ks(|x| x.d_h),
                ks_s: ks(|x| x.s),
                ks_cos_integral: ks(|x| x.cos_integral),
                cos_integral_z: sc[0].cos_integral.z_distance(&sc[1].cos_integral),
            }
        })
        .collect::<Vec<_>>();
    let s_columns: Vec<Vec<f64>> = by_scale.iter().map(|v| column(v, |x| x.s)).collect();
    let ks_trend = (0..s_columns.len().saturating_sub(2))
        .map(|k| {
            let trio: Vec<&[f64]> = s_columns[k..k + 3].iter().map(Vec::as_slice).collect();
            let stat = |s: &[Vec<f64>]| ks_two_sample(&s[1], &s[2]) - ks_two_sample(&s[0], &s[1]);
            let bootstrap_se = bootstrap_se(&trio, stat, BOOTSTRAP_RESAMPLES, seed ^ k as u64);
            let (ks_before, ks_after) = (comparisons[k].ks_s, comparisons[k + 1].ks_s);
            KsTrendStep {
                ks_before,
                ks_after,
                bootstrap_se,
                non_increasing: ks_after <= ks_before + bootstrap_se,
            }
        })
        .collect();
    ConvergeSummary {
        note: "distributional diagnostic across scales; lattice and Brownian samples are independent, so d_h is not expected to vanish".into(),
        scales,
        comparisons,
        ks_trend,
    }
}

pub(super) fn converge(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let params = params(cfg);
    let by_scale = cfg
        .delta_list
        .iter()
        .map(|&delta| converge_samples(delta, cfg.reps, cfg.seed, cfg.horizon, &params, true))
        .collect::<Result<Vec<_>>>()?;
    let tail = truncation(cfg);
    let mut out = ExperimentOutput::default();
    out.push_csv(
        "data.csv",
        &format!("{},n_max,grid_m,horizon", ConvergeSample::CSV_HEADER),
        by_scale.iter().flatten().map(|s| format!("{},{tail}", s.csv_row())),
    );
    out.summary = Some(serde_json::to_value(converge_summary(&by_scale, cfg.seed))?);
    Ok(out)
}

// ---------------------------------------------------------------- persistence

/// Largest coalescence time of the segment web at the origin, one per replica.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistenceSample {
    pub delta: f64,
    pub rep: u64,
    pub s: f64,
}

pub fn persistence_samples(delta: f64, alpha: f64, reps: u64, seed: u64, horizon: f64) -> Result<Vec<PersistenceSample>> {
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let field = ArrowField::for_scale(mix(seed, rep, delta, 2), delta, horizon)?;
            Ok(PersistenceSample {
                delta,
                rep,
                s: extreme_pair_time(&field, alpha, delta)?,
            })
        })
        .collect()
}

pub(super) fn persistence(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut rows = Vec::new();
    let mut scales = Vec::new();
    let tail = truncation(cfg);
    for &delta in &cfg.delta_list {
        let est = voter_forward_persistence(cfg.alpha, delta, cfg.reps, cfg.seed)?;
        let samples = persistence_samples(delta, cfg.alpha, cfg.reps, cfg.seed, cfg.horizon)?;
        let s: Vec<f64> = samples.iter().map(|x| x.s).collect();
        rows.extend(samples.iter().map(|x| {
            format!("{},{},{},{},{tail}", fmt_f64(delta), fmt_f64(cfg.alpha), x.rep, fmt_f64(x.s))
        }));
        scales.push(json!({
            "delta": delta,
            "window": est.window,
            "forward": est.forward,
            "dual": est.dual,
            "z_distance": est.z_distance(),
            "s_median": fmt_f64(median(&s)),
            "s_infinite_fraction": s.iter().filter(|v| v.is_infinite()).count() as f64 / s.len() as f64,
        }));
    }
    let mut out = ExperimentOutput::default();
    out.push_csv("data.csv", "delta,alpha,rep,s,n_max,grid_m,horizon", rows);
    out.summary = Some(json!({ "alpha": cfg.alpha, "scales": scales }));
    Ok(out)
}

// ---------------------------------------------------------------- silo / river

/// Checks on one silo field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiloRow {
    pub rep: u64,
    pub field_seed: u64,
    pub total_weight: u64,
    pub expected_total: u64,
    /// `total_weight - expected_total`.
    pub conservation_residual: i64,
    /// Bottom sites where the enclosed bead count differs from the weight.
    pub identity_mismatches: u64,
    /// Bottom sites where the river output differs from the weight.
    pub river_mismatches: u64,
    /// `(site, weight)` for silo, `(site, water)` for river.
    pub measure: Vec<(i64, u64)>,
}

pub fn silo_rows(width: i64, height: i64, reps: u64, seed: u64, river: bool) -> Result<Vec<SiloRow>> {
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let field_seed = mix(seed, rep, 0.0, 3);
            let field = sample_arrow_field(field_seed, width, height)?;
            let weights = dp_weights(&field);
            let water = river_outputs(&field);
            let total_weight: u64 = weights.values().sum();
            let expected_total = (width / 2 * height) as u64;
            let mut identity_mismatches = 0;
            for (&site, &w) in &weights {
                if enclosed_bead_count(&field, site)? != w {
                    identity_mismatches += 1;
                }
            }
            let river_mismatches = weights.iter().filter(|(k, v)| water.get(k) != Some(v)).count() as u64;
            let measure = if river { water } else { weights };
            Ok(SiloRow {
                rep,
                field_seed,
                total_weight,
                expected_total,
                conservation_residual: total_weight as i64 - expected_total as i64,
                identity_mismatches,
                river_mismatches,
                measure: measure.into_iter().collect(),
            })
        })
        .collect()
}

pub(super) fn silo(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let river = cfg.command == super::Command::River;
    let rows = silo_rows(cfg.width, cfg.height, cfg.reps, cfg.seed, river)?;
    let tail = truncation(cfg);
    let mut out = ExperimentOutput::default();
    out.push_csv(
        "data.csv",
        "rep,field_seed,width,height,total_weight,expected_total,conservation_residual,identity_mismatches,river_mismatches,n_max,grid_m,horizon",
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{},{},{},{tail}",
                r.rep,
                r.field_seed,
                cfg.width,
                cfg.height,
                r.total_weight,
                r.expected_total,
                r.conservation_residual,
                r.identity_mismatches,
                r.river_mismatches
            )
        }),
    );
    let kind = MeasureKind::BeadCount.as_str();
    out.push_csv(
        "measure.csv",
        "rep,position,mass,kind,n_max,grid_m,horizon",
        rows.iter().flat_map(|r| {
            let tail = &tail;
            r.measure
                .iter()
                .map(move |(site, m)| format!("{},{site},{},{kind},{tail}", r.rep, fmt_f64(*m as f64)))
        }),
    );
    let residual_free = rows.iter().all(|r| r.conservation_residual == 0);
    out.summary = Some(json!({
        "fields": rows.len(),
        "width": cfg.width,
        "height": cfg.height,
        "conservation_exact": residual_free,
        "identity_mismatches": rows.iter().map(|r| r.identity_mismatches).sum::<u64>(),
        "river_mismatches": rows.iter().map(|r| r.river_mismatches).sum::<u64>(),
    }));
    Ok(out)
}

// ---------------------------------------------------------------- diagnose

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseRow {
    pub delta: f64,
    pub epsilon: f64,
    pub rep: u64,
    pub double_pair_count: u64,
    pub gamma_regions: u64,
    pub max_gamma_diameter: f64,
    /// `max_gamma_diameter > epsilon^(1/3)`.
    pub exceeds_bound: bool,
}

/// Diagnostics of every replica at every epsilon; one field per replica serves all epsilons.
pub fn diagnose_rows(delta: f64, epsilons: &[f64], reps: u64, seed: u64) -> Result<Vec<DiagnoseRow>> {
    let longest = epsilons.iter().copied().fold(0.0, f64::max);
    let per_rep = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let field = ArrowField::for_scale(mix(seed, rep, delta, 4), delta, longest)?;
            epsilons
                .iter()
                .map(|&epsilon| {
                    let r = double_pair_diagnostics(&field, delta, epsilon)?;
                    Ok(DiagnoseRow {
                        delta,
                        epsilon,
                        rep,
                        double_pair_count: r.double_pair_count,
                        gamma_regions: r.gamma_diameters.len() as u64,
                        max_gamma_diameter: r.max_gamma_diameter,
                        exceeds_bound: r.max_gamma_diameter > epsilon.cbrt(),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_rep.into_iter().flatten().collect())
}

pub(super) fn diagnose(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut rows = Vec::new();
    let mut scales = Vec::new();
    for &delta in &cfg.delta_list {
        let these = diagnose_rows(delta, &cfg.epsilon_list, cfg.reps, cfg.seed)?;
        let mut by_eps: Vec<f64> = cfg.epsilon_list.clone();
        by_eps.sort_by(|a, b| b.total_cmp(a));
        let fractions: Vec<Estimate> = by_eps
            .iter()
            .map(|&e| {
                let hits = these.iter().filter(|r| r.epsilon == e && r.exceeds_bound).count() as u64;
                Estimate::proportion("exceeds_cube_root", hits, cfg.reps, cfg.seed, json!({ "delta": delta, "epsilon": e }))
            })
            .collect();
        let mean_pairs: Vec<f64> = by_eps
            .iter()
            .map(|&e| {
                let c: Vec<f64> = these.iter().filter(|r| r.epsilon == e).map(|r| r.double_pair_count as f64).collect();
                c.iter().sum::<f64>() / c.len() as f64
            })
            .collect();
        let non_increasing = fractions.windows(2).all(|w| w[1].value <= w[0].value);
        scales.push(json!({
            "delta": delta,
            "epsilon_decreasing": by_eps,
            "exceeds_fraction": fractions,
            "mean_double_pairs": mean_pairs,
            "non_increasing": non_increasing,
        }));
        rows.extend(these);
    }
    let tail = truncation(cfg);
    let mut out = ExperimentOutput::default();
    out.push_csv(
        "data.csv",
        "delta,epsilon,rep,double_pair_count,gamma_regions,max_gamma_diameter,exceeds_bound,n_max,grid_m,horizon",
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{},{tail}",
                fmt_f64(r.delta),
                fmt_f64(r.epsilon),
                r.rep,
                r.double_pair_count,
                r.gamma_regions,
                fmt_f64(r.max_gamma_diameter),
                r.exceeds_bound
            )
        }),
    );
    out.summary = Some(json!({ "scales": scales }));
    Ok(out)
}
