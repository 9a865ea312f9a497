//! Double pairs of the time-zero slice and the regions between them.
//!
//! Walks start from every primal site of row 0 with rescaled position in `[-2, 2]`
//! and run for `floor(epsilon / delta^2)` steps. Neighbouring walks still apart at
//! the end form a double pair. Between two consecutive double pairs the walks have
//! all merged; the region between the right walk of the first pair and the left
//! walk of the second is a gamma region.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{check_no_wrap, rows_until, ArrowField, LatticeSite};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub epsilon: f64,
    /// Double pairs with both starts in `[-1, 1]`.
    pub double_pair_count: u64,
    /// Widths of the gamma regions meeting `[-1, 1]`, left to right.
    pub gamma_diameters: Vec<f64>,
    pub max_gamma_diameter: f64,
}

const REACH: f64 = 2.0;
const SLACK: f64 = 1e-9;

pub fn double_pair_diagnostics(field: &ArrowField, delta: f64, epsilon: f64) -> Result<DiagnosticsReport> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::Domain(format!("delta = {delta} outside (0, 1/2]")));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Domain(format!("epsilon = {epsilon} outside (0, 1]")));
    }
    let rows = rows_until(epsilon, delta);
    let half = 2 * ((REACH / delta + SLACK).floor() as i64 / 2);
    let walks = (-half..=half)
        .step_by(2)
        .map(|i| {
            let pos = field.trace_up(LatticeSite::new(i, 0), rows)?;
            check_no_wrap(&pos, field.width())?;
            Ok(pos)
        })
        .collect::<Result<Vec<Vec<i64>>>>()?;
    let start = |k: usize| delta * walks[k][0] as f64;
    let inside = |x: f64| x.abs() <= 1.0 + SLACK;
    let last = rows as usize;

    let doubles: Vec<usize> = (0..walks.len() - 1)
        .filter(|&k| walks[k][last] != walks[k + 1][last])
        .collect();
    let double_pair_count = doubles.iter().filter(|&&k| inside(start(k)) && inside(start(k + 1))).count() as u64;

    // bounding walks (rho, lambda) of each region, outer ones closed by the extreme walks
    let mut bounds = Vec::with_capacity(doubles.len() + 1);
    let mut rho = 0;
    for &k in &doubles {
        bounds.push((rho, k));
        rho = k + 1;
    }
    bounds.push((rho, walks.len() - 1));

    let gamma_diameters: Vec<f64> = bounds
        .into_iter()
        .filter(|&(r, l)| start(r) <= 1.0 + SLACK && start(l) >= -1.0 - SLACK)
        .map(|(r, l)| {
            let widest = walks[r].iter().zip(&walks[l]).map(|(a, b)| b - a).max().unwrap();
            delta * widest as f64
        })
        .collect();
    let max_gamma_diameter = gamma_diameters.iter().copied().fold(0.0, f64::max);
    Ok(DiagnosticsReport {
        epsilon,
        double_pair_count,
        gamma_diameters,
        max_gamma_diameter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{sample_arrow_field, Dir};

    #[test]
    fn long_epsilon_on_an_attracting_field() {
        // every walk drifts towards column 0 and stays there
        let f = ArrowField::from_rule(200, 101, |col, _| if col == 0 || col > 100 { Dir::Right } else { Dir::Left })
            .unwrap();
        let r = double_pair_diagnostics(&f, 0.1, 1.0).unwrap();
        assert_eq!(r.double_pair_count, 0);
        assert_eq!(r.gamma_diameters.len(), 1);
        assert!((r.max_gamma_diameter - 4.0).abs() < 1e-12);
    }

    #[test]
    fn engineered_double_pair() {
        // walks from sites <= 0 are trapped on {-1, 0}, walks from sites >= 2 on {2, 3}
        let f = ArrowField::from_rule(200, 101, |col, _| {
            let i = if col > 100 { col - 200 } else { col };
            if i <= -1 || i == 2 {
                Dir::Right
            } else {
                Dir::Left
            }
        })
        .unwrap();
        let r = double_pair_diagnostics(&f, 0.1, 0.5).unwrap();
        assert_eq!(r.double_pair_count, 1);
        assert_eq!(r.gamma_diameters.len(), 2);
    }

    #[test]
    fn diameters_are_nonnegative_and_shrink_with_epsilon() {
        let f = ArrowField::for_scale(5, 0.05, 0.1).unwrap();
        let wide = double_pair_diagnostics(&f, 0.05, 0.01).unwrap();
        let narrow = double_pair_diagnostics(&f, 0.05, 0.04).unwrap();
        assert!(wide.double_pair_count >= narrow.double_pair_count);
        assert!(wide.gamma_diameters.iter().all(|d| *d >= 0.0));
        let f = sample_arrow_field(1, 400, 10).unwrap();
        assert!(double_pair_diagnostics(&f, 0.05, 1.0).is_err());
    }
}
