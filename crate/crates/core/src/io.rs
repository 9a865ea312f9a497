//! Number formatting and the JSON/CSV wire forms shared by the library and the CLI.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::paths::{make_pair, CoalescingPair, PairSet, Path};

/// Formats a float with 17 significant digits; infinities as `inf`/`-inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_owned()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        format!("{x:.16e}")
    }
}

/// Parses the output of [`fmt_f64`].
pub fn parse_f64(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        other => other.parse().ok(),
    }
}

/// One pair in a pair file: `{"id": ..., "left": Path, "right": Path}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRecord {
    pub id: String,
    pub left: Path,
    pub right: Path,
}

/// Reads a JSON array of [`PairRecord`]s and validates each pair.
pub fn read_pair_file(text: &str) -> Result<Vec<(String, CoalescingPair)>> {
    let records: Vec<PairRecord> = serde_json::from_str(text)?;
    records
        .into_iter()
        .map(|r| Ok((r.id, make_pair(r.left, r.right)?)))
        .collect()
}

/// Serializes a pair set to the pair-file JSON form, ids `0, 1, ...`.
pub fn pair_set_json(set: &PairSet) -> Result<String> {
    let records: Vec<PairRecord> = set
        .iter()
        .enumerate()
        .map(|(k, p)| PairRecord {
            id: k.to_string(),
            left: (**p.left()).clone(),
            right: (**p.right()).clone(),
        })
        .collect();
    Ok(serde_json::to_string(&records)?)
}
