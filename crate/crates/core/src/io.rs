//! Trial-log serialization, run manifests, and summary tables.
//!
//! JSONL schema: one record per line with keys `index`, `alice_setting`,
//! `bob_setting`, `alice_outcome`, `bob_outcome`. Settings are the integers
//! 1/2/3 under the device policy and degrees (always with a decimal point)
//! under the fixed policy.
//!
//! CSV log schema: header `index,alice_setting,bob_setting,alice_outcome,
//! bob_outcome` followed by the same values, one row per trial.
//!
//! Summary CSV column order is fixed: `alice_setting,bob_setting,n,f_uu,
//! f_ud,f_du,f_dd,correlation,std_err`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantum_sampler::{SettingValue, TrialRecord};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed record at line {line}: {detail}")]
    Malformed { line: usize, detail: String },
}

/// Serialized trial-log format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogFormat {
    Jsonl,
    Csv,
}

fn setting_cell(value: &SettingValue) -> String {
    // serde_json's float formatting always keeps a decimal point, which is
    // what distinguishes fixed-policy degrees from device setting numbers
    // when reading a CSV log back.
    serde_json::to_string(value).expect("setting serializes")
}

/// Writes a trial log in the given format.
pub fn write_log<W: Write>(mut w: W, records: &[TrialRecord], format: LogFormat) -> Result<(), IoError> {
    match format {
        LogFormat::Jsonl => {
            for record in records {
                serde_json::to_writer(&mut w, record).map_err(std::io::Error::other)?;
                w.write_all(b"\n")?;
            }
        }
        LogFormat::Csv => {
            writeln!(w, "index,alice_setting,bob_setting,alice_outcome,bob_outcome")?;
            for record in records {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    record.index,
                    setting_cell(&record.alice_setting),
                    setting_cell(&record.bob_setting),
                    record.alice_outcome,
                    record.bob_outcome
                )?;
            }
        }
    }
    Ok(())
}

fn parse_setting(cell: &str, line: usize) -> Result<SettingValue, IoError> {
    let malformed = |detail: String| IoError::Malformed { line, detail };
    if cell.contains('.') || cell.contains('e') || cell.contains('E') {
        cell.parse::<f64>()
            .map(SettingValue::AngleDeg)
            .map_err(|e| malformed(format!("bad angle {cell:?}: {e}")))
    } else {
        cell.parse::<u8>()
            .map(SettingValue::Device)
            .map_err(|e| malformed(format!("bad setting {cell:?}: {e}")))
    }
}

/// Reads a trial log, auto-detecting JSONL vs CSV from the first line.
pub fn read_log<R: BufRead>(reader: R) -> Result<Vec<TrialRecord>, IoError> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('{') {
            let record: TrialRecord = serde_json::from_str(trimmed)
                .map_err(|e| IoError::Malformed { line: i + 1, detail: e.to_string() })?;
            records.push(record);
        } else if i == 0 && trimmed.starts_with("index,") {
            continue; // CSV header
        } else {
            let cells: Vec<&str> = trimmed.split(',').collect();
            if cells.len() != 5 {
                return Err(IoError::Malformed {
                    line: i + 1,
                    detail: format!("expected 5 CSV fields, got {}", cells.len()),
                });
            }
            let malformed = |detail: String| IoError::Malformed { line: i + 1, detail };
            records.push(TrialRecord {
                index: cells[0].parse().map_err(|e| malformed(format!("bad index: {e}")))?,
                alice_setting: parse_setting(cells[1], i + 1)?,
                bob_setting: parse_setting(cells[2], i + 1)?,
                alice_outcome: cells[3].parse().map_err(|e| malformed(format!("bad outcome: {e}")))?,
                bob_outcome: cells[4].parse().map_err(|e| malformed(format!("bad outcome: {e}")))?,
            });
        }
    }
    Ok(records)
}

/// Everything needed to reproduce a run bit-exactly, plus provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub created_utc: String,
    /// "quantum" or "classical".
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub policy: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alice_setting: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bob_setting: Option<u8>,
    pub trials: u64,
    pub seed: u64,
    pub format: LogFormat,
    pub log_path: String,
}

/// One row of a per-setting-pair summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub alice_setting: SettingValue,
    pub bob_setting: SettingValue,
    pub n: u64,
    pub f_uu: f64,
    pub f_ud: f64,
    pub f_du: f64,
    pub f_dd: f64,
    pub correlation: f64,
    pub std_err: f64,
}

/// Per-setting-pair counts, outcome frequencies and correlation estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

#[derive(PartialEq, PartialOrd, Eq, Ord)]
enum SettingKey {
    Device(u8),
    // total order on the raw bits is fine for grouping angle settings
    Angle(u64),
}

fn key(value: &SettingValue) -> SettingKey {
    match value {
        SettingValue::Device(n) => SettingKey::Device(*n),
        SettingValue::AngleDeg(d) => SettingKey::Angle(d.to_bits()),
    }
}

impl SummaryTable {
    pub fn from_records(records: &[TrialRecord]) -> Self {
        let mut groups: BTreeMap<(SettingKey, SettingKey), (SettingValue, SettingValue, [u64; 4])> =
            BTreeMap::new();
        for record in records {
            let entry = groups
                .entry((key(&record.alice_setting), key(&record.bob_setting)))
                .or_insert((record.alice_setting, record.bob_setting, [0; 4]));
            let cell = match (record.alice_outcome, record.bob_outcome) {
                (1, 1) => 0,
                (1, -1) => 1,
                (-1, 1) => 2,
                _ => 3,
            };
            entry.2[cell] += 1;
        }
        let rows = groups
            .into_values()
            .map(|(alice, bob, counts)| {
                let n: u64 = counts.iter().sum();
                let nf = n as f64;
                let correlation =
                    (counts[0] as f64 - counts[1] as f64 - counts[2] as f64 + counts[3] as f64) / nf;
                let std_err = ((1.0 - correlation * correlation).max(0.0) / nf).sqrt();
                SummaryRow {
                    alice_setting: alice,
                    bob_setting: bob,
                    n,
                    f_uu: counts[0] as f64 / nf,
                    f_ud: counts[1] as f64 / nf,
                    f_du: counts[2] as f64 / nf,
                    f_dd: counts[3] as f64 / nf,
                    correlation,
                    std_err,
                }
            })
            .collect();
        Self { rows }
    }

    /// (same-outcome frequency, trial count) over the case-(b) rows of a
    /// device-policy log; `None` when there are no unequal-setting trials.
    pub fn case_b_same_outcome(&self) -> Option<(f64, u64)> {
        let mut same = 0.0;
        let mut total = 0u64;
        for row in &self.rows {
            if row.alice_setting != row.bob_setting {
                same += (row.f_uu + row.f_dd) * row.n as f64;
                total += row.n;
            }
        }
        (total > 0).then(|| (same / total as f64, total))
    }

    /// Mean correlation over case-(b) rows, trial-weighted.
    pub fn case_b_correlation(&self) -> Option<(f64, u64)> {
        let mut weighted = 0.0;
        let mut total = 0u64;
        for row in &self.rows {
            if row.alice_setting != row.bob_setting {
                weighted += row.correlation * row.n as f64;
                total += row.n;
            }
        }
        (total > 0).then(|| (weighted / total as f64, total))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), IoError> {
        writeln!(w, "alice_setting,bob_setting,n,f_uu,f_ud,f_du,f_dd,correlation,std_err")?;
        for row in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                setting_cell(&row.alice_setting),
                setting_cell(&row.bob_setting),
                row.n,
                row.f_uu,
                row.f_ud,
                row.f_du,
                row.f_dd,
                row.correlation,
                row.std_err
            )?;
        }
        Ok(())
    }

    pub fn render_text(&self) -> String {
        let mut out = String::from(
            "alice     bob            n      f_uu      f_ud      f_du      f_dd      corr   std_err\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{:<9} {:<9} {:>8} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>9.5}\n",
                setting_cell(&row.alice_setting),
                setting_cell(&row.bob_setting),
                row.n,
                row.f_uu,
                row.f_ud,
                row.f_du,
                row.f_dd,
                row.correlation,
                row.std_err
            ));
        }
        out
    }
}
