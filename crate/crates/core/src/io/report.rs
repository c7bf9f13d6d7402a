//! Run records: one JSON document per run, or one line per run in batch mode.
//!
//! Floats are written in shortest round-trip form, so every numeric field
//! reads back bit for bit.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::config::RunConfig;
use crate::search::{run_search, Identification, SearchReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Identified,
    Ambiguous,
    NoAssociation,
    DegenerateWeights,
    ConfigInvalid,
    Failed,
}

impl Outcome {
    /// 0 success, 1 configuration problem, 2 degenerate or inconclusive search.
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Identified => 0,
            Outcome::ConfigInvalid | Outcome::Failed => 1,
            Outcome::Ambiguous | Outcome::NoAssociation | Outcome::DegenerateWeights => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub n_modes: usize,
    pub g_theta: usize,
    pub g_k: usize,
    pub d_theta: f64,
    pub d_k: f64,
    pub n_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub version: String,
    pub config: RunConfig,
    pub grid: Option<GridInfo>,
    pub outcome: Outcome,
    pub report: Option<SearchReport>,
    pub error: Option<String>,
    pub wall_time_ms: f64,
}

impl RunRecord {
    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Io(format!("bad run record: {e}")))
    }
}

/// Validates `config`, runs the search and records the outcome.
pub fn execute(config: &RunConfig) -> RunRecord {
    let start = Instant::now();
    let mut record = RunRecord {
        version: crate::VERSION.to_string(),
        config: config.clone(),
        grid: None,
        outcome: Outcome::Failed,
        report: None,
        error: None,
        wall_time_ms: 0.0,
    };
    match config.to_search_config() {
        Err(e) => {
            record.outcome = Outcome::ConfigInvalid;
            record.error = Some(e.to_string());
        }
        Ok(sc) => {
            let g = sc.grid;
            record.grid = Some(GridInfo {
                n_modes: g.n_modes(),
                g_theta: g.g_theta(),
                g_k: g.g_k(),
                d_theta: g.d_theta(),
                d_k: g.d_k(),
                n_cells: g.n_cells(),
            });
            match run_search(&sc) {
                Ok(report) => {
                    record.outcome = match &report.identified {
                        Identification::Unique { .. } | Identification::Set { .. } => Outcome::Identified,
                        Identification::Ambiguous { .. } => Outcome::Ambiguous,
                        Identification::NoAssociation => Outcome::NoAssociation,
                    };
                    if let Identification::Ambiguous { strings } = &report.identified {
                        let names = strings.iter().map(|s| s.to_string()).collect();
                        record.error = Some(Error::AmbiguousAssociation(names).to_string());
                    } else if report.identified == Identification::NoAssociation {
                        record.error = Some(Error::NoAssociation.to_string());
                    }
                    record.report = Some(report);
                }
                Err(e @ Error::DegenerateWeights(_)) => {
                    record.outcome = Outcome::DegenerateWeights;
                    record.error = Some(e.to_string());
                }
                Err(e) => {
                    record.outcome = Outcome::Failed;
                    record.error = Some(e.to_string());
                }
            }
        }
    }
    record.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    record
}

/// Writes one pretty record, or line-delimited records when there are several.
pub fn write_records(records: &[RunRecord], path: &Path) -> Result<()> {
    let text = match records {
        [one] => one.to_json() + "\n",
        many => many.iter().map(|r| r.to_json_line() + "\n").collect(),
    };
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let text = std::fs::read_to_string(path)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        if let Ok(one) = RunRecord::from_json(trimmed) {
            return Ok(vec![one]);
        }
    }
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(RunRecord::from_json)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::parse_config;
    use proptest::prelude::*;

    const N2: &str = r#"{
        "n_modes": 2, "g_theta": 6, "g_k": 5,
        "envelopes": [{"kind": "gaussian", "center": [1.2, 0.4], "widths": [0.5, 0.2]},
                      {"kind": "gaussian", "center": [2.0, 0.7], "widths": [0.4, 0.3]}],
        "target": {"mode": "constant", "bits": "01"},
        "zetas": [{"kind": "cosine", "frequency": 0.5}, {"kind": "cosine", "frequency": 0.5}]
    }"#;

    #[test]
    fn successful_run() {
        let rec = execute(&parse_config(N2).unwrap());
        assert_eq!(rec.outcome, Outcome::Identified);
        assert_eq!(rec.exit_code(), 0);
        let report = rec.report.as_ref().unwrap();
        assert_eq!(report.identified.unique().unwrap().to_string(), "01");
    }

    #[test]
    fn degenerate_and_invalid_runs() {
        let zero = N2.replace(
            r#"[{"kind": "cosine", "frequency": 0.5}, {"kind": "cosine", "frequency": 0.5}]"#,
            r#"[{"kind": "constant", "value": 0.0}, {"kind": "constant", "value": 1.0}]"#,
        );
        let rec = execute(&parse_config(&zero).unwrap());
        assert_eq!(rec.outcome, Outcome::DegenerateWeights);
        assert_eq!(rec.exit_code(), 2);
        let bad = N2.replace("\"g_k\": 5", "\"g_k\": 0");
        let rec = execute(&parse_config(&bad).unwrap());
        assert_eq!(rec.exit_code(), 1);
        assert!(rec.error.unwrap().contains("/g_k"));
    }

    #[test]
    fn record_round_trip_is_exact() {
        let rec = execute(&parse_config(N2).unwrap());
        assert_eq!(RunRecord::from_json(&rec.to_json()).unwrap(), rec);
        assert_eq!(RunRecord::from_json(&rec.to_json_line()).unwrap(), rec);
    }

    #[test]
    fn identical_config_identical_report() {
        let cfg = parse_config(N2).unwrap();
        let (mut a, mut b) = (execute(&cfg), execute(&cfg));
        a.wall_time_ms = 0.0;
        b.wall_time_ms = 0.0;
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn batch_files() {
        let cfg = parse_config(N2).unwrap();
        let recs = vec![execute(&cfg), execute(&cfg)];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("batch.jsonl");
        write_records(&recs, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
        assert_eq!(read_records(&path).unwrap(), recs);
        write_records(&recs[..1], &path).unwrap();
        assert_eq!(read_records(&path).unwrap(), recs[..1]);
    }

    proptest! {
        #[test]
        fn floats_survive_serialization(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
            let mut rec = execute(&parse_config(N2).unwrap());
            rec.wall_time_ms = x;
            if let Some(r) = rec.report.as_mut() {
                r.norm_constant = x;
            }
            let back = RunRecord::from_json(&rec.to_json_line()).unwrap();
            prop_assert_eq!(back.wall_time_ms.to_bits(), x.to_bits());
            prop_assert_eq!(back.report.unwrap().norm_constant.to_bits(), x.to_bits());
        }
    }
}
