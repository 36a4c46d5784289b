use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

/// One episode of one policy.
///
/// `survival` counts agent steps, `score` sums the composed reward over those
/// steps, `wall_ms` is blank unless timing was requested. The three metric
/// columns are filled on the grid boards only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub run_id: String,
    pub env: String,
    pub policy: String,
    pub episode: usize,
    pub seed: u64,
    pub survival: usize,
    pub score: f64,
    pub samples_per_action: usize,
    pub wall_ms: Option<f64>,
    pub scan_subopt: Option<f64>,
    pub decision_subopt: Option<f64>,
    pub iq: Option<f64>,
}

impl ReportRow {
    pub const COLUMNS: [&'static str; 12] = [
        "run_id",
        "env",
        "policy",
        "episode",
        "seed",
        "survival",
        "score",
        "samples_per_action",
        "wall_ms",
        "scan_subopt",
        "decision_subopt",
        "iq",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicySummary {
    pub episodes: usize,
    pub median_survival: f64,
    pub mean_score: f64,
    pub samples_per_action: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub run_id: String,
    pub config: RunConfig,
    pub summary: BTreeMap<String, PolicySummary>,
    pub rows: Vec<ReportRow>,
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

impl Report {
    pub fn new(config: RunConfig, rows: Vec<ReportRow>) -> Self {
        let mut summary = BTreeMap::new();
        for p in &config.policies {
            let mine: Vec<&ReportRow> = rows.iter().filter(|r| r.policy == p.name()).collect();
            if mine.is_empty() {
                continue;
            }
            summary.insert(
                p.name().to_string(),
                PolicySummary {
                    episodes: mine.len(),
                    median_survival: median(mine.iter().map(|r| r.survival as f64).collect()),
                    mean_score: mine.iter().map(|r| r.score).sum::<f64>() / mine.len() as f64,
                    samples_per_action: mine.iter().map(|r| r.samples_per_action).max().unwrap_or(0),
                },
            );
        }
        Self { run_id: config.run_id(), config, summary, rows }
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }

    /// Non-finite numbers (an infinite sub-optimality) come out as `null`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        write_file(&dir.join("report.csv"), &self.to_csv()?)?;
        write_file(&dir.join("report.json"), &self.to_json())
    }
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
