use serde::{Deserialize, Serialize};

use super::WaveNode;
use crate::action::Action;
use crate::env::{Environment, Observation};

/// One transition: the observation the action was taken from and what followed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutRow {
    pub episode: usize,
    pub step: usize,
    pub observation: Observation,
    pub action: Action,
    /// Points collected on arrival.
    pub reward: f64,
    pub done: bool,
}

/// Episodes stored contiguously and in step order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RolloutDataset {
    pub rows: Vec<RolloutRow>,
    episodes: usize,
}

#[derive(Serialize)]
struct CsvRow {
    episode: usize,
    step: usize,
    observation: String,
    action: String,
    reward: f64,
    done: bool,
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

impl RolloutDataset {
    pub const CSV_COLUMNS: [&'static str; 6] = ["episode", "step", "observation", "action", "reward", "done"];

    pub fn episodes(&self) -> usize {
        self.episodes
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends the path below `root` as a new episode. Empty paths are skipped.
    pub fn push_episode<E: Environment>(&mut self, env: &E, root: &WaveNode<E::State>, path: &[WaveNode<E::State>]) {
        if path.is_empty() {
            return;
        }
        let episode = self.episodes;
        self.episodes += 1;
        let mut prev = root;
        for (step, node) in path.iter().enumerate() {
            let Some(action) = node.action.clone() else { continue };
            self.rows.push(RolloutRow {
                episode,
                step,
                observation: env.observe(&prev.state),
                action,
                reward: node.score - prev.score,
                done: step + 1 == path.len() || env.is_dead(&node.state),
            });
            prev = node;
        }
    }

    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&serde_json::to_string(row).expect("rollout rows serialise"));
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record(Self::CSV_COLUMNS).expect("in-memory csv");
        }
        for row in &self.rows {
            let observation = match &row.observation {
                Observation::Key(k) => k.clone(),
                Observation::Vector(v) => join(v),
            };
            let action = match &row.action {
                Action::Discrete(a) => a.to_string(),
                Action::Continuous(v) => join(v),
            };
            w.serialize(CsvRow {
                episode: row.episode,
                step: row.step,
                observation,
                action,
                reward: row.reward,
                done: row.done,
            })
            .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
    }
}
