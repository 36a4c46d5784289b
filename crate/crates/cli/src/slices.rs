use std::path::Path;

use fmc_core::theory::{enumerate_cone, SliceRow, TabularPolicy};
use fmc_core::DiscreteEnvironment;
use serde::Serialize;

use crate::report::write_file;
use crate::CliError;

#[derive(Debug, Serialize)]
struct SliceDump {
    policy: &'static str,
    ticks: usize,
    dt: f64,
    expansions: usize,
    rows: Vec<SliceRow>,
}

/// Uniform-policy cone at the start state, one row per (tick, state).
pub fn slices_json<E: DiscreteEnvironment>(env: &E, ticks: usize, dt: f64) -> Result<String, CliError> {
    let table = enumerate_cone(env, &env.initial_state(), ticks, dt, &TabularPolicy::uniform(env.action_count()))?;
    let dump = SliceDump { policy: "uniform", ticks, dt, expansions: table.expansions, rows: table.rows() };
    Ok(serde_json::to_string_pretty(&dump).expect("slice rows serialise") + "\n")
}

pub fn write_slices<E: DiscreteEnvironment>(env: &E, ticks: usize, dt: f64, path: &Path) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    write_file(path, &slices_json(env, ticks, dt)?)
}
