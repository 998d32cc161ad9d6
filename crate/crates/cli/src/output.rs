//! Result files, manifest and metadata.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::recipes::{Check, RecipeOutput};
use crate::{CliError, ExperimentConfig, Recipe};

pub fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

/// Rows as CSV with a header taken from the field names.
pub fn csv_table<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

#[derive(Serialize)]
struct FileEntry<'a> {
    name: &'a str,
    bytes: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    format: &'static str,
    version: u32,
    recipe: &'static str,
    experiment: &'a str,
    seed: u64,
    status: &'static str,
    files: Vec<FileEntry<'a>>,
    checks: &'a [Check],
    config: &'a ExperimentConfig,
}

#[derive(Serialize)]
struct Metadata {
    started_unix_ms: u128,
    finished_unix_ms: u128,
    elapsed_ms: u128,
    tool_version: &'static str,
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::write(dir.join(name), contents)
        .map_err(|e| CliError::Io(format!("{}: {e}", dir.join(name).display())))
}

/// Writes result files, `summary.txt`, `manifest.json` and `metadata.json` into `dir`.
/// Everything but the metadata is a pure function of the config.
pub fn write_run(
    dir: &Path,
    recipe: Recipe,
    cfg: &ExperimentConfig,
    out: &RecipeOutput,
    started_ms: u128,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    for f in &out.files {
        write(dir, &f.name, &f.contents)?;
    }
    write(dir, "summary.txt", &out.summary)?;
    let ok = out.checks.iter().all(|c| c.passed || !c.enforced);
    let manifest = Manifest {
        format: "hybridlab-run",
        version: 1,
        recipe: recipe.name(),
        experiment: &cfg.experiment,
        seed: cfg.seed,
        status: if ok { "ok" } else { "invariant-failure" },
        files: out
            .files
            .iter()
            .map(|f| FileEntry {
                name: &f.name,
                bytes: f.contents.len(),
            })
            .chain(std::iter::once(FileEntry {
                name: "summary.txt",
                bytes: out.summary.len(),
            }))
            .collect(),
        checks: &out.checks,
        config: cfg,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    write(dir, "manifest.json", &(text + "\n"))?;
    let finished = now_ms();
    let meta = Metadata {
        started_unix_ms: started_ms,
        finished_unix_ms: finished,
        elapsed_ms: finished.saturating_sub(started_ms),
        tool_version: env!("CARGO_PKG_VERSION"),
    };
    let text = serde_json::to_string_pretty(&meta).map_err(|e| CliError::Io(e.to_string()))?;
    write(dir, "metadata.json", &(text + "\n"))
}
