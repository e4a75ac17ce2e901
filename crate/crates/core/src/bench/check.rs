//! Batch runs over a directory of `.scn` files.

use std::path::{Path, PathBuf};

use thiserror::Error;

use super::export::{write_traces, TraceFormat};
use super::run::{run_scenario, BenchError, RunReport};
use super::scenario::{parse_scenario, Scenario, ScenarioError};
use crate::asm::ObjectImage;

pub const SCENARIO_EXTENSION: &str = "scn";

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Scenario {
        path: PathBuf,
        source: ScenarioError,
    },
    #[error("scenario name `{0}` is used by more than one file")]
    DuplicateName(String),
    #[error("scenario `{name}`: {source}")]
    Bench { name: String, source: BenchError },
    #[error("no .{SCENARIO_EXTENSION} files in {}", .0.display())]
    Empty(PathBuf),
}

/// Where and how to dump traces.
#[derive(Debug, Clone)]
pub struct TraceOutput {
    pub dir: PathBuf,
    pub format: TraceFormat,
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CheckError> {
    let text = std::fs::read_to_string(path).map_err(|source| CheckError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text).map_err(|source| CheckError::Scenario {
        path: path.to_path_buf(),
        source,
    })
}

/// Every `.scn` file in `dir`, sorted by scenario name.
pub fn load_dir(dir: &Path) -> Result<Vec<Scenario>, CheckError> {
    let io = |source| CheckError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.extension().is_some_and(|e| e == SCENARIO_EXTENSION) {
            paths.push(path);
        }
    }
    paths.sort();
    let mut scenarios = paths
        .iter()
        .map(|p| load_scenario(p))
        .collect::<Result<Vec<_>, _>>()?;
    if scenarios.is_empty() {
        return Err(CheckError::Empty(dir.to_path_buf()));
    }
    scenarios.sort_by(|a, b| a.name.cmp(&b.name));
    if let Some(w) = scenarios.windows(2).find(|w| w[0].name == w[1].name) {
        return Err(CheckError::DuplicateName(w[0].name.clone()));
    }
    Ok(scenarios)
}

/// Runs one scenario and, if asked, writes its traces.
pub fn run_one(
    scenario: &Scenario,
    image: &ObjectImage,
    traces: Option<&TraceOutput>,
) -> Result<RunReport, CheckError> {
    let mut report = run_scenario(scenario, image).map_err(|source| CheckError::Bench {
        name: scenario.name.clone(),
        source,
    })?;
    if let Some(out) = traces {
        let path = write_traces(&report.traces, &out.dir, &scenario.name, out.format).map_err(
            |source| CheckError::Io {
                path: out.dir.clone(),
                source,
            },
        )?;
        report.trace_files.push(path);
    }
    Ok(report)
}

/// Runs scenarios on parallel workers. Reports come back sorted by name.
pub fn run_all(
    scenarios: &[Scenario],
    image: &ObjectImage,
    traces: Option<&TraceOutput>,
) -> Result<Vec<RunReport>, CheckError> {
    let mut reports = std::thread::scope(|s| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|sc| s.spawn(move || run_one(sc, image, traces)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario worker panicked"))
            .collect::<Result<Vec<_>, _>>()
    })?;
    reports.sort_by(|a, b| a.scenario.cmp(&b.scenario));
    Ok(reports)
}

pub fn check_dir(
    dir: &Path,
    image: &ObjectImage,
    traces: Option<&TraceOutput>,
) -> Result<Vec<RunReport>, CheckError> {
    run_all(&load_dir(dir)?, image, traces)
}

/// Concatenated scenario reports plus a closing tally.
pub fn render_summary(reports: &[RunReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out += &r.render();
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    out += &format!(
        "{} scenarios, {} passed, {} failed\n",
        reports.len(),
        reports.len() - failed,
        failed
    );
    out
}
