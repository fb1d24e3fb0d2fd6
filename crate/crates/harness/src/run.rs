//! One run: config → timeline → wave tracing → verified potential series.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;
use wavetrace_core::potential::{restart_check, verify_run, PotentialError, PotentialSeries};
use wavetrace_core::rational::Rational;
use wavetrace_core::tracing::{trace, TracingError, WaveSystem};
use wavetrace_core::tracker::{evolve_with, EvolveOptions, Timeline, TrackerError};

use crate::config::{ConfigError, RunConfig};
use crate::render;
use crate::report::{events_csv, potential_csv, Report, RestartRow};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("tracking failed: {0}")]
    Tracker(#[from] TrackerError),
    #[error("wave tracing failed: {0}")]
    Tracing(#[from] TracingError),
    #[error("potential evaluation failed: {0}")]
    Potential(#[from] PotentialError),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl RunError {
    /// Input problems map to exit status 2, everything else to 1.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            RunError::Config(_)
                | RunError::Tracker(
                    TrackerError::InvalidDatum(_) | TrackerError::InvalidProfile(_) | TrackerError::OutsideFluxWindow { .. }
                )
        )
    }
}

pub struct RunOutput {
    pub timeline: Timeline,
    pub waves: WaveSystem,
    pub series: PotentialSeries,
    pub report: Report,
}

/// Slabs used for restart checks: `n` non-degenerate slabs spread evenly,
/// restarting from each slab's midpoint (`t_lo + 1` for the last slab).
pub fn restart_slabs(tl: &Timeline, n: usize) -> Vec<usize> {
    let candidates: Vec<usize> = (0..tl.slabs.len()).filter(|&s| !tl.slabs[s].is_degenerate()).collect();
    let m = candidates.len();
    if n >= m {
        return candidates;
    }
    let mut picks: Vec<usize> = (0..n).map(|i| candidates[(2 * i + 1) * m / (2 * n)]).collect();
    picks.dedup();
    picks
}

pub fn execute(config: &RunConfig) -> Result<RunOutput, RunError> {
    let problem = config.problem()?;
    let options = EvolveOptions {
        max_events: config.options.max_events,
    };
    let timeline = evolve_with(&problem.profile, &problem.flux, &options)?;
    let waves = trace(&timeline)?;
    let series = verify_run(&timeline, &waves)?;
    let mut restarts = Vec::new();
    for slab in restart_slabs(&timeline, config.options.restart_check_points) {
        let (q, q_restart) = restart_check(&timeline, &waves, slab, &options)?;
        restarts.push(RestartRow {
            slab,
            t: timeline.slabs[slab].midpoint().into(),
            equal: q == q_restart,
            q: q.into(),
            q_restart: q_restart.into(),
        });
    }
    let report = Report::new(config.clone(), &series, restarts);
    Ok(RunOutput {
        timeline,
        waves,
        series,
        report,
    })
}

fn write(path: PathBuf, text: &str) -> Result<(), RunError> {
    fs::write(&path, text).map_err(|source| RunError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Writes report.json, events.csv, potential.csv and, if asked, the SVGs.
pub fn emit(out: &RunOutput, dir: &Path, decimal: bool, svg: bool) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir).map_err(|source| RunError::Write {
        path: dir.display().to_string(),
        source,
    })?;
    let mut files = vec![
        (dir.join("report.json"), out.report.to_json()),
        (dir.join("events.csv"), events_csv(&out.report, decimal)?),
        (dir.join("potential.csv"), potential_csv(&out.report, decimal)?),
    ];
    if svg {
        files.push((dir.join("fronts.svg"), render::fronts_svg(&out.timeline)));
        files.push((dir.join("potential.svg"), render::potential_svg(&out.series)));
    }
    if !out.report.passed {
        let dump = serde_json::json!({
            "failures": out.report.failures(),
            "events": out.report.events.iter().filter(|e| e.verdicts.iter().any(|v| !v.holds && !v.informational)).collect::<Vec<_>>(),
            "initial_profile": {
                "constant": wavetrace_core::rational::format(&out.timeline.initial_profile.constant_state),
                "jumps": out.timeline.initial_profile.jumps.iter().map(|(x, v)| [fmt(x), fmt(v)]).collect::<Vec<_>>(),
            },
        });
        files.push((dir.join("counterexample.json"), serde_json::to_string_pretty(&dump).unwrap() + "\n"));
    }
    let mut written = Vec::new();
    for (path, text) in files {
        write(path.clone(), &text)?;
        written.push(path);
    }
    Ok(written)
}

fn fmt(r: &Rational) -> String {
    wavetrace_core::rational::format(r)
}
