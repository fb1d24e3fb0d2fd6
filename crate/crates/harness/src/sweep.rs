//! ε-sweeps: one run per grid size, executed concurrently.

use rayon::prelude::*;
use serde::Serialize;
use wavetrace_core::rational::Rational;
use wavetrace_core::tracker::{l1_distance, Profile, TimeSide};

use crate::config::{Exact, RunConfig, SweepConfig};
use crate::run::{execute, RunError};
use crate::suite::sweep_datum;

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub epsilon: Exact,
    #[serde(rename = "K")]
    pub k: Exact,
    #[serde(rename = "TV0")]
    pub tv0: Exact,
    #[serde(rename = "Q0")]
    pub q0: Exact,
    pub upsilon0_paper: Exact,
    pub upsilon0_strict: Exact,
    /// `K·TV0²`, the ε-uniform bound for `𝔔(0)`.
    pub bound: Exact,
    pub events: usize,
    /// Smallest `Υ_strict(−) − Υ_strict(+) − Δσ` over events.
    pub min_upsilon_slack: Option<Exact>,
    pub passed: bool,
    /// `L¹` distance to the finest run at each probe time (`None` if the
    /// far-field states differ).
    pub l1_to_finest: Vec<Option<Exact>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub probe_times: Vec<Exact>,
    pub rows: Vec<SweepRow>,
    pub failed_members: Vec<String>,
}

impl SweepResult {
    pub fn to_csv(&self) -> csv::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut head: Vec<String> = [
            "epsilon", "K", "TV0", "Q0", "upsilon0_paper", "upsilon0_strict", "bound", "events", "min_upsilon_slack", "passed",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        head.extend(self.probe_times.iter().map(|t| format!("l1_at_{}", fmt(&t.0))));
        w.write_record(&head)?;
        for r in &self.rows {
            let mut rec = vec![
                fmt(&r.epsilon.0),
                fmt(&r.k.0),
                fmt(&r.tv0.0),
                fmt(&r.q0.0),
                fmt(&r.upsilon0_paper.0),
                fmt(&r.upsilon0_strict.0),
                fmt(&r.bound.0),
                r.events.to_string(),
                r.min_upsilon_slack.as_ref().map(|e| fmt(&e.0)).unwrap_or_default(),
                r.passed.to_string(),
            ];
            rec.extend(r.l1_to_finest.iter().map(|d| d.as_ref().map(|e| fmt(&e.0)).unwrap_or_default()));
            w.write_record(&rec)?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8"))
    }
}

fn fmt(r: &Rational) -> String {
    wavetrace_core::rational::format(r)
}

/// Member configs, coarsest first.
pub fn members(cfg: &SweepConfig) -> Vec<RunConfig> {
    let datum = match &cfg.random {
        Some(spec) => sweep_datum(cfg.base.seed, spec, &cfg.epsilons[0].0),
        None => cfg.base.datum.clone(),
    };
    cfg.epsilons
        .iter()
        .map(|eps| RunConfig {
            epsilon: eps.clone(),
            datum: datum.clone(),
            ..cfg.base.clone()
        })
        .collect()
}

/// Runs every member on a pool of `jobs` threads (0 = rayon's default).
pub fn sweep(cfg: &SweepConfig, jobs: usize) -> Result<SweepResult, RunError> {
    cfg.validate()?;
    let configs = members(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    let outputs: Vec<Result<_, RunError>> = pool.install(|| {
        configs
            .par_iter()
            .map(|c| {
                let out = execute(c)?;
                let probes: Vec<Profile> = cfg
                    .probe_times
                    .iter()
                    .map(|t| out.timeline.profile_at(&t.0, TimeSide::Post))
                    .collect::<Result<_, _>>()?;
                Ok((out.report, probes))
            })
            .collect()
    });
    let mut done = Vec::with_capacity(outputs.len());
    for o in outputs {
        done.push(o?);
    }
    let finest = &done.last().expect("non-empty sweep").1;
    let mut failed = Vec::new();
    let rows = done
        .iter()
        .map(|(report, probes)| {
            if !report.passed {
                failed.push(format!("epsilon = {}", fmt(&report.run_config.epsilon.0)));
            }
            let slack = report
                .events
                .iter()
                .map(|e| &e.upsilon_minus.strict.0 - &e.upsilon_plus.strict.0 - &e.delta_sigma.0)
                .min();
            SweepRow {
                epsilon: report.run_config.epsilon.clone(),
                k: report.k.clone(),
                tv0: report.tv0.clone(),
                q0: report.q0.clone(),
                upsilon0_paper: report.upsilon0.paper.clone(),
                upsilon0_strict: report.upsilon0.strict.clone(),
                bound: Exact(&report.k.0 * &report.tv0.0 * &report.tv0.0),
                events: report.events.len(),
                min_upsilon_slack: slack.map(Exact),
                passed: report.passed,
                l1_to_finest: probes
                    .iter()
                    .zip(finest)
                    .map(|(u, v)| l1_distance(u, v).map(Exact))
                    .collect(),
            }
        })
        .collect();
    Ok(SweepResult {
        probe_times: cfg.probe_times.clone(),
        rows,
        failed_members: failed,
    })
}
