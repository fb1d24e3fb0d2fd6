use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wavetrace::config::{RunConfig, SweepConfig};
use wavetrace::report::{verify_report, Report};
use wavetrace::run::{emit, execute, RunError};
use wavetrace::suite::{random_config, SuiteParams};
use wavetrace::sweep::sweep;

#[derive(Parser)]
#[command(name = "wavetrace", version, about = "Exact wavefront tracking with a forward-in-time interaction potential")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track, trace and verify one configuration.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write fronts.svg and potential.svg.
        #[arg(long)]
        svg: bool,
        /// Number of slab midpoints at which to restart and compare 𝔔.
        #[arg(long)]
        restart_checks: Option<usize>,
        /// Add floating-point companion columns to the CSV files.
        #[arg(long)]
        decimal: bool,
    },
    /// Run one configuration at several grid sizes.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value = "sweep-out")]
        out: PathBuf,
    },
    /// Re-check the verdicts stored in a report.json.
    Verify { report: PathBuf },
    /// Run a seeded random suite and print one line per member.
    Suite {
        #[arg(long, default_value_t = 50)]
        runs: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write each member's artifacts under this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const PASS: u8 = 0;
const FAIL: u8 = 1;
const INPUT: u8 = 2;

fn exit_for(err: &RunError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(if err.is_input_error() { INPUT } else { FAIL })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            svg,
            restart_checks,
            decimal,
        } => {
            let mut cfg = match RunConfig::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(INPUT);
                }
            };
            if let Some(n) = restart_checks {
                cfg.options.restart_check_points = n;
            }
            let svg = svg || cfg.options.emit_svg;
            let result = execute(&cfg).and_then(|o| emit(&o, &out, decimal, svg).map(|files| (o, files)));
            match result {
                Ok((o, files)) => {
                    for f in files {
                        println!("wrote {}", f.display());
                    }
                    println!(
                        "{} events, K = {}, Q(0) = {}; {}",
                        o.report.events.len(),
                        o.report.k.0,
                        o.report.q0.0,
                        if o.report.passed { "all verdicts pass" } else { "VERIFICATION FAILED" }
                    );
                    for f in o.report.failures() {
                        eprintln!("  {f}");
                    }
                    ExitCode::from(if o.report.passed { PASS } else { FAIL })
                }
                Err(e) => exit_for(&e),
            }
        }
        Command::Sweep { config, jobs, out } => {
            let cfg = match SweepConfig::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(INPUT);
                }
            };
            let result = match sweep(&cfg, jobs) {
                Ok(r) => r,
                Err(e) => return exit_for(&e),
            };
            let written = std::fs::create_dir_all(&out)
                .and_then(|_| std::fs::write(out.join("sweep.json"), serde_json::to_string_pretty(&result).unwrap() + "\n"))
                .and_then(|_| std::fs::write(out.join("sweep.csv"), result.to_csv().expect("csv")));
            if let Err(e) = written {
                eprintln!("error: cannot write to {}: {e}", out.display());
                return ExitCode::from(FAIL);
            }
            print!("{}", result.to_csv().expect("csv"));
            if result.failed_members.is_empty() {
                ExitCode::from(PASS)
            } else {
                eprintln!("failed members: {}", result.failed_members.join(", "));
                ExitCode::from(FAIL)
            }
        }
        Command::Verify { report } => {
            let parsed = std::fs::read_to_string(&report)
                .map_err(|e| e.to_string())
                .and_then(|t| serde_json::from_str::<Report>(&t).map_err(|e| e.to_string()));
            let r = match parsed {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {}: {e}", report.display());
                    return ExitCode::from(INPUT);
                }
            };
            let problems = verify_report(&r);
            if problems.is_empty() {
                println!("ok: {} events, {} slabs re-checked", r.events.len(), r.slabs.len());
                ExitCode::from(PASS)
            } else {
                for p in &problems {
                    println!("{p}");
                }
                ExitCode::from(FAIL)
            }
        }
        Command::Suite { runs, seed, out } => {
            let params = SuiteParams::default();
            let mut failed = 0;
            for i in 0..runs {
                let cfg = random_config(seed, i, &params);
                let result = execute(&cfg).and_then(|o| match &out {
                    Some(dir) => emit(&o, &dir.join(format!("run-{i:03}")), false, false).map(|_| o),
                    None => Ok(o),
                });
                match result {
                    Ok(o) => {
                        let r = &o.report;
                        println!(
                            "run {i:3}: eps = {:>5}, {:3} events, Q(0) = {}, paper-upsilon counterexamples = {}, {}",
                            r.run_config.epsilon.0,
                            r.events.len(),
                            r.q0.0,
                            r.paper_upsilon_counterexamples.len(),
                            if r.passed { "pass" } else { "FAIL" }
                        );
                        if !r.passed {
                            failed += 1;
                        }
                    }
                    Err(e) => {
                        println!("run {i:3}: error: {e}");
                        failed += 1;
                    }
                }
            }
            println!("{} of {runs} runs passed", runs - failed);
            ExitCode::from(if failed == 0 { PASS } else { FAIL })
        }
    }
}
