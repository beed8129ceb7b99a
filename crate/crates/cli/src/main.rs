//! Command-line runner: reads a JSON job, executes one check suite, and
//! writes a JSON-lines report. Exit status encodes the outcome: 0 all checks
//! pass, 1 a mathematical verdict is negative, 2 bad input, 3 budget hit.

mod commands;
mod job;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use multirees::{Budget, Error};

use crate::job::JobSpec;
use crate::report::Report;

const EXAMPLE41_JOB: &str = include_str!("../assets/example41.json");
const TAMPERED_JOB: &str = include_str!("../assets/tampered41.json");

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Budget(msg) => Failure::Budget(msg),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Input(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "multirees", version, about = "Exact Rees-window and central-fiber checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON job file describing the ring, cutters, windows, and toric blocks.
    #[arg(long, global = true)]
    job: Option<PathBuf>,

    /// Worker cap for the internal thread pool; default uses all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Abort with exit 3 after this many basis reduction steps.
    #[arg(long, global = true)]
    budget_gb_steps: Option<u64>,

    /// Abort with exit 3 after touching this many matrix cells.
    #[arg(long, global = true)]
    budget_cells: Option<u64>,

    /// Abort with exit 3 after this many wall-clock seconds.
    #[arg(long, global = true)]
    budget_seconds: Option<u64>,

    /// Report destination, `-` for stdout.
    #[arg(long, global = true, default_value = "-")]
    out: String,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced basis of the declared relation ideal.
    Gb,
    /// Initial ideal under the job's weight vector.
    Initial,
    /// Degree-by-degree flatness certificate for the cutter filtrations.
    Flatness,
    /// Central fiber table, domain test, weight cone, and bookkeeping.
    Fiber,
    /// Cartier, section-sum, and valuative-level checks for a toric block.
    Toric,
    /// The shipped cubic-cone scenario with its golden assertions.
    Example41 {
        /// Recompute with a larger degree bound and window.
        #[arg(long)]
        degree_bound: Option<u64>,
        /// Swap in the zero-divisor input to exercise the failure path.
        #[arg(long)]
        tamper: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gb => "gb",
            Command::Initial => "initial",
            Command::Flatness => "flatness",
            Command::Fiber => "fiber",
            Command::Toric => "toric",
            Command::Example41 { .. } => "example41",
        }
    }
}

fn load_job(cli: &Cli) -> Result<JobSpec, Failure> {
    let path = cli
        .job
        .as_ref()
        .ok_or_else(|| Failure::Input("this command needs --job <file>".into()))?;
    let text = std::fs::read_to_string(path)?;
    JobSpec::from_text(&text)
}

fn example41_job(degree_bound: Option<u64>, tamper: bool) -> Result<JobSpec, Failure> {
    let text = if tamper { TAMPERED_JOB } else { EXAMPLE41_JOB };
    let mut job = JobSpec::from_text(text)?;
    if let Some(n) = degree_bound {
        let window = job
            .window
            .as_mut()
            .expect("shipped jobs declare a window");
        window.degree_bound = n;
        window.bounds = vec![n; window.bounds.len()];
    }
    Ok(job)
}

fn run(cli: &Cli) -> Result<i32, Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Input(format!("thread pool: {e}")))?;
    }
    let budget = Budget::new(cli.budget_gb_steps, cli.budget_cells, cli.budget_seconds);
    eprintln!(
        "run: threads={} budget={}",
        cli.threads.unwrap_or(0),
        json!({
            "gb_steps": cli.budget_gb_steps,
            "cells": cli.budget_cells,
            "seconds": cli.budget_seconds,
        })
    );

    let mut job = match &cli.command {
        Command::Example41 {
            degree_bound,
            tamper,
        } => example41_job(*degree_bound, *tamper)?,
        _ => load_job(cli)?,
    };
    job.normalize();

    let mut report = Report::new(cli.command.name(), job.resolved());

    let started = Instant::now();
    match &cli.command {
        Command::Gb => commands::cmd_gb(&job, &mut report, &budget)?,
        Command::Initial => commands::cmd_initial(&job, &mut report, &budget)?,
        Command::Flatness => commands::cmd_flatness(&job, &mut report, &budget)?,
        Command::Fiber => commands::cmd_fiber(&job, &mut report, &budget)?,
        Command::Toric => commands::cmd_toric(&job, &mut report, &budget)?,
        Command::Example41 { tamper, .. } => {
            commands::cmd_example41(&job, &mut report, &budget, !tamper)?
        }
    }
    eprintln!(
        "timing: {} finished in {:.3}s",
        cli.command.name(),
        started.elapsed().as_secs_f64()
    );

    let rendered = report.render();
    if cli.out == "-" {
        std::io::stdout().write_all(rendered.as_bytes())?;
    } else {
        std::fs::write(&cli.out, rendered)?;
    }
    Ok(if report.is_negative() { 1 } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("budget exceeded: {msg}");
            ExitCode::from(3)
        }
    }
}
