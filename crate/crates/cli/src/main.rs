//! `gspe`: run, sweep and check the estimators from TOML configuration files.

mod config;
mod error;
mod record;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{resolve_seed, Mode, Point, RunConfig};
use error::CliError;
use record::{wall_time_path, write_atomic};
use run::{execute, Execution};

#[derive(Debug, Parser)]
#[command(name = "gspe", version, about = "Ground-state energy and property estimation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one configuration and write its result record.
    Run {
        config: PathBuf,
        /// Record path, overriding `output` in the configuration.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every point of the configuration's `[sweep]` grid.
    Sweep {
        config: PathBuf,
        /// Output directory, overriding `output` in the configuration.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the Fourier approximation and report its grid sup-error.
    FourierCheck {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => cmd_run(&config, out),
        Command::Sweep { config, out } => cmd_sweep(&config, out),
        Command::FourierCheck { delta, epsilon, out } => cmd_fourier(delta, epsilon, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Writes the record, its wall-time sidecar and the optional trace.
fn persist(exec: &Execution, path: &Path, trace: Option<&Path>, secs: f64) -> Result<(), CliError> {
    write_atomic(path, &exec.record.to_toml())?;
    write_atomic(&wall_time_path(path), &format!("wall_time = {}\n", secs))?;
    if let (Some(t), Some(body)) = (trace, &exec.trace) {
        write_atomic(t, body)?;
    }
    Ok(())
}

fn cmd_run(path: &Path, out: Option<PathBuf>) -> Result<(), CliError> {
    let cfg = RunConfig::load(path)?;
    let (seed, source) = resolve_seed(cfg.seed)?;
    let target = out.or_else(|| cfg.output.clone()).ok_or_else(|| CliError::Parse(format!("{}: no `output` and no --out", path.display())))?;
    let start = Instant::now();
    let exec = execute(&cfg, cfg.base_point(), 0, seed, source)?;
    persist(&exec, &target, cfg.cdf_trace.as_deref(), start.elapsed().as_secs_f64())?;
    print!("{}", exec.record.to_toml());
    Ok(())
}

fn cmd_fourier(delta: f64, epsilon: f64, out: Option<PathBuf>) -> Result<(), CliError> {
    let cfg = RunConfig {
        mode: Mode::FourierCheck,
        instance: None,
        epsilon,
        eta: None,
        nu: None,
        gamma_override: None,
        seed: 0,
        output: None,
        cdf_trace: None,
        overlap: None,
        observable: None,
        alpha: None,
        generalized_gate: false,
        delta: Some(delta),
        rdm: None,
        degeneracy_tolerance: None,
        shots: Default::default(),
        schedule: None,
        sweep: None,
    };
    let start = Instant::now();
    let exec = execute(&cfg, cfg.base_point(), 0, 0, "config")?;
    if let Some(p) = out {
        persist(&exec, &p, None, start.elapsed().as_secs_f64())?;
    }
    print!("{}", exec.record.to_toml());
    Ok(())
}

fn cmd_sweep(path: &Path, out: Option<PathBuf>) -> Result<(), CliError> {
    let cfg = RunConfig::load(path)?;
    let points = cfg.grid()?;
    let (seed, source) = resolve_seed(cfg.seed)?;
    let dir = out.or_else(|| cfg.output.clone()).ok_or_else(|| CliError::Parse(format!("{}: no `output` and no --out", path.display())))?;
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(points.len());
    let mut results: Vec<Option<Result<Execution, CliError>>> = (0..points.len()).map(|_| None).collect();
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (cfg, points, dir) = (&cfg, &points, &dir);
                scope.spawn(move || {
                    let mut done = Vec::new();
                    for (i, &p) in points.iter().enumerate().skip(w).step_by(workers) {
                        done.push((i, run_point(cfg, p, i, seed, source, dir)));
                    }
                    done
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("sweep worker panicked") {
                results[i] = Some(r);
            }
        }
    });
    let mut execs = Vec::new();
    for r in results {
        execs.push(r.expect("every point runs")?);
    }
    let table = summary(&points, &execs);
    write_atomic(&dir.join("summary.txt"), &table)?;
    print!("{}", table);
    Ok(())
}

fn run_point(cfg: &RunConfig, p: Point, i: usize, seed: u64, source: &'static str, dir: &Path) -> Result<Execution, CliError> {
    let start = Instant::now();
    let exec = execute(cfg, p, i as u64, seed, source)?;
    let trace = cfg.cdf_trace.as_ref().map(|_| dir.join(format!("point-{:03}.csv", i)));
    persist(&exec, &dir.join(format!("point-{:03}.toml", i)), trace.as_deref(), start.elapsed().as_secs_f64())?;
    Ok(exec)
}

fn summary(points: &[Point], execs: &[Execution]) -> String {
    let mut s = format!(
        "{:>5} {:>10} {:>10} {:>10} {:>8} {:>8} {:>14} {:>12}\n",
        "point", "gamma", "1/gamma", "epsilon", "eta", "degree", "max_evol_time", "error"
    );
    for (i, (p, e)) in points.iter().zip(execs).enumerate() {
        let r = &e.record;
        let gamma = r.config.gamma.or(p.gamma);
        let fmt = |v: Option<f64>, prec: usize| v.map_or("-".to_string(), |x| format!("{:.*}", prec, x));
        s.push_str(&format!(
            "{:>5} {:>10} {:>10} {:>10} {:>8} {:>8} {:>14.4} {:>12}\n",
            i,
            fmt(gamma, 4),
            fmt(gamma.map(|g| 1.0 / g), 4),
            format!("{:.4e}", p.epsilon),
            fmt(p.eta, 3),
            r.result.max_degree,
            r.result.max_evolution_time,
            r.result.error.map_or("-".to_string(), |x| format!("{:.3e}", x)),
        ));
    }
    s
}
