use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use qpe_core::engine::{run_ensemble, sweep, SweepRow};
use qpe_core::io::{figure_preset, load_config, manifest_path, write_csv_file, RunManifest, RunSpec};
use qpe_core::{validation, QpeError};

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qpe", version, about = "Phase-estimation magnetometry simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output CSV path; the manifest is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true, env = "QPE_WORKERS")]
    workers: Option<usize>,

    /// Allow K above 14 and use the full published ranges for figure data.
    #[arg(long, global = true)]
    full_scale: bool,

    /// Ensemble size S, overriding the config or preset.
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Record wall-clock time in the manifest.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a single ensemble.
    Run { config: PathBuf },
    /// Run every cell of a sweep.
    Sweep { config: PathBuf },
    /// Check the numerics against brute-force references.
    Validate,
    /// Emit the preset sweep behind a figure: fig2, fig3 or fig4.
    FigureData { name: String },
}

enum Failure {
    Config(String),
    Runtime(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Runtime(_) => EXIT_RUNTIME,
            Failure::Validation(_) => EXIT_VALIDATION,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Runtime(m) | Failure::Validation(m) => m,
        }
    }
}

impl From<QpeError> for Failure {
    fn from(e: QpeError) -> Self {
        match e {
            QpeError::Config { .. } | QpeError::Json(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn apply_overrides(mut spec: RunSpec, cli: &Cli) -> Result<RunSpec, Failure> {
    if let Some(seed) = cli.seed {
        spec = spec.with_seed(seed);
    }
    if let Some(s) = cli.trials {
        if s == 0 {
            return Err(Failure::Config("--trials must be >= 1".into()));
        }
        spec.base.trials = s;
    }
    if cli.full_scale {
        spec.high_memory = true;
    }
    spec.validate()?;
    Ok(spec)
}

fn write_outputs(command: &str, spec: &RunSpec, rows: &[SweepRow], out: &Path, elapsed: f64, timing: bool) -> Result<(), Failure> {
    write_csv_file(rows, out).map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
    let manifest = RunManifest::new(command, spec, rows, timing.then_some(elapsed));
    let mpath = manifest_path(out);
    std::fs::write(&mpath, manifest.to_json()?).map_err(|e| Failure::Runtime(format!("{}: {e}", mpath.display())))?;
    eprintln!(
        "wrote {} rows to {} ({:.1} s)",
        rows.len(),
        out.display(),
        elapsed
    );
    let failed: Vec<String> = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.outcome.as_ref().err().map(|m| format!("row {i}: {m}")))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(format!("{} cell(s) failed:\n  {}", failed.len(), failed.join("\n  "))))
    }
}

fn run_sweep(command: &str, spec: &RunSpec, cli: &Cli, default_out: &str) -> Result<(), Failure> {
    let start = Instant::now();
    let rows = sweep(&spec.base, &spec.axes);
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(default_out));
    write_outputs(command, spec, &rows, &out, start.elapsed().as_secs_f64(), cli.timing)
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Run { config } => {
            let spec = apply_overrides(load_config(config)?, cli)?;
            if spec.is_sweep() {
                return Err(Failure::Config(format!(
                    "{} describes a sweep; use `qpe sweep`",
                    config.display()
                )));
            }
            let start = Instant::now();
            let outcome = run_ensemble(&spec.base);
            if let Ok(agg) = &outcome {
                println!(
                    "T_tilde = {}  V_H = {:.6e}  V_H_err = {:.6e}  V_H*T_tilde = {:.6e}  (S = {}, invalid = {})",
                    agg.resource_time, agg.v_h, agg.v_h_err, agg.product, agg.trials, agg.invalid_trials
                );
            }
            let rows = vec![SweepRow {
                config: spec.base.clone(),
                outcome: outcome.map_err(|e| e.to_string()),
            }];
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("run.csv"));
            write_outputs("run", &spec, &rows, &out, start.elapsed().as_secs_f64(), cli.timing)
        }
        Command::Sweep { config } => {
            let spec = apply_overrides(load_config(config)?, cli)?;
            run_sweep("sweep", &spec, cli, "sweep.csv")
        }
        Command::FigureData { name } => {
            let spec = apply_overrides(figure_preset(name, cli.full_scale)?, cli)?;
            run_sweep("figure-data", &spec, cli, &format!("{name}.csv"))
        }
        Command::Validate => {
            let reports = validation::run_all(cli.seed.unwrap_or(0))?;
            let mut failed = 0;
            for r in &reports {
                println!("{r}");
                if !r.passed() {
                    failed += 1;
                }
            }
            if failed > 0 {
                Err(Failure::Validation(format!("{failed} check(s) failed")))
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.workers {
        Some(0) => Err(Failure::Config("--workers must be >= 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Failure::Runtime(format!("cannot start {n} workers: {e}"))),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
