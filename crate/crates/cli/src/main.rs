use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use irs_deploy::placement::DEFAULT_RESOLUTION;
use irs_deploy::{AlternatingOptions, ScalingVariable};
use irs_deploy_cli::commands::{self, linspace, Analysis, AsymptoticArgs, SweepVar, ASYMPTOTIC_HEADER};
use irs_deploy_cli::figures::{self, Figure};
use irs_deploy_cli::output::{write_rows, write_table};
use irs_deploy_cli::{parse_config, CliError, Result, ScenarioConfig};

/// Rate analysis of hybrid and two-surface reflecting-surface deployments.
#[derive(Debug, Parser)]
#[command(name = "irs-deploy", version)]
struct Cli {
    /// Scenario file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a scenario key, e.g. `--set p_b_dbm=30`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Write CSV here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
struct JointFlags {
    /// Placement grid step (m).
    #[arg(long, default_value_t = 0.05)]
    resolution: f64,
    #[arg(long, default_value_t = 50)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

impl JointFlags {
    fn options(self) -> AlternatingOptions {
        AlternatingOptions { max_iters: self.max_iters, tol: self.tol, resolution: self.resolution }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// SNR and rate at a fixed geometry and split.
    Evaluate {
        /// Seed of the vector-channel oracle's random angles.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Passive/active split at a fixed geometry.
    Allocate,
    /// Surface placement for a fixed split.
    Place {
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: f64,
    },
    /// Joint split and placement.
    Joint(JointFlags),
    /// Jointly optimized schemes against the passive-only benchmarks.
    Compare(JointFlags),
    /// Repeat an analysis over a range of one parameter.
    Sweep {
        #[arg(long)]
        var: SweepVar,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        /// evaluate, allocate, place, joint or compare.
        #[arg(long, default_value = "allocate")]
        analysis: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        joint: JointFlags,
    },
    /// Limiting SNR and fitted log-log slope.
    Asymptotic {
        /// n, p_b or p_i.
        #[arg(long)]
        var: ScalingVariable,
        /// Sweep start: element count, or power in dBm.
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Passive fraction for element-count sweeps.
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Re-optimize the split at every point.
        #[arg(long)]
        optimized: bool,
    },
    /// Data series of a numerical figure (fig3 to fig9).
    Reproduce { figure: Figure },
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig> {
    let base = match &cli.config {
        Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
        None => ScenarioConfig::default(),
    };
    base.with_overrides(cli.overrides.iter().map(String::as_str))
}

fn analysis(name: &str, seed: u64, resolution: f64, joint: AlternatingOptions) -> Result<Analysis> {
    Ok(match name {
        "evaluate" => Analysis::Evaluate { seed },
        "allocate" => Analysis::Allocate,
        "place" => Analysis::Place { resolution },
        "joint" => Analysis::Joint(joint),
        "compare" => Analysis::Compare(joint),
        other => return Err(CliError::Usage(format!("unknown analysis {other:?}"))),
    })
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Reproduce { figure } => {
            if cli.config.is_some() {
                log::warn!("reproduce uses the figure's own scenario; --config is ignored");
            }
            let base = figures::base_scenario(*figure).with_overrides(cli.overrides.iter().map(String::as_str))?;
            write_rows(out, &figures::reproduce(*figure, &base)?)
        }
        command => {
            let sc = load_config(cli)?;
            match command {
                Command::Evaluate { seed } => write_rows(out, &commands::evaluate(&sc, *seed)?),
                Command::Allocate => write_rows(out, &commands::allocate(&sc)?),
                Command::Place { resolution } => write_rows(out, &commands::place_cmd(&sc, *resolution)?),
                Command::Joint(j) => write_rows(out, &commands::joint(&sc, j.options())?),
                Command::Compare(j) => {
                    let (rows, winner) = commands::compare(&sc, j.options())?;
                    eprintln!("best: {winner}");
                    write_rows(out, &rows)
                }
                Command::Sweep { var, from, to, steps, analysis: name, seed, joint } => {
                    let a = analysis(name, *seed, joint.resolution, joint.options())?;
                    write_rows(out, &commands::sweep(&sc, *var, &linspace(*from, *to, *steps), a)?)
                }
                Command::Asymptotic { var, from, to, points, epsilon, optimized } => {
                    let args = AsymptoticArgs {
                        variable: *var,
                        epsilon: *epsilon,
                        from: *from,
                        to: *to,
                        points: *points,
                        optimized: *optimized,
                    };
                    write_table(out, &ASYMPTOTIC_HEADER, &commands::asymptotic(&sc, args)?)
                }
                Command::Reproduce { .. } => unreachable!(),
            }
        }
    }
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("IRS_DEPLOY_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("IRS_DEPLOY_THREADS must be a non-negative integer, got {v:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = init_threads().and_then(|()| match &cli.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            run(&cli, &mut w)?;
            w.flush()?;
            Ok(())
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            run(&cli, &mut w)
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
