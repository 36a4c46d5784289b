use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fmc_bench::{init_thread_pool, run_benchmark, run_wave, CliError, EnvId, Policy, RunConfig, WaveConfig};

#[derive(Parser)]
#[command(name = "fmc", version, about = "Fractal Monte Carlo benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run FMC and baselines for several episodes and write report.csv / report.json
    Bench(BenchArgs),
    /// Grow one swarm-wave cone to a target score and dump its rollouts
    Wave(WaveArgs),
    /// Dump the uniform-policy cone slices of a grid board
    Slices(SliceArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// Flat JSON config; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    env: Option<EnvId>,
    #[arg(long)]
    walkers: Option<usize>,
    #[arg(long)]
    ticks: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Repeat to pick several; defaults to all three
    #[arg(long = "policy", value_enum)]
    policies: Vec<Policy>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fill the wall_ms column (reports stop being byte-reproducible)
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct WaveArgs {
    #[arg(long, value_enum, default_value = "grid5")]
    env: EnvId,
    #[arg(long, default_value_t = 16)]
    walkers: usize,
    #[arg(long, default_value_t = 1000)]
    max_ticks: usize,
    #[arg(long)]
    target: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "fmc-wave")]
    out: PathBuf,
}

#[derive(Args)]
struct SliceArgs {
    #[arg(long, value_enum, default_value = "grid3")]
    env: EnvId,
    #[arg(long, default_value_t = 3)]
    ticks: usize,
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
    #[arg(long, default_value = "slices.json")]
    out: PathBuf,
}

fn bench_config(args: BenchArgs) -> Result<RunConfig, CliError> {
    let mut c = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = args.env {
        c.env = v;
    }
    if let Some(v) = args.walkers {
        c.walkers = v;
    }
    if let Some(v) = args.ticks {
        c.ticks = v;
    }
    if args.dt.is_some() {
        c.dt = args.dt;
    }
    if let Some(v) = args.alpha {
        c.alpha = v;
    }
    if let Some(v) = args.episodes {
        c.episodes = v;
    }
    if let Some(v) = args.max_steps {
        c.max_steps = v;
    }
    if !args.policies.is_empty() {
        c.policies = args.policies;
    }
    if let Some(v) = args.seed {
        c.seed = v;
    }
    if let Some(v) = args.out {
        c.out = v;
    }
    c.timing |= args.timing;
    Ok(c)
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_thread_pool()?;
    match cli.command {
        Command::Bench(args) => {
            let config = bench_config(args)?;
            let report = run_benchmark(&config)?;
            for (policy, s) in &report.summary {
                println!(
                    "{policy:>10}: median survival {:.1} steps, mean score {:.3}, {} samples/action",
                    s.median_survival, s.mean_score, s.samples_per_action
                );
            }
            println!("wrote {}", config.out.display());
        }
        Command::Wave(a) => {
            let cfg = WaveConfig {
                env: a.env,
                walkers: a.walkers,
                max_ticks: a.max_ticks,
                target: a.target,
                alpha: a.alpha,
                dt: a.dt,
                seed: a.seed,
                out: a.out,
            };
            let s = run_wave(&cfg)?;
            println!(
                "{} after {} ticks ({} samples): best score {} over {} moves",
                if s.complete { "reached" } else { "missed" },
                s.ticks,
                s.samples_used,
                s.best_score,
                s.path.len().saturating_sub(1)
            );
        }
        Command::Slices(a) => {
            let env = fmc_bench::bench::grid_world(a.env)
                .ok_or_else(|| CliError::Config(format!("{} has no enumerable cone", a.env.name())))?;
            fmc_bench::slices::write_slices(&env, a.ticks, a.dt, &a.out)?;
            println!("wrote {}", a.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fmc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
