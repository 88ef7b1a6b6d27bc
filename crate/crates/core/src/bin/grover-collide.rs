use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use grover_collide::harness::{self, ScenarioConfig, SweepMarked};
use grover_collide::Error;

#[derive(Parser)]
#[command(version, about = "Grover search and its two-ball collision analogue")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Joint amplitude / velocity trajectory.
    Search(ScenarioArgs),
    /// Collision engine only, amplitudes read back through the velocity map.
    Collide(ScenarioArgs),
    /// Trajectory plus a cross-engine agreement report as `#` comments.
    Compare(ScenarioArgs),
    /// Optimal iteration count and success probability for N = 2^k.
    Sweep {
        #[arg(long, default_value_t = 2)]
        log2_min: u32,
        #[arg(long, default_value_t = 10)]
        log2_max: u32,
        /// Mark N / d states at each size instead of a fixed count.
        #[arg(long, conflicts_with = "n2")]
        marked_divisor: Option<u64>,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long)]
    n1: Option<String>,
    #[arg(long)]
    n2: Option<String>,
    #[arg(long)]
    log2_n: Option<String>,
    #[arg(long)]
    marked_count: Option<String>,
    /// Integer or `auto`.
    #[arg(long)]
    iterations: Option<String>,
    #[arg(long)]
    v_init: Option<String>,
    /// `exact` or `paper`.
    #[arg(long)]
    theta_mode: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    statevector_cap: Option<String>,
    #[arg(long)]
    output: Option<String>,
    /// key=value file; flags given on the command line take precedence.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<ScenarioConfig, Error> {
        let mut config = match &self.scenario {
            Some(path) => ScenarioConfig::load(path)?,
            None => ScenarioConfig::default(),
        };
        let overrides = [
            ("n1", &self.n1),
            ("n2", &self.n2),
            ("log2-n", &self.log2_n),
            ("marked-count", &self.marked_count),
            ("iterations", &self.iterations),
            ("v-init", &self.v_init),
            ("theta-mode", &self.theta_mode),
            ("seed", &self.seed),
            ("statevector-cap", &self.statevector_cap),
            ("output", &self.output),
        ];
        for (key, value) in overrides {
            if let Some(value) = value {
                config.set(key, value)?;
            }
        }
        Ok(config)
    }
}

fn emit(
    config: &ScenarioConfig,
    write: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), Error> {
    match &config.output {
        Some(path) => harness::write_to_path(path, |w| write(w)),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)
                .and_then(|_| lock.flush())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Search(args) => {
            let config = args.resolve()?;
            let rows = harness::run_search(&config)?;
            emit(&config, |w| harness::write_trajectory_csv(&rows, w))
        }
        Command::Collide(args) => {
            let config = args.resolve()?;
            let rows = harness::run_collide(&config)?;
            emit(&config, |w| harness::write_trajectory_csv(&rows, w))
        }
        Command::Compare(args) => {
            let config = args.resolve()?;
            let cmp = harness::run_compare(&config)?;
            emit(&config, |w| harness::write_comparison_csv(&cmp, w))
        }
        Command::Sweep {
            log2_min,
            log2_max,
            marked_divisor,
            scenario,
        } => {
            let config = scenario.resolve()?;
            let marked = match marked_divisor {
                Some(d) => SweepMarked::Fraction(d),
                None => SweepMarked::Count(config.marked_count.or(config.n2).unwrap_or(1)),
            };
            let rows = harness::run_sweep(log2_min, log2_max, marked, &config)?;
            emit(&config, |w| harness::write_sweep_csv(&rows, w))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
