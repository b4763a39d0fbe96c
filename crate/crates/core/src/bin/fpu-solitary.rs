use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fpu_solitary::cli;

#[derive(Parser)]
#[command(name = "fpu-solitary", version, about = "Solitary waves of singular FPU chains in the high-energy limit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one wave and write V.csv, R.csv and meta.json.
    Solve,
    /// Integrate the limit ODE and write the profile and its constants.
    Limit,
    /// Tabulate the asymptotic constants with error bars.
    Constants,
    /// Solve and verify a delta sweep for each m.
    Sweep,
    /// Verify one wave against the limit objects.
    Verify,
    /// Check the weak-star expansion along a delta sweep.
    Expand,
}

#[derive(Args)]
struct Flags {
    /// Flat key = value configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps (default: number of processors).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Exponent m (comma separated list for constants and sweep).
    #[arg(long, global = true, allow_hyphen_values = true)]
    m: Option<String>,
    /// Velocity parameter delta (comma separated list for sweeps).
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Nodes per unit half-interval: h = 1/(2k).
    #[arg(long = "grid-k", global = true)]
    grid_k: Option<String>,
    /// Half-width L of the computational interval.
    #[arg(long = "grid-L", global = true)]
    grid_l: Option<String>,
    #[arg(long, global = true)]
    tol: Option<String>,
    #[arg(long = "max-iter", global = true)]
    max_iter: Option<String>,
    #[arg(long = "ode-xmax", global = true)]
    ode_xmax: Option<String>,
    #[arg(long = "ode-step", global = true)]
    ode_step: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Required mu/h in sweeps.
    #[arg(long, global = true)]
    resolution: Option<String>,
    /// Extend the delta list until eps spans a decade (true or false).
    #[arg(long, global = true)]
    extend: Option<String>,
    /// Test function for expand: gaussian, odd_gaussian or one.
    #[arg(long, global = true)]
    test: Option<String>,
    /// Wave directory for verify.
    #[arg(long, global = true)]
    wave: Option<String>,
}

impl Flags {
    fn overrides(&self) -> BTreeMap<&'static str, String> {
        [
            ("m", &self.m),
            ("delta", &self.delta),
            ("grid.k", &self.grid_k),
            ("grid.L", &self.grid_l),
            ("solver.tol", &self.tol),
            ("solver.max_iter", &self.max_iter),
            ("ode.xmax", &self.ode_xmax),
            ("ode.step", &self.ode_step),
            ("output.dir", &self.out),
            ("sweep.resolution", &self.resolution),
            ("sweep.extend", &self.extend),
            ("expand.test", &self.test),
            ("verify.wave", &self.wave),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
        .collect()
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Cli::parse();
    let run = || -> fpu_solitary::Result<String> {
        let cfg = cli::merge(args.flags.config.as_deref(), &args.flags.overrides())?;
        match args.command {
            Command::Solve => cli::cmd_solve(&cfg),
            Command::Limit => cli::cmd_limit(&cfg),
            Command::Constants => cli::cmd_constants(&cfg),
            Command::Sweep => cli::cmd_sweep(&cfg, args.flags.threads),
            Command::Verify => cli::cmd_verify(&cfg),
            Command::Expand => cli::cmd_expand(&cfg),
        }
    };
    match run() {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", cli::error_line(&e));
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
