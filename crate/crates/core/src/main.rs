use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use opthedge::harness::{
    run_experiment, sweep_gamma, verify_bounds, write_sweep, ExperimentConfig,
};
use opthedge::rates::{bound_fg, bound_omega, BoundInputs};
use opthedge::{
    preset_rates, theoretical_upper, Dynamics, Error, OptimizeOptions, PayoffMatrix, Preset,
};

#[derive(Parser)]
#[command(
    name = "opthedge",
    version,
    about = "Optimistic Hedge dynamics in zero-sum matrix games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a preset's learning rates and its regret bound.
    Rates {
        preset: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Horizon, for the dynamic-regret bound of the averaged dynamic.
        #[arg(long = "T")]
        horizon: Option<usize>,
        #[arg(long, default_value = "hedge")]
        algo: String,
    },
    /// Run the presets and write per-preset metric CSVs plus a summary.
    Simulate(ConfigArgs),
    /// Optimize the weighted bound over a grid of weights.
    SweepGamma(ConfigArgs),
    /// Check measured regrets against the upper and lower bounds.
    Verify(ConfigArgs),
    /// Validate a payoff-matrix file.
    MatrixCheck { file: PathBuf },
}

#[derive(Args)]
struct ConfigArgs {
    /// key = value file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "T")]
    horizon: Option<usize>,
    #[arg(long)]
    delta: Option<String>,
    /// adversarial, matching_pennies or file:<path>
    #[arg(long)]
    instance: Option<String>,
    /// Comma-separated preset names or "all".
    #[arg(long = "preset", alias = "presets")]
    presets: Option<String>,
    /// hedge or averaged
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    cadence: Option<String>,
    /// Comma-separated weights in (0, 1).
    #[arg(long = "gamma-grid")]
    gamma_grid: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> opthedge::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let overrides = [
            ("m", self.m.map(|v| v.to_string())),
            ("n", self.n.map(|v| v.to_string())),
            ("T", self.horizon.map(|v| v.to_string())),
            ("instance", self.instance.clone()),
            ("delta", self.delta.clone()),
            ("presets", self.presets.clone()),
            ("algo", self.algo.clone()),
            ("out", self.out.clone()),
            ("cadence", self.cadence.clone()),
            ("gamma_grid", self.gamma_grid.clone()),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn rates_command(
    preset: &str,
    m: usize,
    n: usize,
    horizon: Option<usize>,
    algo: &str,
) -> opthedge::Result<()> {
    let preset: Preset = preset.parse()?;
    let dynamics: Dynamics = algo.parse()?;
    let r = preset_rates(preset, m, n)?;
    let b = BoundInputs::new(m, n)?;
    println!("preset\t{}", preset.name());
    println!("eta\t{}", r.eta);
    println!("eta_prime\t{}", r.eta_prime);
    println!("c\t{}", r.c);
    println!("c_prime\t{}", r.c_prime);
    println!("feasible\t{}", r.is_feasible());
    if let Ok((_, _, omega)) = bound_omega(&r, &b) {
        println!("Omega\t{omega}");
    }
    if let Ok((f, g)) = bound_fg(&r, &b) {
        println!("f\t{f}");
        println!("g\t{g}");
    }
    match theoretical_upper(preset, m, n, dynamics, horizon) {
        Ok(u) => println!("theoretical_upper\t{u}"),
        Err(Error::InvalidArgs(msg)) => println!("theoretical_upper\tnone ({msg})"),
        Err(e) => return Err(e),
    }
    Ok(())
}

fn run(cli: Cli) -> opthedge::Result<ExitCode> {
    match cli.command {
        Command::Rates {
            preset,
            m,
            n,
            horizon,
            algo,
        } => rates_command(&preset, m, n, horizon, &algo)?,
        Command::Simulate(args) => {
            let cfg = args.resolve()?;
            let summary = run_experiment(&cfg)?;
            for o in &summary.outcomes {
                let bound = o
                    .upper
                    .map(|u| u.to_string())
                    .unwrap_or_else(|| "none".into());
                println!(
                    "{:<13} {} = {:.6} (bound {})",
                    o.preset.name(),
                    o.preset.target().name(),
                    o.measured_target(cfg.dynamics),
                    bound
                );
            }
            println!("wrote {}", cfg.out.display());
        }
        Command::SweepGamma(args) => {
            let cfg = args.resolve()?;
            let rows = sweep_gamma(cfg.m, cfg.n, &cfg.gamma_grid, &OptimizeOptions::default())?;
            std::fs::create_dir_all(&cfg.out)?;
            let path = cfg.out.join("gamma_sweep.csv");
            write_sweep(&path, &rows)?;
            println!("wrote {}", path.display());
        }
        Command::Verify(args) => {
            let cfg = args.resolve()?;
            let report = verify_bounds(&cfg)?;
            print!("{}", report.to_text(&cfg));
            if !report.all_pass() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::MatrixCheck { file } => match PayoffMatrix::load(&file) {
            Ok(a) => println!("ok: {}x{} matrix", a.rows(), a.cols()),
            Err(e @ Error::MatrixFile { .. }) => {
                println!("invalid: {e}");
                return Ok(ExitCode::from(1));
            }
            Err(e) => return Err(e),
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
