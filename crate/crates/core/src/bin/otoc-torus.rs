use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use otoc_torus::runner::{self, config::OUTPUT_ROOT_ENV, ResonanceMethod, RunConfig, SweepAxis};
use otoc_torus::Error;

#[derive(Parser)]
#[command(name = "otoc-torus", version, about = "OTOCs and resonances of quantized torus maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// OTOC time series (otoc.csv)
    Otoc(RunArgs),
    /// One OTOC run per value of a parameter, plus summary.csv
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// epsilon, map_param or N
        #[arg(long)]
        axis: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<String>,
    },
    /// Leading resonances of the coarse-grained channel (resonances.csv)
    Resonances {
        #[command(flatten)]
        run: RunArgs,
        /// dense (N <= 24) or krylov
        #[arg(long, default_value = "krylov")]
        method: String,
        #[arg(long, default_value_t = 40)]
        depth: usize,
        #[arg(long, default_value_t = 10)]
        n_wanted: usize,
    },
    /// Classical Lyapunov exponents (lyapunov.csv)
    Lyapunov {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1000)]
        n_traj: usize,
        #[arg(long, default_value_t = 100)]
        t_horizon: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    /// key = value config file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// cat, standard or harper
    #[arg(long)]
    map: Option<String>,
    #[arg(short = 'N', long = "dim")]
    n: Option<usize>,
    /// k (cat), K (standard) or K1 (harper)
    #[arg(long, allow_negative_numbers = true)]
    map_param: Option<f64>,
    /// K2 for the harper map
    #[arg(long, allow_negative_numbers = true)]
    map_param2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long)]
    t_max: Option<usize>,
    /// XP or F(q,p;q,p)
    #[arg(long)]
    operators: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// correspondence or as_printed
    #[arg(long)]
    kick_mode: Option<String>,
    /// Output directory
    #[arg(long, env = OUTPUT_ROOT_ENV)]
    outputs: Option<PathBuf>,
    /// start,end
    #[arg(long)]
    growth_window: Option<String>,
    /// start,end
    #[arg(long)]
    tail_window: Option<String>,
    /// x or random
    #[arg(long)]
    krylov_seed: Option<String>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let mut set = |key: &str, value: Option<String>| -> Result<(), Error> {
            if let Some(v) = value {
                cfg.set(key, &v).map_err(|message| Error::Config { line: None, message })?;
            }
            Ok(())
        };
        set("map", self.map.clone())?;
        set("N", self.n.map(|v| v.to_string()))?;
        set("map_param", self.map_param.map(|v| v.to_string()))?;
        set("map_param2", self.map_param2.map(|v| v.to_string()))?;
        set("epsilon", self.epsilon.map(|v| v.to_string()))?;
        set("t_max", self.t_max.map(|v| v.to_string()))?;
        set("operators", self.operators.clone())?;
        set("seed", self.seed.map(|v| v.to_string()))?;
        set("kick_mode", self.kick_mode.clone())?;
        set("outputs", self.outputs.as_ref().map(|p| p.display().to_string()))?;
        set("growth_window", self.growth_window.clone())?;
        set("tail_window", self.tail_window.clone())?;
        set("krylov_seed", self.krylov_seed.clone())?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_axis(axis: &str, values: &[String]) -> Result<SweepAxis, Error> {
    let bad = |v: &str| Error::InvalidParameter(format!("cannot parse sweep value '{v}' for axis {axis}"));
    let floats = || values.iter().map(|v| v.trim().parse::<f64>().map_err(|_| bad(v))).collect::<Result<Vec<_>, _>>();
    match axis {
        "epsilon" => Ok(SweepAxis::Epsilon(floats()?)),
        "map_param" | "k" | "K" => Ok(SweepAxis::MapParam(floats()?)),
        "N" | "n" => Ok(SweepAxis::N(
            values.iter().map(|v| v.trim().parse::<usize>().map_err(|_| bad(v))).collect::<Result<_, _>>()?,
        )),
        other => Err(Error::InvalidParameter(format!("unknown sweep axis '{other}' (epsilon, map_param, N)"))),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Otoc(args) => {
            let r = runner::run_otoc(&args.config()?)?;
            println!("otoc: {}", r.output.dir.display());
            if let Some(f) = r.growth {
                println!("  growth fit [{}, {}]: lambda = {:.6} (R^2 {:.4})", f.start, f.end, f.value, f.r_squared);
            }
            if let Some(f) = r.tail {
                println!("  tail fit [{}, {}]: |alpha1| = {:.6} (R^2 {:.4})", f.start, f.end, f.alpha, f.r_squared);
            }
        }
        Command::Sweep { run, axis, values } => {
            let axis = parse_axis(&axis, &values)?;
            let r = runner::run_sweep(&run.config()?, &axis)?;
            println!("sweep: {}", r.output.dir.display());
            for e in &r.entries {
                match &e.result {
                    Ok((_, Some(t))) => println!("  {} -> |alpha1| = {:.6}", e.value, t.alpha),
                    Ok((_, None)) => println!("  {} -> no tail window", e.value),
                    Err(msg) => println!("  {} -> failed: {msg}", e.value),
                }
            }
        }
        Command::Resonances { run, method, depth, n_wanted } => {
            let method = ResonanceMethod::parse(&method)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown method '{method}' (dense, krylov)")))?;
            let r = runner::run_resonances(&run.config()?, method, depth, n_wanted)?;
            println!("resonances: {}", r.output.dir.display());
            for (i, a) in r.spectrum.alphas.iter().enumerate().take(n_wanted) {
                println!("  {i:>3}  |alpha| = {:.6}  arg = {:+.4}", a.norm(), a.arg());
            }
        }
        Command::Lyapunov { run, n_traj, t_horizon } => {
            let r = runner::run_lyapunov(&run.config()?, n_traj, t_horizon)?;
            println!(
                "lyapunov: lambda = {:.8} +- {:.2e}, generalized = {:.8}",
                r.estimate.lambda, r.estimate.standard_error, r.estimate.lambda_generalized
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: kind={} message={msg:?}", e.kind());
            ExitCode::from(2)
        }
    }
}
