#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod error;
mod grid;
mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use densemimo::simulator::SimConfig;
use densemimo::{NetworkParams, PathLossModel, Scheme};
use serde::Serialize;

use commands::{Setup, ZetaChoice};
use error::{usage, CliError, Result};
use grid::Grid;

/// Closed-form sweeps and Monte Carlo validation for Massive MIMO networks
/// with Poisson-distributed base stations.
#[derive(Debug, Parser)]
#[command(name = "densemimo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Path-loss model as JSON (default: dual-slope, R1 = 100 m, alpha = 2.1/4).
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// BS densities in BS/km²: `a,b,c` or `min:max:points[:lin|log]`.
    #[arg(long, global = true)]
    lambda: Option<Grid>,
    /// Pilot reuse factors.
    #[arg(long, global = true, value_delimiter = ',')]
    zeta: Option<Vec<f64>>,
    /// Antenna-UE ratios M/K.
    #[arg(long, global = true, value_delimiter = ',')]
    mk: Option<Vec<f64>>,
    /// UEs per cell.
    #[arg(long, global = true, default_value_t = 10)]
    k: usize,
    /// Coherence block length in samples.
    #[arg(long = "tau-c", global = true, default_value_t = 200)]
    tau_c: usize,
    /// Received SNR in dB.
    #[arg(long = "snr-db", global = true, default_value_t = 5.0, allow_negative_numbers = true)]
    snr_db: f64,
    /// Master seed for Monte Carlo runs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo trials per density.
    #[arg(long, global = true, default_value_t = 2000)]
    trials: u64,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Combining schemes: mr, zf.
    #[arg(long, global = true, value_delimiter = ',')]
    scheme: Option<Vec<Scheme>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Interference moments mu1, mu2 versus density.
    Mu,
    /// NMSE upper bound versus density for each reuse factor.
    Nmse,
    /// M/K at which interference equals pilot contamination.
    Crossover,
    /// Spectral-efficiency lower bound and its M -> infinity limit.
    Se {
        /// Pick the SE-maximizing reuse factor among tau_p = K..tau_c.
        #[arg(long)]
        optimize_zeta: bool,
    },
    /// Area spectral efficiency lambda * K * SE.
    Ase,
    /// Monte Carlo check of every closed form; JSON report.
    Validate {
        /// Expected BS count in the simulation window.
        #[arg(long, default_value_t = 200.0)]
        expected_bs: f64,
        /// Geometries for the UatF SINR estimate.
        #[arg(long, default_value_t = 400)]
        uatf_trials: u64,
        /// Fading draws per geometry.
        #[arg(long, default_value_t = 4)]
        fading_samples: usize,
        /// Simulator configuration JSON; overrides the per-density window.
        #[arg(long)]
        sim_config: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })
}

fn load_model(path: Option<&Path>) -> Result<PathLossModel> {
    match path {
        Some(p) => Ok(PathLossModel::from_json(&read(p)?)?),
        None => Ok(PathLossModel::dual_slope_default()),
    }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit<R: Serialize>(rows: &[R], format: Format, out: Option<&Path>) -> Result<()> {
    let mut w = sink(out)?;
    match format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            for r in rows {
                csv.serialize(r)?;
            }
            csv.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, rows)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn single(values: &Option<Vec<f64>>, default: f64, flag: &str, cmd: &str) -> Result<f64> {
    match values.as_deref() {
        None => Ok(default),
        Some([v]) => Ok(*v),
        Some(_) => usage(format!("{cmd} takes a single --{flag} value")),
    }
}

fn lambdas(common: &Common, default: &str) -> Vec<f64> {
    common.lambda.clone().unwrap_or_else(|| default.parse().expect("default grid")).values().to_vec()
}

fn run(cli: Cli) -> Result<()> {
    let c = &cli.common;
    let model = load_model(c.model.as_deref())?;
    let schemes = c.scheme.clone().unwrap_or_else(|| Scheme::ALL.to_vec());
    let setup = |default_grid: &str| Setup {
        model: model.clone(),
        lambdas: lambdas(c, default_grid),
        k: c.k,
        tau_c: c.tau_c,
        snr_db: c.snr_db,
    };
    let format = c.format.unwrap_or(Format::Csv);
    let out = c.out.as_deref();
    match &cli.command {
        Command::Mu => emit(&commands::mu(&setup("0.01:10000:121:log"))?, format, out),
        Command::Nmse => {
            let zetas = c.zeta.clone().unwrap_or_else(|| vec![1.0, 2.0, 4.0]);
            emit(&commands::nmse(&setup("0.01:1000:101:log"), &zetas)?, format, out)
        }
        Command::Crossover => {
            let zetas = c.zeta.clone().unwrap_or_else(|| vec![1.0, 4.0]);
            emit(&commands::crossover(&setup("1:1000:61:log"), &schemes, &zetas)?, format, out)
        }
        Command::Se { optimize_zeta } => {
            let mks = c.mk.clone().unwrap_or_else(|| vec![10.0, 50.0]);
            let zeta = match (optimize_zeta, &c.zeta) {
                (true, Some(_)) => return usage("--optimize-zeta and --zeta are exclusive"),
                (true, None) => ZetaChoice::Optimize,
                (false, z) => ZetaChoice::Fixed(z.clone().unwrap_or_else(|| vec![1.0])),
            };
            emit(&commands::se(&setup("1:300:61:log"), &schemes, &mks, &zeta)?, format, out)
        }
        Command::Ase => {
            let mk = single(&c.mk, 10.0, "mk", "ase")?;
            let zeta = single(&c.zeta, 1.0, "zeta", "ase")?;
            emit(&commands::ase(&setup("1:10:10:lin"), &schemes, mk, zeta)?, format, out)
        }
        Command::Validate { expected_bs, uatf_trials, fading_samples, sim_config } => {
            if format == Format::Csv && c.format.is_some() {
                return usage("validate only writes JSON");
            }
            let sim_config = match sim_config {
                Some(p) => Some(SimConfig::from_json(&read(p)?)?),
                None => None,
            };
            let k = c.k;
            let m = commands::antennas(single(&c.mk, 8.0, "mk", "validate")?, k)?;
            let zeta = single(&c.zeta, 2.0, "zeta", "validate")?;
            let opts = validate::ValidateOptions {
                lambdas: lambdas(c, "1,10,30,100"),
                params: NetworkParams { lambda: 1.0, m, k, zeta, tau_c: c.tau_c, snr0_db: c.snr_db },
                schemes,
                trials: c.trials,
                uatf_trials: *uatf_trials,
                seed: c.seed,
                expected_bs: *expected_bs,
                fading_samples: *fading_samples,
                sim_config,
            };
            let report = validate::run(&model, &opts)?;
            let mut w = sink(out)?;
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
            w.flush()?;
            if report.pass {
                Ok(())
            } else {
                Err(CliError::ValidationFailed { failed: report.failed, total: report.checks.len() })
            }
        }
    }
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("DENSEMIMO_THREADS") else {
        return Ok(());
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n >= 1 => n,
        _ => return usage(format!("DENSEMIMO_THREADS must be a positive integer, got '{raw}'")),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("densemimo: {e}");
            e.exit_code()
        }
    }
}
