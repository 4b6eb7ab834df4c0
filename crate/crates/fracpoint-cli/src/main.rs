//! `fracpoint`: config-driven experiment runner for fractional and
//! subordinated Poisson point processes.
//!
//! Exit status: 0 success, 2 validation error (bad flags, bad config,
//! unwritable output), 3 numeric-accuracy failure (a series, recursion or
//! quadrature could not meet its documented bound).

mod artifact;
mod config;
mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use artifact::Format;
use config::ConfigMap;
use experiments::{RenewalFamily, REGISTRY};
use fracpoint::bernstein::BernsteinFunction;
use fracpoint::processes::ProcessSpec;
use fracpoint::Error;

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit status 2.
    Validation(String),
    /// A computation could not meet its accuracy bound: exit status 3.
    Accuracy(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(msg) | CliError::Accuracy(msg) => f.write_str(msg),
        }
    }
}

impl CliError {
    fn status(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Accuracy(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Accuracy { .. }
            | Error::Divergent { .. }
            | Error::Overflow { .. }
            | Error::RetryGuard { .. }
            | Error::QuadratureNonConvergence { .. } => CliError::Accuracy(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "fracpoint",
    version,
    about = "Exact distributions, hitting probabilities and Monte Carlo experiments for fractional Poisson point processes",
    arg_required_else_help = true
)]
struct Cli {
    /// Config file with `key = value` lines; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (stdout when omitted).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Artifact format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Monte Carlo worker threads (0 or unset: rayon default). Results do
    /// not depend on this value.
    #[arg(long, global = true, env = "FRACPOINT_THREADS")]
    threads: Option<usize>,

    /// Seed for every random stream in the run.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the registered experiments.
    List,
    /// Hitting probabilities of the space-fractional process: exact,
    /// asymptotic and Monte Carlo per level.
    Hitting(HittingArgs),
    /// Truncated pmf table for one process family.
    Pmf(ProcessArgs),
    /// Sample one family and compare the histogram with the exact pmf.
    Sample(SampleArgs),
    /// Iterated stable composition against its collapsed single-index law.
    Iterate(IterateArgs),
    /// Superposed subordinators: Monte Carlo moments vs the mean formula
    /// and the variance diagnostic.
    Multi(MultiArgs),
    /// Poisson process at a grey-Brownian clock: zero state, pgf and
    /// clock-law checks.
    Ggbm(GgbmArgs),
    /// Laplace-transform renewal gap certificates.
    Renewal(RenewalArgs),
    /// Erdelyi-Kober operator checks: monomial rule and the governing
    /// eigenrelation.
    FracopCheck(FracopArgs),
}

#[derive(Args)]
struct HittingArgs {
    /// Stability index (comma list, e.g. 0.3,0.5,0.8).
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    k_max: Option<u64>,
    #[arg(long)]
    n_samples: Option<u64>,
    /// Horizon truncation bound (the horizon is chosen to meet it).
    #[arg(long)]
    trunc_bound: Option<f64>,
}

#[derive(Args)]
struct ProcessArgs {
    /// Family encoding: space:a | timefrac:nu | spacetime:a,nu | ggbm:H,nu |
    /// multi:f1+f2[@nu] | linear | stable:a | tempered:a,t | gamma:b.
    #[arg(long)]
    process: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    tail_tol: Option<f64>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    process: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    n_samples: Option<u64>,
    /// Histogram width; larger counts land in the overflow bucket.
    #[arg(long)]
    k_max: Option<usize>,
}

#[derive(Args)]
struct IterateArgs {
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated composition indices, e.g. 0.9,0.9.
    #[arg(long)]
    gammas: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    n_samples: Option<u64>,
    #[arg(long)]
    k_max: Option<usize>,
}

#[derive(Args)]
struct MultiArgs {
    /// Bernstein functions joined by `+`, e.g. stable:0.5+gamma:1.
    #[arg(long)]
    fs: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Optional inverse-stable outer clock order.
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    n_samples: Option<u64>,
}

#[derive(Args)]
struct GgbmArgs {
    #[arg(long)]
    hurst: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    n_samples: Option<u64>,
}

#[derive(Args)]
struct RenewalArgs {
    /// spacetime (needs --alpha, --nu) or ggbm (needs --hurst, --nu).
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    hurst: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    grid_min: Option<f64>,
    #[arg(long)]
    grid_max: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
}

#[derive(Args)]
struct FracopArgs {
    #[arg(long)]
    hurst: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Comma-separated pgf arguments u, e.g. 0,0.5.
    #[arg(long)]
    us: Option<String>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_points: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status())
        }
    }
}

fn require<T>(slot: Option<T>, flag: &str) -> Result<T, CliError> {
    slot.ok_or_else(|| CliError::Validation(format!("missing required value for `{flag}`")))
}

fn parse_f64_list(s: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Validation(format!("bad number `{p}` in `{flag}`")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => ConfigMap::load(path)?,
        None => ConfigMap::default(),
    };
    let mut output = cli.output.clone();
    if output.is_none() {
        if let Some(path) = cfg.get("output") {
            output = Some(PathBuf::from(path));
        }
    }
    let mut format_raw = cli.format.clone();
    cfg.fill(&mut format_raw, "format")?;
    let format: Format = format_raw
        .as_deref()
        .unwrap_or("csv")
        .parse()
        .map_err(CliError::Validation)?;
    let mut seed = cli.seed;
    cfg.fill(&mut seed, "seed")?;
    let seed = seed.unwrap_or(42);
    let mut threads = cli.threads;
    cfg.fill(&mut threads, "threads")?;

    let artifact = fracpoint::mc::with_threads(threads, || dispatch(&cli.command, &cfg, seed))?;
    if let Some(art) = artifact {
        art.write(output.as_deref(), format)?;
    }
    Ok(())
}

fn dispatch(
    command: &Command,
    cfg: &ConfigMap,
    seed: u64,
) -> Result<Option<artifact::Artifact>, CliError> {
    match command {
        Command::List => {
            for name in REGISTRY {
                println!("{name}");
            }
            Ok(None)
        }
        Command::Hitting(args) => {
            cfg.check_experiment("hitting")?;
            let mut alpha = args.alpha.clone();
            cfg.fill(&mut alpha, "alpha")?;
            let mut lambda = args.lambda;
            cfg.fill(&mut lambda, "lambda")?;
            let mut k_max = args.k_max;
            cfg.fill(&mut k_max, "k_max")?;
            let mut n_samples = args.n_samples;
            cfg.fill(&mut n_samples, "n_samples")?;
            let mut trunc = args.trunc_bound;
            cfg.fill(&mut trunc, "trunc_bound")?;
            let p = experiments::HittingParams {
                alphas: parse_f64_list(&require(alpha, "--alpha")?, "--alpha")?,
                lambda: lambda.unwrap_or(1.0),
                k_max: k_max.unwrap_or(8),
                n_samples: n_samples.unwrap_or(1_000_000),
                seed,
                trunc_bound: trunc.unwrap_or(1e-3),
            };
            experiments::hitting(&p).map(Some)
        }
        Command::Pmf(args) => {
            cfg.check_experiment("pmf")?;
            let mut process = args.process.clone();
            cfg.fill(&mut process, "process")?;
            let mut lambda = args.lambda;
            cfg.fill(&mut lambda, "lambda")?;
            let mut t = args.t;
            cfg.fill(&mut t, "t")?;
            let mut k_max = args.k_max;
            cfg.fill(&mut k_max, "k_max")?;
            let mut tail_tol = args.tail_tol;
            cfg.fill(&mut tail_tol, "tail_tol")?;
            let spec =
                ProcessSpec::parse(&require(process, "--process")?, lambda.unwrap_or(1.0))?;
            let p = experiments::PmfParams {
                spec,
                t: t.unwrap_or(1.0),
                k_max: k_max.unwrap_or(10_000),
                tail_tol: tail_tol.unwrap_or(1e-8),
            };
            experiments::pmf(&p).map(Some)
        }
        Command::Sample(args) => {
            cfg.check_experiment("sample")?;
            let mut process = args.process.clone();
            cfg.fill(&mut process, "process")?;
            let mut lambda = args.lambda;
            cfg.fill(&mut lambda, "lambda")?;
            let mut t = args.t;
            cfg.fill(&mut t, "t")?;
            let mut n_samples = args.n_samples;
            cfg.fill(&mut n_samples, "n_samples")?;
            let mut k_max = args.k_max;
            cfg.fill(&mut k_max, "k_max")?;
            let spec =
                ProcessSpec::parse(&require(process, "--process")?, lambda.unwrap_or(1.0))?;
            let p = experiments::SampleParams {
                spec,
                t: t.unwrap_or(1.0),
                n_samples: n_samples.unwrap_or(100_000),
                k_max: k_max.unwrap_or(30),
                seed,
            };
            experiments::sample(&p).map(Some)
        }
        Command::Iterate(args) => {
            cfg.check_experiment("iterate")?;
            let mut alpha = args.alpha;
            cfg.fill(&mut alpha, "alpha")?;
            let mut gammas = args.gammas.clone();
            cfg.fill(&mut gammas, "gammas")?;
            let mut lambda = args.lambda;
            cfg.fill(&mut lambda, "lambda")?;
            let mut t = args.t;
            cfg.fill(&mut t, "t")?;
            let mut n_samples = args.n_samples;
            cfg.fill(&mut n_samples, "n_samples")?;
            let mut k_max = args.k_max;
            cfg.fill(&mut k_max, "k_max")?;
            let p = experiments::IterateParams {
                alpha: require(alpha, "--alpha")?,
                gammas: parse_f64_list(&require(gammas, "--gammas")?, "--gammas")?,
                lambda: lambda.unwrap_or(1.0),
                t: t.unwrap_or(1.0),
                n_samples: n_samples.unwrap_or(1_000_000),
                k_max: k_max.unwrap_or(30),
                seed,
            };
            experiments::iterate(&p).map(Some)
        }
        Command::Multi(args) => {
            cfg.check_experiment("multi")?;
            let mut fs = args.fs.clone();
            cfg.fill(&mut fs, "fs")?;
            let mut lambda = args.lambda;
            cfg.fill(&mut lambda, "lambda")?;
            let mut nu = args.nu;
            cfg.fill(&mut nu, "nu")?;
            let mut t = args.t;
            cfg.fill(&mut t, "t")?;
            let mut n_samples = args.n_samples;
            cfg.fill(&mut n_samples, "n_samples")?;
            let fs: Vec<BernsteinFunction> = require(fs, "--fs")?
                .split('+')
                .map(|p| p.parse::<BernsteinFunction>())
                .collect::<Result<_, _>>()?;
            let p = experiments::MultiParams {
                fs,
                lambda: lambda.unwrap_or(1.0),
                outer_nu: nu,
                t: t.unwrap_or(1.0),
                n_samples: n_samples.unwrap_or(200_000),
                seed,
            };
            experiments::multi(&p).map(Some)
        }
        Command::Ggbm(args) => {
            cfg.check_experiment("ggbm")?;
            let mut hurst = args.hurst;
            cfg.fill(&mut hurst, "hurst")?;
            let mut nu = args.nu;
            cfg.fill(&mut nu, "nu")?;
            let mut lambda = args.lambda;
            cfg.fill(&mut lambda, "lambda")?;
            let mut t = args.t;
            cfg.fill(&mut t, "t")?;
            let mut n_samples = args.n_samples;
            cfg.fill(&mut n_samples, "n_samples")?;
            let p = experiments::GgbmParams {
                h: require(hurst, "--hurst")?,
                nu: require(nu, "--nu")?,
                lambda: lambda.unwrap_or(1.0),
                t: t.unwrap_or(1.0),
                n_samples: n_samples.unwrap_or(100_000),
                seed,
            };
            experiments::ggbm(&p).map(Some)
        }
        Command::Renewal(args) => {
            cfg.check_experiment("renewal")?;
            let mut family = args.family.clone();
            cfg.fill(&mut family, "family")?;
            let mut alpha = args.alpha;
            cfg.fill(&mut alpha, "alpha")?;
            let mut nu = args.nu;
            cfg.fill(&mut nu, "nu")?;
            let mut hurst = args.hurst;
            cfg.fill(&mut hurst, "hurst")?;
            let mut lambda = args.lambda;
            cfg.fill(&mut lambda, "lambda")?;
            let mut k = args.k;
            cfg.fill(&mut k, "k")?;
            let mut grid_min = args.grid_min;
            cfg.fill(&mut grid_min, "grid_min")?;
            let mut grid_max = args.grid_max;
            cfg.fill(&mut grid_max, "grid_max")?;
            let mut grid_points = args.grid_points;
            cfg.fill(&mut grid_points, "grid_points")?;
            let family_name = family.unwrap_or_else(|| {
                if hurst.is_some() {
                    "ggbm".to_string()
                } else {
                    "spacetime".to_string()
                }
            });
            let family = match family_name.as_str() {
                "spacetime" => RenewalFamily::SpaceTime {
                    alpha: require(alpha, "--alpha")?,
                    nu: require(nu, "--nu")?,
                },
                "ggbm" => RenewalFamily::Ggbm {
                    h: require(hurst, "--hurst")?,
                    nu: require(nu, "--nu")?,
                },
                other => {
                    return Err(CliError::Validation(format!(
                        "unknown renewal family `{other}` (expected spacetime or ggbm)"
                    )))
                }
            };
            let p = experiments::RenewalParams {
                family,
                lambda: lambda.unwrap_or(1.0),
                k: k.unwrap_or(1),
                grid_min: grid_min.unwrap_or(0.1),
                grid_max: grid_max.unwrap_or(100.0),
                grid_points: grid_points.unwrap_or(50),
            };
            if p.grid_min <= 0.0 || p.grid_min >= p.grid_max || p.grid_points < 2 {
                return Err(CliError::Validation(format!(
                    "bad gamma grid: min {} max {} points {}",
                    p.grid_min, p.grid_max, p.grid_points
                )));
            }
            experiments::renewal(&p).map(Some)
        }
        Command::FracopCheck(args) => {
            cfg.check_experiment("fracop-check")?;
            let mut hurst = args.hurst;
            cfg.fill(&mut hurst, "hurst")?;
            let mut nu = args.nu;
            cfg.fill(&mut nu, "nu")?;
            let mut lambda = args.lambda;
            cfg.fill(&mut lambda, "lambda")?;
            let mut us = args.us.clone();
            cfg.fill(&mut us, "us")?;
            let mut t_min = args.t_min;
            cfg.fill(&mut t_min, "t_min")?;
            let mut t_max = args.t_max;
            cfg.fill(&mut t_max, "t_max")?;
            let mut t_points = args.t_points;
            cfg.fill(&mut t_points, "t_points")?;
            let t_min = t_min.unwrap_or(0.1);
            let t_max = t_max.unwrap_or(2.0);
            let t_points = t_points.unwrap_or(5);
            if t_min <= 0.0 || t_min >= t_max || t_points < 2 {
                return Err(CliError::Validation(format!(
                    "bad t grid: min {t_min} max {t_max} points {t_points}"
                )));
            }
            let step = (t_max - t_min) / (t_points - 1) as f64;
            let p = experiments::FracopParams {
                h: require(hurst, "--hurst")?,
                nu: require(nu, "--nu")?,
                lambda: lambda.unwrap_or(1.0),
                t_points: (0..t_points).map(|i| t_min + step * i as f64).collect(),
                us: match us {
                    Some(raw) => parse_f64_list(&raw, "--us")?,
                    None => vec![0.0, 0.5],
                },
            };
            experiments::fracop_check(&p).map(Some)
        }
    }
}
