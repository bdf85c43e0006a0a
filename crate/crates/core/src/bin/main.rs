//! Command-line interface: `simulate`, `estimate`, `aw`, `mixing`, `bounds`
//! and `experiment` subcommands with deterministic output.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on numeric or precondition
//! errors. Diagnostics go to standard error, data to standard output or the
//! requested files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use adapted_ot::adapted_ot::{aw_distance, estimate_aw, smoothed_adapted_estimator};
use adapted_ot::bounds;
use adapted_ot::experiments::{self, ExperimentConfig};
use adapted_ot::mixing;
use adapted_ot::numfmt::fmt_sig;
use adapted_ot::path_measure::{DiscretePathMeasure, PathSample};
use adapted_ot::{Error, Result};

#[derive(Parser)]
#[command(
    name = "adapted-ot",
    about = "Estimation of process laws in the adapted Wasserstein distance",
    version
)]
struct Cli {
    /// Seed for all randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for experiment replications (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output target: a file for data-emitting subcommands (standard output
    /// when omitted), a directory for `experiment`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the configured process and write a path-sample CSV.
    Simulate(SimulateArgs),
    /// Build the adapted empirical measure of a sample and print its adapted
    /// distance to a reference measure.
    Estimate(EstimateArgs),
    /// Print the adapted Wasserstein distance between two measure CSV files.
    Aw(AwArgs),
    /// Print the exact mixing profile of a finite-alphabet law.
    Mixing(MixingArgs),
    /// Evaluate closed-form rate and concentration bounds.
    Bounds(BoundsArgs),
    /// Run the Monte-Carlo experiment harness from a config file.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment config file providing the [process] section.
    #[arg(long)]
    config: PathBuf,
    /// Number of observed paths to emit.
    #[arg(long, default_value_t = 1000)]
    n: usize,
}

#[derive(Args)]
struct EstimateArgs {
    /// Path-sample CSV with the observations.
    #[arg(long)]
    sample: PathBuf,
    /// Reference measure CSV.
    #[arg(long)]
    reference: PathBuf,
    /// When set, also report the distance of the sampled smoothed estimator
    /// with this many noise copies per atom.
    #[arg(long)]
    smooth: Option<usize>,
}

#[derive(Args)]
struct AwArgs {
    /// First measure CSV (`path_id,t,x_1,...[,weight]`).
    a: PathBuf,
    /// Second measure CSV.
    b: PathBuf,
}

#[derive(Args)]
struct MixingArgs {
    /// Law CSV with header `z_1,...,z_N,prob`.
    #[arg(long)]
    law: PathBuf,
    /// Restrict the output to a single lag.
    #[arg(long)]
    s: Option<usize>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(subcommand)]
    which: BoundsCommand,
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Uniform rate for compact laws.
    RateInf {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        t: usize,
    },
    /// Moment-based rate.
    RateP {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        p: f64,
    },
    /// Expected-distance bound for compact laws.
    MomentCompact {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 1.0)]
        eta_sum: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Deviation bound for compact laws.
    ConcentrationCompact {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        diam: f64,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 1.0)]
        eta_bar_sum: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Two-term deviation bound for laws with exponential moments.
    ConcentrationGeneral {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        eta_bar_sum: f64,
        #[arg(long, default_value_t = 1.0)]
        e_mu: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        t: usize,
    },
    /// Bounded-differences deviation bound.
    Bdd {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        eta_bar_sum: f64,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
}

fn fs12(x: f64) -> String {
    fmt_sig(x, 12)
}

/// Writes the primary output of a subcommand to the global `--out` file or
/// to standard output.
fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if cli.threads > 0 {
        // A failure here means a pool already exists (e.g. repeated calls in
        // tests); the run stays correct, only the thread count differs.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match cli.command {
        Command::Simulate(args) => {
            let text = std::fs::read_to_string(&args.config)?;
            let cfg = ExperimentConfig::parse(&text)?;
            let sample = experiments::simulate_process(&cfg.process, args.n, cli.seed)?;
            let mut buf = Vec::new();
            sample.write_csv(&mut buf)?;
            emit(&cli.out, &String::from_utf8_lossy(&buf))?;
        }
        Command::Estimate(args) => {
            let sample = PathSample::read_csv_file(&args.sample)?;
            let reference = DiscretePathMeasure::read_csv_file(&args.reference)?;
            let value = estimate_aw(&sample, &reference)?;
            let mut text = format!("{}\n", fs12(value));
            if let Some(copies) = args.smooth {
                let smoothed = smoothed_adapted_estimator(&sample, copies, cli.seed)?;
                let (value, _) = aw_distance(&reference, &smoothed)?;
                text.push_str(&format!("{}\n", fs12(value)));
            }
            emit(&cli.out, &text)?;
        }
        Command::Aw(args) => {
            let a = DiscretePathMeasure::read_csv_file(&args.a)?;
            let b = DiscretePathMeasure::read_csv_file(&args.b)?;
            let (value, _) = aw_distance(&a, &b)?;
            emit(&cli.out, &format!("{}\n", fs12(value)))?;
        }
        Command::Mixing(args) => {
            let f = std::fs::File::open(&args.law)?;
            let law = mixing::read_law_csv(std::io::BufReader::new(f))?;
            let lags: Vec<usize> = match args.s {
                Some(s) => vec![s],
                None => (1..law.len()).collect(),
            };
            let mut text = String::from("quantity,s,value\n");
            let mut eta_values = Vec::new();
            let mut eta_bar_values = Vec::new();
            for &s in &lags {
                let eta = mixing::eta_exact(&law, s)?;
                let eta_bar = mixing::eta_bar_exact(&law, s)?;
                let eta_hat = mixing::eta_hat_sup(&law, s)?;
                text.push_str(&format!("eta,{s},{}\n", fs12(eta)));
                text.push_str(&format!("eta_bar,{s},{}\n", fs12(eta_bar)));
                text.push_str(&format!("eta_hat_sup,{s},{}\n", fs12(eta_hat)));
                eta_values.push(eta);
                eta_bar_values.push(eta_bar);
            }
            if args.s.is_none() {
                let eta_sum = 1.0 + 2.0 * eta_values.iter().sum::<f64>();
                let eta_bar_sum = 1.0 + eta_bar_values.iter().sum::<f64>();
                text.push_str(&format!("eta_sum,,{}\n", fs12(eta_sum)));
                text.push_str(&format!("eta_bar_sum,,{}\n", fs12(eta_bar_sum)));
            }
            emit(&cli.out, &text)?;
        }
        Command::Bounds(args) => {
            let value = match args.which {
                BoundsCommand::RateInf { n, d, t } => bounds::rate_inf(n, d, t)?,
                BoundsCommand::RateP { n, d, t, p } => bounds::rate_p(n, d, t, p)?,
                BoundsCommand::MomentCompact {
                    n,
                    d,
                    t,
                    eta_sum,
                    c,
                } => {
                    let spec = bounds::RateSpec::new(d, t, None, eta_sum, 1.0, c, 1.0)?;
                    bounds::moment_bound_compact(n, &spec)?
                }
                BoundsCommand::ConcentrationCompact {
                    n,
                    eps,
                    diam,
                    t,
                    eta_bar_sum,
                    c,
                } => bounds::concentration_bound_compact(n, eps, diam, t, eta_bar_sum, c)?,
                BoundsCommand::ConcentrationGeneral {
                    n,
                    eps,
                    alpha,
                    eta_bar_sum,
                    e_mu,
                    c,
                    d,
                    t,
                } => bounds::concentration_bound_general(n, eps, alpha, eta_bar_sum, e_mu, c, d, t)?,
                BoundsCommand::Bdd {
                    n,
                    l,
                    eps,
                    eta_bar_sum,
                } => bounds::bdd_bound(n, l, eps, eta_bar_sum)?,
            };
            emit(&cli.out, &format!("{}\n", fs12(value)))?;
        }
        Command::Experiment(args) => {
            let text = std::fs::read_to_string(&args.config)?;
            let cfg = ExperimentConfig::parse(&text)?;
            let out_dir = cli
                .out
                .or_else(|| cfg.out_dir.clone())
                .ok_or_else(|| Error::InvalidInput("no output directory given".into()))?;
            let mut cfg = cfg;
            cfg.seed = cli.seed;
            experiments::run_all(&cfg, &out_dir)?;
            eprintln!("results written to {}", out_dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are not usage errors.
            if err.use_stderr() {
                eprint!("{err}");
                return ExitCode::from(1);
            }
            print!("{err}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
