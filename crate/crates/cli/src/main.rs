use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entvqe::experiments::config::{Experiment, ModelConfig};
use entvqe::experiments::run::{build_model, sibling};
use entvqe::experiments::summary::write_summary;
use entvqe::experiments::{run_experiment, summarize_files, RunOptions};
use entvqe::gradstats::{variance_scaling, DepthRule, ImpurityScan, XVariant, DEFAULT_SAMPLES};
use entvqe::rg::singlet_length_stats;
use entvqe::{lowest_eigenpairs, Error, ImpurityGating};

#[derive(Parser)]
#[command(name = "entvqe", version, about = "Variational ground-state experiments on spin chains")]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every sweep point of an experiment config.
    Run(RunArgs),
    /// Reduce result files to curve and ensemble tables.
    Summarize(SummarizeArgs),
    /// Mean singlet length of the strong-disorder decimation.
    Rg(RgArgs),
    /// Gradient variance of impurity ansätze across chain sizes.
    Gradvar(GradvarArgs),
    /// Exact ground energies for every point of a config.
    Exact(ExactArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Results CSV; sidecar files are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force_large: bool,
}

#[derive(Args)]
struct SummarizeArgs {
    #[arg(required = true)]
    results: Vec<PathBuf>,
    /// Base path for `<stem>_curves.csv` and `<stem>_ensembles.csv`; prints to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Combine rows from different experiments.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct RgArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32, 64])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long, default_value_t = 1000)]
    configs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GatingArg {
    Bonds,
    BondsAndRotations,
}

#[derive(Args)]
struct GradvarArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [5usize, 7, 9])]
    sizes: Vec<usize>,
    /// Fixed layer count for every size.
    #[arg(long, default_value_t = 40)]
    layers: usize,
    /// `all`, or k for the first k layers; repeat for several series.
    #[arg(long, value_delimiter = ',', default_values_t = [String::from("1"), String::from("all")])]
    x: Vec<String>,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    h_x: f64,
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    h0_z: f64,
    #[arg(long, value_enum, default_value_t = GatingArg::BondsAndRotations)]
    gating: GatingArg,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    eigenpairs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force_large: bool,
}

enum Failure {
    Config(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Self::Config(e.to_string()),
            other => Self::Other(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Other(e.to_string())
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(args: RunArgs) -> Result<ExitCode, Failure> {
    let exp = Experiment::from_path(&args.config)?;
    let opts = RunOptions { seed: args.seed, out: args.out, force_large: args.force_large };
    let report = run_experiment(&exp, &opts)?;
    eprintln!(
        "{}: {} rows ({} failed) -> {}",
        exp.experiment_id(),
        report.rows,
        report.failed_rows,
        report.results_path.display()
    );
    Ok(if report.failed_rows > 0 { ExitCode::from(3) } else { ExitCode::SUCCESS })
}

fn summarize(args: SummarizeArgs) -> Result<ExitCode, Failure> {
    let summary = summarize_files(&args.results, args.force)?;
    match args.out {
        Some(base) => write_summary(&summary, &sibling(&base, "_curves.csv"), &sibling(&base, "_ensembles.csv"))?,
        None => {
            let mut w = std::io::stdout().lock();
            writeln!(w, "variant,point,config,axis_value,n_qubits,max_layers,plateau,transition_layer,best_rel_error,match_count")?;
            for c in &summary.curves {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{:.6e},{}",
                    c.variant,
                    c.point,
                    opt(c.config_index),
                    c.axis_value,
                    c.n_qubits,
                    c.max_layers,
                    opt(c.plateau.map(|p| format!("{p:.6e}"))),
                    opt(c.transition_layer),
                    c.best_rel_error,
                    opt(c.final_match_count)
                )?;
            }
            writeln!(w)?;
            writeln!(w, "variant,point,axis_value,n_qubits,layers,n_configs,rel_error_mean,rel_error_stderr,rg_mean_length,rg_mean_length_stderr")?;
            for e in summary.ensembles.iter().filter(|e| e.n_configs > 1) {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{}",
                    e.variant,
                    e.point,
                    e.axis_value,
                    e.n_qubits,
                    e.layers,
                    e.n_configs,
                    opt(e.rel_error_mean),
                    opt(e.rel_error_stderr),
                    opt(e.rg_mean_length),
                    opt(e.rg_mean_length_stderr)
                )?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn rg(args: RgArgs) -> Result<ExitCode, Failure> {
    if args.configs == 0 || !(args.delta >= 1.0) {
        return Err(Failure::Config("--configs must be positive and --delta at least 1".into()));
    }
    let stats = singlet_length_stats(&args.sizes, args.delta, args.configs, args.seed)?;
    let mut w = output(args.out.as_deref())?;
    writeln!(w, "n_qubits,delta,n_configs,mean_singlet_length")?;
    for (n, mean) in stats {
        writeln!(w, "{n},{},{},{mean}", args.delta, args.configs)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn gradvar(args: GradvarArgs) -> Result<ExitCode, Failure> {
    let variants = args
        .x
        .iter()
        .map(|x| match x.as_str() {
            "all" => Ok(XVariant::All),
            k => k
                .parse()
                .map(XVariant::First)
                .map_err(|_| Failure::Config(format!("--x: expected `all` or an integer, got {k:?}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let scan = ImpurityScan {
        h_x: args.h_x,
        h0_z: args.h0_z,
        depth: DepthRule::Fixed(args.layers),
        gating: match args.gating {
            GatingArg::Bonds => ImpurityGating::BondsOnly,
            GatingArg::BondsAndRotations => ImpurityGating::BondsAndRotations,
        },
        n_samples: args.samples,
        seed: args.seed,
    };
    let series = variance_scaling(&args.sizes, &variants, &scan)?;
    let mut w = output(args.out.as_deref())?;
    writeln!(w, "x,n_qubits,n_layers,n_params,mean_variance,spread,outlier_index,log_slope")?;
    for s in &series {
        for p in &s.points {
            writeln!(
                w,
                "{},{},{},{},{:.6e},{:.6e},{},{}",
                s.variant.label(),
                p.n_qubits,
                p.n_layers,
                p.n_params,
                p.mean_excluding_outlier,
                p.spread,
                opt(p.outlier_index),
                opt(s.log_slope)
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exact(args: ExactArgs) -> Result<ExitCode, Failure> {
    let exp = Experiment::from_path(&args.config)?;
    exp.validate(args.force_large)?;
    let mut w = output(args.out.as_deref())?;
    writeln!(w, "variant,point,config,model,k,energy,ground_degeneracy")?;
    for (label, cfg) in &exp.variants {
        let seed = args.seed.unwrap_or(cfg.seed);
        for point in cfg.points()? {
            for config in 0..cfg.model.n_configs() {
                let (ham, _) = build_model(&point.model, seed, config)?;
                let k = args.eigenpairs.clamp(1, 1 << point.model.n_qubits());
                let reference = lowest_eigenpairs(&ham, k)?;
                let config_col = if matches!(point.model, ModelConfig::RandomChain { .. }) {
                    config.to_string()
                } else {
                    String::new()
                };
                for (i, e) in reference.energies.iter().enumerate() {
                    writeln!(
                        w,
                        "{label},{},{config_col},\"{}\",{i},{e:.15},{}",
                        point.index,
                        point.model.descriptor(),
                        reference.ground_degeneracy()
                    )?;
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Summarize(a) => summarize(a),
        Command::Rg(a) => rg(a),
        Command::Gradvar(a) => gradvar(a),
        Command::Exact(a) => exact(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::FAILURE
        }
    }
}
