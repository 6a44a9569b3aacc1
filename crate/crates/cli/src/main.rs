//! `rcar` — command-line front end for the autoregressive-process
//! simulator, limit-law samplers, stable-law numerics, estimators, and the
//! reproducible convergence/risk experiment harness.
//!
//! Exit codes: 0 = success (all statistical gates passed), 2 = a
//! statistical gate failed, 1 = runtime error. Every stochastic command
//! takes an explicit `--seed`; nothing reads ambient entropy.

// `!(a < b)` guards reject NaN, which `a >= b` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use rcar_core::experiment::io::{write_sample_csv_to, write_table_csv_to, Cell};
use rcar_core::experiment::plot::{ecdf_overlay, histogram_fd, qq_pairs};
use rcar_core::experiment::{
    run_convergence, run_risk, simulate_terminal_batch, stable_sample_batch, ConvergenceReport,
    ExperimentConfig, Scenario, SubResult, DEFAULT_LEPAGE_K, DEFAULT_N_PATHS, DEFAULT_N_STEPS,
};
use rcar_core::{
    derive_rng, ecf_fit_symmetric, hill_default_k, hill_estimator, ks_one_sample, sample_lepage,
    sample_limit_batch, simulate_recursive, GofReport, InnovationSpec, LePageConfig, StableParams,
    StreamPurpose,
};

#[derive(Parser)]
#[command(
    name = "rcar",
    version,
    about = "Random-coefficient autoregression over Poisson arrivals: \
             simulation, limit sampling, stable-law numerics, estimation, \
             and reproducible experiments"
)]
struct Cli {
    /// Worker threads for batch commands (default: one per CPU).
    /// Results are identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate process paths X_k and write them as CSV
    Simulate(SimulateArgs),
    /// Draw truncated limit-series samples (the distributional limit of X_n/n^a)
    Lepage(LepageArgs),
    /// Stable-law operations: exact draws, cdf/pdf evaluation, tables
    Stable(StableArgs),
    /// Estimate tail index and scale from a sample file; optional gof test
    Estimate(EstimateArgs),
    /// Run the full convergence experiment and write its report
    Converge(ConvergeArgs),
    /// Simulate surplus trajectories (a=1) with per-step quantile summaries
    Risk(RiskArgs),
    /// Derive plot-ready CSV (histogram / qq / ecdf-overlay) from samples
    Plotdata(PlotdataArgs),
}

/// Innovation law syntax: `rademacher`, `gaussian`, `uniform:W`,
/// `exponential:RATE`, `point:V` (long family names also accepted).
fn parse_innov(s: &str) -> Result<InnovationSpec, String> {
    s.parse::<InnovationSpec>().map_err(|e| e.to_string())
}

#[derive(Args)]
struct SimulateArgs {
    /// Arrival-ratio exponent (a > 1/2)
    #[arg(long)]
    a: f64,
    #[arg(long, value_parser = parse_innov)]
    innov: InnovationSpec,
    /// Steps per path
    #[arg(long)]
    steps: usize,
    #[arg(long, default_value_t = 1)]
    paths: usize,
    #[arg(long)]
    seed: u64,
    /// Emit every step (path,k,time,raw,normalized) instead of one
    /// terminal X_n/n^a per path
    #[arg(long)]
    full: bool,
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LepageArgs {
    #[arg(long)]
    a: f64,
    #[arg(long, value_parser = parse_innov)]
    innov: InnovationSpec,
    /// Series truncation length
    #[arg(long, default_value_t = DEFAULT_LEPAGE_K)]
    k: usize,
    /// Number of draws
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Emit the bare series Z instead of the limit 1 + Z
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct LawArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mu: f64,
}

impl LawArgs {
    fn law(&self) -> anyhow::Result<StableParams> {
        Ok(StableParams::new(
            self.alpha, self.beta, self.sigma, self.mu,
        )?)
    }
}

#[derive(Args)]
struct StableArgs {
    #[command(subcommand)]
    op: StableOp,
}

#[derive(Subcommand)]
enum StableOp {
    /// Exact draws via the uniform-exponential transform
    Sample {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the cdf at the given points
    Cdf {
        #[command(flatten)]
        law: LawArgs,
        /// Comma-separated evaluation points
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        at: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the density at the given points
    Pdf {
        #[command(flatten)]
        law: LawArgs,
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        at: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniform x-grid table of cdf and pdf
    Tabulate {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct EstimateArgs {
    /// Sample file: one value per line (optional `value` header)
    #[arg(long)]
    input: PathBuf,
    /// Known location of the law (subtracted before fitting)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    location: f64,
    /// Hill order-statistic count (default n^(2/3))
    #[arg(long)]
    hill_k: Option<usize>,
    /// Optional reference law for a one-sample gof test: alpha,beta,sigma,mu
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ks_against: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergeArgs {
    /// TOML or JSON config file; flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<Scenario>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, value_parser = parse_innov)]
    innov: Option<InnovationSpec>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    lepage_k: Option<usize>,
    /// Root seed (required here or in the config; never defaulted)
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct RiskArgs {
    /// Steps per trajectory
    #[arg(long)]
    horizon: usize,
    #[arg(long, default_value_t = 100)]
    paths: usize,
    #[arg(long)]
    seed: u64,
    /// Claim-size law (default: the standard gaussian preset)
    #[arg(long, value_parser = parse_innov)]
    innov: Option<InnovationSpec>,
    #[arg(long, default_value = "rcar-out")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotKind {
    Histogram,
    Qq,
    EcdfOverlay,
}

#[derive(Args)]
struct PlotdataArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    kind: PlotKind,
    /// Reference law, required for qq and ecdf-overlay: alpha,beta,sigma,mu
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    law: Option<Vec<f64>>,
    #[arg(long, default_value_t = 120)]
    max_bins: usize,
    #[arg(long, default_value_t = 512)]
    max_points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn out_writer(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn law_from_vec(v: &[f64]) -> anyhow::Result<StableParams> {
    if v.len() != 4 {
        bail!("law takes exactly four values: alpha,beta,sigma,mu");
    }
    Ok(StableParams::new(v[0], v[1], v[2], v[3])?)
}

fn cmd_simulate(args: &SimulateArgs) -> anyhow::Result<i32> {
    let w = out_writer(&args.out)?;
    if args.full {
        let mut rows = Vec::new();
        for i in 0..args.paths as u64 {
            let mut rng = derive_rng(args.seed, StreamPurpose::ProcessPath, i);
            let p = simulate_recursive(args.a, args.steps, args.innov, &mut rng)?;
            let times = p.arrivals.times();
            for k in 1..=args.steps {
                rows.push(vec![
                    Cell::from(i),
                    Cell::from(k as u64),
                    Cell::from(times[k - 1]),
                    Cell::from(p.raw[k]),
                    Cell::from(p.normalized[k - 1]),
                ]);
            }
        }
        write_table_csv_to(w, &["path", "k", "time", "raw", "normalized"], rows)?;
    } else {
        let t = simulate_terminal_batch(args.a, args.innov, args.steps, args.paths, args.seed)?;
        write_sample_csv_to(w, &t)?;
    }
    Ok(0)
}

fn cmd_lepage(args: &LepageArgs) -> anyhow::Result<i32> {
    let cfg = LePageConfig::new(args.a, args.innov, args.k)?;
    let values: Vec<f64> = if args.raw {
        (0..args.n as u64)
            .map(|i| {
                let mut rng = derive_rng(args.seed, StreamPurpose::LePage, i);
                sample_lepage(&cfg, &mut rng)
            })
            .collect()
    } else {
        sample_limit_batch(&cfg, args.n, args.seed)
    };
    write_sample_csv_to(out_writer(&args.out)?, &values)?;
    Ok(0)
}

fn cmd_stable(args: &StableArgs) -> anyhow::Result<i32> {
    match &args.op {
        StableOp::Sample { law, n, seed, out } => {
            let p = law.law()?;
            let draws = stable_sample_batch(&p, *n, *seed);
            write_sample_csv_to(out_writer(out)?, &draws)?;
        }
        StableOp::Cdf { law, at, out } => {
            let p = law.law()?;
            let rows: Vec<Vec<Cell>> = at
                .iter()
                .map(|&x| Ok(vec![Cell::from(x), Cell::from(p.cdf(x)?)]))
                .collect::<rcar_core::Result<_>>()?;
            write_table_csv_to(out_writer(out)?, &["x", "cdf"], rows)?;
        }
        StableOp::Pdf { law, at, out } => {
            let p = law.law()?;
            let rows: Vec<Vec<Cell>> = at
                .iter()
                .map(|&x| Ok(vec![Cell::from(x), Cell::from(p.pdf(x)?)]))
                .collect::<rcar_core::Result<_>>()?;
            write_table_csv_to(out_writer(out)?, &["x", "pdf"], rows)?;
        }
        StableOp::Tabulate {
            law,
            from,
            to,
            points,
            out,
        } => {
            if *points < 2 || !(from < to) {
                bail!("need from < to and points >= 2");
            }
            let p = law.law()?;
            let step = (to - from) / (*points as f64 - 1.0);
            let rows: Vec<Vec<Cell>> = (0..*points)
                .map(|i| {
                    let x = from + i as f64 * step;
                    Ok(vec![
                        Cell::from(x),
                        Cell::from(p.cdf(x)?),
                        Cell::from(p.pdf(x)?),
                    ])
                })
                .collect::<rcar_core::Result<_>>()?;
            write_table_csv_to(out_writer(out)?, &["x", "cdf", "pdf"], rows)?;
        }
    }
    Ok(0)
}

fn cmd_estimate(args: &EstimateArgs) -> anyhow::Result<i32> {
    let samples = rcar_core::experiment::read_samples(&args.input)?;
    let n = samples.len();

    let ecf = match ecf_fit_symmetric(&samples, args.location) {
        Ok(fit) => json!({ "status": "ok", "value": fit }),
        Err(e) => json!({ "status": "failed", "error": e.to_string() }),
    };

    let centered: Vec<f64> = samples.iter().map(|x| x - args.location).collect();
    let k = args.hill_k.unwrap_or_else(|| hill_default_k(n));
    let hill = match hill_estimator(&centered, k) {
        Ok(t) => json!({ "status": "ok", "value": { "tail_index": t, "k": k } }),
        Err(e) => json!({ "status": "failed", "error": e.to_string() }),
    };

    let mut exit = 0;
    let ks = match &args.ks_against {
        Some(v) => {
            let p = law_from_vec(v)?;
            match ks_one_sample(&samples, &p) {
                Ok(r) => {
                    if !r.passed {
                        exit = 2;
                    }
                    json!({ "status": "ok", "law": p.to_string(), "value": r })
                }
                Err(e) => {
                    exit = 2;
                    json!({ "status": "failed", "error": e.to_string() })
                }
            }
        }
        None => serde_json::Value::Null,
    };

    let report = json!({
        "input": args.input.display().to_string(),
        "n": n,
        "location": args.location,
        "ecf": ecf,
        "hill": hill,
        "ks": ks,
    });
    let mut w = out_writer(&args.out)?;
    serde_json::to_writer_pretty(&mut w, &report)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(exit)
}

/// Config-file shape for `converge`: every field optional, merged under
/// the command-line flags.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    a: Option<f64>,
    innov: Option<InnovationSpec>,
    n_steps: Option<usize>,
    n_paths: Option<usize>,
    lepage_k: Option<usize>,
    seed: Option<u64>,
    scenario: Option<Scenario>,
    output_dir: Option<PathBuf>,
}

fn load_partial(path: &PathBuf) -> anyhow::Result<PartialConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    let cfg = if is_json {
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
    } else {
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
    };
    Ok(cfg)
}

fn merge_config(args: &ConvergeArgs) -> anyhow::Result<ExperimentConfig> {
    let file = match &args.config {
        Some(p) => load_partial(p)?,
        None => PartialConfig::default(),
    };
    let scenario = args.scenario.or(file.scenario);
    let preset = scenario.map(Scenario::params);
    let a = args
        .a
        .or(file.a)
        .or(preset.map(|(a, _)| a))
        .context("exponent required: --a, config `a`, or --scenario")?;
    let innov = args
        .innov
        .or(file.innov)
        .or(preset.map(|(_, i)| i))
        .context("innovation law required: --innov, config `innov`, or --scenario")?;
    let seed = args
        .seed
        .or(file.seed)
        .context("--seed (or config `seed`) is required; the runner never draws one")?;
    Ok(ExperimentConfig {
        a,
        innov,
        n_steps: args.steps.or(file.n_steps).unwrap_or(DEFAULT_N_STEPS),
        n_paths: args.paths.or(file.n_paths).unwrap_or(DEFAULT_N_PATHS),
        lepage_k: args.lepage_k.or(file.lepage_k).unwrap_or(DEFAULT_LEPAGE_K),
        seed,
        scenario,
        output_dir: args
            .out_dir
            .clone()
            .or(file.output_dir)
            .unwrap_or_else(|| PathBuf::from("rcar-out")),
    })
}

fn gate_line(name: &str, sub: Option<&SubResult<GofReport>>) -> (String, Option<bool>) {
    match sub {
        None => (format!("{name}: not applicable"), None),
        Some(s) => match s.outcome.ok() {
            Some(r) => (
                format!(
                    "{name}: D={:.5} crit={:.5} n={} -> {}",
                    r.ks_stat,
                    r.ks_critical_1pct,
                    r.n,
                    if r.passed { "pass" } else { "FAIL" }
                ),
                Some(r.passed),
            ),
            None => {
                let err = match &s.outcome {
                    rcar_core::experiment::Outcome::Failed { error } => error.clone(),
                    _ => unreachable!(),
                };
                (format!("{name}: error — {err}"), Some(false))
            }
        },
    }
}

fn cmd_converge(args: &ConvergeArgs) -> anyhow::Result<i32> {
    let cfg = merge_config(args)?;
    let report: ConvergenceReport = run_convergence(&cfg)?;

    println!("config hash   {}", report.config_hash);
    match (&report.prediction, &report.prediction_note) {
        (Some(p), _) => println!(
            "prediction    alpha={} beta={} sigma={:.6} mu={}",
            p.alpha, p.beta, p.sigma, p.mu
        ),
        (None, Some(note)) => println!("prediction    absent — {note}"),
        (None, None) => println!("prediction    absent"),
    }
    match report.ecf.value() {
        Some(f) => println!(
            "ecf fit       alpha_hat={:.4} sigma_hat={:.4} r2={:.4}",
            f.alpha_hat, f.sigma_hat, f.r2
        ),
        None => println!("ecf fit       failed"),
    }
    match report.hill.value() {
        Some(h) => println!("hill          tail_index={:.4} (k={})", h.tail_index, h.k),
        None => println!("hill          failed"),
    }

    let mut all_pass = true;
    for (name, sub) in [
        ("ks vs prediction", report.ks_vs_prediction.as_ref()),
        ("ks vs series", Some(&report.ks_vs_lepage)),
        ("ks vs direct draws", report.ks_vs_cms.as_ref()),
    ] {
        let (line, verdict) = gate_line(name, sub);
        println!("{line}");
        if let Some(pass) = verdict {
            all_pass &= pass;
        }
    }
    println!(
        "report        {}",
        cfg.output_dir.join("convergence_report.json").display()
    );
    Ok(if all_pass { 0 } else { 2 })
}

fn cmd_risk(args: &RiskArgs) -> anyhow::Result<i32> {
    let mut cfg = match args.innov {
        None => ExperimentConfig::preset(Scenario::Risk, args.seed, &args.out_dir),
        Some(innov) => ExperimentConfig::new(1.0, innov, args.seed, &args.out_dir),
    };
    cfg.n_paths = args.paths;
    let report = run_risk(&cfg, args.horizon)?;
    println!(
        "final surplus quantiles (k={}): q05={:.3} median={:.3} q95={:.3}",
        report.horizon, report.final_q05, report.final_median, report.final_q95
    );
    println!(
        "paths         {}",
        cfg.output_dir.join(report.paths_file).display()
    );
    println!(
        "summary       {}",
        cfg.output_dir.join(report.summary_file).display()
    );
    Ok(0)
}

fn cmd_plotdata(args: &PlotdataArgs) -> anyhow::Result<i32> {
    let samples = rcar_core::experiment::read_samples(&args.input)?;
    let need_law = || -> anyhow::Result<StableParams> {
        let v = args
            .law
            .as_ref()
            .context("--law alpha,beta,sigma,mu is required for this kind")?;
        law_from_vec(v)
    };
    let w = out_writer(&args.out)?;
    match args.kind {
        PlotKind::Histogram => {
            let bins = histogram_fd(&samples, args.max_bins)?;
            let rows = bins.iter().map(|b| {
                vec![
                    Cell::from(b.lo),
                    Cell::from(b.hi),
                    Cell::from(b.count as u64),
                ]
            });
            write_table_csv_to(w, &["lo", "hi", "count"], rows)?;
        }
        PlotKind::Qq => {
            let pairs = qq_pairs(&samples, &need_law()?, args.max_points)?;
            let rows = pairs
                .iter()
                .map(|(m, s)| vec![Cell::from(*m), Cell::from(*s)]);
            write_table_csv_to(w, &["model_quantile", "sample"], rows)?;
        }
        PlotKind::EcdfOverlay => {
            let table = ecdf_overlay(&samples, &need_law()?)?;
            let rows = table.iter().map(|r| {
                vec![
                    Cell::from(r.x),
                    Cell::from(r.ecdf),
                    Cell::from(r.model_cdf),
                    Cell::from(r.gap),
                ]
            });
            write_table_csv_to(w, &["x", "ecdf", "model_cdf", "gap"], rows)?;
        }
    }
    Ok(0)
}

fn run(cli: &Cli) -> anyhow::Result<i32> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("initializing worker pool")?;
    }
    match &cli.cmd {
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Lepage(a) => cmd_lepage(a),
        Cmd::Stable(a) => cmd_stable(a),
        Cmd::Estimate(a) => cmd_estimate(a),
        Cmd::Converge(a) => cmd_converge(a),
        Cmd::Risk(a) => cmd_risk(a),
        Cmd::Plotdata(a) => cmd_plotdata(a),
    }
}

fn main() -> ExitCode {
    // Usage mistakes are runtime errors (exit 1); clap's default exit
    // code 2 is reserved here for failed statistical gates.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                e.exit();
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        // a downstream pipe closing early (e.g. `rcar ... | head`) is not
        // an error worth reporting
        Err(e) if is_broken_pipe(&e) => ExitCode::from(0),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    // The core error type forwards transparently to the underlying io error,
    // so the chain holds the wrapper, not a bare `std::io::Error`; check both.
    e.chain().any(|c| {
        let io = match c.downcast_ref::<std::io::Error>() {
            Some(io) => io,
            None => match c.downcast_ref::<rcar_core::Error>() {
                Some(rcar_core::Error::Io(io)) => io,
                _ => return false,
            },
        };
        io.kind() == std::io::ErrorKind::BrokenPipe
    })
}
