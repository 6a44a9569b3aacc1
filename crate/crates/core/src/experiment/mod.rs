//! Experiment harness: seeded batch simulation, the convergence report that
//! compares process terminals against the predicted stable law, LePage
//! draws, and direct sampler output, plus surplus-trajectory reporting.
//!
//! Everything here is deterministic given the config: each path or draw gets
//! its own stream derived from `(seed, purpose, index)`, so output files are
//! byte-identical for any worker count.

pub mod io;
pub mod plot;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::inference::{
    ecf_fit_symmetric, fit_one_sided_scale, hill_default_k, hill_estimator, ks_one_sample,
    ks_two_sample, EcfFit, GofReport,
};
use crate::innovations::InnovationSpec;
use crate::lepage::{predict_limit_law, sample_limit_batch, LePageConfig, LimitLawPrediction};
use crate::process::{simulate_recursive, simulate_terminal};
use crate::rng::{derive_rng, StreamPurpose};
use crate::stable::StableParams;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub const DEFAULT_N_STEPS: usize = 5000;
pub const DEFAULT_N_PATHS: usize = 20000;
pub const DEFAULT_LEPAGE_K: usize = 10000;

/// Cap on `n_paths * horizon` cells for trajectory export, to keep the
/// paths CSV under roughly a couple of gigabytes.
const MAX_TRAJECTORY_CELLS: u64 = 50_000_000;

/// Named experiment presets. Each fixes the exponent and innovation family;
/// the innovation family for `charge` is a choice (the symmetric two-point
/// law), documented rather than derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// a = 2 with rademacher innovations: symmetric heavy-tail case,
    /// limit S(1/2, 0, pi/2, 1).
    Charge,
    /// a = 2 with unit-rate positive exponential innovations: one-sided
    /// heavy-tail case, limit supported on (1, inf).
    Mass,
    /// a = 1 with standard gaussian innovations: surplus-trajectory
    /// reporting, limit S(1, 0, pi/2, 1).
    Risk,
}

impl Scenario {
    /// The `(a, innovation)` pair the preset pins down.
    pub fn params(self) -> (f64, InnovationSpec) {
        match self {
            Scenario::Charge => (2.0, InnovationSpec::Rademacher),
            Scenario::Mass => (2.0, InnovationSpec::ExponentialPos { rate: 1.0 }),
            Scenario::Risk => (1.0, InnovationSpec::GaussianStd),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Charge => "charge",
            Scenario::Mass => "mass",
            Scenario::Risk => "risk",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "charge" => Ok(Scenario::Charge),
            "mass" => Ok(Scenario::Mass),
            "risk" => Ok(Scenario::Risk),
            other => Err(invalid(format!(
                "unknown scenario {other:?}; expected charge, mass, or risk"
            ))),
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn default_n_steps() -> usize {
    DEFAULT_N_STEPS
}
fn default_n_paths() -> usize {
    DEFAULT_N_PATHS
}
fn default_lepage_k() -> usize {
    DEFAULT_LEPAGE_K
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("rcar-out")
}

/// Full description of one experiment run. The config hash covers every
/// field except `output_dir`, so moving output does not change identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub a: f64,
    pub innov: InnovationSpec,
    #[serde(default = "default_n_steps")]
    pub n_steps: usize,
    #[serde(default = "default_n_paths")]
    pub n_paths: usize,
    #[serde(default = "default_lepage_k")]
    pub lepage_k: usize,
    pub seed: u64,
    #[serde(default)]
    pub scenario: Option<Scenario>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    /// Config with explicit `(a, innov)` and default sizes.
    pub fn new(a: f64, innov: InnovationSpec, seed: u64, output_dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            a,
            innov,
            n_steps: DEFAULT_N_STEPS,
            n_paths: DEFAULT_N_PATHS,
            lepage_k: DEFAULT_LEPAGE_K,
            seed,
            scenario: None,
            output_dir: output_dir.into(),
        }
    }

    /// Config from a preset; `(a, innov)` come from the scenario.
    pub fn preset(scenario: Scenario, seed: u64, output_dir: impl Into<PathBuf>) -> Self {
        let (a, innov) = scenario.params();
        ExperimentConfig {
            a,
            innov,
            n_steps: DEFAULT_N_STEPS,
            n_paths: DEFAULT_N_PATHS,
            lepage_k: DEFAULT_LEPAGE_K,
            seed,
            scenario: Some(scenario),
            output_dir: output_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        crate::process::validate_exponent(self.a)?;
        self.innov.validate()?;
        if self.n_steps == 0 {
            return Err(invalid("n_steps must be >= 1"));
        }
        if self.n_paths == 0 {
            return Err(invalid("n_paths must be >= 1"));
        }
        if self.lepage_k < 100 {
            return Err(invalid("lepage_k must be >= 100"));
        }
        if let Some(s) = self.scenario {
            let (a, innov) = s.params();
            if self.a != a || self.innov != innov {
                return Err(invalid(format!(
                    "scenario {s} pins a={a} and innovations {innov:?}; \
                     got a={} and {:?}",
                    self.a, self.innov
                )));
            }
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON encoding of every field except
    /// `output_dir`, as a lowercase hex string. Field order is the struct
    /// declaration order, so the hash is stable across runs and platforms.
    pub fn hash_hex(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        value
            .as_object_mut()
            .expect("config is a JSON object")
            .remove("output_dir");
        let canonical = serde_json::to_string(&value).expect("canonical encoding");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Whether a sub-computation produced a value or failed; failures carry the
/// error text so one bad quadrature or degenerate fit never aborts the
/// whole report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome<T> {
    Ok { value: T },
    Failed { error: String },
}

impl<T> Outcome<T> {
    pub fn ok(&self) -> Option<&T> {
        match self {
            Outcome::Ok { value } => Some(value),
            Outcome::Failed { .. } => None,
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, Outcome::Ok { .. })
    }
}

/// One sub-result of a report, tagged with the seed and the derived-stream
/// purposes that fed it plus the sample files it was computed from, so every
/// verdict in the JSON can be traced back to reproducible inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubResult<T> {
    pub seed: u64,
    pub streams: Vec<String>,
    pub sample_files: Vec<String>,
    pub outcome: Outcome<T>,
}

impl<T> SubResult<T> {
    fn capture(seed: u64, streams: &[&str], files: &[&str], r: Result<T>) -> Self {
        SubResult {
            seed,
            streams: streams.iter().map(|s| s.to_string()).collect(),
            sample_files: files.iter().map(|s| s.to_string()).collect(),
            outcome: match r {
                Ok(value) => Outcome::Ok { value },
                Err(e) => Outcome::Failed {
                    error: e.to_string(),
                },
            },
        }
    }

    pub fn value(&self) -> Option<&T> {
        self.outcome.ok()
    }
}

/// Hill tail-index estimate together with the order-statistic count used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HillEstimate {
    pub tail_index: f64,
    pub k: usize,
}

/// Everything `run_convergence` measures about one config: the predicted
/// limit law (when the symmetry hypothesis holds), estimator output on the
/// simulated terminals, and the three goodness-of-fit comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub config: ExperimentConfig,
    pub config_hash: String,
    /// Predicted limit parameters; absent when the innovation law is not
    /// symmetric (the hypothesis the prediction needs), with the reason in
    /// `prediction_note`.
    pub prediction: Option<LimitLawPrediction>,
    pub prediction_note: Option<String>,
    pub ecf: SubResult<EcfFit>,
    pub hill: SubResult<HillEstimate>,
    /// One-sample test of the terminals against the predicted cdf;
    /// present exactly when `prediction` is.
    pub ks_vs_prediction: Option<SubResult<GofReport>>,
    pub ks_vs_lepage: SubResult<GofReport>,
    /// Two-sample test against direct draws of a reference stable law:
    /// the predicted law when available, otherwise a one-sided law with
    /// quantile-fitted scale for positive innovations at index 1/2.
    pub ks_vs_cms: Option<SubResult<GofReport>>,
    pub cms_note: Option<String>,
    pub sample_files: Vec<String>,
    pub runtime_seconds: f64,
}

/// Simulate `n_paths` terminal values `X_n / n^a`, one derived stream per
/// path, so the result is independent of scheduling and worker count.
pub fn simulate_terminal_batch(
    a: f64,
    innov: InnovationSpec,
    n_steps: usize,
    n_paths: usize,
    root_seed: u64,
) -> Result<Vec<f64>> {
    crate::process::validate_exponent(a)?;
    innov.validate()?;
    if n_steps == 0 || n_paths == 0 {
        return Err(invalid("n_steps and n_paths must be >= 1"));
    }
    let one = |i: u64| -> Result<f64> {
        let mut rng = derive_rng(root_seed, StreamPurpose::ProcessPath, i);
        simulate_terminal(a, n_steps, innov, &mut rng)
    };
    #[cfg(feature = "parallel")]
    {
        (0..n_paths as u64)
            .into_par_iter()
            .map(one)
            .collect::<Result<Vec<f64>>>()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_paths as u64).map(one).collect()
    }
}

/// Draw `n` variates of `p`, one derived stream per draw (deterministic for
/// any worker count).
pub fn stable_sample_batch(p: &StableParams, n: usize, root_seed: u64) -> Vec<f64> {
    let one = |i: u64| -> f64 {
        let mut rng = derive_rng(root_seed, StreamPurpose::StableDraws, i);
        p.sample(&mut rng)
    };
    #[cfg(feature = "parallel")]
    {
        (0..n as u64).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n as u64).map(one).collect()
    }
}

pub const PROCESS_SAMPLES_FILE: &str = "process_samples.csv";
pub const LEPAGE_SAMPLES_FILE: &str = "lepage_samples.csv";
pub const CMS_SAMPLES_FILE: &str = "cms_samples.csv";
pub const REPORT_FILE: &str = "convergence_report.json";

/// Run the full convergence experiment for `cfg`.
///
/// Simulates the terminal values, derives the predicted limit law when the
/// hypotheses hold, fits index and scale from the samples, and compares the
/// empirical law against (i) the predicted cdf, (ii) truncated-series limit
/// draws, and (iii) direct stable draws. Sample CSVs and the JSON report
/// land in `cfg.output_dir`. Statistical or numerical failures inside a
/// sub-test are recorded in that sub-result instead of aborting.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let started = Instant::now();
    let seed = cfg.seed;
    let dir = &cfg.output_dir;

    // Terminal values X_n / n^a, the experiment's subject.
    let terminals = simulate_terminal_batch(cfg.a, cfg.innov, cfg.n_steps, cfg.n_paths, seed)?;
    io::write_sample_csv(&dir.join(PROCESS_SAMPLES_FILE), &terminals)?;

    // Predicted limit law; a non-symmetric innovation law is a hypothesis
    // failure (recorded, not fatal), anything else is a real error.
    let (prediction, prediction_note) = match predict_limit_law(cfg.a, cfg.innov) {
        Ok(p) => (Some(p), None),
        Err(Error::LimitHypothesis { detail }) => (None, Some(detail)),
        Err(e) => return Err(e),
    };

    let ecf = SubResult::capture(
        seed,
        &["process-path"],
        &[PROCESS_SAMPLES_FILE],
        ecf_fit_symmetric(&terminals, 1.0),
    );

    let hill = {
        let centered: Vec<f64> = terminals.iter().map(|x| x - 1.0).collect();
        let k = hill_default_k(centered.len());
        SubResult::capture(
            seed,
            &["process-path"],
            &[PROCESS_SAMPLES_FILE],
            hill_estimator(&centered, k).map(|tail_index| HillEstimate { tail_index, k }),
        )
    };

    let ks_vs_prediction = prediction.as_ref().map(|p| {
        SubResult::capture(
            seed,
            &["process-path"],
            &[PROCESS_SAMPLES_FILE],
            p.params().and_then(|law| ks_one_sample(&terminals, &law)),
        )
    });

    // Truncated limit-series draws, shifted to 1 + Z like the terminals.
    let lepage_cfg = LePageConfig::new(cfg.a, cfg.innov, cfg.lepage_k)?;
    let lepage = sample_limit_batch(&lepage_cfg, cfg.n_paths, seed);
    io::write_sample_csv(&dir.join(LEPAGE_SAMPLES_FILE), &lepage)?;
    let ks_vs_lepage = SubResult::capture(
        seed,
        &["process-path", "lepage-draw"],
        &[PROCESS_SAMPLES_FILE, LEPAGE_SAMPLES_FILE],
        ks_two_sample(&terminals, &lepage),
    );

    // Reference law for direct draws: predicted when available and
    // non-degenerate; otherwise, for positive innovations at index 1/2,
    // a one-sided law with scale fitted from the sample median.
    let alpha = 1.0 / cfg.a;
    let cms_law: Option<(Result<StableParams>, &str)> = match &prediction {
        Some(p) => Some((p.params(), "predicted limit law")),
        None if cfg.innov.is_strictly_positive() && (alpha - 0.5).abs() < 1e-12 => {
            let fitted = fit_one_sided_scale(&terminals, 1.0)
                .and_then(|sigma| StableParams::new(0.5, 1.0, sigma, 1.0));
            Some((fitted, "one-sided law, scale fitted from sample median"))
        }
        None => None,
    };
    let (ks_vs_cms, cms_note) = match cms_law {
        Some((law, label)) => {
            let sub = match law {
                Ok(law) => {
                    let draws = stable_sample_batch(&law, cfg.n_paths, seed);
                    io::write_sample_csv(&dir.join(CMS_SAMPLES_FILE), &draws)?;
                    SubResult::capture(
                        seed,
                        &["process-path", "stable-draws"],
                        &[PROCESS_SAMPLES_FILE, CMS_SAMPLES_FILE],
                        ks_two_sample(&terminals, &draws),
                    )
                }
                Err(e) => SubResult::capture(
                    seed,
                    &["process-path", "stable-draws"],
                    &[PROCESS_SAMPLES_FILE],
                    Err(e),
                ),
            };
            (Some(sub), Some(label.to_string()))
        }
        None => (
            None,
            Some(
                "no reference law: prediction absent and innovations not one-sided at index 1/2"
                    .to_string(),
            ),
        ),
    };

    let mut report = ConvergenceReport {
        config: cfg.clone(),
        config_hash: cfg.hash_hex(),
        prediction,
        prediction_note,
        ecf,
        hill,
        ks_vs_prediction,
        ks_vs_lepage,
        ks_vs_cms,
        cms_note,
        sample_files: vec![
            PROCESS_SAMPLES_FILE.to_string(),
            LEPAGE_SAMPLES_FILE.to_string(),
        ],
        runtime_seconds: 0.0,
    };
    if dir.join(CMS_SAMPLES_FILE).exists() {
        report.sample_files.push(CMS_SAMPLES_FILE.to_string());
    }
    report.runtime_seconds = started.elapsed().as_secs_f64();
    io::write_json(&dir.join(REPORT_FILE), &report)?;
    Ok(report)
}

pub const RISK_PATHS_FILE: &str = "risk_paths.csv";
pub const RISK_SUMMARY_FILE: &str = "risk_summary.csv";
pub const RISK_REPORT_FILE: &str = "risk_report.json";

/// Summary of a surplus-trajectory run; the heavy data lives in the CSVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub horizon: usize,
    pub paths_file: String,
    pub summary_file: String,
    /// Surplus quantiles at the final step, across paths.
    pub final_q05: f64,
    pub final_median: f64,
    pub final_q95: f64,
    pub runtime_seconds: f64,
}

/// Nearest-rank quantile of an ascending-sorted slice.
fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0 && (0.0..=1.0).contains(&q));
    let idx = ((q * n as f64).ceil() as usize).clamp(1, n) - 1;
    sorted[idx]
}

/// Simulate surplus trajectories `(G_k, X_k)` for `horizon` steps per path
/// and emit the full paths plus per-step quantile summaries.
///
/// The surplus reading requires the linear exponent `a = 1`, where premiums
/// accrue proportionally to elapsed time; the innovation law stays free so
/// degenerate diagnostics (zero claims) remain expressible.
pub fn run_risk(cfg: &ExperimentConfig, horizon: usize) -> Result<RiskReport> {
    cfg.validate()?;
    if cfg.a != 1.0 {
        return Err(invalid(
            "trajectory reporting requires a = 1 (the risk preset exponent)",
        ));
    }
    if horizon == 0 {
        return Err(invalid("horizon must be >= 1"));
    }
    let cells = cfg.n_paths as u64 * horizon as u64;
    if cells > MAX_TRAJECTORY_CELLS {
        return Err(invalid(format!(
            "n_paths * horizon = {cells} exceeds the trajectory export cap \
             {MAX_TRAJECTORY_CELLS}; reduce one of them"
        )));
    }
    std::fs::create_dir_all(&cfg.output_dir)?;
    let started = Instant::now();

    // One derived stream per path, same purpose tag as the convergence
    // terminals so a path index means the same arrivals either way.
    let simulate_one = |i: u64| -> Result<crate::process::ProcessPath> {
        let mut rng = derive_rng(cfg.seed, StreamPurpose::ProcessPath, i);
        simulate_recursive(cfg.a, horizon, cfg.innov, &mut rng)
    };
    #[cfg(feature = "parallel")]
    let paths: Vec<crate::process::ProcessPath> = (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(simulate_one)
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let paths: Vec<crate::process::ProcessPath> = (0..cfg.n_paths as u64)
        .map(simulate_one)
        .collect::<Result<_>>()?;

    let paths_path = cfg.output_dir.join(RISK_PATHS_FILE);
    io::write_table_csv(
        &paths_path,
        &["path", "k", "time", "surplus"],
        paths.iter().enumerate().flat_map(|(i, p)| {
            let times = p.arrivals.times();
            (1..=horizon).map(move |k| {
                vec![
                    io::Cell::from(i as u64),
                    io::Cell::from(k as u64),
                    io::Cell::from(times[k - 1]),
                    io::Cell::from(p.raw[k]),
                ]
            })
        }),
    )?;

    // Per-step spread of the surplus across paths.
    let mut summary_rows = Vec::with_capacity(horizon);
    let mut final_quantiles = (f64::NAN, f64::NAN, f64::NAN);
    for k in 1..=horizon {
        let mean_time =
            paths.iter().map(|p| p.arrivals.times()[k - 1]).sum::<f64>() / paths.len() as f64;
        let mut xs: Vec<f64> = paths.iter().map(|p| p.raw[k]).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        let qs = [
            sorted_quantile(&xs, 0.05),
            sorted_quantile(&xs, 0.25),
            sorted_quantile(&xs, 0.50),
            sorted_quantile(&xs, 0.75),
            sorted_quantile(&xs, 0.95),
        ];
        if k == horizon {
            final_quantiles = (qs[0], qs[2], qs[4]);
        }
        summary_rows.push(vec![
            io::Cell::from(k as u64),
            io::Cell::from(mean_time),
            io::Cell::from(qs[0]),
            io::Cell::from(qs[1]),
            io::Cell::from(qs[2]),
            io::Cell::from(qs[3]),
            io::Cell::from(qs[4]),
        ]);
    }
    let summary_path = cfg.output_dir.join(RISK_SUMMARY_FILE);
    io::write_table_csv(
        &summary_path,
        &["k", "mean_time", "q05", "q25", "q50", "q75", "q95"],
        summary_rows,
    )?;

    let report = RiskReport {
        config: cfg.clone(),
        config_hash: cfg.hash_hex(),
        horizon,
        paths_file: RISK_PATHS_FILE.to_string(),
        summary_file: RISK_SUMMARY_FILE.to_string(),
        final_q05: final_quantiles.0,
        final_median: final_quantiles.1,
        final_q95: final_quantiles.2,
        runtime_seconds: started.elapsed().as_secs_f64(),
    };
    io::write_json(&cfg.output_dir.join(RISK_REPORT_FILE), &report)?;
    Ok(report)
}

/// Read back a sample CSV written by this harness (or any single-column
/// file of floats).
pub fn read_samples(path: &Path) -> Result<Vec<f64>> {
    io::read_sample_csv(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::ArrivalSequence;
    use crate::rng::pow_a;

    fn tmpdir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("rcar-test-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn presets_pin_exponent_and_innovations() {
        let c = ExperimentConfig::preset(Scenario::Charge, 1, "out");
        assert_eq!(c.a, 2.0);
        assert_eq!(c.innov, InnovationSpec::Rademacher);
        let m = ExperimentConfig::preset(Scenario::Mass, 1, "out");
        assert_eq!(m.a, 2.0);
        assert_eq!(m.innov, InnovationSpec::ExponentialPos { rate: 1.0 });
        let r = ExperimentConfig::preset(Scenario::Risk, 1, "out");
        assert_eq!(r.a, 1.0);
        assert_eq!(r.innov, InnovationSpec::GaussianStd);
        for cfg in [&c, &m, &r] {
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn validate_rejects_preset_mismatch_and_bad_sizes() {
        let mut c = ExperimentConfig::preset(Scenario::Charge, 1, "out");
        c.a = 1.5;
        assert!(c.validate().is_err());

        let mut c = ExperimentConfig::preset(Scenario::Risk, 1, "out");
        c.innov = InnovationSpec::Rademacher;
        assert!(c.validate().is_err());

        let mut c = ExperimentConfig::new(2.0, InnovationSpec::Rademacher, 1, "out");
        c.n_paths = 0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::new(2.0, InnovationSpec::Rademacher, 1, "out");
        c.lepage_k = 50;
        assert!(c.validate().is_err());
        let c = ExperimentConfig::new(0.5, InnovationSpec::Rademacher, 1, "out");
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_hash_ignores_output_dir_and_tracks_everything_else() {
        let a = ExperimentConfig::preset(Scenario::Charge, 7, "out-a");
        let b = ExperimentConfig::preset(Scenario::Charge, 7, "elsewhere/out-b");
        assert_eq!(a.hash_hex(), b.hash_hex());
        assert_eq!(a.hash_hex().len(), 64);

        let mut c = a.clone();
        c.seed = 8;
        assert_ne!(a.hash_hex(), c.hash_hex());
        let mut d = a.clone();
        d.n_paths += 1;
        assert_ne!(a.hash_hex(), d.hash_hex());
    }

    #[test]
    fn scenario_round_trips_through_str_and_serde() {
        for s in [Scenario::Charge, Scenario::Mass, Scenario::Risk] {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(json, format!("\"{}\"", s.name()));
            assert_eq!(serde_json::from_str::<Scenario>(&json).unwrap(), s);
        }
        assert!("bogus".parse::<Scenario>().is_err());
    }

    #[test]
    fn terminal_batch_is_deterministic_and_prefix_stable() {
        let a = simulate_terminal_batch(2.0, InnovationSpec::Rademacher, 50, 40, 3).unwrap();
        let b = simulate_terminal_batch(2.0, InnovationSpec::Rademacher, 50, 40, 3).unwrap();
        assert_eq!(a, b);
        let prefix = simulate_terminal_batch(2.0, InnovationSpec::Rademacher, 50, 10, 3).unwrap();
        assert_eq!(&a[..10], &prefix[..]);
        let other = simulate_terminal_batch(2.0, InnovationSpec::Rademacher, 50, 40, 4).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn stable_batch_is_deterministic_and_purpose_separated() {
        let p = StableParams::new(0.5, 0.0, 1.0, 0.0).unwrap();
        let a = stable_sample_batch(&p, 32, 9);
        let b = stable_sample_batch(&p, 32, 9);
        assert_eq!(a, b);
        // process-path streams with the same seed/index must not leak in
        let t = simulate_terminal_batch(2.0, InnovationSpec::Rademacher, 5, 32, 9).unwrap();
        assert!(a.iter().zip(&t).all(|(x, y)| x != y));
    }

    #[test]
    fn convergence_report_smoke_and_determinism() {
        let dir1 = tmpdir("conv1");
        let dir2 = tmpdir("conv2");
        let mut cfg = ExperimentConfig::preset(Scenario::Charge, 12345, &dir1);
        cfg.n_steps = 400;
        cfg.n_paths = 1500;
        cfg.lepage_k = 500;
        cfg.scenario = Some(Scenario::Charge); // sizes are free, (a, innov) pinned
        let report = run_convergence(&cfg).unwrap();

        let p = report.prediction.as_ref().expect("symmetric innovations");
        assert!((p.alpha - 0.5).abs() < 1e-12);
        assert!((p.sigma - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((p.mu - 1.0).abs() < 1e-12);
        assert!(report.ks_vs_prediction.is_some());
        assert!(report.ks_vs_lepage.outcome.is_ok());
        assert!(report.ks_vs_cms.is_some());
        assert!(report.ecf.outcome.is_ok());
        assert!(report.hill.outcome.is_ok());
        assert_eq!(report.config_hash, cfg.hash_hex());
        for f in [
            PROCESS_SAMPLES_FILE,
            LEPAGE_SAMPLES_FILE,
            CMS_SAMPLES_FILE,
            REPORT_FILE,
        ] {
            assert!(dir1.join(f).exists(), "missing {f}");
        }

        // identical config in a different directory: byte-identical samples
        let mut cfg2 = cfg.clone();
        cfg2.output_dir = dir2.clone();
        run_convergence(&cfg2).unwrap();
        for f in [PROCESS_SAMPLES_FILE, LEPAGE_SAMPLES_FILE, CMS_SAMPLES_FILE] {
            let x = std::fs::read(dir1.join(f)).unwrap();
            let y = std::fs::read(dir2.join(f)).unwrap();
            assert_eq!(x, y, "{f} differs between identical runs");
        }
        std::fs::remove_dir_all(&dir1).ok();
        std::fs::remove_dir_all(&dir2).ok();
    }

    #[test]
    fn mass_config_reports_fitted_one_sided_reference() {
        let dir = tmpdir("mass");
        let mut cfg = ExperimentConfig::preset(Scenario::Mass, 77, &dir);
        cfg.n_steps = 400;
        cfg.n_paths = 1500;
        cfg.lepage_k = 500;
        let report = run_convergence(&cfg).unwrap();
        assert!(report.prediction.is_none());
        assert!(report.prediction_note.is_some());
        assert!(report.ks_vs_prediction.is_none());
        let cms = report.ks_vs_cms.as_ref().expect("one-sided reference");
        assert!(cms.outcome.is_ok());
        assert!(report.cms_note.unwrap().contains("fitted"));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn zero_innovations_reduce_terminals_to_arrival_power() {
        let dir = tmpdir("degen");
        let mut cfg = ExperimentConfig::new(2.0, InnovationSpec::PointMass { value: 0.0 }, 5, &dir);
        cfg.n_steps = 300;
        cfg.n_paths = 1200;
        cfg.lepage_k = 500;
        let report = run_convergence(&cfg).unwrap();

        // prediction exists (point mass at 0 is symmetric) but has scale 0,
        // so the one-sample comparison must fail rather than fabricate a law
        let p = report.prediction.as_ref().unwrap();
        assert_eq!(p.sigma, 0.0);
        let kp = report.ks_vs_prediction.as_ref().unwrap();
        assert!(!kp.outcome.is_ok());

        // terminals are exactly (G_n/n)^a on the per-path streams
        let samples = read_samples(&dir.join(PROCESS_SAMPLES_FILE)).unwrap();
        for i in [0u64, 1, 7] {
            let mut rng = derive_rng(cfg.seed, StreamPurpose::ProcessPath, i);
            let arr = ArrivalSequence::sample(cfg.n_steps, &mut rng).unwrap();
            let expect = pow_a(arr.last() / cfg.n_steps as f64, cfg.a);
            assert!((samples[i as usize] - expect).abs() <= 1e-15 * expect.abs());
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn risk_zero_claims_surplus_equals_arrival_time() {
        let dir = tmpdir("risk0");
        let mut cfg = ExperimentConfig::new(1.0, InnovationSpec::PointMass { value: 0.0 }, 2, &dir);
        cfg.n_paths = 1;
        let horizon = 50;
        let report = run_risk(&cfg, horizon).unwrap();
        assert_eq!(report.horizon, horizon);

        let text = std::fs::read_to_string(dir.join(RISK_PATHS_FILE)).unwrap();
        let mut rows = 0;
        for line in text.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 4);
            let time: f64 = fields[2].parse().unwrap();
            let surplus: f64 = fields[3].parse().unwrap();
            // X_k = G_k up to the recursion's rounding (two ops per step)
            assert!(
                (time - surplus).abs() <= 1e-13 * time,
                "a=1, zero claims => X_k = G_k; got {surplus} vs {time}"
            );
            rows += 1;
        }
        assert_eq!(rows, cfg.n_paths * horizon);
        std::fs::remove_dir_all(&dir).ok();
    }

    fn risk_medians(cfg: &ExperimentConfig, horizon: usize) -> Vec<f64> {
        run_risk(cfg, horizon).unwrap();
        let text = std::fs::read_to_string(cfg.output_dir.join(RISK_SUMMARY_FILE)).unwrap();
        text.lines()
            .skip(1)
            .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
            .collect()
    }

    #[test]
    fn risk_median_grows_with_step() {
        let dir = tmpdir("riskg");
        let horizon = 60;

        // 100 paths: the growth (drift ≈ +1/step) dominates beyond k=10,
        // but median noise (~0.18/step at this width) allows local dips,
        // so assert the trend over 10-step strides.
        let mut cfg = ExperimentConfig::preset(Scenario::Risk, 6, &dir);
        cfg.n_paths = 100;
        let medians = risk_medians(&cfg, horizon);
        assert_eq!(medians.len(), horizon);
        assert!(medians.iter().all(|m| m.is_finite()));
        for k in 10..horizon {
            assert!(
                medians[k] > medians[k - 10],
                "median trend not increasing at k={k}: {} -> {}",
                medians[k - 10],
                medians[k]
            );
        }
        // median surplus at step k tracks elapsed time ~ k
        assert!((medians[horizon - 1] / horizon as f64 - 1.0).abs() < 0.5);

        // 1000 paths quiet the noise below the drift: strictly increasing
        cfg.n_paths = 1000;
        let medians = risk_medians(&cfg, horizon);
        for k in 10..horizon {
            assert!(
                medians[k] > medians[k - 1],
                "median not increasing at k={k}: {} -> {}",
                medians[k - 1],
                medians[k]
            );
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn risk_rejects_wrong_exponent_and_oversized_export() {
        let cfg = ExperimentConfig::new(2.0, InnovationSpec::GaussianStd, 1, "out");
        assert!(run_risk(&cfg, 10).is_err());

        let mut cfg = ExperimentConfig::preset(Scenario::Risk, 1, "out");
        cfg.n_paths = 200_000;
        assert!(run_risk(&cfg, 1_000).is_err());
    }
}
