//! Random-coefficient autoregression over Poisson arrivals.
//!
//! The process starts at `X_0 = 1` and evolves as
//! `X_n = (G_n / G_{n-1})^a X_{n-1} + eps_n`, where `G_1 < G_2 < ...` are
//! the arrival times of a unit-rate Poisson process (`G_0 := 1` by
//! convention) and the innovations `eps_n` are i.i.d. For `a > 1/2` the
//! normalized value `X_n / n^a` converges in distribution to `1 + Z`, where
//! `Z = sum_k eps_k / G_k^a` is a stable random variable of index
//! `alpha = 1/a`; for symmetric innovations with finite fractional moment
//! `E|eps|^alpha` the limit is `S(alpha, 0, sigma, 1)` with
//! `sigma = (E|eps|^alpha / c_alpha)^a`.
//!
//! The crate provides, layer by layer:
//!
//! - [`process`]: exact simulation of the recursion, its unrolled closed
//!   form, and arrival-time diagnostics;
//! - [`lepage`]: the normalizing constant `c_alpha`, the predicted limit
//!   law, and truncated-series sampling of the limit itself;
//! - [`stable`]: the stable family `S(alpha, beta, sigma, mu)` — exact
//!   draws, characteristic function, and numeric cdf/pdf/quantile;
//! - [`inference`]: index/scale estimation from samples and
//!   goodness-of-fit tests;
//! - [`experiment`]: the seeded, worker-count-independent harness that
//!   ties everything into reproducible reports and CSV artifacts.
//!
//! All randomness flows through explicit [`rand::Rng`] handles; batch
//! drivers derive one substream per work item from a root seed (see
//! [`rng`]), so every result in this crate is reproducible bit-for-bit
//! regardless of thread count.

// Validation guards use `!(x > 0.0)`-style negations on purpose: unlike
// `x <= 0.0`, they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod inference;
pub mod innovations;
pub mod lepage;
pub mod process;
pub mod rng;
pub mod stable;

pub use error::{Error, Result};
pub use experiment::{
    run_convergence, run_risk, simulate_terminal_batch, stable_sample_batch, ConvergenceReport,
    ExperimentConfig, RiskReport, Scenario,
};
pub use inference::{
    ecf_fit_symmetric, fit_one_sided_scale, hill_default_k, hill_estimator, ks_one_sample,
    ks_two_sample, EcfFit, GofReport,
};
pub use innovations::InnovationSpec;
pub use lepage::{
    c_alpha, predict_limit_law, required_truncation, sample_lepage, sample_limit,
    sample_limit_batch, LePageConfig, LimitLawPrediction,
};
pub use process::{
    lln_diagnostic, simulate_closed_form, simulate_recursive, simulate_terminal, ArrivalSequence,
    LlnSummary, ProcessPath,
};
pub use rng::{derive_rng, exp_draw, stream_label, StreamPurpose};
pub use stable::StableParams;
