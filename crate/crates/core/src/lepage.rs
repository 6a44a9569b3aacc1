//! The series limit of the normalized process and its predicted stable law.
//!
//! `X_n/n^a → (G_n/n)^a (1 + Σ_k ε_k/G_k^a)` and the arrival LLN kill the
//! prefactor, so the limit is `1 + Z` with `Z = Σ_{k≥1} ε_k/G_k^a`. For
//! symmetric innovations with `E|ε|^α < ∞` (α = 1/a) the limit law is
//!
//! ```text
//! S(α, 0, σ, 1)   with   σ = (E|ε|^α / c_α)^a,
//! c_α = (1−α) / (Γ(2−α) cos(πα/2)),   c_1 = 2/π.
//! ```
//!
//! Sampling truncates the series at K terms with a fresh arrival sequence
//! per draw; reusing arrivals across draws would correlate the samples.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::innovations::InnovationSpec;
use crate::process::validate_exponent;
use crate::rng::{derive_rng, exp_draw, pow_a, StreamPurpose};
use crate::stable::StableParams;
use rand::Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `c_α = (1−α)/(Γ(2−α) cos(πα/2))`, continuously extended by
/// `c_1 = 2/π`. Evaluated as `δ/(Γ(1+δ) sin(πδ/2))` with `δ = 1−α`,
/// which is exact at the removable singularity and loses no precision
/// near it (both vanishing factors are computed directly, not by
/// cancellation).
pub fn c_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(invalid(format!(
            "c_alpha defined for alpha in (0,2), got {alpha}"
        )));
    }
    let delta = 1.0 - alpha;
    if delta == 0.0 {
        return Ok(2.0 / PI);
    }
    Ok(delta / (gamma(1.0 + delta) * (PI * delta / 2.0).sin()))
}

/// Predicted limit law for the normalized process: index, skewness,
/// scale, and location, along with the ingredients they came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitLawPrediction {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub mu: f64,
    pub c_alpha: f64,
    pub frac_moment: f64,
}

impl LimitLawPrediction {
    /// The predicted law as distribution parameters. Fails when the
    /// innovation's fractional moment is zero (point mass at 0), where
    /// the limit degenerates to the constant 1.
    pub fn params(&self) -> Result<StableParams> {
        StableParams::new(self.alpha, self.beta, self.sigma, self.mu)
    }
}

/// Predicted stable parameters of the limit `1 + Z`: α = 1/a, β = 0,
/// μ = 1, σ = (E|ε|^α / c_α)^a. Requires a symmetric innovation law;
/// skewed innovations still have a stable limit but its parameters are
/// estimated empirically, not predicted here.
pub fn predict_limit_law(a: f64, innov: InnovationSpec) -> Result<LimitLawPrediction> {
    validate_exponent(a)?;
    innov.validate()?;
    if !innov.is_symmetric() {
        return Err(Error::LimitHypothesis {
            detail: format!(
                "prediction requires a symmetric innovation law, got {innov}; \
                 fit the skewed limit empirically instead"
            ),
        });
    }
    let alpha = 1.0 / a;
    let c = c_alpha(alpha)?;
    let frac_moment = innov.fractional_abs_moment(alpha)?;
    let sigma = (frac_moment / c).powf(a);
    Ok(LimitLawPrediction {
        alpha,
        beta: 0.0,
        sigma,
        mu: 1.0,
        c_alpha: c,
        frac_moment,
    })
}

/// Truncated-series sampling configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LePageConfig {
    a: f64,
    alpha: f64,
    truncation_k: usize,
    innov: InnovationSpec,
    /// Tail tolerance the truncation was sized for, when one was requested.
    tail_tolerance: Option<f64>,
}

/// Smallest K the default truncation rule accepts for a requested tail
/// tolerance: `max(10^4, ceil(tol^(−1/(a−1/2))))`. Heuristic from the
/// tail variance `Σ_{k>K} E ε² k^(−2a) ≍ K^(1−2a)`; it assumes a finite
/// second innovation moment, which is stronger than the limit theorem
/// needs but holds for every built-in family.
pub fn required_truncation(a: f64, tol: f64) -> Result<usize> {
    validate_exponent(a)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(invalid(format!(
            "tail tolerance must lie in (0,1), got {tol}"
        )));
    }
    let k = tol.powf(-1.0 / (a - 0.5));
    if !k.is_finite() || k > 1e9 {
        return Err(Error::Truncation {
            detail: format!("tolerance {tol} needs K ≈ {k:.3e} terms at a={a}; not feasible"),
        });
    }
    Ok((k.ceil() as usize).max(10_000))
}

impl LePageConfig {
    /// Explicit truncation; K ≥ 100.
    pub fn new(a: f64, innov: InnovationSpec, truncation_k: usize) -> Result<Self> {
        validate_exponent(a)?;
        innov.validate()?;
        if truncation_k < 100 {
            return Err(invalid(format!(
                "truncation K must be >= 100, got {truncation_k}"
            )));
        }
        Ok(LePageConfig {
            a,
            alpha: 1.0 / a,
            truncation_k,
            innov,
            tail_tolerance: None,
        })
    }

    /// Truncation sized by the default rule for `tol`.
    pub fn for_tail_tolerance(a: f64, innov: InnovationSpec, tol: f64) -> Result<Self> {
        let k = required_truncation(a, tol)?;
        let mut cfg = Self::new(a, innov, k)?;
        cfg.tail_tolerance = Some(tol);
        Ok(cfg)
    }

    /// Explicit truncation checked against a requested tolerance.
    pub fn new_checked(
        a: f64,
        innov: InnovationSpec,
        truncation_k: usize,
        tol: f64,
    ) -> Result<Self> {
        let needed = required_truncation(a, tol)?;
        if truncation_k < needed {
            return Err(Error::Truncation {
                detail: format!(
                    "K={truncation_k} is below the {needed} terms required for tail tolerance {tol} at a={a}"
                ),
            });
        }
        let mut cfg = Self::new(a, innov, truncation_k)?;
        cfg.tail_tolerance = Some(tol);
        Ok(cfg)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn truncation_k(&self) -> usize {
        self.truncation_k
    }
    pub fn innovations(&self) -> InnovationSpec {
        self.innov
    }

    /// Closed-form prediction of this configuration's limit law.
    pub fn prediction(&self) -> Result<LimitLawPrediction> {
        predict_limit_law(self.a, self.innov)
    }
}

/// One draw of the truncated series `Σ_{k=1}^K ε_k/G_k^a` on a fresh
/// arrival sequence. Stream order per term: arrival increment, then
/// innovation — the same interleaving the process simulator uses.
pub fn sample_lepage<R: Rng + ?Sized>(cfg: &LePageConfig, rng: &mut R) -> f64 {
    let mut g = 0.0;
    let mut sum = 0.0;
    for _ in 0..cfg.truncation_k {
        g += exp_draw(rng);
        let eps = cfg.innov.sample(rng);
        sum += eps / pow_a(g, cfg.a);
    }
    sum
}

/// One draw of the full limit `1 + Z`.
pub fn sample_limit<R: Rng + ?Sized>(cfg: &LePageConfig, rng: &mut R) -> f64 {
    1.0 + sample_lepage(cfg, rng)
}

/// `n` limit draws on derived per-draw streams: draw `i` always sees the
/// stream `(root_seed, i)` no matter how many workers run, so output is
/// independent of parallelism and identical with the feature disabled.
pub fn sample_limit_batch(cfg: &LePageConfig, n: usize, root_seed: u64) -> Vec<f64> {
    let draw = |i: u64| {
        let mut rng = derive_rng(root_seed, StreamPurpose::LePage, i);
        sample_limit(cfg, &mut rng)
    };
    #[cfg(feature = "parallel")]
    {
        (0..n as u64).into_par_iter().map(draw).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n as u64).map(draw).collect()
    }
}
