//! The random-coefficient autoregression over Poisson arrival times.
//!
//! With `G_1 < G_2 < ...` the arrival times of a unit-intensity Poisson
//! process and `eps_k` i.i.d. innovations independent of the arrivals,
//! the process is
//!
//! ```text
//! X_0 = 1,   X_k = (G_k / G_{k-1})^a X_{k-1} + eps_k,   a > 1/2,
//! ```
//!
//! which unrolls to the closed form
//!
//! ```text
//! X_n / n^a = (G_n / n)^a (1 + sum_{k=1}^n eps_k / G_k^a).
//! ```
//!
//! Conventions pinned here and relied on everywhere else:
//!
//! - `G_0 := 1`. The recursion needs a value at k=1 and only `G_0 = 1`
//!   makes the unrolled form above hold exactly; see the crate README.
//! - Draw interleaving: at step k the exponential increment is drawn
//!   first, then `eps_k`. Both simulators consume the stream through the
//!   same routine, so a (seed, config) pair fixes the path bit-for-bit.
//! - The exponent is validated strictly above 1/2 (margin 1e-12) so the
//!   induced stability index `1/a` stays inside (0, 2).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::innovations::InnovationSpec;
use crate::rng::{exp_draw, pow_a};

/// Margin above 1/2 required of the exponent `a`.
pub const MIN_EXPONENT_MARGIN: f64 = 1e-12;

pub(crate) fn validate_exponent(a: f64) -> Result<()> {
    if !a.is_finite() || a <= 0.5 + MIN_EXPONENT_MARGIN {
        return Err(invalid(format!("exponent a must be > 1/2, got {a}")));
    }
    Ok(())
}

/// Arrival times `G_1 < G_2 < ... < G_n` of a unit-intensity Poisson
/// process: cumulative sums of i.i.d. unit exponentials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalSequence {
    times: Vec<f64>,
}

impl ArrivalSequence {
    /// Draw `n >= 1` arrivals from `rng` (one uniform per increment,
    /// inversion sampling).
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(invalid("arrival count n must be >= 1"));
        }
        let mut times = Vec::with_capacity(n);
        let mut g = 0.0;
        for _ in 0..n {
            g += exp_draw(rng);
            times.push(g);
        }
        Ok(ArrivalSequence { times })
    }

    /// Rebuild from raw exponential increments (used by IO round trips).
    pub fn from_increments(increments: &[f64]) -> Result<Self> {
        if increments.is_empty() {
            return Err(invalid("increment list must be non-empty"));
        }
        if increments.iter().any(|&e| !(e > 0.0)) {
            return Err(invalid("all increments must be positive"));
        }
        let mut g = 0.0;
        Ok(ArrivalSequence {
            times: increments
                .iter()
                .map(|&e| {
                    g += e;
                    g
                })
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Last arrival time `G_n`.
    pub fn last(&self) -> f64 {
        *self.times.last().expect("non-empty by construction")
    }

    /// The raw exponential increments `G_k - G_{k-1}` (with `G_0 = 0`
    /// for the first increment; the process convention `G_0 = 1` is a
    /// property of the recursion, not of the arrival sequence).
    pub fn increments(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.times
            .iter()
            .map(|&t| {
                let d = t - prev;
                prev = t;
                d
            })
            .collect()
    }
}

/// One realization of the process together with its arrivals.
///
/// `raw` holds `X_0..X_n`; `normalized[k-1]` holds `X_k / k^a` for
/// `k = 1..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessPath {
    pub a: f64,
    pub arrivals: ArrivalSequence,
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
}

impl ProcessPath {
    /// Terminal normalized value `X_n / n^a`.
    pub fn terminal(&self) -> f64 {
        *self.normalized.last().expect("n >= 1")
    }
}

/// Draw the step inputs in the pinned interleaving: per step, first the
/// arrival increment, then the innovation.
fn draw_step_inputs<R: Rng + ?Sized>(
    n: usize,
    innov: InnovationSpec,
    rng: &mut R,
) -> (ArrivalSequence, Vec<f64>) {
    let mut times = Vec::with_capacity(n);
    let mut eps = Vec::with_capacity(n);
    let mut g = 0.0;
    for _ in 0..n {
        g += exp_draw(rng);
        times.push(g);
        eps.push(innov.sample(rng));
    }
    (ArrivalSequence { times }, eps)
}

fn validate_sim_args(a: f64, n: usize, innov: InnovationSpec) -> Result<()> {
    validate_exponent(a)?;
    innov.validate()?;
    if n == 0 {
        return Err(invalid("step count n must be >= 1"));
    }
    Ok(())
}

/// Simulate by the recursion `X_k = (G_k/G_{k-1})^a X_{k-1} + eps_k`
/// with `X_0 = 1` and `G_0 = 1`.
pub fn simulate_recursive<R: Rng + ?Sized>(
    a: f64,
    n: usize,
    innov: InnovationSpec,
    rng: &mut R,
) -> Result<ProcessPath> {
    validate_sim_args(a, n, innov)?;
    let (arrivals, eps) = draw_step_inputs(n, innov, rng);
    let mut raw = Vec::with_capacity(n + 1);
    raw.push(1.0);
    let mut x = 1.0;
    let mut g_prev = 1.0; // G_0 convention
    for (&g, &e) in arrivals.times.iter().zip(&eps) {
        x = pow_a(g / g_prev, a) * x + e;
        raw.push(x);
        g_prev = g;
    }
    let normalized = (1..=n).map(|k| raw[k] / pow_a(k as f64, a)).collect();
    Ok(ProcessPath {
        a,
        arrivals,
        raw,
        normalized,
    })
}

/// Simulate by the unrolled closed form
/// `X_k / k^a = (G_k/k)^a (1 + sum_{j<=k} eps_j / G_j^a)`,
/// consuming the stream exactly as [`simulate_recursive`] does.
pub fn simulate_closed_form<R: Rng + ?Sized>(
    a: f64,
    n: usize,
    innov: InnovationSpec,
    rng: &mut R,
) -> Result<ProcessPath> {
    validate_sim_args(a, n, innov)?;
    let (arrivals, eps) = draw_step_inputs(n, innov, rng);
    let mut raw = Vec::with_capacity(n + 1);
    let mut normalized = Vec::with_capacity(n);
    raw.push(1.0);
    let mut series = 0.0; // sum_{j<=k} eps_j / G_j^a
    for k in 1..=n {
        let g = arrivals.times[k - 1];
        let ga = pow_a(g, a);
        series += eps[k - 1] / ga;
        let x = ga * (1.0 + series);
        raw.push(x);
        normalized.push(pow_a(g / k as f64, a) * (1.0 + series));
    }
    Ok(ProcessPath {
        a,
        arrivals,
        raw,
        normalized,
    })
}

/// Terminal normalized value `X_n / n^a` only, consuming the stream
/// exactly as the full simulators do but in O(1) memory. Uses the
/// unrolled form; agreement with the recursion is covered by tests.
pub fn simulate_terminal<R: Rng + ?Sized>(
    a: f64,
    n: usize,
    innov: InnovationSpec,
    rng: &mut R,
) -> Result<f64> {
    validate_sim_args(a, n, innov)?;
    let mut g = 0.0;
    let mut series = 0.0;
    for _ in 0..n {
        g += exp_draw(rng);
        series += innov.sample(rng) / pow_a(g, a);
    }
    Ok(pow_a(g / n as f64, a) * (1.0 + series))
}

/// Sample mean and standard error of `(G_n / n)^a` across paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlnSummary {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
    pub paths: usize,
}

/// Law-of-large-numbers diagnostic: `(G_n/n)^a -> 1`. All sequences must
/// share the same `n >= 100`.
pub fn lln_diagnostic(sequences: &[ArrivalSequence], a: f64) -> Result<LlnSummary> {
    validate_exponent(a)?;
    if sequences.is_empty() {
        return Err(invalid(
            "lln_diagnostic needs at least one arrival sequence",
        ));
    }
    let n = sequences[0].len();
    if n < 100 {
        return Err(invalid(format!(
            "lln_diagnostic needs sequences of length >= 100, got {n}"
        )));
    }
    if sequences.iter().any(|s| s.len() != n) {
        return Err(invalid("all arrival sequences must have equal length"));
    }
    let paths = sequences.len();
    let values: Vec<f64> = sequences
        .iter()
        .map(|s| pow_a(s.last() / n as f64, a))
        .collect();
    let mean = values.iter().sum::<f64>() / paths as f64;
    let var = if paths > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (paths as f64 - 1.0)
    } else {
        0.0
    };
    Ok(LlnSummary {
        mean,
        stderr: (var / paths as f64).sqrt(),
        n,
        paths,
    })
}
