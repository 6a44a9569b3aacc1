//! Browser bindings: JSON-in/JSON-out wrappers around the core library so
//! a static page can simulate paths, sample the limit law, and evaluate
//! stable cdf/pdf curves. Every operation takes an explicit seed, so the
//! page is fully reproducible and no OS entropy is touched.

// `!(a < b)` guards reject NaN, which `a >= b` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::Serialize;
use wasm_bindgen::prelude::*;

use rcar_core::experiment::plot::{histogram_fd, HistBin};
use rcar_core::{
    derive_rng, predict_limit_law, sample_lepage, simulate_recursive, InnovationSpec, LePageConfig,
    Result, StableParams, StreamPurpose,
};

// Size caps keep a single click from freezing the tab.
const MAX_PATHS: usize = 64;
const MAX_STEPS: usize = 20_000;
const MAX_DRAWS: usize = 200_000;
const MAX_GRID: usize = 2001;

fn cap(what: &str, value: usize, max: usize) -> Result<()> {
    if value == 0 || value > max {
        return Err(rcar_core::Error::InvalidArgument(format!(
            "{what} must be in 1..={max}, got {value}"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct PathOut {
    times: Vec<f64>,
    normalized: Vec<f64>,
}

#[derive(Serialize)]
struct PathsOut {
    a: f64,
    innov: String,
    steps: usize,
    paths: Vec<PathOut>,
}

fn paths_impl(a: f64, innov: &str, steps: usize, paths: usize, seed: u64) -> Result<String> {
    cap("steps", steps, MAX_STEPS)?;
    cap("paths", paths, MAX_PATHS)?;
    let innov: InnovationSpec = innov.parse()?;
    let mut out = PathsOut {
        a,
        innov: innov.to_string(),
        steps,
        paths: Vec::with_capacity(paths),
    };
    for i in 0..paths as u64 {
        let mut rng = derive_rng(seed, StreamPurpose::ProcessPath, i);
        let p = simulate_recursive(a, steps, innov, &mut rng)?;
        out.paths.push(PathOut {
            times: p.arrivals.times().to_vec(),
            normalized: p.normalized,
        });
    }
    Ok(serde_json::to_string(&out)?)
}

#[derive(Serialize)]
struct BinOut {
    lo: f64,
    hi: f64,
    count: usize,
    density: f64,
}

#[derive(Serialize)]
struct CurvePoint {
    x: f64,
    pdf: f64,
}

#[derive(Serialize)]
struct LimitStudyOut {
    a: f64,
    innov: String,
    draws: usize,
    clipped: usize,
    bins: Vec<BinOut>,
    prediction: Option<PredictionOut>,
    prediction_note: Option<String>,
    curve: Vec<CurvePoint>,
}

#[derive(Serialize)]
struct PredictionOut {
    alpha: f64,
    beta: f64,
    sigma: f64,
    mu: f64,
}

fn densify(bins: &[HistBin], total: usize) -> Vec<BinOut> {
    bins.iter()
        .map(|b| BinOut {
            lo: b.lo,
            hi: b.hi,
            count: b.count,
            density: if b.hi > b.lo {
                b.count as f64 / (total as f64 * (b.hi - b.lo))
            } else {
                0.0
            },
        })
        .collect()
}

/// Histogram of truncated-series limit draws over the central 98% of the
/// sample (stable tails would otherwise stretch the axis by orders of
/// magnitude), with the predicted stable density when the limit theorem's
/// hypotheses hold.
fn limit_study_impl(
    a: f64,
    innov: &str,
    truncation_k: usize,
    draws: usize,
    seed: u64,
    max_bins: usize,
) -> Result<String> {
    cap("draws", draws, MAX_DRAWS)?;
    cap("max_bins", max_bins, 512)?;
    let innov: InnovationSpec = innov.parse()?;
    let cfg = LePageConfig::new(a, innov, truncation_k)?;
    let mut samples: Vec<f64> = (0..draws as u64)
        .map(|i| {
            let mut rng = derive_rng(seed, StreamPurpose::LePage, i);
            1.0 + sample_lepage(&cfg, &mut rng)
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    let (lo_i, hi_i) = (n / 100, n - 1 - n / 100);
    let central = &samples[lo_i..=hi_i];

    let bins = histogram_fd(central, max_bins)?;
    let clipped = n - central.len();

    let (prediction, prediction_note) = match predict_limit_law(a, innov) {
        Ok(p) => (
            Some(PredictionOut {
                alpha: p.alpha,
                beta: p.beta,
                sigma: p.sigma,
                mu: p.mu,
            }),
            None,
        ),
        Err(e) => (None, Some(e.to_string())),
    };

    // density overlay on the histogram's own support
    let mut curve = Vec::new();
    if let Some(pred) = &prediction {
        let law = StableParams::new(pred.alpha, pred.beta, pred.sigma, pred.mu)?;
        let (lo, hi) = (bins[0].lo, bins[bins.len() - 1].hi);
        let pts = 161;
        for i in 0..pts {
            let x = lo + (hi - lo) * i as f64 / (pts - 1) as f64;
            curve.push(CurvePoint {
                x,
                pdf: law.pdf(x)?,
            });
        }
    }

    let out = LimitStudyOut {
        a,
        innov: innov.to_string(),
        draws,
        clipped,
        bins: densify(&bins, n),
        prediction,
        prediction_note,
        curve,
    };
    Ok(serde_json::to_string(&out)?)
}

#[derive(Serialize)]
struct StableCurveOut {
    alpha: f64,
    beta: f64,
    sigma: f64,
    mu: f64,
    x: Vec<f64>,
    cdf: Vec<f64>,
    pdf: Vec<f64>,
}

fn stable_curve_impl(
    alpha: f64,
    beta: f64,
    sigma: f64,
    mu: f64,
    from: f64,
    to: f64,
    points: usize,
) -> Result<String> {
    cap("points", points, MAX_GRID)?;
    if points < 2 || !(from < to) {
        return Err(rcar_core::Error::InvalidArgument(
            "need from < to and points >= 2".into(),
        ));
    }
    let law = StableParams::new(alpha, beta, sigma, mu)?;
    let mut out = StableCurveOut {
        alpha,
        beta,
        sigma,
        mu,
        x: Vec::with_capacity(points),
        cdf: Vec::with_capacity(points),
        pdf: Vec::with_capacity(points),
    };
    let step = (to - from) / (points - 1) as f64;
    for i in 0..points {
        let x = from + i as f64 * step;
        out.x.push(x);
        out.cdf.push(law.cdf(x)?);
        out.pdf.push(law.pdf(x)?);
    }
    Ok(serde_json::to_string(&out)?)
}

fn to_js<T>(r: Result<T>) -> std::result::Result<T, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Normalized process trajectories `X_k / k^a` with their arrival times.
#[wasm_bindgen]
pub fn simulate_paths_json(
    a: f64,
    innov: &str,
    steps: usize,
    paths: usize,
    seed: u64,
) -> std::result::Result<String, JsValue> {
    to_js(paths_impl(a, innov, steps, paths, seed))
}

/// Truncated-series draws of the limit law, histogrammed, with the
/// predicted stable density overlay when available.
#[wasm_bindgen]
pub fn limit_study_json(
    a: f64,
    innov: &str,
    truncation_k: usize,
    draws: usize,
    seed: u64,
    max_bins: usize,
) -> std::result::Result<String, JsValue> {
    to_js(limit_study_impl(
        a,
        innov,
        truncation_k,
        draws,
        seed,
        max_bins,
    ))
}

/// Stable cdf and pdf on a uniform grid.
#[wasm_bindgen]
pub fn stable_curve_json(
    alpha: f64,
    beta: f64,
    sigma: f64,
    mu: f64,
    from: f64,
    to: f64,
    points: usize,
) -> std::result::Result<String, JsValue> {
    to_js(stable_curve_impl(alpha, beta, sigma, mu, from, to, points))
}
