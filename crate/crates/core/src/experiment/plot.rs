//! Plot-ready data extraction: histograms, QQ pairs, ECDF overlays.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::stable::StableParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Histogram with Freedman–Diaconis bin width `2·IQR·n^(−1/3)`. Heavy
/// tails can push the FD bin count into the millions, so the width is
/// widened whenever the rule would exceed `max_bins`; identical samples
/// collapse to a single bin.
pub fn histogram_fd(samples: &[f64], max_bins: usize) -> Result<Vec<HistBin>> {
    if samples.is_empty() {
        return Err(invalid("histogram needs non-empty samples"));
    }
    if max_bins == 0 {
        return Err(invalid("max_bins must be >= 1"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let (min, max) = (xs[0], xs[n - 1]);
    if min == max {
        return Ok(vec![HistBin {
            lo: min,
            hi: max,
            count: n,
        }]);
    }
    let iqr = xs[3 * n / 4] - xs[n / 4];
    let width = 2.0 * iqr * (n as f64).powf(-1.0 / 3.0);
    let span = max - min;
    // zero IQR with spread data degenerates the FD rule; fall back to the cap
    let fd_bins = if width > 0.0 {
        (span / width).min(1e9).ceil() as usize
    } else {
        max_bins
    };
    let bins = fd_bins.clamp(1, max_bins);
    let width = span / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in &xs {
        let idx = (((x - min) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistBin {
            lo: min + i as f64 * width,
            hi: if i + 1 == bins {
                max
            } else {
                min + (i + 1) as f64 * width
            },
            count,
        })
        .collect())
}

/// QQ pairs `(model quantile at (i−1/2)/n, i-th order statistic)`.
/// At most `max_points` evenly spaced order statistics are emitted
/// (quantile evaluation is the expensive part); subsetting preserves the
/// pairing, so quantile-transformed input still lands on the diagonal.
pub fn qq_pairs(samples: &[f64], p: &StableParams, max_points: usize) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(invalid("qq needs non-empty samples"));
    }
    if max_points == 0 {
        return Err(invalid("max_points must be >= 1"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let m = max_points.min(n);
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        // even spread over order-statistic indices, endpoints included
        let i = if m == 1 { 0 } else { j * (n - 1) / (m - 1) };
        let q = (i as f64 + 0.5) / n as f64;
        out.push((p.quantile(q)?, xs[i]));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlayRow {
    pub x: f64,
    pub ecdf: f64,
    pub model_cdf: f64,
    /// Pointwise KS contribution `max(i/n − F, F − (i−1)/n)`; the column
    /// maximum equals the one-sample KS statistic.
    pub gap: f64,
}

/// ECDF-vs-model overlay table at every sample point.
pub fn ecdf_overlay(samples: &[f64], p: &StableParams) -> Result<Vec<OverlayRow>> {
    if samples.is_empty() {
        return Err(invalid("ecdf overlay needs non-empty samples"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut out = Vec::with_capacity(xs.len());
    for (i, x) in xs.iter().enumerate() {
        let f = p.cdf(*x)?;
        let hi = (i + 1) as f64 / n;
        let lo = i as f64 / n;
        out.push(OverlayRow {
            x: *x,
            ecdf: hi,
            model_cdf: f,
            gap: (hi - f).max(f - lo),
        });
    }
    Ok(out)
}
