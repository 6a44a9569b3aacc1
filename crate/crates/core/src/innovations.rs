//! Innovation distributions for the autoregressive recursion.
//!
//! The innovation sequence is i.i.d. and independent of the arrival
//! process. Each built-in family reports its fractional absolute moment
//! `E|eps|^p` for `p` in (0, 2) in closed form:
//!
//! - rademacher: 1
//! - gaussian_std: `2^(p/2) Gamma((p+1)/2) / sqrt(pi)`
//! - uniform_sym(h): `h^p / (p + 1)`
//! - exponential_pos(rate): `Gamma(1 + p) / rate^p`
//! - point_mass(v): `|v|^p`
//!
//! A Monte Carlo fallback ([`fractional_abs_moment_mc`]) exists for
//! cross-checks and for any future family without a closed form.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Result};
use crate::rng::exp_draw;

/// Innovation distribution family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum InnovationSpec {
    /// +1 or -1 with equal probability.
    Rademacher,
    /// Standard normal.
    GaussianStd,
    /// Uniform on (-half_width, half_width).
    UniformSym { half_width: f64 },
    /// Exponential with the given rate; strictly positive support.
    ExponentialPos { rate: f64 },
    /// Deterministic value (no randomness consumed).
    PointMass { value: f64 },
}

impl InnovationSpec {
    /// Validate family parameters.
    pub fn validate(&self) -> Result<()> {
        match *self {
            InnovationSpec::UniformSym { half_width } if !(half_width > 0.0) => Err(invalid(
                format!("uniform_sym half_width must be > 0, got {half_width}"),
            )),
            InnovationSpec::ExponentialPos { rate } if !(rate > 0.0) => Err(invalid(format!(
                "exponential_pos rate must be > 0, got {rate}"
            ))),
            InnovationSpec::PointMass { value } if !value.is_finite() => {
                Err(invalid("point_mass value must be finite"))
            }
            _ => Ok(()),
        }
    }

    /// Whether the distribution is symmetric about 0. The degenerate
    /// point mass at 0 counts as symmetric; any other point mass does not.
    pub fn is_symmetric(&self) -> bool {
        match *self {
            InnovationSpec::Rademacher
            | InnovationSpec::GaussianStd
            | InnovationSpec::UniformSym { .. } => true,
            InnovationSpec::ExponentialPos { .. } => false,
            InnovationSpec::PointMass { value } => value == 0.0,
        }
    }

    /// Whether every draw is strictly positive (makes the series limit
    /// one-sided above its location).
    pub fn is_strictly_positive(&self) -> bool {
        match *self {
            InnovationSpec::ExponentialPos { .. } => true,
            InnovationSpec::PointMass { value } => value > 0.0,
            _ => false,
        }
    }

    /// One draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            InnovationSpec::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            InnovationSpec::GaussianStd => rng.sample(StandardNormal),
            InnovationSpec::UniformSym { half_width } => {
                half_width * (2.0 * rng.gen::<f64>() - 1.0)
            }
            InnovationSpec::ExponentialPos { rate } => exp_draw(rng) / rate,
            InnovationSpec::PointMass { value } => value,
        }
    }

    /// Closed-form `E|eps|^p` for `p` in (0, 2).
    pub fn fractional_abs_moment(&self, p: f64) -> Result<f64> {
        if !(0.0 < p && p < 2.0) {
            return Err(invalid(format!(
                "moment order p must lie in (0,2), got {p}"
            )));
        }
        self.validate()?;
        Ok(match *self {
            InnovationSpec::Rademacher => 1.0,
            InnovationSpec::GaussianStd => {
                2f64.powf(p / 2.0) * gamma((p + 1.0) / 2.0) / std::f64::consts::PI.sqrt()
            }
            InnovationSpec::UniformSym { half_width } => half_width.powf(p) / (p + 1.0),
            InnovationSpec::ExponentialPos { rate } => gamma(1.0 + p) / rate.powf(p),
            InnovationSpec::PointMass { value } => value.abs().powf(p),
        })
    }

    /// Monte Carlo estimate of `E|eps|^p` with its standard error.
    /// Fallback/cross-check for the closed forms above.
    pub fn fractional_abs_moment_mc<R: Rng + ?Sized>(
        &self,
        p: f64,
        n: usize,
        rng: &mut R,
    ) -> Result<(f64, f64)> {
        if !(0.0 < p && p < 2.0) {
            return Err(invalid(format!(
                "moment order p must lie in (0,2), got {p}"
            )));
        }
        if n < 2 {
            return Err(invalid("Monte Carlo moment needs n >= 2"));
        }
        self.validate()?;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let v = self.sample(rng).abs().powf(p);
            sum += v;
            sumsq += v * v;
        }
        let nf = n as f64;
        let mean = sum / nf;
        let var = (sumsq / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
        Ok((mean, (var / nf).sqrt()))
    }
}

impl std::fmt::Display for InnovationSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            InnovationSpec::Rademacher => write!(f, "rademacher"),
            InnovationSpec::GaussianStd => write!(f, "gaussian_std"),
            InnovationSpec::UniformSym { half_width } => write!(f, "uniform_sym({half_width})"),
            InnovationSpec::ExponentialPos { rate } => write!(f, "exponential_pos({rate})"),
            InnovationSpec::PointMass { value } => write!(f, "point_mass({value})"),
        }
    }
}

impl std::str::FromStr for InnovationSpec {
    type Err = crate::error::Error;

    /// Compact flag syntax: `rademacher`, `gaussian`, `uniform:W`,
    /// `exponential:RATE`, `point:V`. Long family names also accepted.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let num = || -> Result<f64> {
            let raw = arg.ok_or_else(|| {
                invalid(format!(
                    "innovation {name} needs a parameter, e.g. {name}:1.0"
                ))
            })?;
            raw.trim()
                .parse()
                .map_err(|e| invalid(format!("bad innovation parameter {raw:?}: {e}")))
        };
        let spec = match name {
            "rademacher" => InnovationSpec::Rademacher,
            "gaussian" | "gaussian_std" => InnovationSpec::GaussianStd,
            "uniform" | "uniform_sym" => InnovationSpec::UniformSym { half_width: num()? },
            "exponential" | "exponential_pos" => InnovationSpec::ExponentialPos { rate: num()? },
            "point" | "point_mass" => InnovationSpec::PointMass { value: num()? },
            other => return Err(invalid(format!("unknown innovation family {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}
