//! Probability kernels used by every likelihood in the crate.
//!
//! Every family exposes its log-density, log-CDF, the left limit `F(y⁻)`,
//! the log survival function and the log-probability of a closed interval.
//! Discrete families live on the integers; a non-integer argument to the CDF
//! is floored, and the left limit at `y` is `F(⌈y⌉ - 1)`.

mod link;
pub mod special;
mod truncated;

use std::f64::consts::{FRAC_2_PI, LN_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::beta::{beta_reg, ln_beta};

pub use link::{clamp_probability, Link, PROBABILITY_CLAMP};

use crate::error::{Error, Result};
use special::{ln_choose, log1mexp, log_ndtr, log_sum_exp, LN_SQRT_2PI};

/// A parametric outcome or prior distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum DistributionFamily {
    Exponential {
        rate: f64,
    },
    /// Normal parameterised by precision, as in BUGS-style model code.
    Normal {
        mean: f64,
        precision: f64,
    },
    Binomial {
        trials: u64,
        prob: f64,
    },
    Beta {
        alpha: f64,
        beta: f64,
    },
    /// Half-Cauchy on `[0, ∞)`; used as a prior on standard deviations.
    HalfCauchy {
        scale: f64,
    },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl DistributionFamily {
    pub fn exponential(rate: f64) -> Result<Self> {
        let d = DistributionFamily::Exponential { rate };
        d.validate()?;
        Ok(d)
    }

    pub fn normal(mean: f64, precision: f64) -> Result<Self> {
        let d = DistributionFamily::Normal { mean, precision };
        d.validate()?;
        Ok(d)
    }

    pub fn binomial(trials: u64, prob: f64) -> Result<Self> {
        let d = DistributionFamily::Binomial { trials, prob };
        d.validate()?;
        Ok(d)
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        let d = DistributionFamily::Beta { alpha, beta };
        d.validate()?;
        Ok(d)
    }

    pub fn half_cauchy(scale: f64) -> Result<Self> {
        let d = DistributionFamily::HalfCauchy { scale };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionFamily::Exponential { rate } => positive("rate", rate),
            DistributionFamily::Normal { mean, precision } => {
                if !mean.is_finite() {
                    return Err(Error::ParameterDomain(format!(
                        "mean must be finite, got {mean}"
                    )));
                }
                positive("precision", precision)
            }
            DistributionFamily::Binomial { trials, prob } => {
                if trials == 0 {
                    return Err(Error::ParameterDomain("trials must be at least 1".into()));
                }
                if (0.0..=1.0).contains(&prob) {
                    Ok(())
                } else {
                    Err(Error::ParameterDomain(format!(
                        "prob must lie in [0, 1], got {prob}"
                    )))
                }
            }
            DistributionFamily::Beta { alpha, beta } => {
                positive("alpha", alpha)?;
                positive("beta", beta)
            }
            DistributionFamily::HalfCauchy { scale } => positive("scale", scale),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, DistributionFamily::Binomial { .. })
    }

    /// Natural log of the density (or mass). Points outside the support give `-∞`.
    pub fn log_pdf(&self, y: f64) -> Result<f64> {
        self.validate()?;
        if y.is_nan() {
            return Err(Error::ParameterDomain("evaluation point is NaN".into()));
        }
        Ok(match *self {
            DistributionFamily::Exponential { rate } => {
                if y < 0.0 || y.is_infinite() {
                    f64::NEG_INFINITY
                } else {
                    rate.ln() - rate * y
                }
            }
            DistributionFamily::Normal { mean, precision } => {
                let d = y - mean;
                0.5 * precision.ln() - LN_SQRT_2PI - 0.5 * precision * d * d
            }
            DistributionFamily::Binomial { trials, prob } => {
                if y < 0.0 || y > trials as f64 || y.fract() != 0.0 {
                    f64::NEG_INFINITY
                } else {
                    binomial_ln_pmf(trials, prob, y as u64)
                }
            }
            DistributionFamily::Beta { alpha, beta } => {
                if !(0.0..=1.0).contains(&y) {
                    f64::NEG_INFINITY
                } else {
                    let a = if alpha == 1.0 {
                        0.0
                    } else {
                        (alpha - 1.0) * y.ln()
                    };
                    let b = if beta == 1.0 {
                        0.0
                    } else {
                        (beta - 1.0) * (-y).ln_1p()
                    };
                    a + b - ln_beta(alpha, beta)
                }
            }
            DistributionFamily::HalfCauchy { scale } => {
                if y < 0.0 || y.is_infinite() {
                    f64::NEG_INFINITY
                } else {
                    let r = y / scale;
                    LN_2 - (PI * scale).ln() - (r * r).ln_1p()
                }
            }
        })
    }

    /// `ln P(Y ≤ y)`.
    pub fn log_cdf(&self, y: f64) -> Result<f64> {
        self.validate()?;
        if y.is_nan() {
            return Err(Error::ParameterDomain("evaluation point is NaN".into()));
        }
        if y == f64::INFINITY {
            return Ok(0.0);
        }
        if y == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(match *self {
            DistributionFamily::Exponential { rate } => {
                if y <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    log1mexp(-rate * y)
                }
            }
            DistributionFamily::Normal { mean, precision } => {
                log_ndtr((y - mean) * precision.sqrt())
            }
            DistributionFamily::Binomial { trials, prob } => {
                binomial_log_cdf(trials, prob, y.floor())
            }
            DistributionFamily::Beta { alpha, beta } => {
                if y <= 0.0 {
                    f64::NEG_INFINITY
                } else if y >= 1.0 {
                    0.0
                } else {
                    beta_reg(alpha, beta, y).ln()
                }
            }
            DistributionFamily::HalfCauchy { scale } => {
                if y <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    (FRAC_2_PI * (y / scale).atan()).ln()
                }
            }
        })
    }

    /// `ln P(Y > y)`, i.e. `ln(1 - F(y))`, evaluated without cancellation.
    pub fn log_ccdf(&self, y: f64) -> Result<f64> {
        self.validate()?;
        if y.is_nan() {
            return Err(Error::ParameterDomain("evaluation point is NaN".into()));
        }
        if y == f64::INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        if y == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        Ok(match *self {
            DistributionFamily::Exponential { rate } => {
                if y <= 0.0 {
                    0.0
                } else {
                    -rate * y
                }
            }
            DistributionFamily::Normal { mean, precision } => {
                log_ndtr(-(y - mean) * precision.sqrt())
            }
            DistributionFamily::Binomial { trials, prob } => {
                binomial_log_ccdf(trials, prob, y.floor())
            }
            DistributionFamily::Beta { alpha, beta } => {
                if y <= 0.0 {
                    0.0
                } else if y >= 1.0 {
                    f64::NEG_INFINITY
                } else {
                    beta_reg(beta, alpha, 1.0 - y).ln()
                }
            }
            DistributionFamily::HalfCauchy { scale } => {
                if y <= 0.0 {
                    0.0
                } else {
                    (FRAC_2_PI * (scale / y).atan()).ln()
                }
            }
        })
    }

    /// The point whose CDF equals the left limit `F(y⁻)`: `y` itself for
    /// continuous families, `⌈y⌉ - 1` on the integer support.
    pub fn left_limit_point(&self, y: f64) -> f64 {
        if self.is_discrete() && y.is_finite() {
            y.ceil() - 1.0
        } else {
            y
        }
    }

    /// `ln F(y⁻)`.
    pub fn log_cdf_left(&self, y: f64) -> Result<f64> {
        self.log_cdf(self.left_limit_point(y))
    }

    /// `ln[F(b) - F(a⁻)] = ln P(a ≤ Y ≤ b)`. Bounds may be infinite.
    pub fn log_interval_prob(&self, a: f64, b: f64) -> Result<f64> {
        self.validate()?;
        if a.is_nan() || b.is_nan() {
            return Err(Error::ParameterDomain("interval bound is NaN".into()));
        }
        if a > b {
            return Err(Error::Ordering { lower: a, upper: b });
        }
        let lower = self.left_limit_point(a);
        self.log_cdf_diff(lower, b)
    }

    /// `ln[F(b) - F(a)] = ln P(a < Y ≤ b)` for `a ≤ b`.
    pub fn log_cdf_diff(&self, a: f64, b: f64) -> Result<f64> {
        self.validate()?;
        if a > b {
            return Err(Error::Ordering { lower: a, upper: b });
        }
        if a == f64::NEG_INFINITY {
            return self.log_cdf(b);
        }
        if b == f64::INFINITY {
            return self.log_ccdf(a);
        }
        if let DistributionFamily::Binomial { trials, prob } = *self {
            return Ok(binomial_log_range(trials, prob, a.floor() + 1.0, b.floor()));
        }
        let log_fa = self.log_cdf(a)?;
        if log_fa > -LN_2 {
            // both ends in the upper half: difference of survival functions
            let log_sa = self.log_ccdf(a)?;
            let log_sb = self.log_ccdf(b)?;
            if log_sa == f64::NEG_INFINITY {
                return Ok(f64::NEG_INFINITY);
            }
            Ok(log_sa + log1mexp(log_sb - log_sa))
        } else {
            let log_fb = self.log_cdf(b)?;
            if log_fb == f64::NEG_INFINITY {
                return Ok(f64::NEG_INFINITY);
            }
            Ok(log_fb + log1mexp(log_fa - log_fb))
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DistributionFamily::Exponential { rate } => 1.0 / rate,
            DistributionFamily::Normal { mean, .. } => mean,
            DistributionFamily::Binomial { trials, prob } => trials as f64 * prob,
            DistributionFamily::Beta { alpha, beta } => alpha / (alpha + beta),
            DistributionFamily::HalfCauchy { .. } => f64::INFINITY,
        }
    }

    /// Draw one value.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            DistributionFamily::Exponential { rate } => Exp::new(rate)
                .map_err(|e| Error::ParameterDomain(e.to_string()))?
                .sample(rng),
            DistributionFamily::Normal { mean, precision } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + z / precision.sqrt()
            }
            DistributionFamily::Binomial { trials, prob } => {
                rand_distr::Binomial::new(trials, prob)
                    .map_err(|e| Error::ParameterDomain(e.to_string()))?
                    .sample(rng) as f64
            }
            DistributionFamily::Beta { alpha, beta } => rand_distr::Beta::new(alpha, beta)
                .map_err(|e| Error::ParameterDomain(e.to_string()))?
                .sample(rng),
            DistributionFamily::HalfCauchy { scale } => {
                let u: f64 = rng.random();
                scale * (0.5 * PI * u).tan()
            }
        })
    }

    /// Draw one value restricted to `(lower, upper]`.
    pub fn sample_truncated<R: Rng + ?Sized>(
        &self,
        lower: f64,
        upper: f64,
        rng: &mut R,
    ) -> Result<f64> {
        truncated::sample(self, lower, upper, rng)
    }
}

pub(crate) fn binomial_ln_pmf(trials: u64, prob: f64, k: u64) -> f64 {
    if k > trials {
        return f64::NEG_INFINITY;
    }
    if prob == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if prob == 1.0 {
        return if k == trials { 0.0 } else { f64::NEG_INFINITY };
    }
    ln_choose(trials, k) + k as f64 * prob.ln() + (trials - k) as f64 * (-prob).ln_1p()
}

/// `ln P(lo ≤ K ≤ hi)` by summing the mass on the integer range, walking
/// outward from the largest term with the pmf ratio recurrence and stopping
/// once terms fall below double precision relative to that peak.
fn binomial_log_range(trials: u64, prob: f64, lo: f64, hi: f64) -> f64 {
    let lo = lo.max(0.0);
    let hi = hi.min(trials as f64);
    if lo > hi {
        return f64::NEG_INFINITY;
    }
    let (lo, hi) = (lo as u64, hi as u64);
    if prob == 0.0 || prob == 1.0 {
        let terms: Vec<f64> = (lo..=hi)
            .map(|k| binomial_ln_pmf(trials, prob, k))
            .collect();
        return log_sum_exp(&terms);
    }
    const NEGLIGIBLE: f64 = -50.0;
    let mode = (((trials + 1) as f64 * prob).floor() as u64).clamp(lo, hi);
    let log_odds = prob.ln() - (-prob).ln_1p();
    let peak = binomial_ln_pmf(trials, prob, mode);
    let mut sum = 1.0;
    let (mut k, mut t) = (mode, peak);
    while k < hi {
        t += ((trials - k) as f64 / (k + 1) as f64).ln() + log_odds;
        k += 1;
        if t - peak < NEGLIGIBLE {
            break;
        }
        sum += (t - peak).exp();
    }
    let (mut k, mut t) = (mode, peak);
    while k > lo {
        t -= ((trials - k + 1) as f64 / k as f64).ln() + log_odds;
        k -= 1;
        if t - peak < NEGLIGIBLE {
            break;
        }
        sum += (t - peak).exp();
    }
    peak + sum.ln()
}

fn binomial_log_cdf(trials: u64, prob: f64, k: f64) -> f64 {
    if k < 0.0 {
        return f64::NEG_INFINITY;
    }
    if k >= trials as f64 {
        return 0.0;
    }
    // sum over the shorter side of the mean for accuracy
    if k <= trials as f64 * prob {
        binomial_log_range(trials, prob, 0.0, k)
    } else {
        log1mexp(binomial_log_range(trials, prob, k + 1.0, trials as f64))
    }
}

fn binomial_log_ccdf(trials: u64, prob: f64, k: f64) -> f64 {
    if k < 0.0 {
        return 0.0;
    }
    if k >= trials as f64 {
        return f64::NEG_INFINITY;
    }
    if k >= trials as f64 * prob {
        binomial_log_range(trials, prob, k + 1.0, trials as f64)
    } else {
        log1mexp(binomial_log_range(trials, prob, 0.0, k))
    }
}
