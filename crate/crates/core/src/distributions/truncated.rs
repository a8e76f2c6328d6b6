//! Sampling restricted to a half-open region `(lower, upper]`.
//!
//! Exponential, beta, half-Cauchy and binomial use the inverse CDF. The normal
//! uses rejection: a plain normal proposal when the region holds plenty of
//! mass, an exponential tail proposal for regions far from the mean and a
//! uniform proposal for narrow windows.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::beta::inv_beta_reg;

use super::DistributionFamily;
use crate::error::{Error, Result};

pub(super) fn sample<R: Rng + ?Sized>(
    family: &DistributionFamily,
    lower: f64,
    upper: f64,
    rng: &mut R,
) -> Result<f64> {
    family.validate()?;
    if lower.is_nan() || upper.is_nan() {
        return Err(Error::ParameterDomain("truncation bound is NaN".into()));
    }
    if lower >= upper {
        return Err(Error::Ordering { lower, upper });
    }
    let degenerate = Error::DegenerateRegion { lower, upper };
    if family.log_cdf_diff(lower, upper)? == f64::NEG_INFINITY {
        return Err(degenerate);
    }
    match *family {
        DistributionFamily::Exponential { rate } => {
            let lo = lower.max(0.0);
            let y = if upper.is_finite() {
                // lo - ln(1 - u (1 - e^{-rate (upper - lo)})) / rate
                let width = (-rate * (upper - lo)).exp_m1();
                lo - (open_unit(rng) * width).ln_1p() / rate
            } else {
                lo - open_unit(rng).ln() / rate
            };
            Ok(y.min(upper).max(lower.next_up()))
        }
        DistributionFamily::Normal { mean, precision } => {
            let sd = precision.sqrt().recip();
            let a = (lower - mean) / sd;
            let b = (upper - mean) / sd;
            let z = standard_normal_truncated(a, b, rng);
            Ok((mean + sd * z).clamp(lower.next_up(), upper))
        }
        DistributionFamily::Binomial { trials, prob } => {
            let lo = (lower.floor() + 1.0).max(0.0) as u64;
            let hi = upper.floor().min(trials as f64) as u64;
            let log_masses: Vec<f64> = (lo..=hi)
                .map(|k| super::binomial_ln_pmf(trials, prob, k))
                .collect();
            let max = log_masses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let weights: Vec<f64> = log_masses.iter().map(|m| (m - max).exp()).collect();
            let total: f64 = weights.iter().sum();
            let mut target = rng.random::<f64>() * total;
            for (k, w) in (lo..=hi).zip(&weights) {
                if target < *w {
                    return Ok(k as f64);
                }
                target -= w;
            }
            // rounding left a sliver past the last positive weight
            let last = weights.iter().rposition(|w| *w > 0.0).ok_or(degenerate)?;
            Ok((lo + last as u64) as f64)
        }
        DistributionFamily::Beta { alpha, beta } => {
            let fl = if lower <= 0.0 {
                0.0
            } else {
                family.log_cdf(lower)?.exp()
            };
            let fu = if upper >= 1.0 {
                1.0
            } else {
                family.log_cdf(upper)?.exp()
            };
            let u = fl + open_unit(rng) * (fu - fl);
            Ok(inv_beta_reg(alpha, beta, u).clamp(lower.max(0.0), upper.min(1.0)))
        }
        DistributionFamily::HalfCauchy { scale } => {
            let to_u = |y: f64| {
                if y <= 0.0 {
                    0.0
                } else if y.is_infinite() {
                    1.0
                } else {
                    (y / scale).atan() * 2.0 / PI
                }
            };
            let (fl, fu) = (to_u(lower), to_u(upper));
            let u = fl + open_unit(rng) * (fu - fl);
            Ok((scale * (0.5 * PI * u).tan()).clamp(lower.max(0.0), upper))
        }
    }
}

/// Uniform on `(0, 1]`.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Standard normal restricted to `(a, b]`.
fn standard_normal_truncated<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    if b <= 0.0 || (a < 0.0 && b.is_finite() && -a > b) {
        // mirror so most of the region sits on the positive side
        return -standard_normal_truncated(-b, -a, rng);
    }
    // here b > 0 and the region leans right
    if a <= 0.0 && (b - a) > 0.5 || a == f64::NEG_INFINITY {
        loop {
            let z: f64 = StandardNormal.sample(rng);
            if z > a && z <= b {
                return z;
            }
        }
    }
    if a > 0.0 && b - a > 1.0 / a.max(0.5) {
        return tail_exponential(a, b, rng);
    }
    // narrow window: uniform proposal, accept with the density ratio to its peak
    let peak = if a > 0.0 { a * a } else { 0.0 };
    loop {
        let z = a + (b - a) * open_unit(rng);
        let accept = (0.5 * (peak - z * z)).exp();
        if rng.random::<f64>() < accept {
            return z;
        }
    }
}

/// Exponential-proposal rejection for the upper tail `(a, b]`, `a > 0`.
fn tail_exponential<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    let rate = 0.5 * (a + (a * a + 4.0).sqrt());
    loop {
        let z = a - open_unit(rng).ln() / rate;
        if z > b {
            continue;
        }
        let d = z - rate;
        if rng.random::<f64>() < (-0.5 * d * d).exp() {
            return z;
        }
    }
}
