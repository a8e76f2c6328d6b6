//! Log-space arithmetic and normal-distribution special functions.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, SQRT_2};

use libm::erfc;
use statrs::function::erf::erfc_inv;
use statrs::function::gamma::ln_gamma;

/// `ln(2π) / 2`
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln(1 - exp(x))` for `x <= 0`, accurate across the whole range.
pub fn log1mexp(x: f64) -> f64 {
    if x > 0.0 || x.is_nan() {
        f64::NAN
    } else if x > -LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln(exp(a) + exp(b))`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    let n = n as f64;
    let k = k as f64;
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// Standard normal CDF.
pub fn ndtr(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// `ln Φ(z)` for the standard normal, with an asymptotic expansion in the
/// far lower tail where `erfc` underflows.
pub fn log_ndtr(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z == f64::INFINITY {
        return 0.0;
    }
    if z == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if z > 6.0 {
        // Φ(z) = 1 - Φ(-z) with Φ(-z) tiny
        return (-ndtr(-z)).ln_1p();
    }
    if z > -35.0 {
        return ndtr(z).ln();
    }
    // ln Φ(z) = -z²/2 - ln(-z) - ln√(2π) + ln(1 + Σ_k (-1)^k (2k-1)!! / z^{2k})
    let z2 = z * z;
    let mut term = 1.0;
    let mut series = 1.0;
    for k in 1..12 {
        term *= -((2 * k - 1) as f64) / z2;
        series += term;
    }
    -0.5 * z2 - (-z).ln() - LN_SQRT_2PI + series.ln()
}

/// Standard normal quantile.
pub fn ndtri(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let z = if p < 0.5 {
        -SQRT_2 * erfc_inv(2.0 * p)
    } else {
        SQRT_2 * erfc_inv(2.0 * (1.0 - p))
    };
    // one Newton step on Φ(z) = p
    let density = (-0.5 * z * z - LN_SQRT_2PI).exp();
    if density > 0.0 {
        z - (ndtr(z) - p) / density
    } else {
        z
    }
}
