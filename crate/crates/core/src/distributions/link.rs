use serde::{Deserialize, Serialize};

use super::special::{ndtr, ndtri};
use crate::error::{Error, Result};

/// Probabilities fed into links or Bernoulli terms are kept inside
/// `[PROBABILITY_CLAMP, 1 - PROBABILITY_CLAMP]`.
pub const PROBABILITY_CLAMP: f64 = 1e-12;

pub fn clamp_probability(p: f64) -> f64 {
    p.clamp(PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP)
}

/// Map between a probability in `(0, 1)` and a linear predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Identity,
    Logit,
    #[serde(rename = "cloglog")]
    CLogLog,
    Probit,
}

impl Link {
    /// `g(p)`. Errors at `p ∈ {0, 1}`; callers clamp first.
    pub fn apply(self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Boundary(p));
        }
        Ok(match self {
            Link::Identity => p,
            Link::Logit => p.ln() - (-p).ln_1p(),
            Link::CLogLog => (-(-p).ln_1p()).ln(),
            Link::Probit => ndtri(p),
        })
    }

    /// `g⁻¹(η)`. For identity the value is returned as is.
    pub fn invert(self, eta: f64) -> f64 {
        match self {
            Link::Identity => eta,
            Link::Logit => {
                if eta >= 0.0 {
                    1.0 / (1.0 + (-eta).exp())
                } else {
                    let e = eta.exp();
                    e / (1.0 + e)
                }
            }
            Link::CLogLog => -(-eta.exp()).exp_m1(),
            Link::Probit => ndtr(eta),
        }
    }
}
