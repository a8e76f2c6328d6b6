//! Log-likelihood and deviance of censored data.
//!
//! Three evaluators are provided for the same dataset:
//!
//! * [`loglik_exact`] sums density terms for observed rows and CDF terms for
//!   censored rows (`F(y_l)`, `1 - F(y_r⁻)`, `F(v) - F(u⁻)`).
//! * [`loglik_bernoulli_reform`] replaces each censored row by a Bernoulli
//!   indicator whose success probability is a CDF value at the row's cutoff
//!   (or a CDF difference for interval rows). The two agree exactly.
//! * [`loglik_dinterval_style`] mirrors latent-imputation samplers whose
//!   deviance monitor assigns likelihood 1 to every censored row.
//!
//! Region conventions: `LeftCensored(c)` means `Y ≤ c`, `RightCensored(c)`
//! means `Y ≥ c`, and `IntervalCensored(c1, c2)` means `c1 < Y ≤ c2`.

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionFamily;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CensorKind {
    Observed(f64),
    LeftCensored(f64),
    RightCensored(f64),
    IntervalCensored(f64, f64),
}

impl CensorKind {
    pub fn interval(cut1: f64, cut2: f64) -> Result<Self> {
        if cut1.is_nan() || cut2.is_nan() || cut1 >= cut2 {
            return Err(Error::Data(format!(
                "interval censoring needs cut1 < cut2, got ({cut1}, {cut2})"
            )));
        }
        Ok(CensorKind::IntervalCensored(cut1, cut2))
    }

    pub fn is_censored(&self) -> bool {
        !matches!(self, CensorKind::Observed(_))
    }

    /// The half-open region `(lower, upper]` a latent value must occupy for
    /// this row under `family`'s support conventions.
    pub fn latent_region(&self, family: &DistributionFamily) -> Option<(f64, f64)> {
        match *self {
            CensorKind::Observed(_) => None,
            CensorKind::LeftCensored(c) => Some((f64::NEG_INFINITY, c)),
            CensorKind::RightCensored(c) => Some((family.left_limit_point(c), f64::INFINITY)),
            CensorKind::IntervalCensored(a, b) => Some((a, b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub outcome: CensorKind,
    /// Covariate values in dataset column order; `NaN` marks a missing cell.
    pub covariates: Vec<f64>,
    pub trials: Option<u64>,
}

impl Observation {
    pub fn new(outcome: CensorKind, covariates: Vec<f64>) -> Self {
        Self {
            outcome,
            covariates,
            trials: None,
        }
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = Some(trials);
        self
    }
}

/// Which of the three blocks a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowBlock {
    Observed,
    OneSided,
    Interval,
}

/// Sizes of the observed / one-sided / interval partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Partition {
    pub observed: usize,
    pub left: usize,
    pub right: usize,
    pub interval: usize,
}

impl Partition {
    pub fn one_sided(&self) -> usize {
        self.left + self.right
    }

    pub fn censored(&self) -> usize {
        self.left + self.right + self.interval
    }

    pub fn total(&self) -> usize {
        self.observed + self.censored()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensoredDataset {
    covariate_names: Vec<String>,
    observations: Vec<Observation>,
}

impl CensoredDataset {
    pub fn new(covariate_names: Vec<String>, observations: Vec<Observation>) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::Data("dataset has no rows".into()));
        }
        let width = covariate_names.len();
        for (i, obs) in observations.iter().enumerate() {
            if obs.covariates.len() != width {
                return Err(Error::Data(format!(
                    "row {i} has {} covariates, expected {width}",
                    obs.covariates.len()
                )));
            }
            if let CensorKind::IntervalCensored(a, b) = obs.outcome {
                if !(a < b) {
                    return Err(Error::Data(format!(
                        "row {i}: interval ({a}, {b}] is empty"
                    )));
                }
            }
        }
        Ok(Self {
            covariate_names,
            observations,
        })
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn covariate_names(&self) -> &[String] {
        &self.covariate_names
    }

    pub fn covariate_index(&self, name: &str) -> Option<usize> {
        self.covariate_names.iter().position(|n| n == name)
    }

    pub fn partition(&self) -> Partition {
        let mut p = Partition::default();
        for obs in &self.observations {
            match obs.outcome {
                CensorKind::Observed(_) => p.observed += 1,
                CensorKind::LeftCensored(_) => p.left += 1,
                CensorKind::RightCensored(_) => p.right += 1,
                CensorKind::IntervalCensored(..) => p.interval += 1,
            }
        }
        p
    }

    pub fn block(&self, row: usize) -> RowBlock {
        match self.observations[row].outcome {
            CensorKind::Observed(_) => RowBlock::Observed,
            CensorKind::LeftCensored(_) | CensorKind::RightCensored(_) => RowBlock::OneSided,
            CensorKind::IntervalCensored(..) => RowBlock::Interval,
        }
    }

    pub fn censored_rows(&self) -> Vec<usize> {
        self.observations
            .iter()
            .enumerate()
            .filter(|(_, o)| o.outcome.is_censored())
            .map(|(i, _)| i)
            .collect()
    }

    /// A copy with rows reordered by `order`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let observations = order
            .iter()
            .map(|&i| {
                self.observations
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::Structure(format!("row {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.covariate_names.clone(), observations)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LikelihoodMode {
    Exact,
    #[serde(rename = "dinterval")]
    DIntervalStyle,
}

impl std::fmt::Display for LikelihoodMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LikelihoodMode::Exact => f.write_str("exact"),
            LikelihoodMode::DIntervalStyle => f.write_str("dinterval"),
        }
    }
}

fn check_lengths(data: &CensoredDataset, dists: &[DistributionFamily]) -> Result<()> {
    if dists.len() != data.len() {
        return Err(Error::Structure(format!(
            "{} outcome distributions for {} rows",
            dists.len(),
            data.len()
        )));
    }
    Ok(())
}

/// One row's term of the exact censored likelihood.
pub fn row_loglik_exact(outcome: &CensorKind, dist: &DistributionFamily) -> Result<f64> {
    match *outcome {
        CensorKind::Observed(y) => dist.log_pdf(y),
        // F(y_l)
        CensorKind::LeftCensored(c) => dist.log_interval_prob(f64::NEG_INFINITY, c),
        // 1 - F(y_r⁻)
        CensorKind::RightCensored(c) => dist.log_interval_prob(c, f64::INFINITY),
        // F(v) - F(u⁻), with u the smallest support point above cut1
        CensorKind::IntervalCensored(cut1, cut2) => {
            let u = if dist.is_discrete() {
                cut1.floor() + 1.0
            } else {
                cut1
            };
            if u > cut2 {
                return Ok(f64::NEG_INFINITY);
            }
            dist.log_interval_prob(u, cut2)
        }
    }
}

/// Bernoulli success probability of a censored row, kept as `(ln p, ln(1-p))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensoringProbability {
    pub ln_p: f64,
    pub ln_q: f64,
}

impl CensoringProbability {
    pub fn log_bernoulli(&self, z: bool) -> f64 {
        if z {
            self.ln_p
        } else {
            self.ln_q
        }
    }
}

/// `p = F(cut)` for a one-sided row, where `cut = y_l` for left censoring and
/// `cut = y_r⁻` for right censoring, together with the indicator `Z₁`.
pub fn one_sided_probability(
    outcome: &CensorKind,
    dist: &DistributionFamily,
) -> Result<(CensoringProbability, bool)> {
    let (cut, z1) = match *outcome {
        CensorKind::LeftCensored(c) => (c, true),
        CensorKind::RightCensored(c) => (dist.left_limit_point(c), false),
        _ => return Err(Error::Structure("not a one-sided censored row".into())),
    };
    let p = CensoringProbability {
        ln_p: dist.log_cdf(cut)?,
        ln_q: dist.log_ccdf(cut)?,
    };
    Ok((p, z1))
}

/// `p = F(cut2) - F(cut1)` for an interval row (`Z₂ = 1`).
pub fn interval_probability(outcome: &CensorKind, dist: &DistributionFamily) -> Result<f64> {
    match *outcome {
        CensorKind::IntervalCensored(cut1, cut2) => dist.log_cdf_diff(cut1, cut2),
        _ => Err(Error::Structure("not an interval-censored row".into())),
    }
}

/// One row's term of the Bernoulli/CDF reformulation.
pub fn row_loglik_bernoulli(outcome: &CensorKind, dist: &DistributionFamily) -> Result<f64> {
    match outcome {
        CensorKind::Observed(y) => dist.log_pdf(*y),
        CensorKind::LeftCensored(_) | CensorKind::RightCensored(_) => {
            let (p, z1) = one_sided_probability(outcome, dist)?;
            Ok(p.log_bernoulli(z1))
        }
        CensorKind::IntervalCensored(..) => interval_probability(outcome, dist),
    }
}

pub fn pointwise_exact(data: &CensoredDataset, dists: &[DistributionFamily]) -> Result<Vec<f64>> {
    check_lengths(data, dists)?;
    data.observations()
        .iter()
        .zip(dists)
        .map(|(o, d)| row_loglik_exact(&o.outcome, d))
        .collect()
}

pub fn pointwise_bernoulli(
    data: &CensoredDataset,
    dists: &[DistributionFamily],
) -> Result<Vec<f64>> {
    check_lengths(data, dists)?;
    data.observations()
        .iter()
        .zip(dists)
        .map(|(o, d)| row_loglik_bernoulli(&o.outcome, d))
        .collect()
}

/// Exact censored log-likelihood. `-∞` when some censored region has zero
/// probability under the given distributions.
pub fn loglik_exact(data: &CensoredDataset, dists: &[DistributionFamily]) -> Result<f64> {
    Ok(pointwise_exact(data, dists)?.iter().sum())
}

pub fn loglik_bernoulli_reform(
    data: &CensoredDataset,
    dists: &[DistributionFamily],
) -> Result<f64> {
    check_lengths(data, dists)?;
    let mut observed = 0.0;
    let mut one_sided = 0.0;
    let mut interval = 0.0;
    for (row, (obs, dist)) in data.observations().iter().zip(dists).enumerate() {
        match data.block(row) {
            RowBlock::Observed => observed += row_loglik_bernoulli(&obs.outcome, dist)?,
            RowBlock::OneSided => one_sided += row_loglik_bernoulli(&obs.outcome, dist)?,
            RowBlock::Interval => interval += row_loglik_bernoulli(&obs.outcome, dist)?,
        }
    }
    Ok(observed + one_sided + interval)
}

/// The two log-likelihoods a latent-imputation sampler works with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DIntervalLoglik {
    /// Σ over all rows of `ln f` at the observed or imputed value.
    pub sampler: f64,
    /// Σ over observed rows only; censored rows contribute `ln 1 = 0`.
    pub monitored: f64,
}

/// Validate that `latent` lies in the censoring region of `outcome`.
pub fn check_latent(
    row: usize,
    outcome: &CensorKind,
    dist: &DistributionFamily,
    latent: f64,
) -> Result<()> {
    if let Some((lo, hi)) = outcome.latent_region(dist) {
        if !(latent > lo && latent <= hi) {
            return Err(Error::Consistency { row, value: latent });
        }
    }
    Ok(())
}

/// Sampler-side term of one row: `ln f(y)` for observed rows, `ln f(latent)`
/// for censored rows.
pub fn row_loglik_sampler(
    row: usize,
    outcome: &CensorKind,
    dist: &DistributionFamily,
    latent: f64,
) -> Result<f64> {
    match *outcome {
        CensorKind::Observed(y) => dist.log_pdf(y),
        _ => {
            check_latent(row, outcome, dist, latent)?;
            dist.log_pdf(latent)
        }
    }
}

/// `latents` is row-aligned; entries of observed rows are ignored.
pub fn loglik_dinterval_style(
    data: &CensoredDataset,
    dists: &[DistributionFamily],
    latents: &[f64],
) -> Result<DIntervalLoglik> {
    check_lengths(data, dists)?;
    if latents.len() != data.len() {
        return Err(Error::Structure(format!(
            "{} latent values for {} rows",
            latents.len(),
            data.len()
        )));
    }
    let mut sampler = 0.0;
    let mut monitored = 0.0;
    for (row, ((obs, dist), &latent)) in data
        .observations()
        .iter()
        .zip(dists)
        .zip(latents)
        .enumerate()
    {
        let term = row_loglik_sampler(row, &obs.outcome, dist, latent)?;
        sampler += term;
        if !obs.outcome.is_censored() {
            monitored += term;
        }
    }
    Ok(DIntervalLoglik { sampler, monitored })
}

/// `D = -2 ln L`.
pub fn deviance(loglik: f64) -> f64 {
    -2.0 * loglik
}
