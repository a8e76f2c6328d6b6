//! Model families mapped onto the censored-likelihood core.
//!
//! A model owns a parameter schema, a log-prior and a rule that turns a
//! parameter vector into the outcome distribution of each row. Everything
//! else (exact vs. dinterval-style likelihood, sampling, deviance) is generic.

mod ae;
mod survival;
mod tobit;

pub use ae::{AeBinomialModel, AeHyperparameters, AeVariant};
pub use survival::SurvivalExpModel;
pub use tobit::TobitNormalModel;

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionFamily;
use crate::error::{Error, Result};
use crate::likelihood::{
    loglik_dinterval_style, loglik_exact, CensoredDataset, LikelihoodMode, Observation,
};

/// Where a parameter lives. Bounded parameters are sampled on an
/// unconstrained scale (log for positive, logit for unit-interval).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Support {
    Real,
    Positive,
    UnitInterval,
}

impl Support {
    pub fn contains(self, v: f64) -> bool {
        match self {
            Support::Real => v.is_finite(),
            Support::Positive => v > 0.0 && v.is_finite(),
            Support::UnitInterval => v > 0.0 && v < 1.0,
        }
    }

    pub fn to_unconstrained(self, v: f64) -> f64 {
        match self {
            Support::Real => v,
            Support::Positive => v.ln(),
            Support::UnitInterval => v.ln() - (-v).ln_1p(),
        }
    }

    pub fn from_unconstrained(self, u: f64) -> f64 {
        match self {
            Support::Real => u,
            Support::Positive => u.exp(),
            Support::UnitInterval => {
                if u >= 0.0 {
                    1.0 / (1.0 + (-u).exp())
                } else {
                    let e = u.exp();
                    e / (1.0 + e)
                }
            }
        }
    }

    /// `ln |dθ/du|` at unconstrained value `u`.
    pub fn log_jacobian(self, u: f64) -> f64 {
        match self {
            Support::Real => 0.0,
            Support::Positive => u,
            // θ(1-θ) = σ(u)σ(-u)
            Support::UnitInterval => -softplus(-u) - softplus(u),
        }
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub support: Support,
    /// Starting value for samplers: the prior mean, or 0 / 1 where none exists.
    pub initial: f64,
}

impl ParamSpec {
    pub fn new(name: impl Into<String>, support: Support, initial: f64) -> Self {
        Self {
            name: name.into(),
            support,
            initial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParameterSchema {
    specs: Vec<ParamSpec>,
}

impl ParameterSchema {
    pub fn new(specs: Vec<ParamSpec>) -> Self {
        Self { specs }
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn specs(&self) -> &[ParamSpec] {
        &self.specs
    }

    pub fn names(&self) -> Vec<String> {
        self.specs.iter().map(|s| s.name.clone()).collect()
    }

    pub fn supports(&self) -> Vec<Support> {
        self.specs.iter().map(|s| s.support).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.specs.iter().position(|s| s.name == name)
    }

    pub fn initial_values(&self) -> Vec<f64> {
        self.specs.iter().map(|s| s.initial).collect()
    }

    /// Bind values to this schema.
    pub fn vector(&self, values: Vec<f64>) -> Result<ParameterVector> {
        if values.len() != self.len() {
            return Err(Error::Structure(format!(
                "{} values for a schema of {} parameters",
                values.len(),
                self.len()
            )));
        }
        Ok(ParameterVector {
            names: self.names(),
            values,
        })
    }

    pub fn initial_vector(&self) -> ParameterVector {
        ParameterVector {
            names: self.names(),
            values: self.initial_values(),
        }
    }
}

/// Named parameter values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    names: Vec<String>,
    values: Vec<f64>,
}

impl ParameterVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }

    fn check(&self, schema: &ParameterSchema) -> Result<()> {
        if self.values.len() != schema.len()
            || self
                .names
                .iter()
                .zip(schema.specs())
                .any(|(n, s)| *n != s.name)
        {
            return Err(Error::Structure(format!(
                "parameter vector {:?} does not match schema {:?}",
                self.names,
                schema.names()
            )));
        }
        Ok(())
    }
}

/// A model for censored outcomes.
pub trait CensoredModel: Send + Sync {
    fn label(&self) -> &str;

    fn schema(&self) -> &ParameterSchema;

    /// Log prior density in the natural parameterisation; `-∞` outside support.
    fn log_prior(&self, theta: &[f64]) -> f64;

    /// Outcome distribution of row `row` at parameter values `theta`.
    fn outcome_dist(
        &self,
        theta: &[f64],
        row: usize,
        obs: &Observation,
    ) -> Result<DistributionFamily>;

    /// Rows whose outcome distribution depends on `component`; `None` means all.
    fn rows_affected_by(&self, _component: usize) -> Option<&[usize]> {
        None
    }

    /// Check the model can be evaluated on `data`.
    fn check_data(&self, _data: &CensoredDataset) -> Result<()> {
        Ok(())
    }
}

/// Log prior with a schema check on `params`.
pub fn log_prior(model: &dyn CensoredModel, params: &ParameterVector) -> Result<f64> {
    params.check(model.schema())?;
    Ok(model.log_prior(params.values()))
}

pub fn build_outcome_dist(
    model: &dyn CensoredModel,
    params: &ParameterVector,
    row: usize,
    observation: &Observation,
) -> Result<DistributionFamily> {
    params.check(model.schema())?;
    model.outcome_dist(params.values(), row, observation)
}

/// Outcome distributions for every row of `data`.
pub fn outcome_dists(
    model: &dyn CensoredModel,
    theta: &[f64],
    data: &CensoredDataset,
) -> Result<Vec<DistributionFamily>> {
    data.observations()
        .iter()
        .enumerate()
        .map(|(row, obs)| model.outcome_dist(theta, row, obs))
        .collect()
}

/// Log prior plus the sampler log-likelihood of `mode`. Latent values are
/// required exactly when `mode` is dinterval-style.
pub fn log_posterior_unnorm(
    model: &dyn CensoredModel,
    params: &ParameterVector,
    data: &CensoredDataset,
    mode: LikelihoodMode,
    latents: Option<&[f64]>,
) -> Result<f64> {
    let prior = log_prior(model, params)?;
    if prior == f64::NEG_INFINITY {
        return Ok(prior);
    }
    let dists = match outcome_dists(model, params.values(), data) {
        Ok(d) => d,
        Err(Error::ParameterDomain(_)) => return Ok(f64::NEG_INFINITY),
        Err(e) => return Err(e),
    };
    let loglik = match (mode, latents) {
        (LikelihoodMode::Exact, None) => loglik_exact(data, &dists)?,
        (LikelihoodMode::DIntervalStyle, Some(latents)) => {
            loglik_dinterval_style(data, &dists, latents)?.sampler
        }
        (LikelihoodMode::Exact, Some(_)) => {
            return Err(Error::Structure(
                "latent values given for the exact likelihood".into(),
            ))
        }
        (LikelihoodMode::DIntervalStyle, None) => {
            return Err(Error::Structure(
                "dinterval-style likelihood needs latent values".into(),
            ))
        }
    };
    Ok(prior + loglik)
}

pub(crate) fn covariate_column(data: &CensoredDataset, name: &str) -> Result<usize> {
    data.covariate_index(name)
        .ok_or_else(|| Error::Validation(format!("covariate column `{name}` not found in dataset")))
}

pub(crate) fn covariate_value(
    obs: &Observation,
    index: usize,
    row: usize,
    name: &str,
) -> Result<f64> {
    let v = obs.covariates.get(index).copied().unwrap_or(f64::NAN);
    if v.is_nan() {
        return Err(Error::Validation(format!(
            "row {row}: covariate `{name}` is missing"
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::likelihood::CensorKind;

    #[test]
    fn transforms_round_trip_with_jacobian() {
        for (support, v) in [
            (Support::Real, -2.5),
            (Support::Positive, 0.3),
            (Support::UnitInterval, 0.07),
        ] {
            let u = support.to_unconstrained(v);
            assert!((support.from_unconstrained(u) - v).abs() < 1e-14);
            // finite-difference check of the log-Jacobian
            let h = 1e-6;
            let d =
                (support.from_unconstrained(u + h) - support.from_unconstrained(u - h)) / (2.0 * h);
            assert!(
                (d.ln() - support.log_jacobian(u)).abs() < 1e-6,
                "{support:?}"
            );
        }
    }

    #[test]
    fn flat_prior_posterior_is_loglik_plus_constant() {
        let data = CensoredDataset::new(
            vec!["group".into()],
            vec![
                Observation::new(CensorKind::Observed(2.0), vec![0.0]),
                Observation::new(CensorKind::RightCensored(5.0), vec![1.0]),
            ],
        )
        .unwrap();
        let model = SurvivalExpModel::new(&data, "group", 1e-300, 1e-300).unwrap();
        let a = model.schema().vector(vec![0.1, -0.2]).unwrap();
        let b = model.schema().vector(vec![-0.4, 0.3]).unwrap();
        let lp_a = log_posterior_unnorm(&model, &a, &data, LikelihoodMode::Exact, None).unwrap();
        let lp_b = log_posterior_unnorm(&model, &b, &data, LikelihoodMode::Exact, None).unwrap();
        let ll = |p: &ParameterVector| {
            loglik_exact(&data, &outcome_dists(&model, p.values(), &data).unwrap()).unwrap()
        };
        assert!(((lp_a - lp_b) - (ll(&a) - ll(&b))).abs() < 1e-12);
    }

    #[test]
    fn latents_must_match_mode() {
        let data = CensoredDataset::new(
            vec!["group".into()],
            vec![Observation::new(CensorKind::Observed(1.0), vec![0.0])],
        )
        .unwrap();
        let model = SurvivalExpModel::new(&data, "group", 0.01, 0.01).unwrap();
        let p = model.schema().initial_vector();
        assert!(
            log_posterior_unnorm(&model, &p, &data, LikelihoodMode::DIntervalStyle, None).is_err()
        );
        assert!(
            log_posterior_unnorm(&model, &p, &data, LikelihoodMode::Exact, Some(&[f64::NAN]))
                .is_err()
        );
    }

    #[test]
    fn schema_mismatch_is_structural() {
        let data = CensoredDataset::new(
            vec!["group".into()],
            vec![Observation::new(CensorKind::Observed(1.0), vec![0.0])],
        )
        .unwrap();
        let model = SurvivalExpModel::new(&data, "group", 0.01, 0.01).unwrap();
        assert!(model.schema().vector(vec![0.0]).is_err());
        let other = ParameterSchema::new(vec![
            ParamSpec::new("x", Support::Real, 0.0),
            ParamSpec::new("y", Support::Real, 0.0),
        ]);
        let wrong = other.initial_vector();
        assert!(matches!(
            log_prior(&model, &wrong),
            Err(Error::Structure(_))
        ));
    }
}
