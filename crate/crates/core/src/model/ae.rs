//! Censored binomial models for study-level adverse-event counts.
//!
//! Each row is one study arm with `trials` patients and an event count that is
//! either reported or censored below the study's reporting cutoff. The seven
//! variants differ only in how the per-row incidence is built:
//!
//! | variant | incidence of row `i` |
//! |---|---|
//! | A | one pooled `p` |
//! | B | `p` of the row's drug class (two classes) |
//! | C | `p_d` of the row's drug, `p_d ~ Beta(m κ, (1 - m) κ)`, `κ = 1 / s²` |
//! | D, E, F | `g⁻¹(μ + δ_d)` with logit, cloglog, probit `g`; `δ_d ~ N(0, σ²)` |
//! | G | one `p_i` per study |
//!
//! Pooled and saturated incidences use a `Beta(a, b)` prior; spreads use a
//! half-Cauchy prior; `μ` is `Normal(0, precision)`.

use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;

use super::{
    covariate_column, covariate_value, CensoredModel, ParamSpec, ParameterSchema, Support,
};
use crate::distributions::{clamp_probability, DistributionFamily, Link};
use crate::error::{Error, Result};
use crate::likelihood::{CensorKind, CensoredDataset, Observation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AeVariant {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl AeVariant {
    pub const ALL: [AeVariant; 7] = [
        AeVariant::A,
        AeVariant::B,
        AeVariant::C,
        AeVariant::D,
        AeVariant::E,
        AeVariant::F,
        AeVariant::G,
    ];

    pub fn link(self) -> Option<Link> {
        match self {
            AeVariant::D => Some(Link::Logit),
            AeVariant::E => Some(Link::CLogLog),
            AeVariant::F => Some(Link::Probit),
            _ => None,
        }
    }

    pub fn letter(self) -> &'static str {
        match self {
            AeVariant::A => "A",
            AeVariant::B => "B",
            AeVariant::C => "C",
            AeVariant::D => "D",
            AeVariant::E => "E",
            AeVariant::F => "F",
            AeVariant::G => "G",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AeHyperparameters {
    /// Shapes of the Beta prior on pooled, class and per-study incidences.
    pub beta_shape: (f64, f64),
    /// Scale of the half-Cauchy prior on drug-effect spreads.
    pub half_cauchy_scale: f64,
    /// Precision of the Normal prior on the linear-predictor intercept.
    pub mu_precision: f64,
}

impl Default for AeHyperparameters {
    fn default() -> Self {
        Self {
            beta_shape: (1.0, 1.0),
            half_cauchy_scale: 1.0,
            mu_precision: 0.01,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AeBinomialModel {
    label: String,
    variant: AeVariant,
    hyper: AeHyperparameters,
    drug_index: Option<usize>,
    class_index: Option<usize>,
    drug_name: String,
    class_name: String,
    n_drugs: usize,
    schema: ParameterSchema,
    /// Rows touched by each parameter; empty for prior-only parameters.
    dependencies: Vec<Option<Vec<usize>>>,
}

impl AeBinomialModel {
    /// Build a variant against `data`. `drug_column` holds integer drug codes
    /// `0..D`; `class_column` holds the two-level class code used by model B.
    pub fn new(
        variant: AeVariant,
        data: &CensoredDataset,
        drug_column: &str,
        class_column: &str,
        hyper: AeHyperparameters,
    ) -> Result<Self> {
        let (a, b) = hyper.beta_shape;
        if !(a > 0.0 && b > 0.0 && hyper.half_cauchy_scale > 0.0 && hyper.mu_precision > 0.0) {
            return Err(Error::Validation(format!(
                "invalid AE hyperparameters {hyper:?}"
            )));
        }
        for (row, obs) in data.observations().iter().enumerate() {
            if obs.trials.is_none() {
                return Err(Error::Validation(format!(
                    "row {row}: binomial rows need `trials`"
                )));
            }
            if let CensorKind::Observed(y) = obs.outcome {
                if y < 0.0 || y.fract() != 0.0 || y > obs.trials.unwrap_or(0) as f64 {
                    return Err(Error::Validation(format!(
                        "row {row}: count {y} is not in 0..=trials"
                    )));
                }
            }
        }
        let n = data.len();
        let needs_drug = matches!(
            variant,
            AeVariant::C | AeVariant::D | AeVariant::E | AeVariant::F
        );
        let needs_class = variant == AeVariant::B;

        let drug_index = if needs_drug {
            Some(covariate_column(data, drug_column)?)
        } else {
            None
        };
        let class_index = if needs_class {
            Some(covariate_column(data, class_column)?)
        } else {
            None
        };

        let codes = |index: usize, name: &str| -> Result<Vec<usize>> {
            data.observations()
                .iter()
                .enumerate()
                .map(|(row, obs)| {
                    let v = covariate_value(obs, index, row, name)?;
                    if v < 0.0 || v.fract() != 0.0 {
                        return Err(Error::Validation(format!(
                            "row {row}: `{name}` must be a nonnegative integer code"
                        )));
                    }
                    Ok(v as usize)
                })
                .collect()
        };
        let group_rows = |codes: &[usize], levels: usize| -> Vec<Vec<usize>> {
            let mut rows = vec![Vec::new(); levels];
            for (row, &c) in codes.iter().enumerate() {
                rows[c].push(row);
            }
            rows
        };

        let mut specs = Vec::new();
        let mut dependencies = Vec::new();
        let mut n_drugs = 0;
        let prior_mean = a / (a + b);
        match variant {
            AeVariant::A => {
                specs.push(ParamSpec::new("p", Support::UnitInterval, prior_mean));
                dependencies.push(None);
            }
            AeVariant::B => {
                let classes = codes(class_index.unwrap_or_default(), class_column)?;
                if classes.iter().any(|&c| c > 1) {
                    return Err(Error::Validation(format!(
                        "`{class_column}` must be coded 0 or 1"
                    )));
                }
                let rows = group_rows(&classes, 2);
                for (k, name) in ["p_class0", "p_class1"].into_iter().enumerate() {
                    specs.push(ParamSpec::new(name, Support::UnitInterval, prior_mean));
                    dependencies.push(Some(rows[k].clone()));
                }
            }
            AeVariant::C | AeVariant::D | AeVariant::E | AeVariant::F => {
                let drugs = codes(drug_index.unwrap_or_default(), drug_column)?;
                n_drugs = drugs.iter().max().map_or(0, |m| m + 1);
                let rows = group_rows(&drugs, n_drugs);
                if variant == AeVariant::C {
                    specs.push(ParamSpec::new("m", Support::UnitInterval, prior_mean));
                    specs.push(ParamSpec::new(
                        "s",
                        Support::Positive,
                        hyper.half_cauchy_scale,
                    ));
                    dependencies.push(Some(Vec::new()));
                    dependencies.push(Some(Vec::new()));
                    for (d, r) in rows.into_iter().enumerate() {
                        specs.push(ParamSpec::new(
                            format!("p_drug{d}"),
                            Support::UnitInterval,
                            prior_mean,
                        ));
                        dependencies.push(Some(r));
                    }
                } else {
                    specs.push(ParamSpec::new("mu", Support::Real, 0.0));
                    specs.push(ParamSpec::new(
                        "sigma",
                        Support::Positive,
                        hyper.half_cauchy_scale,
                    ));
                    dependencies.push(None);
                    dependencies.push(Some(Vec::new()));
                    for (d, r) in rows.into_iter().enumerate() {
                        specs.push(ParamSpec::new(format!("delta_drug{d}"), Support::Real, 0.0));
                        dependencies.push(Some(r));
                    }
                }
            }
            AeVariant::G => {
                for row in 0..n {
                    specs.push(ParamSpec::new(
                        format!("p_study{row}"),
                        Support::UnitInterval,
                        prior_mean,
                    ));
                    dependencies.push(Some(vec![row]));
                }
            }
        }
        Ok(Self {
            label: variant.letter().to_string(),
            variant,
            hyper,
            drug_index,
            class_index,
            drug_name: drug_column.to_string(),
            class_name: class_column.to_string(),
            n_drugs,
            schema: ParameterSchema::new(specs),
            dependencies,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn variant(&self) -> AeVariant {
        self.variant
    }

    pub fn n_drugs(&self) -> usize {
        self.n_drugs
    }

    /// Incidence of a drug under variants C–F at `theta`.
    pub fn drug_incidence(&self, theta: &[f64], drug: usize) -> Option<f64> {
        match self.variant {
            AeVariant::C => theta.get(2 + drug).copied(),
            AeVariant::D | AeVariant::E | AeVariant::F => {
                let link = self.variant.link()?;
                let delta = theta.get(2 + drug)?;
                Some(clamp_probability(link.invert(theta[0] + delta)))
            }
            _ => None,
        }
    }

    fn incidence(&self, theta: &[f64], row: usize, obs: &Observation) -> Result<f64> {
        let code = |index: Option<usize>, name: &str| -> Result<usize> {
            let v = covariate_value(obs, index.unwrap_or_default(), row, name)?;
            Ok(v as usize)
        };
        let p = match self.variant {
            AeVariant::A => theta[0],
            AeVariant::B => theta[code(self.class_index, &self.class_name)?],
            AeVariant::C => theta[2 + code(self.drug_index, &self.drug_name)?],
            AeVariant::D | AeVariant::E | AeVariant::F => {
                let link = self.variant.link().unwrap_or(Link::Logit);
                link.invert(theta[0] + theta[2 + code(self.drug_index, &self.drug_name)?])
            }
            AeVariant::G => theta[row],
        };
        Ok(clamp_probability(p))
    }
}

fn beta_log_density(x: f64, a: f64, b: f64) -> f64 {
    DistributionFamily::Beta { alpha: a, beta: b }
        .log_pdf(x)
        .unwrap_or(f64::NEG_INFINITY)
}

/// Σ ln Beta(xᵢ; a, b) for `xᵢ` in (0, 1), normalising constant computed once.
fn beta_log_density_sum(xs: &[f64], a: f64, b: f64) -> f64 {
    let kernel: f64 = xs
        .iter()
        .map(|&x| {
            let mut t = 0.0;
            if a != 1.0 {
                t += (a - 1.0) * x.ln();
            }
            if b != 1.0 {
                t += (b - 1.0) * (-x).ln_1p();
            }
            t
        })
        .sum();
    kernel - xs.len() as f64 * ln_beta(a, b)
}

fn unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

impl CensoredModel for AeBinomialModel {
    fn label(&self) -> &str {
        &self.label
    }

    fn schema(&self) -> &ParameterSchema {
        &self.schema
    }

    fn log_prior(&self, theta: &[f64]) -> f64 {
        let (a, b) = self.hyper.beta_shape;
        let half_cauchy = DistributionFamily::HalfCauchy {
            scale: self.hyper.half_cauchy_scale,
        };
        match self.variant {
            AeVariant::A | AeVariant::B | AeVariant::G => {
                if !theta.iter().all(|&p| unit(p)) {
                    return f64::NEG_INFINITY;
                }
                beta_log_density_sum(theta, a, b)
            }
            AeVariant::C => {
                let (m, s) = (theta[0], theta[1]);
                if !unit(m) || !(s > 0.0) || !theta[2..].iter().all(|&p| unit(p)) {
                    return f64::NEG_INFINITY;
                }
                let kappa = 1.0 / (s * s);
                let (alpha, beta) = (m * kappa, (1.0 - m) * kappa);
                if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
                    return f64::NEG_INFINITY;
                }
                beta_log_density(m, a, b)
                    + half_cauchy.log_pdf(s).unwrap_or(f64::NEG_INFINITY)
                    + beta_log_density_sum(&theta[2..], alpha, beta)
            }
            AeVariant::D | AeVariant::E | AeVariant::F => {
                let (mu, sigma) = (theta[0], theta[1]);
                if !mu.is_finite() || !(sigma > 0.0 && sigma.is_finite()) {
                    return f64::NEG_INFINITY;
                }
                let mu_prior = DistributionFamily::Normal {
                    mean: 0.0,
                    precision: self.hyper.mu_precision,
                };
                let delta_prior = DistributionFamily::Normal {
                    mean: 0.0,
                    precision: 1.0 / (sigma * sigma),
                };
                if delta_prior.validate().is_err() {
                    return f64::NEG_INFINITY;
                }
                let mut lp = mu_prior.log_pdf(mu).unwrap_or(f64::NEG_INFINITY)
                    + half_cauchy.log_pdf(sigma).unwrap_or(f64::NEG_INFINITY);
                for &d in &theta[2..] {
                    lp += delta_prior.log_pdf(d).unwrap_or(f64::NEG_INFINITY);
                }
                lp
            }
        }
    }

    fn outcome_dist(
        &self,
        theta: &[f64],
        row: usize,
        obs: &Observation,
    ) -> Result<DistributionFamily> {
        let trials = obs
            .trials
            .ok_or_else(|| Error::Validation(format!("row {row}: binomial rows need `trials`")))?;
        DistributionFamily::binomial(trials, self.incidence(theta, row, obs)?)
    }

    fn rows_affected_by(&self, component: usize) -> Option<&[usize]> {
        self.dependencies.get(component).and_then(|d| d.as_deref())
    }
}
