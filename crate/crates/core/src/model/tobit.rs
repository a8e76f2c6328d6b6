use super::{
    covariate_column, covariate_value, CensoredModel, ParamSpec, ParameterSchema, Support,
};
use crate::distributions::DistributionFamily;
use crate::error::{Error, Result};
use crate::likelihood::{CensoredDataset, Observation};

/// Censored normal (tobit) regression: `y ~ Normal(β₀ + Σ βⱼ xⱼ, 1/σ²)`,
/// `βⱼ ~ Normal(0, coef_precision)`, `σ ~ HalfCauchy(sigma_scale)`.
#[derive(Debug, Clone)]
pub struct TobitNormalModel {
    label: String,
    columns: Vec<(usize, String)>,
    coef_precision: f64,
    sigma_scale: f64,
    schema: ParameterSchema,
}

impl TobitNormalModel {
    pub fn new(
        data: &CensoredDataset,
        covariate_columns: &[String],
        coef_precision: f64,
        sigma_scale: f64,
    ) -> Result<Self> {
        if !(coef_precision > 0.0 && sigma_scale > 0.0) {
            return Err(Error::Validation(
                "tobit priors need positive precision and scale".into(),
            ));
        }
        let columns = covariate_columns
            .iter()
            .map(|c| Ok((covariate_column(data, c)?, c.clone())))
            .collect::<Result<Vec<_>>>()?;
        let mut specs = vec![ParamSpec::new("intercept", Support::Real, 0.0)];
        specs.extend(
            columns
                .iter()
                .map(|(_, c)| ParamSpec::new(format!("beta_{c}"), Support::Real, 0.0)),
        );
        specs.push(ParamSpec::new("sigma", Support::Positive, sigma_scale));
        Ok(Self {
            label: "tobit-normal".into(),
            columns,
            coef_precision,
            sigma_scale,
            schema: ParameterSchema::new(specs),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

impl CensoredModel for TobitNormalModel {
    fn label(&self) -> &str {
        &self.label
    }

    fn schema(&self) -> &ParameterSchema {
        &self.schema
    }

    fn log_prior(&self, theta: &[f64]) -> f64 {
        let (coefs, sigma) = theta.split_at(theta.len() - 1);
        let coef_prior = DistributionFamily::Normal {
            mean: 0.0,
            precision: self.coef_precision,
        };
        let sigma_prior = DistributionFamily::HalfCauchy {
            scale: self.sigma_scale,
        };
        if !(sigma[0] > 0.0) || coefs.iter().any(|c| !c.is_finite()) {
            return f64::NEG_INFINITY;
        }
        let mut lp = sigma_prior.log_pdf(sigma[0]).unwrap_or(f64::NEG_INFINITY);
        for &c in coefs {
            lp += coef_prior.log_pdf(c).unwrap_or(f64::NEG_INFINITY);
        }
        lp
    }

    fn outcome_dist(
        &self,
        theta: &[f64],
        row: usize,
        obs: &Observation,
    ) -> Result<DistributionFamily> {
        let mut mean = theta[0];
        for (k, (index, name)) in self.columns.iter().enumerate() {
            mean += theta[1 + k] * covariate_value(obs, *index, row, name)?;
        }
        let sigma = theta[theta.len() - 1];
        DistributionFamily::normal(mean, 1.0 / (sigma * sigma))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::likelihood::{loglik_exact, CensorKind};
    use crate::model::outcome_dists;

    #[test]
    fn censored_normal_terms() {
        let data = CensoredDataset::new(
            vec!["x".into()],
            vec![
                Observation::new(CensorKind::Observed(1.2), vec![1.0]),
                Observation::new(CensorKind::LeftCensored(0.0), vec![-1.0]),
            ],
        )
        .unwrap();
        let m = TobitNormalModel::new(&data, &["x".to_string()], 0.01, 5.0).unwrap();
        assert_eq!(m.schema().names(), vec!["intercept", "beta_x", "sigma"]);
        let theta = [0.5, 1.0, 1.0];
        let ll = loglik_exact(&data, &outcome_dists(&m, &theta, &data).unwrap()).unwrap();
        // N(1.5, 1) density at 1.2 plus Φ(0 - (-0.5)) for the censored row
        let expected = -0.5 * (2.0 * std::f64::consts::PI).ln() - 0.045
            + crate::distributions::special::ndtr(0.5).ln();
        assert!((ll - expected).abs() < 1e-12);
    }
}
