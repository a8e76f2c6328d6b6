use super::{
    covariate_column, covariate_value, CensoredModel, ParamSpec, ParameterSchema, Support,
};
use crate::distributions::DistributionFamily;
use crate::error::{Error, Result};
use crate::likelihood::{CensorKind, CensoredDataset, Observation};

/// Exponential survival regression with hazard `exp(b0 + b1 * group)`.
///
/// `b0` is the log baseline hazard and `b1` the log hazard ratio of the
/// `group = 1` arm. Both coefficients get independent `Normal(0, tau)` priors
/// where `tau` is a precision.
#[derive(Debug, Clone)]
pub struct SurvivalExpModel {
    label: String,
    group_index: usize,
    group_name: String,
    tau0: f64,
    tau1: f64,
    schema: ParameterSchema,
}

impl SurvivalExpModel {
    pub fn new(data: &CensoredDataset, group_column: &str, tau0: f64, tau1: f64) -> Result<Self> {
        for (name, tau) in [("tau0", tau0), ("tau1", tau1)] {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::Validation(format!(
                    "{name} must be a positive precision, got {tau}"
                )));
            }
        }
        let model = Self {
            label: "survival-exponential".into(),
            group_index: covariate_column(data, group_column)?,
            group_name: group_column.to_string(),
            tau0,
            tau1,
            schema: ParameterSchema::new(vec![
                ParamSpec::new("b0", Support::Real, 0.0),
                ParamSpec::new("b1", Support::Real, 0.0),
            ]),
        };
        model.check_data(data)?;
        Ok(model)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn rate(&self, theta: &[f64], group: f64) -> f64 {
        (theta[0] + theta[1] * group).exp()
    }
}

fn normal_log_density(x: f64, precision: f64) -> f64 {
    0.5 * precision.ln() - crate::distributions::special::LN_SQRT_2PI - 0.5 * precision * x * x
}

impl CensoredModel for SurvivalExpModel {
    fn label(&self) -> &str {
        &self.label
    }

    fn schema(&self) -> &ParameterSchema {
        &self.schema
    }

    fn log_prior(&self, theta: &[f64]) -> f64 {
        if !theta[0].is_finite() || !theta[1].is_finite() {
            return f64::NEG_INFINITY;
        }
        normal_log_density(theta[0], self.tau0) + normal_log_density(theta[1], self.tau1)
    }

    fn outcome_dist(
        &self,
        theta: &[f64],
        row: usize,
        obs: &Observation,
    ) -> Result<DistributionFamily> {
        let group = covariate_value(obs, self.group_index, row, &self.group_name)?;
        DistributionFamily::exponential(self.rate(theta, group))
    }

    fn check_data(&self, data: &CensoredDataset) -> Result<()> {
        for (row, obs) in data.observations().iter().enumerate() {
            covariate_value(obs, self.group_index, row, &self.group_name)?;
            let negative = match obs.outcome {
                CensorKind::Observed(y) => y < 0.0,
                CensorKind::RightCensored(c) | CensorKind::LeftCensored(c) => c < 0.0,
                CensorKind::IntervalCensored(_, b) => b <= 0.0,
            };
            if negative {
                return Err(Error::Validation(format!(
                    "row {row}: survival times must be nonnegative"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_outcome_dist, log_prior};

    fn data() -> CensoredDataset {
        CensoredDataset::new(
            vec!["group".into()],
            vec![
                Observation::new(CensorKind::Observed(9.0), vec![1.0]),
                Observation::new(CensorKind::RightCensored(13.0), vec![0.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn prior_at_origin_is_two_normal_densities() {
        let d = data();
        let m = SurvivalExpModel::new(&d, "group", 0.01, 0.01).unwrap();
        let p = m.schema().vector(vec![0.0, 0.0]).unwrap();
        // ln N(0; 0, var 100) = -ln(10 √(2π))
        let single = -(10.0f64 * (2.0 * std::f64::consts::PI).sqrt()).ln();
        assert!((log_prior(&m, &p).unwrap() - 2.0 * single).abs() < 1e-14);
    }

    #[test]
    fn zero_coefficients_give_unit_rate() {
        let d = data();
        let m = SurvivalExpModel::new(&d, "group", 0.01, 0.01).unwrap();
        let p = m.schema().vector(vec![0.0, 0.0]).unwrap();
        for (row, obs) in d.observations().iter().enumerate() {
            assert_eq!(
                build_outcome_dist(&m, &p, row, obs).unwrap(),
                DistributionFamily::Exponential { rate: 1.0 }
            );
        }
    }

    #[test]
    fn missing_group_column_is_rejected() {
        assert!(matches!(
            SurvivalExpModel::new(&data(), "arm", 0.01, 0.01),
            Err(Error::Validation(_))
        ));
    }
}
