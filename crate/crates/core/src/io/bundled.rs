use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::parse_dataset;
use crate::error::Result;
use crate::likelihood::{CensorKind, CensoredDataset, Observation};

const AML_CSV: &str = include_str!("../../data/aml.csv");

/// The acute myelogenous leukemia remission data: 23 patients, weeks to
/// relapse, `group = 1` for maintained chemotherapy.
pub fn aml_dataset() -> CensoredDataset {
    parse_dataset(AML_CSV, Path::new("aml.csv")).expect("bundled AML data parses")
}

pub fn aml_csv() -> &'static str {
    AML_CSV
}

/// Settings of the synthetic adverse-event meta-analysis generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticAeConfig {
    pub seed: u64,
    pub studies_per_drug: usize,
    /// True incidence per drug; drugs `0..2` form class 0, the rest class 1.
    pub incidences: Vec<f64>,
    pub min_trials: u64,
    pub max_trials: u64,
    /// Probability that a study only reports counts at or above a cutoff.
    pub cutoff_probability: f64,
    /// Candidate cutoffs as a fraction of the study size.
    pub cutoff_fractions: Vec<f64>,
    /// Unreported count under cutoff `k` is encoded as `count ≤ k - 1` when
    /// true and `count ≤ k` when false.
    pub strict_cutoff: bool,
}

impl Default for SyntheticAeConfig {
    fn default() -> Self {
        Self {
            seed: 2_021,
            studies_per_drug: 8,
            incidences: vec![0.040, 0.035, 0.022, 0.015, 0.028],
            min_trials: 60,
            max_trials: 700,
            cutoff_probability: 0.35,
            cutoff_fractions: vec![0.01, 0.02, 0.05],
            strict_cutoff: true,
        }
    }
}

/// Study-level adverse-event counts with drug and class codes. Studies whose
/// count falls below their reporting cutoff become left-censored rows.
pub fn synthetic_ae(config: &SyntheticAeConfig) -> Result<CensoredDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut observations = Vec::new();
    for (drug, &p) in config.incidences.iter().enumerate() {
        let class = if drug < 2 { 0.0 } else { 1.0 };
        for _ in 0..config.studies_per_drug {
            let n = rng.random_range(config.min_trials..=config.max_trials);
            let count = rng.sample(
                rand_distr::Binomial::new(n, p)
                    .map_err(|e| crate::Error::Validation(e.to_string()))?,
            ) as f64;
            let censored_cutoff = if rng.random::<f64>() < config.cutoff_probability
                && !config.cutoff_fractions.is_empty()
            {
                let frac =
                    config.cutoff_fractions[rng.random_range(0..config.cutoff_fractions.len())];
                Some((frac * n as f64).ceil().max(1.0))
            } else {
                None
            };
            let outcome = match censored_cutoff {
                Some(k) if count < k => {
                    CensorKind::LeftCensored(if config.strict_cutoff { k - 1.0 } else { k })
                }
                _ => CensorKind::Observed(count),
            };
            observations.push(Observation::new(outcome, vec![drug as f64, class]).with_trials(n));
        }
    }
    CensoredDataset::new(vec!["drug".into(), "class".into()], observations)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aml_partition() {
        let d = aml_dataset();
        assert_eq!(d.len(), 23);
        let p = d.partition();
        assert_eq!((p.observed, p.right, p.left, p.interval), (18, 5, 0, 0));
        let maintained_censored = d
            .observations()
            .iter()
            .filter(|o| o.covariates[0] == 1.0 && o.outcome.is_censored())
            .count();
        assert_eq!(maintained_censored, 4);
    }

    #[test]
    fn synthetic_is_seeded_and_censored() {
        let cfg = SyntheticAeConfig::default();
        let a = synthetic_ae(&cfg).unwrap();
        assert_eq!(a, synthetic_ae(&cfg).unwrap());
        assert_eq!(a.len(), 40);
        assert!(a.partition().left > 0);
    }
}
