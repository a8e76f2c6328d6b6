use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::bundled::{aml_dataset, synthetic_ae, SyntheticAeConfig};
use super::dataset::ingest;
use crate::error::{Error, Result};
use crate::likelihood::{CensoredDataset, LikelihoodMode};
use crate::mcmc::{BandwidthRule, ChainConfig};
use crate::model::{
    AeBinomialModel, AeHyperparameters, AeVariant, CensoredModel, SurvivalExpModel,
    TobitNormalModel,
};
use crate::selection::PoptEstimator;

fn default_tau() -> f64 {
    0.01
}

fn default_group() -> String {
    "group".into()
}

fn default_drug() -> String {
    "drug".into()
}

fn default_class() -> String {
    "class".into()
}

fn default_coef_precision() -> f64 {
    0.01
}

fn default_sigma_scale() -> f64 {
    5.0
}

/// One model of a run, selected by `family`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    SurvivalExponential {
        label: Option<String>,
        #[serde(default = "default_group")]
        group: String,
        #[serde(default = "default_tau")]
        tau0: f64,
        #[serde(default = "default_tau")]
        tau1: f64,
    },
    AeBinomial {
        label: Option<String>,
        variant: AeVariant,
        #[serde(default = "default_drug")]
        drug: String,
        #[serde(default = "default_class")]
        class: String,
        #[serde(default)]
        hyperparameters: AeHyperparameters,
    },
    TobitNormal {
        label: Option<String>,
        #[serde(default)]
        covariates: Vec<String>,
        #[serde(default = "default_coef_precision")]
        coef_precision: f64,
        #[serde(default = "default_sigma_scale")]
        sigma_scale: f64,
    },
}

impl ModelSpec {
    pub fn label(&self) -> String {
        match self {
            ModelSpec::SurvivalExponential { label, .. } => label
                .clone()
                .unwrap_or_else(|| "survival-exponential".into()),
            ModelSpec::AeBinomial { label, variant, .. } => label
                .clone()
                .unwrap_or_else(|| format!("Model {}", variant.letter())),
            ModelSpec::TobitNormal { label, .. } => {
                label.clone().unwrap_or_else(|| "tobit-normal".into())
            }
        }
    }

    /// Instantiate against `data`; fails when referenced columns are missing.
    pub fn build(&self, data: &CensoredDataset) -> Result<Box<dyn CensoredModel>> {
        let label = self.label();
        Ok(match self {
            ModelSpec::SurvivalExponential {
                group, tau0, tau1, ..
            } => Box::new(SurvivalExpModel::new(data, group, *tau0, *tau1)?.with_label(label)),
            ModelSpec::AeBinomial {
                variant,
                drug,
                class,
                hyperparameters,
                ..
            } => Box::new(
                AeBinomialModel::new(*variant, data, drug, class, *hyperparameters)?
                    .with_label(label),
            ),
            ModelSpec::TobitNormal {
                covariates,
                coef_precision,
                sigma_scale,
                ..
            } => Box::new(
                TobitNormalModel::new(data, covariates, *coef_precision, *sigma_scale)?
                    .with_label(label),
            ),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityConfig {
    pub grid_size: usize,
    pub bandwidth: BandwidthRule,
}

impl Default for DensityConfig {
    fn default() -> Self {
        Self {
            grid_size: 512,
            bandwidth: BandwidthRule::Silverman,
        }
    }
}

fn default_modes() -> Vec<LikelihoodMode> {
    vec![LikelihoodMode::Exact]
}

/// Contents of a run configuration file (TOML).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Dataset file, relative to the config file, or `bundled:aml` /
    /// `bundled:ae-synthetic`.
    pub dataset: String,
    /// Output directory, relative to the output root.
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_modes")]
    pub modes: Vec<LikelihoodMode>,
    #[serde(default)]
    pub popt: PoptEstimator,
    #[serde(default)]
    pub chains: ChainConfig,
    #[serde(default)]
    pub density: DensityConfig,
    /// Generator settings used when `dataset = "bundled:ae-synthetic"`.
    #[serde(default)]
    pub synthetic: SyntheticAeConfig,
    /// The model of `fit`.
    pub model: Option<ModelSpec>,
    /// The candidate models of `compare`.
    #[serde(default)]
    pub models: Vec<ModelSpec>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, base).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.chains.validate()?;
        if self.modes.is_empty() {
            return Err(Error::Config(
                "`modes` must list at least one likelihood mode".into(),
            ));
        }
        if self.density.grid_size < 2 {
            return Err(Error::Config("density grid needs at least 2 points".into()));
        }
        let mut labels: Vec<String> = self.models.iter().map(ModelSpec::label).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("duplicate model label `{}`", w[0])));
        }
        Ok(())
    }

    pub fn load_dataset(&self) -> Result<CensoredDataset> {
        match self.dataset.as_str() {
            "bundled:aml" => Ok(aml_dataset()),
            "bundled:ae-synthetic" => synthetic_ae(&self.synthetic),
            other if other.starts_with("bundled:") => {
                Err(Error::Config(format!("unknown bundled dataset `{other}`")))
            }
            path => ingest(self.base_dir.join(path)),
        }
    }

    /// Hash of the canonical serialisation of the analysis settings;
    /// insensitive to TOML formatting and to where outputs are written.
    pub fn hash(&self) -> String {
        let analysis = RunConfig {
            output_dir: None,
            ..self.clone()
        };
        let canonical = serde_json::to_string(&analysis).expect("config serialises");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fit_and_compare_configs() {
        let cfg = RunConfig::from_toml(
            r#"
dataset = "bundled:aml"
modes = ["exact", "dinterval"]
[chains]
n_chains = 2
burn_in = 10
n_keep = 20
[model]
family = "survival-exponential"
"#,
            ".",
        )
        .unwrap();
        assert_eq!(cfg.modes.len(), 2);
        assert_eq!(cfg.chains.n_chains, 2);
        assert_eq!(cfg.chains.thin, 1);
        let data = cfg.load_dataset().unwrap();
        assert_eq!(
            cfg.model
                .as_ref()
                .unwrap()
                .build(&data)
                .unwrap()
                .schema()
                .len(),
            2
        );

        let cmp = RunConfig::from_toml(
            r#"
dataset = "bundled:ae-synthetic"
popt = "twice-pd"
[[models]]
family = "ae-binomial"
variant = "C"
[[models]]
family = "ae-binomial"
variant = "G"
label = "saturated"
[models.hyperparameters]
beta_shape = [0.5, 0.5]
"#,
            ".",
        )
        .unwrap();
        assert_eq!(cmp.models[1].label(), "saturated");
        assert_eq!(cmp.popt, PoptEstimator::TwicePd);
    }

    #[test]
    fn unknown_keys_and_duplicates_are_config_errors() {
        assert!(matches!(
            RunConfig::from_toml("dataset = 'x'\nbogus = 1\n", "."),
            Err(Error::Config(_))
        ));
        let dup = "dataset = 'x'\n[[models]]\nfamily = 'ae-binomial'\nvariant = 'A'\n[[models]]\nfamily = 'ae-binomial'\nvariant = 'A'\n";
        assert!(matches!(
            RunConfig::from_toml(dup, "."),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = RunConfig::from_toml("dataset = 'bundled:aml'\n", ".").unwrap();
        let b = RunConfig::from_toml("dataset   =   \"bundled:aml\"  # same\n", ".").unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig::from_toml("dataset = 'bundled:aml'\noutput_dir = 'elsewhere'\n", ".")
            .unwrap();
        assert_eq!(a.hash(), c.hash());
        let d = RunConfig::from_toml("dataset = 'bundled:aml'\n[chains]\nseed = 5\n", ".").unwrap();
        assert_ne!(a.hash(), d.hash());
    }
}
