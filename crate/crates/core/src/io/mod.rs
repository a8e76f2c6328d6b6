//! Dataset files, run configuration and the command workflows behind the CLI.

mod bundled;
mod commands;
mod config;
mod dataset;

pub use bundled::{aml_csv, aml_dataset, synthetic_ae, SyntheticAeConfig};
pub use commands::{
    ae_demo_config, cmd_compare, cmd_demo, cmd_export_density, cmd_fit, comparison_text,
    density_to_csv, deviance_gap_headline, output_root, read_trace, replicate_seed, samples_to_csv,
    summary_to_csv, survival_demo_config, CompareOutcome, Demo, DemoOutcome, FitOutcome,
    OUTPUT_ROOT_ENV, VERSION,
};
pub use config::{DensityConfig, ModelSpec, RunConfig};
pub use dataset::{
    dataset_id, ingest, parse_dataset, serialize_dataset, write_dataset, FIXED_COLUMNS,
};
