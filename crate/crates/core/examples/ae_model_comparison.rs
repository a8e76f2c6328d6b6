//! Seven censored binomial models for study-level adverse-event counts, ranked
//! by DIC with PED alongside. The saturated model is flagged as overfit.

use censored_bayes::io::{synthetic_ae, SyntheticAeConfig};
use censored_bayes::likelihood::LikelihoodMode;
use censored_bayes::mcmc::{self, ChainConfig};
use censored_bayes::model::{AeBinomialModel, AeHyperparameters, AeVariant};
use censored_bayes::selection::{build_report, compare, reports_to_csv, PoptEstimator};

pub fn run_example() -> censored_bayes::Result<()> {
    let data = synthetic_ae(&SyntheticAeConfig::default())?;
    println!(
        "{} studies, {} censored below their reporting cutoff",
        data.len(),
        data.censored_rows().len()
    );
    let config = ChainConfig {
        n_chains: 2,
        burn_in: 1_500,
        n_keep: 1_500,
        thin: 1,
        seed: 3,
        adapt_window: 50,
    };
    let mut reports = Vec::new();
    for variant in AeVariant::ALL {
        let model = AeBinomialModel::new(
            variant,
            &data,
            "drug",
            "class",
            AeHyperparameters::default(),
        )?
        .with_label(format!("Model {}", variant.letter()));
        let a = mcmc::run(&model, &data, LikelihoodMode::Exact, &config)?;
        let b = mcmc::run(&model, &data, LikelihoodMode::Exact, &config.with_seed(4))?;
        reports.push(build_report(
            &model,
            &data,
            &[&a, &b],
            PoptEstimator::ImportanceWeighted,
        )?);
    }
    let table = compare(reports)?;
    print!("{}", reports_to_csv(table.rows.iter().map(|r| &r.report)));
    for row in table.rows.iter().filter(|r| r.overfit) {
        println!("overfit: {}", row.report.model);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
