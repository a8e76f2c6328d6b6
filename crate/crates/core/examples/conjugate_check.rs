//! The sampler against a closed-form posterior: one fully observed binomial
//! row under a uniform prior has posterior mean (y + 1) / (n + 2).

use censored_bayes::likelihood::{CensorKind, CensoredDataset, LikelihoodMode, Observation};
use censored_bayes::mcmc::{self, summarize, ChainConfig};
use censored_bayes::model::{AeBinomialModel, AeHyperparameters, AeVariant};

pub fn run_example() -> censored_bayes::Result<()> {
    let (y, n) = (7.0, 40);
    let data = CensoredDataset::new(
        vec!["drug".into(), "class".into()],
        vec![Observation::new(CensorKind::Observed(y), vec![0.0, 0.0]).with_trials(n)],
    )?;
    let model = AeBinomialModel::new(
        AeVariant::A,
        &data,
        "drug",
        "class",
        AeHyperparameters::default(),
    )?;
    let config = ChainConfig {
        n_chains: 3,
        burn_in: 1_000,
        n_keep: 10_000,
        thin: 1,
        seed: 5,
        adapt_window: 50,
    };
    let samples = mcmc::run(&model, &data, LikelihoodMode::Exact, &config)?;
    let s = &summarize(&samples)[0];
    let closed = (y + 1.0) / (n as f64 + 2.0);
    println!(
        "posterior mean {:.5} (MCSE {:.5}), closed form {closed:.5}, R-hat {:.4}",
        s.mean,
        s.mcse,
        s.rhat.unwrap_or(f64::NAN)
    );
    assert!((s.mean - closed).abs() < 4.0 * s.mcse);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
