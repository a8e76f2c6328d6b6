//! Kernel density of a posterior trace on an evenly spaced grid, ready for
//! any plotting tool.

use censored_bayes::io::{aml_dataset, density_to_csv};
use censored_bayes::likelihood::LikelihoodMode;
use censored_bayes::mcmc::{self, export_density, BandwidthRule, ChainConfig};
use censored_bayes::model::SurvivalExpModel;

pub fn run_example() -> censored_bayes::Result<()> {
    let data = aml_dataset();
    let model = SurvivalExpModel::new(&data, "group", 0.01, 0.01)?;
    let config = ChainConfig {
        n_chains: 2,
        burn_in: 1_000,
        n_keep: 2_000,
        thin: 1,
        seed: 8,
        adapt_window: 50,
    };
    let samples = mcmc::run(&model, &data, LikelihoodMode::Exact, &config)?;
    let b1 = samples.column(samples.param_index("b1").expect("b1 exists"));
    let density = export_density(&b1, 128, BandwidthRule::Silverman)?;
    let peak = density
        .density
        .iter()
        .zip(&density.grid)
        .max_by(|a, b| a.0.total_cmp(b.0))
        .map(|(_, x)| *x)
        .unwrap_or(f64::NAN);
    println!(
        "bandwidth {:.4}, integral {:.5}, mode near {peak:.3}",
        density.bandwidth,
        density.integral()
    );
    let csv = density_to_csv(&density);
    println!("{}", csv.lines().take(4).collect::<Vec<_>>().join("\n"));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
