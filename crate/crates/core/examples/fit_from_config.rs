//! The `fit` workflow driven by a TOML configuration: samples, summaries,
//! densities, the selection report and a manifest land in one directory.

use censored_bayes::io::{cmd_fit, write_dataset, RunConfig};
use censored_bayes::likelihood::{CensorKind, CensoredDataset, Observation};

pub fn run_example() -> censored_bayes::Result<()> {
    let dir = std::env::temp_dir().join(format!("censored-bayes-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| censored_bayes::Error::Validation(e.to_string()))?;

    // a small tobit-style dataset: a detection limit at 0 left-censors some rows
    let xs = [-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
    let ys = [-2.1, -1.2, -0.4, 0.3, 0.9, 1.4, 2.2, 2.4, 3.1, 3.9];
    let rows = xs
        .iter()
        .zip(ys)
        .map(|(&x, y)| {
            let outcome = if y < 0.0 {
                CensorKind::LeftCensored(0.0)
            } else {
                CensorKind::Observed(y)
            };
            Observation::new(outcome, vec![x])
        })
        .collect();
    write_dataset(
        dir.join("data.csv"),
        &CensoredDataset::new(vec!["x".into()], rows)?,
    )?;

    let config = RunConfig::from_toml(
        &format!(
            r#"
dataset = "data.csv"
output_dir = "{}"
modes = ["exact", "dinterval"]

[chains]
n_chains = 2
burn_in = 1000
n_keep = 1000
seed = 99

[model]
family = "tobit-normal"
covariates = ["x"]
"#,
            dir.join("out").display()
        ),
        &dir,
    )?;
    let outcome = cmd_fit(&config)?;
    if let Some(r) = &outcome.report {
        println!(
            "Dbar {:.2}  pD {:.2}  DIC {:.2}  p_opt {:.2}  PED {:.2}",
            r.dbar, r.pd, r.dic, r.p_opt, r.ped
        );
    }
    let mut files: Vec<String> = std::fs::read_dir(&outcome.dir)
        .map_err(|e| censored_bayes::Error::Validation(e.to_string()))?
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect();
    files.sort();
    println!(
        "wrote {} files to {}: {}",
        files.len(),
        outcome.dir.display(),
        files.join(", ")
    );
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
