use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use censored_bayes::io::{self, Demo, DemoOutcome, RunConfig};
use censored_bayes::mcmc::BandwidthRule;
use censored_bayes::Result;

/// Bayesian inference for censored data with exact and dinterval-style likelihoods.
///
/// Outputs go under the directory named by CENSORED_BAYES_OUTPUT (default: the
/// working directory). Exit codes: 0 success, 2 validation, 3 numeric, 4 I/O.
#[derive(Parser)]
#[command(name = "censored-bayes", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one model and write samples, summaries, densities and its report.
    Fit {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit several models on one dataset and write the ranked DIC/PED table.
    Compare {
        #[arg(long)]
        config: PathBuf,
    },
    /// Kernel density of one column of a samples file.
    ExportDensity {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, default_value_t = 512)]
        grid: usize,
        /// Fixed bandwidth; Silverman's rule when omitted.
        #[arg(long)]
        bandwidth: Option<f64>,
    },
    /// Run a bundled end-to-end example: `survival` or `ae-synthetic`.
    Demo { which: String },
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit { config } => {
            let outcome = io::cmd_fit(&RunConfig::load(&config)?)?;
            if let Some(r) = &outcome.report {
                println!(
                    "{}",
                    censored_bayes::selection::reports_to_csv([r]).trim_end()
                );
            }
            if let Some(line) = io::deviance_gap_headline(&outcome) {
                println!("{line}");
            }
            println!("wrote {}", outcome.dir.display());
        }
        Command::Compare { config } => {
            let outcome = io::cmd_compare(&RunConfig::load(&config)?)?;
            print!("{}", io::comparison_text(&outcome.table));
            println!("wrote {}", outcome.dir.display());
        }
        Command::ExportDensity {
            trace,
            param,
            grid,
            bandwidth,
        } => {
            let rule = bandwidth.map_or(BandwidthRule::Silverman, BandwidthRule::Fixed);
            let path = io::cmd_export_density(&trace, &param, grid, rule)?;
            println!("wrote {}", path.display());
        }
        Command::Demo { which } => match io::cmd_demo(which.parse::<Demo>()?)? {
            DemoOutcome::Survival(fit) => {
                if let Some(line) = io::deviance_gap_headline(&fit) {
                    println!("{line}");
                }
                println!("wrote {}", fit.dir.display());
            }
            DemoOutcome::AeSynthetic(cmp) => {
                print!("{}", io::comparison_text(&cmp.table));
                println!("wrote {}", cmp.dir.display());
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
