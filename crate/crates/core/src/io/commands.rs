use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{ModelSpec, RunConfig};
use super::dataset::{dataset_id, serialize_dataset};
use crate::error::{Error, Result};
use crate::likelihood::{CensoredDataset, LikelihoodMode};
use crate::mcmc::{
    self, export_density, summarize, BandwidthRule, ChainConfig, DensityEstimate, PosteriorSamples,
};
use crate::model::{AeVariant, CensoredModel};
use crate::selection::{
    build_report, compare, reports_to_csv, reports_to_json, ComparisonTable, PoptEstimator,
    SelectionReport,
};

/// Environment variable naming the directory all outputs are written under.
pub const OUTPUT_ROOT_ENV: &str = "CENSORED_BAYES_OUTPUT";

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Seed of the second run used for the optimism estimate.
pub fn replicate_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn resolve_output_dir(config: &RunConfig, default: &str) -> PathBuf {
    let root = output_root();
    match &config.output_dir {
        Some(dir) if dir.is_absolute() => dir.clone(),
        Some(dir) => root.join(dir),
        None => root.join(default),
    }
}

/// Writes files under one directory, each starting with a provenance line,
/// and remembers their hashes for the manifest.
struct ArtifactWriter {
    dir: PathBuf,
    provenance: String,
    files: BTreeMap<String, String>,
}

impl ArtifactWriter {
    fn new(dir: PathBuf, seed: u64, config_hash: &str) -> Result<Self> {
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self {
            dir,
            provenance: format!("# censored-bayes {VERSION} seed={seed} config={config_hash}\n"),
            files: BTreeMap::new(),
        })
    }

    fn write(&mut self, name: &str, body: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let text = format!("{}{body}", self.provenance);
        std::fs::write(&path, &text).map_err(|e| Error::io(&path, e))?;
        let digest = Sha256::digest(text.as_bytes());
        self.files.insert(
            name.to_string(),
            digest.iter().map(|b| format!("{b:02x}")).collect(),
        );
        Ok(path)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    software: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    replicate_seed: u64,
    config_hash: &'a str,
    config: &'a RunConfig,
    dataset: &'a str,
    dataset_id: String,
    dataset_rows: usize,
    files: &'a BTreeMap<String, String>,
}

fn write_manifest(
    writer: &ArtifactWriter,
    command: &str,
    config: &RunConfig,
    data: &CensoredDataset,
) -> Result<PathBuf> {
    let hash = config.hash();
    let manifest = Manifest {
        software: "censored-bayes",
        version: VERSION,
        command,
        seed: config.chains.seed,
        replicate_seed: replicate_seed(config.chains.seed),
        config_hash: &hash,
        config,
        dataset: &config.dataset,
        dataset_id: dataset_id(data),
        dataset_rows: data.len(),
        files: &writer.files,
    };
    let path = writer.dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Validation(e.to_string()))?
        + "\n";
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Samples as CSV: `chain,draw,<params...>,deviance`.
pub fn samples_to_csv(samples: &PosteriorSamples) -> String {
    let mut out = String::from("chain,draw,");
    for name in &samples.param_names {
        out.push_str(name);
        out.push(',');
    }
    out.push_str("deviance\n");
    let mut counter = vec![0usize; samples.n_chains()];
    for i in 0..samples.n_draws() {
        let chain = samples.chain_ids[i];
        let _ = write!(out, "{chain},{}", counter[chain]);
        counter[chain] += 1;
        for v in samples.draw(i) {
            let _ = write!(out, ",{v}");
        }
        let _ = writeln!(out, ",{}", samples.deviance[i]);
    }
    out
}

pub fn summary_to_csv(samples: &PosteriorSamples) -> String {
    let mut out = String::from("parameter,mean,sd,q2.5,q50,q97.5,rhat,ess,mcse\n");
    for s in summarize(samples) {
        let rhat = s.rhat.map(|r| r.to_string()).unwrap_or_else(|| "NA".into());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{rhat},{},{}",
            s.name, s.mean, s.sd, s.q025, s.q50, s.q975, s.ess, s.mcse
        );
    }
    out
}

pub fn density_to_csv(d: &DensityEstimate) -> String {
    let mut out = String::from("x,density\n");
    for (x, y) in d.grid.iter().zip(&d.density) {
        let _ = writeln!(out, "{x},{y}");
    }
    out
}

/// Everything a fit produced.
#[derive(Debug)]
pub struct FitOutcome {
    pub dir: PathBuf,
    pub samples: BTreeMap<String, PosteriorSamples>,
    pub report: Option<SelectionReport>,
    pub manifest: PathBuf,
}

impl FitOutcome {
    pub fn mean_deviance(&self, mode: LikelihoodMode) -> Option<f64> {
        self.samples
            .get(&mode.to_string())
            .map(PosteriorSamples::mean_deviance)
    }
}

/// Exact-mode runs needed for a report under `estimator`.
fn exact_runs(
    model: &dyn CensoredModel,
    data: &CensoredDataset,
    chains: &ChainConfig,
    estimator: PoptEstimator,
) -> Result<Vec<PosteriorSamples>> {
    let mut runs = vec![mcmc::run(model, data, LikelihoodMode::Exact, chains)?];
    if estimator != PoptEstimator::TwicePd {
        let replicate = chains.with_seed(replicate_seed(chains.seed));
        runs.push(mcmc::run(model, data, LikelihoodMode::Exact, &replicate)?);
    }
    Ok(runs)
}

/// Fit the configured model in every requested mode and write samples,
/// summaries, densities, the selection report and a manifest.
pub fn cmd_fit(config: &RunConfig) -> Result<FitOutcome> {
    let spec = config
        .model
        .as_ref()
        .ok_or_else(|| Error::Config("`fit` needs a [model] table".into()))?;
    let data = config.load_dataset()?;
    fit_with_data(config, spec, &data, "fit")
}

fn fit_with_data(
    config: &RunConfig,
    spec: &ModelSpec,
    data: &CensoredDataset,
    default_dir: &str,
) -> Result<FitOutcome> {
    let model = spec.build(data)?;
    let dir = resolve_output_dir(config, default_dir);
    let mut writer = ArtifactWriter::new(dir.clone(), config.chains.seed, &config.hash())?;
    let mut samples = BTreeMap::new();
    let mut report = None;
    for &mode in &config.modes {
        let tag = mode.to_string();
        let primary = match mode {
            LikelihoodMode::Exact => {
                let runs = exact_runs(model.as_ref(), data, &config.chains, config.popt)?;
                let refs: Vec<&PosteriorSamples> = runs.iter().collect();
                let r = build_report(model.as_ref(), data, &refs, config.popt)?;
                writer.write("report.csv", &reports_to_csv([&r]))?;
                writer.write(
                    "report.json",
                    &(reports_to_json([&r], r.mode, &r.dataset_id)? + "\n"),
                )?;
                report = Some(r);
                runs.into_iter().next().expect("at least one run")
            }
            LikelihoodMode::DIntervalStyle => {
                mcmc::run(model.as_ref(), data, mode, &config.chains)?
            }
        };
        writer.write(&format!("samples_{tag}.csv"), &samples_to_csv(&primary))?;
        writer.write(&format!("summary_{tag}.csv"), &summary_to_csv(&primary))?;
        for (j, name) in primary.param_names.iter().enumerate() {
            match export_density(
                &primary.column(j),
                config.density.grid_size,
                config.density.bandwidth,
            ) {
                Ok(d) => {
                    writer.write(&format!("density_{tag}_{name}.csv"), &density_to_csv(&d))?;
                }
                Err(Error::DegenerateDensity) => {}
                Err(e) => return Err(e),
            }
        }
        if let Ok(d) = export_density(
            &primary.deviance,
            config.density.grid_size,
            config.density.bandwidth,
        ) {
            writer.write(&format!("density_{tag}_deviance.csv"), &density_to_csv(&d))?;
        }
        samples.insert(tag, primary);
    }
    let manifest = write_manifest(&writer, "fit", config, data)?;
    Ok(FitOutcome {
        dir,
        samples,
        report,
        manifest,
    })
}

#[derive(Debug)]
pub struct CompareOutcome {
    pub dir: PathBuf,
    pub table: ComparisonTable,
    pub manifest: PathBuf,
}

/// Fit every configured model (concurrently) in exact mode and write the
/// ranked comparison table.
pub fn cmd_compare(config: &RunConfig) -> Result<CompareOutcome> {
    let data = config.load_dataset()?;
    compare_with_data(config, &data, "compare", &[])
}

fn compare_with_data(
    config: &RunConfig,
    data: &CensoredDataset,
    default_dir: &str,
    extra: &[(&str, String)],
) -> Result<CompareOutcome> {
    if config.models.len() < 2 {
        return Err(Error::Config(
            "`compare` needs at least two [[models]] entries".into(),
        ));
    }
    let models = config
        .models
        .iter()
        .map(|m| m.build(data))
        .collect::<Result<Vec<_>>>()?;
    let reports: Vec<Result<SelectionReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = models
            .iter()
            .map(|model| {
                scope.spawn(move || {
                    let runs = exact_runs(model.as_ref(), data, &config.chains, config.popt)?;
                    let refs: Vec<&PosteriorSamples> = runs.iter().collect();
                    build_report(model.as_ref(), data, &refs, config.popt)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("fit thread panicked"))
            .collect()
    });
    let reports = reports.into_iter().collect::<Result<Vec<_>>>()?;
    let table = compare(reports)?;
    let dir = resolve_output_dir(config, default_dir);
    let mut writer = ArtifactWriter::new(dir.clone(), config.chains.seed, &config.hash())?;
    for (name, body) in extra {
        writer.write(name, body)?;
    }
    let ranked: Vec<&SelectionReport> = table.rows.iter().map(|r| &r.report).collect();
    writer.write("comparison.csv", &reports_to_csv(ranked.iter().copied()))?;
    writer.write(
        "comparison.json",
        &(reports_to_json(ranked.iter().copied(), table.mode, &table.dataset_id)? + "\n"),
    )?;
    let manifest = write_manifest(&writer, "compare", config, data)?;
    Ok(CompareOutcome {
        dir,
        table,
        manifest,
    })
}

/// Read one parameter's draws from a samples file (lines starting with `#`
/// are skipped).
pub fn read_trace(path: &Path, param: &str) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let parse = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        column: param.to_string(),
        message,
    };
    let headers = reader
        .headers()
        .map_err(|e| parse(1, e.to_string()))?
        .clone();
    let col = headers
        .iter()
        .position(|h| h == param)
        .ok_or_else(|| Error::Validation(format!("{}: no column `{param}`", path.display())))?;
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record
            .map_err(|e| parse(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let v: f64 = record.get(col).unwrap_or("").parse().map_err(|_| {
            parse(
                line,
                format!("`{}` is not a number", record.get(col).unwrap_or("")),
            )
        })?;
        values.push(v);
    }
    Ok(values)
}

/// Kernel density of one column of a samples file, written next to the
/// output root as `density_<param>.csv`.
pub fn cmd_export_density(
    trace: &Path,
    param: &str,
    grid_size: usize,
    rule: BandwidthRule,
) -> Result<PathBuf> {
    let values = read_trace(trace, param)?;
    let density = export_density(&values, grid_size, rule)?;
    let root = output_root();
    std::fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
    let path = root.join(format!("density_{param}.csv"));
    let text = read_provenance(trace).unwrap_or_default() + &density_to_csv(&density);
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn read_provenance(path: &Path) -> Option<String> {
    let text = std::fs::read_to_string(path).ok()?;
    let first = text.lines().next()?;
    first
        .starts_with("# censored-bayes")
        .then(|| format!("{first}\n"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Demo {
    Survival,
    AeSynthetic,
}

impl std::str::FromStr for Demo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "survival" => Ok(Demo::Survival),
            "ae-synthetic" => Ok(Demo::AeSynthetic),
            other => Err(Error::Validation(format!(
                "unknown demo `{other}` (survival|ae-synthetic)"
            ))),
        }
    }
}

/// Configuration of the survival demo: bundled AML data, both modes, three
/// chains with 30 000 burn-in sweeps and 10 000 kept draws each (every
/// third sweep).
pub fn survival_demo_config() -> RunConfig {
    RunConfig {
        dataset: "bundled:aml".into(),
        output_dir: Some("demo-survival".into()),
        modes: vec![LikelihoodMode::Exact, LikelihoodMode::DIntervalStyle],
        popt: PoptEstimator::ImportanceWeighted,
        chains: ChainConfig {
            n_chains: 3,
            burn_in: 30_000,
            n_keep: 10_000,
            thin: 3,
            seed: 1_977,
            adapt_window: 100,
        },
        density: Default::default(),
        synthetic: Default::default(),
        model: Some(ModelSpec::SurvivalExponential {
            label: None,
            group: "group".into(),
            tau0: 0.01,
            tau1: 0.01,
        }),
        models: Vec::new(),
        base_dir: PathBuf::new(),
    }
}

/// Configuration of the adverse-event demo: seven models on the synthetic
/// five-drug dataset.
pub fn ae_demo_config() -> RunConfig {
    RunConfig {
        dataset: "bundled:ae-synthetic".into(),
        output_dir: Some("demo-ae-synthetic".into()),
        modes: vec![LikelihoodMode::Exact],
        popt: PoptEstimator::ImportanceWeighted,
        chains: ChainConfig {
            n_chains: 3,
            burn_in: 4_000,
            n_keep: 4_000,
            thin: 1,
            seed: 2_021,
            adapt_window: 50,
        },
        density: Default::default(),
        synthetic: Default::default(),
        model: None,
        models: AeVariant::ALL
            .iter()
            .map(|&variant| ModelSpec::AeBinomial {
                label: None,
                variant,
                drug: "drug".into(),
                class: "class".into(),
                hyperparameters: Default::default(),
            })
            .collect(),
        base_dir: PathBuf::new(),
    }
}

#[derive(Debug)]
pub enum DemoOutcome {
    Survival(FitOutcome),
    AeSynthetic(CompareOutcome),
}

/// Headline comparing mean deviance between the two likelihood modes.
pub fn deviance_gap_headline(fit: &FitOutcome) -> Option<String> {
    let exact = fit.mean_deviance(LikelihoodMode::Exact)?;
    let dint = fit.mean_deviance(LikelihoodMode::DIntervalStyle)?;
    Some(format!(
        "mean deviance: exact {exact:.2}, dinterval {dint:.2}, gap {:.2}",
        exact - dint
    ))
}

pub fn comparison_text(table: &ComparisonTable) -> String {
    let mut out = format!(
        "{:<4} {:<10} {:>10} {:>8} {:>10} {:>9} {:>10}\n",
        "rank", "model", "Dbar", "pD", "DIC", "p_opt", "PED"
    );
    for row in &table.rows {
        let r = &row.report;
        let _ = writeln!(
            out,
            "{:<4} {:<10} {:>10.2} {:>8.2} {:>10.2} {:>9.2} {:>10.2}{}",
            row.rank,
            r.model,
            r.dbar,
            r.pd,
            r.dic,
            r.p_opt,
            r.ped,
            if row.overfit { "  overfit" } else { "" }
        );
    }
    out
}

pub fn cmd_demo(which: Demo) -> Result<DemoOutcome> {
    match which {
        Demo::Survival => {
            let config = survival_demo_config();
            let data = config.load_dataset()?;
            let spec = config.model.clone().expect("demo has a model");
            Ok(DemoOutcome::Survival(fit_with_data(
                &config,
                &spec,
                &data,
                "demo-survival",
            )?))
        }
        Demo::AeSynthetic => {
            let config = ae_demo_config();
            let data = config.load_dataset()?;
            let extra = [("dataset.csv", serialize_dataset(&data))];
            Ok(DemoOutcome::AeSynthetic(compare_with_data(
                &config,
                &data,
                "demo-ae-synthetic",
                &extra,
            )?))
        }
    }
}
