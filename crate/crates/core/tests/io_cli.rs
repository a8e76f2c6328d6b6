//! Dataset files, run artifacts and the command-line contract.

use std::path::Path;
use std::process::Command;

use censored_bayes::io::{aml_dataset, dataset_id, ingest, serialize_dataset, write_dataset};
use censored_bayes::likelihood::{CensorKind, CensoredDataset, Observation};
use proptest::prelude::*;
use sha2::{Digest, Sha256};

const BIN: &str = env!("CARGO_BIN_EXE_censored-bayes");

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6f64..1e6,
        (0u32..1000).prop_map(f64::from),
        Just(0.1),
        Just(1e-300)
    ]
}

fn row() -> impl Strategy<Value = Observation> {
    let kind = prop_oneof![
        finite().prop_map(CensorKind::Observed),
        finite().prop_map(CensorKind::LeftCensored),
        finite().prop_map(CensorKind::RightCensored),
        (finite(), 1e-6f64..1e3).prop_map(|(a, w)| CensorKind::IntervalCensored(a, a + w)),
    ];
    let covariate = prop_oneof![4 => finite(), 1 => Just(f64::NAN)];
    (
        kind,
        prop::collection::vec(covariate, 2),
        prop::option::of(1u64..10_000),
    )
        .prop_map(|(k, cov, trials)| {
            let mut o = Observation::new(k, cov);
            o.trials = trials;
            o
        })
}

proptest! {
    #[test]
    fn dataset_files_round_trip(rows in prop::collection::vec(row(), 1..30)) {
        let data = CensoredDataset::new(vec!["x".into(), "z".into()], rows).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        write_dataset(&path, &data).unwrap();
        let back = ingest(&path).unwrap();
        prop_assert_eq!(back.len(), data.len());
        for (a, b) in data.observations().iter().zip(back.observations()) {
            // NaN-aware, bit-exact comparison
            let nan_mask = |o: &Observation| o.covariates.iter().map(|v| v.is_nan()).collect::<Vec<_>>();
            prop_assert_eq!(nan_mask(a), nan_mask(b));
            prop_assert_eq!(&a.outcome, &b.outcome);
            prop_assert_eq!(a.trials, b.trials);
            for (x, y) in a.covariates.iter().zip(&b.covariates) {
                prop_assert!(x.is_nan() && y.is_nan() || x.to_bits() == y.to_bits());
            }
        }
        prop_assert_eq!(serialize_dataset(&back), serialize_dataset(&data));
        prop_assert_eq!(dataset_id(&back), dataset_id(&data));
    }
}

#[test]
fn bundled_aml_partition() {
    let d = aml_dataset();
    let p = d.partition();
    assert_eq!((p.observed, p.right, p.left, p.interval), (18, 5, 0, 0));
    let g = d.covariate_index("group").unwrap();
    let maintained: Vec<_> = d
        .observations()
        .iter()
        .filter(|o| o.covariates[g] == 1.0)
        .collect();
    assert_eq!(maintained.len(), 11);
    assert_eq!(
        maintained
            .iter()
            .filter(|o| o.outcome.is_censored())
            .count(),
        4
    );
}

fn cli(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(BIN)
        .args(args)
        .env("CENSORED_BAYES_OUTPUT", out)
        .current_dir(out)
        .output()
        .expect("binary runs")
}

const SMALL_FIT: &str = r#"
dataset = "data.csv"
output_dir = "run"
modes = ["exact", "dinterval"]
[chains]
n_chains = 2
burn_in = 300
n_keep = 400
seed = 17
[model]
family = "survival-exponential"
"#;

const SMALL_DATA: &str = "outcome,censor,cut1,cut2,trials,group
# a few weeks-to-relapse rows
9,none,,,,1
13,none,,,,1
,right,13,,,1
18,none,,,,1
5,none,,,,0
8,none,,,,0
,right,45,,,0
12,none,,,,0
";

fn small_project() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("fit.toml"), SMALL_FIT).unwrap();
    std::fs::write(dir.path().join("data.csv"), SMALL_DATA).unwrap();
    dir
}

#[test]
fn exit_codes() {
    let dir = small_project();
    let p = dir.path();
    assert_eq!(
        cli(&["fit", "--config", "missing.toml"], p).status.code(),
        Some(4)
    );
    std::fs::write(p.join("bad.toml"), "dataset = 'data.csv'\nnonsense = 1\n").unwrap();
    assert_eq!(
        cli(&["fit", "--config", "bad.toml"], p).status.code(),
        Some(2)
    );
    assert_eq!(cli(&["demo", "nope"], p).status.code(), Some(2));
    std::fs::write(
        p.join("broken.csv"),
        "outcome,censor,cut1,cut2,trials,group\nx,none,,,,1\n",
    )
    .unwrap();
    std::fs::write(
        p.join("broken.toml"),
        SMALL_FIT.replace("data.csv", "broken.csv"),
    )
    .unwrap();
    let out = cli(&["fit", "--config", "broken.toml"], p);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("broken.csv:2") && stderr.contains("outcome"),
        "{stderr}"
    );
    assert_eq!(
        cli(&["fit", "--config", "fit.toml"], p).status.code(),
        Some(0)
    );
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[test]
fn fit_writes_a_complete_manifest() {
    let dir = small_project();
    let p = dir.path();
    let out = cli(&["fit", "--config", "fit.toml"], p);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = p.join("run");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run.join("manifest.json")).unwrap()).unwrap();
    for key in [
        "software",
        "version",
        "command",
        "seed",
        "replicate_seed",
        "config_hash",
        "config",
        "dataset_id",
        "files",
    ] {
        assert!(manifest.get(key).is_some(), "manifest lacks {key}");
    }
    assert_eq!(manifest["seed"], 17);
    let files = manifest["files"].as_object().unwrap();
    for name in [
        "report.csv",
        "report.json",
        "samples_exact.csv",
        "samples_dinterval.csv",
        "summary_exact.csv",
        "density_exact_b0.csv",
    ] {
        assert!(files.contains_key(name), "manifest lacks {name}");
    }
    for (name, hash) in files {
        let bytes = std::fs::read(run.join(name)).unwrap();
        assert_eq!(sha256_hex(&bytes), hash.as_str().unwrap(), "{name}");
        assert!(String::from_utf8_lossy(&bytes).starts_with("# censored-bayes"));
    }
    let report = std::fs::read_to_string(run.join("report.csv")).unwrap();
    assert!(report.lines().any(|l| l == "model,Dbar,pD,DIC,p_opt,PED"));
}

#[test]
fn same_seed_gives_identical_files() {
    let a = small_project();
    let b = small_project();
    assert!(cli(&["fit", "--config", "fit.toml"], a.path())
        .status
        .success());
    assert!(cli(&["fit", "--config", "fit.toml"], b.path())
        .status
        .success());
    let names: Vec<_> = std::fs::read_dir(a.path().join("run"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert!(names.len() > 5);
    for name in names {
        let x = std::fs::read(a.path().join("run").join(&name)).unwrap();
        let y = std::fs::read(b.path().join("run").join(&name)).unwrap();
        assert!(x == y, "{name:?} differs");
    }
}

#[test]
fn export_density_from_a_trace() {
    let dir = small_project();
    let p = dir.path();
    assert!(cli(&["fit", "--config", "fit.toml"], p).status.success());
    let out = cli(
        &[
            "export-density",
            "--trace",
            "run/samples_exact.csv",
            "--param",
            "b1",
            "--grid",
            "256",
        ],
        p,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(p.join("density_b1.csv")).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 256);
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0));
    assert!(rows.iter().all(|&(_, y)| y >= 0.0));
    let integral: f64 = rows
        .windows(2)
        .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
        .sum();
    assert!((integral - 1.0).abs() < 0.01, "integral {integral}");
    assert_eq!(
        cli(
            &[
                "export-density",
                "--trace",
                "run/samples_exact.csv",
                "--param",
                "nope"
            ],
            p
        )
        .status
        .code(),
        Some(2)
    );
}
