//! DIC and PED on models where the penalties have known behaviour.

mod common;

use censored_bayes::likelihood::{CensoredDataset, LikelihoodMode};
use censored_bayes::mcmc::{self, ChainConfig, PosteriorSamples};
use censored_bayes::model::{AeBinomialModel, AeHyperparameters, AeVariant};
use censored_bayes::selection::{
    build_report, compare, compute_popt, plug_in_deviance, reports_to_csv, PoptEstimator,
    SelectionReport,
};
use censored_bayes::Error;

const REPLICATE_XOR: u64 = 0x9e37_79b9_7f4a_7c15;

fn cfg(n_keep: usize, seed: u64) -> ChainConfig {
    ChainConfig {
        n_chains: 3,
        burn_in: 2_000,
        n_keep,
        thin: 1,
        seed,
        adapt_window: 50,
    }
}

fn model_a(data: &CensoredDataset) -> AeBinomialModel {
    AeBinomialModel::new(
        AeVariant::A,
        data,
        "drug",
        "class",
        AeHyperparameters::default(),
    )
    .unwrap()
}

fn two_runs(
    model: &AeBinomialModel,
    data: &CensoredDataset,
    n_keep: usize,
    seed: u64,
) -> (PosteriorSamples, PosteriorSamples) {
    let a = mcmc::run(model, data, LikelihoodMode::Exact, &cfg(n_keep, seed)).unwrap();
    let b = mcmc::run(
        model,
        data,
        LikelihoodMode::Exact,
        &cfg(n_keep, seed ^ REPLICATE_XOR),
    )
    .unwrap();
    (a, b)
}

/// Thirty studies with a common incidence, a few reported only as "fewer than k".
fn many_rows() -> CensoredDataset {
    let mut rows: Vec<(i64, u64)> = (0..30)
        .map(|i| (2 + (i * 7) % 9, 100 + (i as u64 * 13) % 80))
        .collect();
    rows[3] = (-3, 120);
    rows[17] = (-4, 90);
    common::binomial_rows(&rows)
}

#[test]
fn single_parameter_penalties_are_near_one_and_two() {
    let data = many_rows();
    let model = model_a(&data);
    // 3 chains x 10000 draws per run
    let (a, b) = two_runs(&model, &data, 10_000, 41);
    let r = build_report(&model, &data, &[&a, &b], PoptEstimator::ImportanceWeighted).unwrap();
    assert!((0.7..=1.3).contains(&r.pd), "pD {}", r.pd);
    assert!((1.4..=2.8).contains(&r.p_opt), "p_opt {}", r.p_opt);
    assert_eq!(r.dic - r.dbar, r.pd);
    assert_eq!(r.ped - r.dbar, r.p_opt);
    assert!(!r.is_overfit());
    let u = build_report(&model, &data, &[&a, &b], PoptEstimator::Unweighted).unwrap();
    assert!(
        (1.4..=2.8).contains(&u.p_opt),
        "unweighted p_opt {}",
        u.p_opt
    );
}

#[test]
fn degenerate_posterior_has_no_penalty() {
    let data = many_rows();
    let model = model_a(&data);
    let (mut a, mut b) = two_runs(&model, &data, 200, 3);
    let theta = [0.05];
    let d = plug_in_deviance(&model, &data, &theta).unwrap();
    for s in [&mut a, &mut b] {
        s.draws.iter_mut().for_each(|x| *x = theta[0]);
        s.deviance.iter_mut().for_each(|x| *x = d);
    }
    let r = build_report(&model, &data, &[&a, &b], PoptEstimator::ImportanceWeighted).unwrap();
    assert!(r.pd.abs() < 1e-9, "pD {}", r.pd);
    assert_eq!(r.p_opt, 0.0);
}

#[test]
fn dinterval_runs_are_rejected() {
    let data = many_rows();
    let model = model_a(&data);
    let s = mcmc::run(&model, &data, LikelihoodMode::DIntervalStyle, &cfg(50, 1)).unwrap();
    let err = build_report(&model, &data, &[&s, &s], PoptEstimator::TwicePd).unwrap_err();
    assert!(matches!(err, Error::MonitoredDeviance), "{err:?}");
}

#[test]
fn replication_is_required_for_the_paired_estimator() {
    let data = many_rows();
    let model = model_a(&data);
    let s = mcmc::run(&model, &data, LikelihoodMode::Exact, &cfg(50, 1)).unwrap();
    assert!(matches!(
        build_report(&model, &data, &[&s], PoptEstimator::ImportanceWeighted),
        Err(Error::InsufficientReplication(1))
    ));
    assert!(matches!(
        compute_popt(&s, &s, &model, &data, PoptEstimator::ImportanceWeighted),
        Err(Error::InsufficientReplication(_))
    ));
}

#[test]
fn twice_pd_fallback_is_labelled() {
    let r = SelectionReport::from_parts("C", 343.14, 4.61, 2.0 * 4.61, PoptEstimator::TwicePd, "x");
    assert!((r.p_opt - 9.22).abs() < 1e-9);
    assert!((r.ped - 352.36).abs() < 1e-9);
    assert!(PoptEstimator::TwicePd.to_string().contains("approximation"));

    let data = many_rows();
    let model = model_a(&data);
    let s = mcmc::run(&model, &data, LikelihoodMode::Exact, &cfg(500, 1)).unwrap();
    let r = build_report(&model, &data, &[&s], PoptEstimator::TwicePd).unwrap();
    assert!((r.p_opt - 2.0 * r.pd).abs() < 1e-12);
    assert!(r.warnings.iter().any(|w| w.contains("2*pD")));
}

#[test]
fn overfit_flag_and_ranking() {
    let g = SelectionReport::from_parts(
        "G",
        269.30,
        94.60,
        865.69,
        PoptEstimator::ImportanceWeighted,
        "d",
    );
    let c = SelectionReport::from_parts(
        "C",
        343.14,
        4.61,
        10.65,
        PoptEstimator::ImportanceWeighted,
        "d",
    );
    assert!(g.is_overfit());
    assert!(!c.is_overfit());
    let table = compare(vec![g.clone(), c.clone()]).unwrap();
    assert_eq!(table.rows[0].report.model, "C");
    assert_eq!(table.rows[0].rank, 1);
    assert!(table.rows[1].overfit);
    assert!(c.ped < g.ped);

    let other = SelectionReport::from_parts(
        "A",
        1.0,
        1.0,
        2.0,
        PoptEstimator::ImportanceWeighted,
        "other",
    );
    assert!(matches!(
        compare(vec![c.clone(), other]),
        Err(Error::Comparability(_))
    ));
    assert!(matches!(compare(vec![c]), Err(Error::Comparability(_))));
}

#[test]
fn csv_has_the_fixed_columns() {
    let r = SelectionReport::from_parts(
        "B",
        371.11,
        1.99,
        4.26,
        PoptEstimator::ImportanceWeighted,
        "d",
    );
    let text = reports_to_csv([&r]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "model,Dbar,pD,DIC,p_opt,PED");
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(fields[0], "B");
    assert_eq!(fields.len(), 6);
}

#[test]
fn adding_an_observed_row_raises_mean_deviance() {
    // binomial masses are at most 1, so each observed row adds nonnegative deviance
    let base = common::binomial_rows(&[(4, 50), (6, 70), (-2, 40), (5, 60)]);
    let more = common::binomial_rows(&[(4, 50), (6, 70), (-2, 40), (5, 60), (3, 45)]);
    let dbar = |data: &CensoredDataset| {
        let model = model_a(data);
        mcmc::run(&model, data, LikelihoodMode::Exact, &cfg(5_000, 2))
            .unwrap()
            .mean_deviance()
    };
    assert!(dbar(&more) > dbar(&base));
}
