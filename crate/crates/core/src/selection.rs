//! Deviance-based model selection: D̄, pD, DIC, p_opt and PED.
//!
//! Reports are always built from exact-likelihood runs. The plug-in deviance
//! behind pD and the pointwise terms behind p_opt are evaluated with the exact
//! censored likelihood; dinterval-style traces are refused.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::distributions::special::{log1mexp, log_add_exp};
use crate::distributions::DistributionFamily;
use crate::error::{Error, Result};
use crate::likelihood::{
    deviance, loglik_exact, row_loglik_exact, CensorKind, CensoredDataset, LikelihoodMode,
};
use crate::mcmc::PosteriorSamples;
use crate::model::{outcome_dists, CensoredModel};

/// A report is flagged as overfit when `p_opt > OVERFIT_RATIO · pD`.
pub const OVERFIT_RATIO: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoptEstimator {
    /// Paired draws from two independent runs; per-row symmetric
    /// Kullback–Leibler divergence averaged with leave-one-out importance
    /// weights `1 / (p(yᵢ|θ¹) p(yᵢ|θ²))`.
    #[default]
    ImportanceWeighted,
    /// Same pairing, plain average of the divergence.
    Unweighted,
    /// `2 · pD`, an approximation valid in the normal-posterior regime.
    TwicePd,
}

impl std::fmt::Display for PoptEstimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PoptEstimator::ImportanceWeighted => "importance-weighted",
            PoptEstimator::Unweighted => "unweighted",
            PoptEstimator::TwicePd => "approximation: 2*pD",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub model: String,
    pub dbar: f64,
    pub pd: f64,
    pub dic: f64,
    pub p_opt: f64,
    pub ped: f64,
    pub mode: LikelihoodMode,
    pub estimator: PoptEstimator,
    pub dataset_id: String,
    pub warnings: Vec<String>,
}

impl SelectionReport {
    /// Assemble a report so that `dic - dbar == pd` and `ped - dbar == p_opt`
    /// hold for the stored values.
    pub fn from_parts(
        model: impl Into<String>,
        dbar: f64,
        pd: f64,
        p_opt: f64,
        estimator: PoptEstimator,
        dataset_id: impl Into<String>,
    ) -> Self {
        let dic = dbar + pd;
        let ped = dbar + p_opt;
        let mut report = Self {
            model: model.into(),
            dbar,
            pd: dic - dbar,
            dic,
            p_opt: ped - dbar,
            ped,
            mode: LikelihoodMode::Exact,
            estimator,
            dataset_id: dataset_id.into(),
            warnings: Vec::new(),
        };
        if report.pd < 0.0 {
            report.warnings.push(format!(
                "negative pD ({:.4}); DIC is unreliable for this model",
                report.pd
            ));
        }
        if report.is_overfit() {
            report.warnings.push(format!(
                "overfit: p_opt {:.2} exceeds {OVERFIT_RATIO} x pD {:.2}",
                report.p_opt, report.pd
            ));
        }
        report
    }

    pub fn is_overfit(&self) -> bool {
        self.p_opt > OVERFIT_RATIO * self.pd
    }
}

/// Posterior mean deviance.
pub fn compute_dbar(trace: &[f64]) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::Data("empty deviance trace".into()));
    }
    if let Some(i) = trace.iter().position(|d| !d.is_finite()) {
        return Err(Error::Data(format!(
            "deviance trace entry {i} is not finite"
        )));
    }
    Ok(trace.iter().sum::<f64>() / trace.len() as f64)
}

fn require_exact(samples: &PosteriorSamples) -> Result<()> {
    if samples.mode != LikelihoodMode::Exact {
        return Err(Error::MonitoredDeviance);
    }
    Ok(())
}

/// Exact-likelihood deviance at `theta`.
pub fn plug_in_deviance(
    model: &dyn CensoredModel,
    data: &CensoredDataset,
    theta: &[f64],
) -> Result<f64> {
    let dists = outcome_dists(model, theta, data).map_err(|e| Error::PlugIn(e.to_string()))?;
    let d = deviance(loglik_exact(data, &dists).map_err(|e| Error::PlugIn(e.to_string()))?);
    if !d.is_finite() {
        return Err(Error::PlugIn(format!("deviance {d} at {theta:?}")));
    }
    Ok(d)
}

fn pooled_transformed_mean(runs: &[&PosteriorSamples]) -> Vec<f64> {
    let first = runs[0];
    let total: usize = runs.iter().map(|r| r.n_draws()).sum();
    (0..first.n_params())
        .map(|j| {
            let s = first.supports[j];
            let sum: f64 = runs
                .iter()
                .flat_map(|r| (0..r.n_draws()).map(move |i| s.to_unconstrained(r.draw(i)[j])))
                .sum();
            s.from_unconstrained(sum / total as f64)
        })
        .collect()
}

/// `pD = D̄ − D(θ̄)` with `θ̄` the posterior mean on the sampler's
/// unconstrained scale, mapped back.
pub fn compute_pd(
    samples: &PosteriorSamples,
    model: &dyn CensoredModel,
    data: &CensoredDataset,
) -> Result<f64> {
    require_exact(samples)?;
    let dbar = compute_dbar(&samples.deviance)?;
    Ok(dbar - plug_in_deviance(model, data, &samples.transformed_mean())?)
}

fn bernoulli_kl(ln_p1: f64, ln_q1: f64, ln_p2: f64, ln_q2: f64) -> f64 {
    let mut kl = 0.0;
    if ln_p1 > f64::NEG_INFINITY {
        kl += ln_p1.exp() * (ln_p1 - ln_p2);
    }
    if ln_q1 > f64::NEG_INFINITY {
        kl += ln_q1.exp() * (ln_q1 - ln_q2);
    }
    kl
}

/// Symmetric Kullback–Leibler divergence between the predictive
/// distributions of one row under two parameter values. Censored rows
/// contribute only through the probability of their censoring region.
pub fn row_symmetric_kl(
    outcome: &CensorKind,
    a: &DistributionFamily,
    b: &DistributionFamily,
) -> Result<f64> {
    if outcome.is_censored() {
        let la = row_loglik_exact(outcome, a)?;
        let lb = row_loglik_exact(outcome, b)?;
        let (qa, qb) = (log1mexp(la.min(0.0)), log1mexp(lb.min(0.0)));
        return Ok(bernoulli_kl(la, qa, lb, qb) + bernoulli_kl(lb, qb, la, qa));
    }
    use DistributionFamily::*;
    Ok(match (*a, *b) {
        (Exponential { rate: r1 }, Exponential { rate: r2 }) => {
            // KL(1‖2) + KL(2‖1) = r2/r1 + r1/r2 - 2
            r2 / r1 + r1 / r2 - 2.0
        }
        (
            Normal {
                mean: m1,
                precision: t1,
            },
            Normal {
                mean: m2,
                precision: t2,
            },
        ) => 0.5 * (t2 / t1 + t1 / t2 - 2.0 + (t1 + t2) * (m1 - m2).powi(2)),
        (
            Binomial {
                trials: n1,
                prob: p1,
            },
            Binomial {
                trials: n2,
                prob: p2,
            },
        ) if n1 == n2 => {
            let (lp1, lq1) = (p1.ln(), (-p1).ln_1p());
            let (lp2, lq2) = (p2.ln(), (-p2).ln_1p());
            n1 as f64 * (bernoulli_kl(lp1, lq1, lp2, lq2) + bernoulli_kl(lp2, lq2, lp1, lq1))
        }
        _ => {
            return Err(Error::Structure(format!(
                "no closed-form divergence between {a:?} and {b:?}"
            )))
        }
    })
}

/// Optimism from two independent exact-mode runs of the same model, paired
/// draw by draw.
pub fn compute_popt(
    run_a: &PosteriorSamples,
    run_b: &PosteriorSamples,
    model: &dyn CensoredModel,
    data: &CensoredDataset,
    estimator: PoptEstimator,
) -> Result<f64> {
    require_exact(run_a)?;
    require_exact(run_b)?;
    if run_a.param_names != run_b.param_names || run_a.n_draws() != run_b.n_draws() {
        return Err(Error::Structure(
            "paired runs differ in parameters or draw count".into(),
        ));
    }
    if run_a.config.seed == run_b.config.seed {
        return Err(Error::InsufficientReplication(1));
    }
    let rows = data.len();
    // streaming weighted means per row, kept in log space
    let mut log_w_sum = vec![f64::NEG_INFINITY; rows];
    let mut log_wj_sum = vec![f64::NEG_INFINITY; rows];
    let mut j_sum = vec![0.0; rows];
    for s in 0..run_a.n_draws() {
        let da = outcome_dists(model, run_a.draw(s), data)?;
        let db = outcome_dists(model, run_b.draw(s), data)?;
        for (i, obs) in data.observations().iter().enumerate() {
            let j = row_symmetric_kl(&obs.outcome, &da[i], &db[i])?.max(0.0);
            j_sum[i] += j;
            if estimator == PoptEstimator::ImportanceWeighted {
                let lw = -row_loglik_exact(&obs.outcome, &da[i])?
                    - row_loglik_exact(&obs.outcome, &db[i])?;
                log_w_sum[i] = log_add_exp(log_w_sum[i], lw);
                if j > 0.0 {
                    log_wj_sum[i] = log_add_exp(log_wj_sum[i], lw + j.ln());
                }
            }
        }
    }
    let n = run_a.n_draws() as f64;
    let total = match estimator {
        PoptEstimator::ImportanceWeighted => log_wj_sum
            .iter()
            .zip(&log_w_sum)
            .map(|(wj, w)| {
                if *wj == f64::NEG_INFINITY {
                    0.0
                } else {
                    (wj - w).exp()
                }
            })
            .sum(),
        PoptEstimator::Unweighted => j_sum.iter().sum::<f64>() / n,
        PoptEstimator::TwicePd => unreachable!("handled by the caller"),
    };
    if !total.is_finite() {
        return Err(Error::Numeric {
            chain: 0,
            sweep: 0,
            component: "p_opt".into(),
        });
    }
    Ok(total)
}

/// Build the full report of one model from its exact-mode runs. The default
/// estimator needs two runs with different seeds; `TwicePd` accepts one.
pub fn build_report(
    model: &dyn CensoredModel,
    data: &CensoredDataset,
    runs: &[&PosteriorSamples],
    estimator: PoptEstimator,
) -> Result<SelectionReport> {
    let Some(first) = runs.first() else {
        return Err(Error::InsufficientReplication(0));
    };
    for r in runs {
        require_exact(r)?;
    }
    let trace: Vec<f64> = runs
        .iter()
        .flat_map(|r| r.deviance.iter().copied())
        .collect();
    let dbar = compute_dbar(&trace)?;
    let theta_bar = pooled_transformed_mean(runs);
    let pd = dbar - plug_in_deviance(model, data, &theta_bar)?;
    let p_opt = match estimator {
        PoptEstimator::TwicePd => 2.0 * pd,
        _ => {
            if runs.len() < 2 {
                return Err(Error::InsufficientReplication(runs.len()));
            }
            compute_popt(first, runs[1], model, data, estimator)?
        }
    };
    let mut report = SelectionReport::from_parts(
        model.label(),
        dbar,
        pd,
        p_opt,
        estimator,
        crate::io::dataset_id(data),
    );
    if estimator == PoptEstimator::TwicePd {
        report
            .warnings
            .push("p_opt is the 2*pD approximation".into());
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub rank: usize,
    pub report: SelectionReport,
    pub overfit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub mode: LikelihoodMode,
    pub dataset_id: String,
    pub rows: Vec<ComparisonRow>,
}

/// Rank reports by DIC, breaking ties by PED and then by label.
pub fn compare(reports: Vec<SelectionReport>) -> Result<ComparisonTable> {
    if reports.len() < 2 {
        return Err(Error::Comparability(format!(
            "need at least 2 reports, got {}",
            reports.len()
        )));
    }
    let first = &reports[0];
    let (mode, dataset_id) = (first.mode, first.dataset_id.clone());
    for r in &reports {
        if r.dataset_id != dataset_id {
            return Err(Error::Comparability(format!(
                "`{}` was fitted to a different dataset than `{}`",
                r.model, first.model
            )));
        }
        if r.mode != mode {
            return Err(Error::Comparability(format!(
                "`{}` uses {} likelihood, `{}` uses {}",
                r.model, r.mode, first.model, mode
            )));
        }
    }
    let mut reports = reports;
    reports.sort_by(|a, b| {
        a.dic
            .total_cmp(&b.dic)
            .then(a.ped.total_cmp(&b.ped))
            .then_with(|| a.model.cmp(&b.model))
    });
    Ok(ComparisonTable {
        mode,
        dataset_id,
        rows: reports
            .into_iter()
            .enumerate()
            .map(|(i, report)| ComparisonRow {
                rank: i + 1,
                overfit: report.is_overfit(),
                report,
            })
            .collect(),
    })
}

pub const REPORT_COLUMNS: [&str; 6] = ["model", "Dbar", "pD", "DIC", "p_opt", "PED"];

#[derive(Serialize)]
struct ReportRecord<'a> {
    model: &'a str,
    #[serde(rename = "Dbar")]
    dbar: f64,
    #[serde(rename = "pD")]
    pd: f64,
    #[serde(rename = "DIC")]
    dic: f64,
    p_opt: f64,
    #[serde(rename = "PED")]
    ped: f64,
}

impl<'a> From<&'a SelectionReport> for ReportRecord<'a> {
    fn from(r: &'a SelectionReport) -> Self {
        Self {
            model: &r.model,
            dbar: r.dbar,
            pd: r.pd,
            dic: r.dic,
            p_opt: r.p_opt,
            ped: r.ped,
        }
    }
}

/// Delimited table with columns `model,Dbar,pD,DIC,p_opt,PED`.
pub fn reports_to_csv<'a>(reports: impl IntoIterator<Item = &'a SelectionReport>) -> String {
    let mut out = REPORT_COLUMNS.join(",");
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.model, r.dbar, r.pd, r.dic, r.p_opt, r.ped
        );
    }
    out
}

/// Structured document: one object per report with exactly the table columns,
/// plus comparison metadata alongside.
pub fn reports_to_json<'a>(
    reports: impl IntoIterator<Item = &'a SelectionReport>,
    mode: LikelihoodMode,
    dataset_id: &str,
) -> Result<String> {
    let reports: Vec<&SelectionReport> = reports.into_iter().collect();
    let doc = serde_json::json!({
        "mode": mode,
        "dataset_id": dataset_id,
        "rows": reports.iter().map(|r| ReportRecord::from(*r)).collect::<Vec<_>>(),
        "estimators": reports.iter().map(|r| (r.model.clone(), r.estimator.to_string())).collect::<std::collections::BTreeMap<_, _>>(),
        "overfit": reports.iter().filter(|r| r.is_overfit()).map(|r| r.model.clone()).collect::<Vec<_>>(),
        "warnings": reports.iter().flat_map(|r| r.warnings.iter().map(move |w| format!("{}: {w}", r.model))).collect::<Vec<_>>(),
    });
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Validation(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(model: &str, dbar: f64, pd: f64, p_opt: f64) -> SelectionReport {
        SelectionReport::from_parts(
            model,
            dbar,
            pd,
            p_opt,
            PoptEstimator::ImportanceWeighted,
            "d",
        )
    }

    #[test]
    fn dbar_examples() {
        assert_eq!(compute_dbar(&[2.0, 4.0]).unwrap(), 3.0);
        assert_eq!(compute_dbar(&[7.5; 4]).unwrap(), 7.5);
        assert!(matches!(
            compute_dbar(&[1.0, f64::NAN]),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn identities_hold_as_stored() {
        let r = report("A", 380.85, 0.99, 2.05);
        assert_eq!(r.dic - r.dbar, r.pd);
        assert_eq!(r.ped - r.dbar, r.p_opt);
        assert!(!r.is_overfit());
    }

    #[test]
    fn negative_pd_is_kept_with_warning() {
        let r = report("A", 10.0, -0.5, 1.0);
        assert!(r.pd < 0.0);
        assert!(r.warnings.iter().any(|w| w.contains("negative pD")));
    }

    #[test]
    fn ranking_uses_dic_then_ped_then_label() {
        let t = compare(vec![
            report("B", 10.0, 1.0, 3.0),
            report("A", 10.0, 1.0, 2.0),
            report("C", 9.0, 1.0, 9.0),
        ])
        .unwrap();
        let order: Vec<&str> = t.rows.iter().map(|r| r.report.model.as_str()).collect();
        assert_eq!(order, ["C", "A", "B"]);
        assert!(t.rows[0].overfit);
    }

    #[test]
    fn mixed_datasets_are_not_comparable() {
        let mut b = report("B", 1.0, 1.0, 1.0);
        b.dataset_id = "other".into();
        assert!(matches!(
            compare(vec![report("A", 1.0, 1.0, 1.0), b]),
            Err(Error::Comparability(_))
        ));
    }

    #[test]
    fn csv_header_is_exact() {
        let csv = reports_to_csv([&report("A", 1.0, 2.0, 3.0)]);
        assert!(csv.starts_with("model,Dbar,pD,DIC,p_opt,PED\nA,1,2,3,3,4\n"));
    }

    #[test]
    fn symmetric_kl_closed_forms() {
        let o = CensorKind::Observed(1.0);
        let e = row_symmetric_kl(
            &o,
            &DistributionFamily::Exponential { rate: 2.0 },
            &DistributionFamily::Exponential { rate: 2.0 },
        )
        .unwrap();
        assert_eq!(e, 0.0);
        // Normal with equal precision: τ (μ1-μ2)²
        let n = row_symmetric_kl(
            &o,
            &DistributionFamily::Normal {
                mean: 0.0,
                precision: 4.0,
            },
            &DistributionFamily::Normal {
                mean: 1.0,
                precision: 4.0,
            },
        )
        .unwrap();
        assert!((n - 4.0).abs() < 1e-14);
        let c = row_symmetric_kl(
            &CensorKind::RightCensored(1.0),
            &DistributionFamily::Exponential { rate: 1.0 },
            &DistributionFamily::Exponential { rate: 2.0 },
        )
        .unwrap();
        let (p, q) = ((-1.0f64).exp(), (-2.0f64).exp());
        let expected =
            (p - q) * (p / q).ln() + ((1.0 - p) - (1.0 - q)) * ((1.0 - p) / (1.0 - q)).ln();
        assert!((c - expected).abs() < 1e-14);
    }
}
