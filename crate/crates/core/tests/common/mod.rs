//! Shared generators and oracles for the integration tests.
#![allow(dead_code)]

use censored_bayes::distributions::DistributionFamily;
use censored_bayes::likelihood::{CensorKind, CensoredDataset, Observation};
use proptest::prelude::*;

/// Family tag for generated datasets.
#[derive(Debug, Clone, Copy)]
pub enum Fam {
    Exp,
    Norm,
    Binom(u64),
}

pub fn family() -> impl Strategy<Value = Fam> {
    prop_oneof![
        Just(Fam::Exp),
        Just(Fam::Norm),
        (1u64..60).prop_map(Fam::Binom)
    ]
}

fn dist(f: Fam) -> BoxedStrategy<DistributionFamily> {
    match f {
        Fam::Exp => (0.05f64..5.0)
            .prop_map(|rate| DistributionFamily::Exponential { rate })
            .boxed(),
        Fam::Norm => (-3.0f64..3.0, 0.1f64..10.0)
            .prop_map(|(mean, precision)| DistributionFamily::Normal { mean, precision })
            .boxed(),
        Fam::Binom(n) => (0.02f64..0.98)
            .prop_map(move |prob| DistributionFamily::Binomial { trials: n, prob })
            .boxed(),
    }
}

/// Outcome of one row, kept inside the support so every term is finite.
fn outcome(f: Fam) -> BoxedStrategy<CensorKind> {
    match f {
        Fam::Exp => prop_oneof![
            (0.01f64..8.0).prop_map(CensorKind::Observed),
            (0.01f64..8.0).prop_map(CensorKind::LeftCensored),
            (0.0f64..8.0).prop_map(CensorKind::RightCensored),
            (0.0f64..6.0, 0.01f64..3.0).prop_map(|(a, w)| CensorKind::IntervalCensored(a, a + w)),
        ]
        .boxed(),
        Fam::Norm => prop_oneof![
            (-6.0f64..6.0).prop_map(CensorKind::Observed),
            (-6.0f64..6.0).prop_map(CensorKind::LeftCensored),
            (-6.0f64..6.0).prop_map(CensorKind::RightCensored),
            (-6.0f64..6.0, 0.01f64..4.0).prop_map(|(a, w)| CensorKind::IntervalCensored(a, a + w)),
        ]
        .boxed(),
        Fam::Binom(n) => {
            let nf = n as f64;
            prop_oneof![
                (0..=n).prop_map(|k| CensorKind::Observed(k as f64)),
                (0.0f64..nf).prop_map(|c| CensorKind::LeftCensored(c.floor())),
                (0.0f64..=nf).prop_map(|c| CensorKind::RightCensored(c.ceil())),
                (0..n).prop_flat_map(move |a| ((a + 1)..=n)
                    .prop_map(move |b| CensorKind::IntervalCensored(a as f64, b as f64))),
            ]
            .boxed()
        }
    }
}

/// A dataset of one family with per-row parameters.
pub fn dataset() -> impl Strategy<Value = (CensoredDataset, Vec<DistributionFamily>)> {
    family().prop_flat_map(|f| {
        prop::collection::vec((outcome(f), dist(f)), 1..25).prop_map(move |rows| {
            let (obs, dists): (Vec<_>, Vec<_>) = rows
                .into_iter()
                .map(|(o, d)| {
                    let mut obs = Observation::new(o, vec![]);
                    if let DistributionFamily::Binomial { trials, .. } = d {
                        obs.trials = Some(trials);
                    }
                    (obs, d)
                })
                .unzip();
            (
                CensoredDataset::new(vec![], obs).expect("valid rows"),
                dists,
            )
        })
    })
}

/// Adaptive Simpson integration of `f` on `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 50)
}

use censored_bayes::model::{CensoredModel, ParamSpec, ParameterSchema, Support};

/// Exponential outcomes with a common rate and a `Gamma(shape, rate)` prior.
/// Conjugate under right censoring: the posterior is
/// `Gamma(shape + events, rate + total exposure)`.
pub struct GammaExpModel {
    pub shape: f64,
    pub rate: f64,
    schema: ParameterSchema,
}

impl GammaExpModel {
    pub fn new(shape: f64, rate: f64) -> Self {
        Self {
            shape,
            rate,
            schema: ParameterSchema::new(vec![ParamSpec::new("lambda", Support::Positive, 1.0)]),
        }
    }

    /// Posterior `(shape, rate)` given right-censored exponential data.
    pub fn posterior(&self, data: &CensoredDataset) -> (f64, f64) {
        let mut events = 0.0;
        let mut exposure = 0.0;
        for o in data.observations() {
            match o.outcome {
                CensorKind::Observed(t) => {
                    events += 1.0;
                    exposure += t;
                }
                CensorKind::RightCensored(t) => exposure += t,
                _ => panic!("only observed and right-censored rows are conjugate"),
            }
        }
        (self.shape + events, self.rate + exposure)
    }
}

impl CensoredModel for GammaExpModel {
    fn label(&self) -> &str {
        "gamma-exponential"
    }

    fn schema(&self) -> &ParameterSchema {
        &self.schema
    }

    fn log_prior(&self, theta: &[f64]) -> f64 {
        let l = theta[0];
        if l <= 0.0 {
            return f64::NEG_INFINITY;
        }
        (self.shape - 1.0) * l.ln() - self.rate * l
    }

    fn outcome_dist(
        &self,
        theta: &[f64],
        _row: usize,
        _obs: &Observation,
    ) -> censored_bayes::Result<DistributionFamily> {
        DistributionFamily::exponential(theta[0])
    }
}

/// Right-censored exponential survival times with a fixed seed.
pub fn exp_survival_data(n: usize, rate: f64, censor_at: f64, seed: u64) -> CensoredDataset {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let obs = (0..n)
        .map(|_| {
            let t = -(1.0 - rng.random::<f64>()).ln() / rate;
            let kind = if t > censor_at {
                CensorKind::RightCensored(censor_at)
            } else {
                CensorKind::Observed(t)
            };
            Observation::new(kind, vec![])
        })
        .collect();
    CensoredDataset::new(vec![], obs).unwrap()
}

/// Binomial rows for a single-incidence model, with `(count, trials)` pairs;
/// a negative count `-k` encodes "fewer than k" (left-censored at `k - 1`).
pub fn binomial_rows(rows: &[(i64, u64)]) -> CensoredDataset {
    let obs = rows
        .iter()
        .map(|&(y, n)| {
            let kind = if y >= 0 {
                CensorKind::Observed(y as f64)
            } else {
                CensorKind::LeftCensored((-y - 1) as f64)
            };
            Observation::new(kind, vec![0.0, 0.0]).with_trials(n)
        })
        .collect();
    CensoredDataset::new(vec!["drug".into(), "class".into()], obs).unwrap()
}

/// Posterior mean of a single incidence `p` with a `Beta(a, b)` prior, by
/// quadrature of prior times exact likelihood on a fine grid.
pub fn incidence_posterior_mean(data: &CensoredDataset, a: f64, b: f64) -> f64 {
    use statrs::distribution::{Binomial, Discrete, DiscreteCDF};
    let log_post = |p: f64| -> f64 {
        let mut lp = (a - 1.0) * p.ln() + (b - 1.0) * (1.0 - p).ln();
        for o in data.observations() {
            let n = o.trials.unwrap();
            let bin = Binomial::new(p, n).unwrap();
            lp += match o.outcome {
                CensorKind::Observed(y) => bin.ln_pmf(y as u64),
                CensorKind::LeftCensored(c) => bin.cdf(c as u64).ln(),
                _ => unreachable!(),
            };
        }
        lp
    };
    let grid = 200_000;
    let xs: Vec<f64> = (1..grid).map(|i| i as f64 / grid as f64).collect();
    let lps: Vec<f64> = xs.iter().map(|&p| log_post(p)).collect();
    let max = lps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for (x, lp) in xs.iter().zip(&lps) {
        let w = (lp - max).exp();
        num += x * w;
        den += w;
    }
    num / den
}
