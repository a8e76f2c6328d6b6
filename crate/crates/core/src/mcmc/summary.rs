use serde::{Deserialize, Serialize};

use super::PosteriorSamples;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub q025: f64,
    pub q50: f64,
    pub q975: f64,
    /// Split-chain potential scale reduction; `None` for constant traces or
    /// fewer than two chains.
    pub rhat: Option<f64>,
    pub ess: f64,
    /// Monte Carlo standard error of the mean, `sd / √ESS`.
    pub mcse: f64,
}

/// Per-parameter summaries of the kept draws, in schema order.
pub fn summarize(samples: &PosteriorSamples) -> Vec<ParameterSummary> {
    (0..samples.n_params())
        .map(|j| summarize_chains(&samples.param_names[j], &samples.chains_of(j)))
        .collect()
}

pub fn summarize_chains(name: &str, chains: &[Vec<f64>]) -> ParameterSummary {
    let mut pooled: Vec<f64> = chains.iter().flatten().copied().collect();
    let n = pooled.len() as f64;
    let mean = pooled.iter().sum::<f64>() / n;
    let var = if pooled.len() > 1 {
        pooled.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let sd = var.sqrt();
    pooled.sort_by(f64::total_cmp);
    let ess = effective_sample_size(chains);
    ParameterSummary {
        name: name.to_string(),
        mean,
        sd,
        q025: quantile_sorted(&pooled, 0.025),
        q50: quantile_sorted(&pooled, 0.5),
        q975: quantile_sorted(&pooled, 0.975),
        rhat: split_rhat(chains),
        ess,
        mcse: if sd == 0.0 { 0.0 } else { sd / ess.sqrt() },
    }
}

/// Linear-interpolation quantile (the "type 7" rule).
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, q)
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Split-chain R̂: every chain is cut in half and the classic between/within
/// variance ratio is computed over the halves.
pub fn split_rhat(chains: &[Vec<f64>]) -> Option<f64> {
    if chains.len() < 2 {
        return None;
    }
    let half = chains.iter().map(Vec::len).min()? / 2;
    if half < 2 {
        return None;
    }
    let halves: Vec<&[f64]> = chains
        .iter()
        .flat_map(|c| [&c[..half], &c[half..2 * half]])
        .collect();
    let stats: Vec<(f64, f64)> = halves.iter().map(|h| mean_var(h)).collect();
    let m = stats.len() as f64;
    let n = half as f64;
    let w = stats.iter().map(|s| s.1).sum::<f64>() / m;
    if !(w > 0.0) {
        return None;
    }
    let grand = stats.iter().map(|s| s.0).sum::<f64>() / m;
    let b = n * stats.iter().map(|s| (s.0 - grand).powi(2)).sum::<f64>() / (m - 1.0);
    let var_plus = (n - 1.0) / n * w + b / n;
    Some((var_plus / w).sqrt())
}

fn autocovariance(x: &[f64], mean: f64, lag: usize) -> f64 {
    let n = x.len();
    x[..n - lag]
        .iter()
        .zip(&x[lag..])
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum::<f64>()
        / n as f64
}

/// Multi-chain effective sample size with Geyer's initial monotone sequence
/// truncation of the combined autocorrelation.
pub fn effective_sample_size(chains: &[Vec<f64>]) -> f64 {
    let n = chains.iter().map(Vec::len).min().unwrap_or(0);
    let m = chains.len();
    if n < 4 {
        return (n * m) as f64;
    }
    let chains: Vec<&[f64]> = chains.iter().map(|c| &c[..n]).collect();
    let means: Vec<f64> = chains
        .iter()
        .map(|c| c.iter().sum::<f64>() / n as f64)
        .collect();
    let nf = n as f64;
    let acov0: Vec<f64> = chains
        .iter()
        .zip(&means)
        .map(|(c, &mu)| autocovariance(c, mu, 0))
        .collect();
    let w = acov0.iter().sum::<f64>() / m as f64 * nf / (nf - 1.0);
    let grand = means.iter().sum::<f64>() / m as f64;
    let b = if m > 1 {
        nf * means.iter().map(|mu| (mu - grand).powi(2)).sum::<f64>() / (m as f64 - 1.0)
    } else {
        0.0
    };
    let var_plus = (nf - 1.0) / nf * w + b / nf;
    if !(var_plus > 0.0) {
        return (n * m) as f64;
    }
    let rho = |lag: usize| {
        let mean_acov = chains
            .iter()
            .zip(&means)
            .map(|(c, &mu)| autocovariance(c, mu, lag))
            .sum::<f64>()
            / m as f64;
        1.0 - (w - mean_acov) / var_plus
    };
    let mut tau = -1.0;
    let mut prev_pair = f64::INFINITY;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = rho(lag) + rho(lag + 1);
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev_pair);
        tau += 2.0 * pair;
        prev_pair = pair;
        lag += 2;
    }
    let total = (n * m) as f64;
    // antithetic chains can push τ below its floor
    total / tau.max(1.0 / total.log10().max(1.0))
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F₁ − F₂|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::NAN;
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (na, nb) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_trace_has_zero_sd_and_no_rhat() {
        let s = summarize_chains("x", &[vec![2.0; 50], vec![2.0; 50]]);
        assert_eq!(s.sd, 0.0);
        assert_eq!(s.rhat, None);
        assert_eq!(s.mean, 2.0);
    }

    #[test]
    fn iid_chains_converge() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let chains: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..2000).map(|_| rng.random::<f64>()).collect())
            .collect();
        let s = summarize_chains("u", &chains);
        assert!(s.rhat.unwrap() < 1.01);
        assert!(s.ess > 3000.0 && s.ess < 9000.0, "{}", s.ess);
        assert!((s.q50 - s.mean).abs() < 0.03);
    }

    #[test]
    fn shifted_chains_are_flagged() {
        let a: Vec<f64> = (0..200).map(|i| (i % 7) as f64).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 10.0).collect();
        assert!(split_rhat(&[a, b]).unwrap() > 1.5);
    }

    #[test]
    fn ks_of_identical_and_disjoint_samples() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(ks_two_sample(&a, &a), 0.0);
        assert_eq!(ks_two_sample(&a, &[10.0, 11.0]), 1.0);
        assert!((ks_two_sample(&[1.0, 2.0], &[1.5, 2.5]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quantile_interpolates() {
        assert_eq!(quantile(&[4.0, 1.0, 3.0, 2.0], 0.5), 2.5);
        assert_eq!(quantile(&[1.0, 2.0], 1.0), 2.0);
    }
}
