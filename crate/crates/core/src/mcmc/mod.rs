//! Adaptive random-walk Metropolis within Gibbs.
//!
//! Every parameter is updated one at a time on its unconstrained scale with a
//! Gaussian proposal whose width adapts during burn-in and is frozen after.
//! In dinterval-style mode each censored row also carries a latent outcome
//! that is redrawn from its truncated distribution once per sweep.

mod adapt;
mod density;
mod summary;

pub use adapt::{adapt_step_sizes, TARGET_ACCEPTANCE};
pub use density::{export_density, BandwidthRule, DensityEstimate};
pub use summary::{
    effective_sample_size, ks_two_sample, quantile, split_rhat, summarize, summarize_chains,
    ParameterSummary,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::distributions::DistributionFamily;
use crate::error::{Error, Result};
use crate::likelihood::{row_loglik_exact, row_loglik_sampler, CensoredDataset, LikelihoodMode};
use crate::model::{CensoredModel, Support};

const MAX_INIT_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainConfig {
    pub n_chains: usize,
    pub burn_in: usize,
    /// Kept draws per chain after burn-in.
    pub n_keep: usize,
    pub thin: usize,
    pub seed: u64,
    /// Sweeps between proposal-scale updates during burn-in.
    pub adapt_window: usize,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            n_chains: 3,
            burn_in: 5_000,
            n_keep: 5_000,
            thin: 1,
            seed: 20_240_601,
            adapt_window: 50,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("n_chains", self.n_chains),
            ("n_keep", self.n_keep),
            ("thin", self.thin),
            ("adapt_window", self.adapt_window),
        ] {
            if v == 0 {
                return Err(Error::Validation(format!(
                    "chain config `{name}` must be positive"
                )));
            }
        }
        Ok(())
    }

    pub fn total_iterations(&self) -> usize {
        self.burn_in + self.n_keep * self.thin
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Random source of chain `chain`: one ChaCha stream per chain under the
    /// same key, so chains never share randomness.
    pub fn chain_rng(&self, chain: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(chain as u64);
        rng
    }
}

/// Kept draws of a multi-chain run. Draws are stored chain after chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSamples {
    pub param_names: Vec<String>,
    pub supports: Vec<Support>,
    pub mode: LikelihoodMode,
    pub config: ChainConfig,
    /// Row-major `[draw × parameter]`.
    pub draws: Vec<f64>,
    /// Monitored deviance of every kept draw under `mode`.
    pub deviance: Vec<f64>,
    pub chain_ids: Vec<usize>,
    /// Post-burn-in acceptance rate, `[chain × parameter]`.
    pub acceptance_rates: Vec<Vec<f64>>,
    /// Rows that carry a latent value (censored rows in dinterval mode).
    pub latent_rows: Vec<usize>,
    /// Row-major `[draw × latent_rows]`.
    pub latents: Vec<f64>,
}

impl PosteriorSamples {
    pub fn n_params(&self) -> usize {
        self.param_names.len()
    }

    pub fn n_draws(&self) -> usize {
        self.deviance.len()
    }

    pub fn n_chains(&self) -> usize {
        self.config.n_chains
    }

    pub fn draw(&self, i: usize) -> &[f64] {
        let p = self.n_params();
        &self.draws[i * p..(i + 1) * p]
    }

    pub fn latent_draw(&self, i: usize) -> &[f64] {
        let k = self.latent_rows.len();
        &self.latents[i * k..(i + 1) * k]
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.param_names.iter().position(|n| n == name)
    }

    /// All kept draws of parameter `j`, pooled over chains.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_draws()).map(|i| self.draw(i)[j]).collect()
    }

    /// Draws of parameter `j` split by chain.
    pub fn chains_of(&self, j: usize) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::with_capacity(self.config.n_keep); self.n_chains()];
        for i in 0..self.n_draws() {
            out[self.chain_ids[i]].push(self.draw(i)[j]);
        }
        out
    }

    pub fn mean_deviance(&self) -> f64 {
        self.deviance.iter().sum::<f64>() / self.n_draws() as f64
    }

    /// Posterior mean computed on each parameter's unconstrained scale and
    /// mapped back.
    pub fn transformed_mean(&self) -> Vec<f64> {
        let n = self.n_draws() as f64;
        (0..self.n_params())
            .map(|j| {
                let s = self.supports[j];
                let m = (0..self.n_draws())
                    .map(|i| s.to_unconstrained(self.draw(i)[j]))
                    .sum::<f64>()
                    / n;
                s.from_unconstrained(m)
            })
            .collect()
    }
}

struct ChainOutput {
    draws: Vec<f64>,
    deviance: Vec<f64>,
    latents: Vec<f64>,
    acceptance: Vec<f64>,
}

/// Draw from the posterior of `model` given `data` under likelihood `mode`.
pub fn run(
    model: &dyn CensoredModel,
    data: &CensoredDataset,
    mode: LikelihoodMode,
    config: &ChainConfig,
) -> Result<PosteriorSamples> {
    config.validate()?;
    model.check_data(data)?;
    if model.schema().is_empty() {
        return Err(Error::Structure("model has no parameters".into()));
    }
    let latent_rows = match mode {
        LikelihoodMode::Exact => Vec::new(),
        LikelihoodMode::DIntervalStyle => data.censored_rows(),
    };
    let outputs: Vec<Result<ChainOutput>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..config.n_chains)
            .map(|chain| {
                let latent_rows = &latent_rows;
                scope
                    .spawn(move || Chain::new(model, data, mode, config, chain, latent_rows)?.run())
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampler thread panicked"))
            .collect()
    });
    let mut samples = PosteriorSamples {
        param_names: model.schema().names(),
        supports: model.schema().supports(),
        mode,
        config: *config,
        draws: Vec::new(),
        deviance: Vec::new(),
        chain_ids: Vec::new(),
        acceptance_rates: Vec::new(),
        latent_rows,
        latents: Vec::new(),
    };
    for (chain, out) in outputs.into_iter().enumerate() {
        let out = out?;
        samples
            .chain_ids
            .extend(std::iter::repeat_n(chain, out.deviance.len()));
        samples.draws.extend(out.draws);
        samples.deviance.extend(out.deviance);
        samples.latents.extend(out.latents);
        samples.acceptance_rates.push(out.acceptance);
    }
    Ok(samples)
}

struct Chain<'a> {
    model: &'a dyn CensoredModel,
    data: &'a CensoredDataset,
    mode: LikelihoodMode,
    config: &'a ChainConfig,
    chain: usize,
    supports: Vec<Support>,
    rng: ChaCha8Rng,
    /// Unconstrained coordinates and their natural-scale images.
    u: Vec<f64>,
    theta: Vec<f64>,
    log_prior: f64,
    /// Row-aligned latent outcomes; unused entries are NaN.
    latent: Vec<f64>,
    latent_rows: &'a [usize],
    dists: Vec<DistributionFamily>,
    row_terms: Vec<f64>,
    all_rows: std::sync::Arc<[usize]>,
}

impl<'a> Chain<'a> {
    fn new(
        model: &'a dyn CensoredModel,
        data: &'a CensoredDataset,
        mode: LikelihoodMode,
        config: &'a ChainConfig,
        chain: usize,
        latent_rows: &'a [usize],
    ) -> Result<Self> {
        let schema = model.schema();
        let supports = schema.supports();
        let start: Vec<f64> = schema
            .specs()
            .iter()
            .map(|s| s.support.to_unconstrained(s.initial))
            .collect();
        let mut chain = Self {
            model,
            data,
            mode,
            config,
            chain,
            supports,
            rng: config.chain_rng(chain),
            u: start.clone(),
            theta: Vec::new(),
            log_prior: f64::NEG_INFINITY,
            latent: vec![f64::NAN; data.len()],
            latent_rows,
            dists: Vec::new(),
            row_terms: vec![0.0; data.len()],
            all_rows: (0..data.len()).collect::<Vec<_>>().into(),
        };
        for attempt in 0..=MAX_INIT_ATTEMPTS {
            if attempt > 0 {
                let spread = attempt as f64 / 10.0;
                for (u, s) in chain.u.iter_mut().zip(&start) {
                    let z: f64 = chain.rng.sample(StandardNormal);
                    *u = s + spread * z;
                }
            }
            if chain.try_initialize()? {
                return Ok(chain);
            }
        }
        Err(Error::Initialization {
            attempts: MAX_INIT_ATTEMPTS,
        })
    }

    /// Evaluate the full state at `self.u`; false if the posterior is `-∞`.
    fn try_initialize(&mut self) -> Result<bool> {
        self.theta = self
            .u
            .iter()
            .zip(&self.supports)
            .map(|(&u, s)| s.from_unconstrained(u))
            .collect();
        if self
            .theta
            .iter()
            .zip(&self.supports)
            .any(|(&t, s)| !s.contains(t))
        {
            return Ok(false);
        }
        self.log_prior = self.model.log_prior(&self.theta);
        if !self.log_prior.is_finite() {
            return Ok(false);
        }
        let dists = match crate::model::outcome_dists(self.model, &self.theta, self.data) {
            Ok(d) => d,
            Err(Error::ParameterDomain(_)) => return Ok(false),
            Err(e) => return Err(e),
        };
        self.dists = dists;
        if self.mode == LikelihoodMode::DIntervalStyle {
            for &row in self.latent_rows {
                match self.draw_latent(row) {
                    Ok(v) => self.latent[row] = v,
                    Err(Error::DegenerateRegion { .. }) => return Ok(false),
                    Err(e) => return Err(e),
                }
            }
        }
        for row in 0..self.data.len() {
            let term = self.row_term(row, &self.dists[row])?;
            if !term.is_finite() {
                return Ok(false);
            }
            self.row_terms[row] = term;
        }
        Ok(true)
    }

    fn draw_latent(&mut self, row: usize) -> Result<f64> {
        let dist = &self.dists[row];
        let outcome = &self.data.observations()[row].outcome;
        let (lo, hi) = outcome
            .latent_region(dist)
            .ok_or_else(|| Error::Structure(format!("row {row} is not censored")))?;
        dist.sample_truncated(lo, hi, &mut self.rng)
    }

    fn row_term(&self, row: usize, dist: &DistributionFamily) -> Result<f64> {
        let outcome = &self.data.observations()[row].outcome;
        match self.mode {
            LikelihoodMode::Exact => row_loglik_exact(outcome, dist),
            LikelihoodMode::DIntervalStyle => {
                row_loglik_sampler(row, outcome, dist, self.latent[row])
            }
        }
    }

    fn monitored_deviance(&self) -> f64 {
        let loglik: f64 = match self.mode {
            LikelihoodMode::Exact => self.row_terms.iter().sum(),
            LikelihoodMode::DIntervalStyle => {
                let mut total = 0.0;
                for (obs, term) in self.data.observations().iter().zip(&self.row_terms) {
                    if !obs.outcome.is_censored() {
                        total += term;
                    }
                }
                total
            }
        };
        -2.0 * loglik
    }

    fn numeric(&self, sweep: usize, component: usize) -> Error {
        Error::Numeric {
            chain: self.chain,
            sweep,
            component: self.model.schema().specs()[component].name.clone(),
        }
    }

    /// One Metropolis update of component `j`; returns whether it was accepted.
    fn update(&mut self, j: usize, scale: f64, sweep: usize) -> Result<bool> {
        let z: f64 = self.rng.sample(StandardNormal);
        let u_new = self.u[j] + scale * z;
        if !u_new.is_finite() {
            return Err(self.numeric(sweep, j));
        }
        let support = self.supports[j];
        let t_new = support.from_unconstrained(u_new);
        let log_u: f64 = self.rng.random::<f64>().ln();
        if !support.contains(t_new) {
            return Ok(false);
        }
        let old = self.theta[j];
        self.theta[j] = t_new;
        let prior_new = self.model.log_prior(&self.theta);
        if prior_new.is_nan() || prior_new == f64::INFINITY {
            self.theta[j] = old;
            return Err(self.numeric(sweep, j));
        }
        if prior_new == f64::NEG_INFINITY {
            self.theta[j] = old;
            return Ok(false);
        }
        let model = self.model;
        let all_rows = self.all_rows.clone();
        let rows: &[usize] = match model.rows_affected_by(j) {
            Some(rows) => rows,
            None => &all_rows,
        };
        let mut new_dists = Vec::with_capacity(rows.len());
        let mut new_terms = Vec::with_capacity(rows.len());
        let mut delta = 0.0;
        for &row in rows {
            let dist = match model.outcome_dist(&self.theta, row, &self.data.observations()[row]) {
                Ok(d) => d,
                Err(Error::ParameterDomain(_)) => {
                    self.theta[j] = old;
                    return Ok(false);
                }
                Err(e) => {
                    self.theta[j] = old;
                    return Err(e);
                }
            };
            let term = match self.row_term(row, &dist) {
                Ok(t) => t,
                Err(e) => {
                    self.theta[j] = old;
                    return Err(e);
                }
            };
            if term.is_nan() || term == f64::INFINITY {
                self.theta[j] = old;
                return Err(self.numeric(sweep, j));
            }
            delta += term - self.row_terms[row];
            new_dists.push(dist);
            new_terms.push(term);
        }
        let log_ratio = prior_new - self.log_prior + delta + support.log_jacobian(u_new)
            - support.log_jacobian(self.u[j]);
        if log_ratio.is_nan() {
            self.theta[j] = old;
            return Err(self.numeric(sweep, j));
        }
        if log_u < log_ratio {
            self.u[j] = u_new;
            self.log_prior = prior_new;
            for ((&row, dist), term) in rows.iter().zip(new_dists).zip(new_terms) {
                self.dists[row] = dist;
                self.row_terms[row] = term;
            }
            Ok(true)
        } else {
            self.theta[j] = old;
            Ok(false)
        }
    }

    fn refresh_latents(&mut self) -> Result<()> {
        for &row in self.latent_rows {
            let v = self.draw_latent(row)?;
            self.latent[row] = v;
            self.row_terms[row] = self.dists[row].log_pdf(v)?;
        }
        Ok(())
    }

    fn run(mut self) -> Result<ChainOutput> {
        let p = self.u.len();
        let cfg = self.config;
        let mut scales = vec![1.0; p];
        let mut window_accepts = vec![0usize; p];
        let mut kept_accepts = vec![0usize; p];
        let mut round = 0;
        let mut out = ChainOutput {
            draws: Vec::with_capacity(cfg.n_keep * p),
            deviance: Vec::with_capacity(cfg.n_keep),
            latents: Vec::with_capacity(cfg.n_keep * self.latent_rows.len()),
            acceptance: Vec::new(),
        };
        for sweep in 0..cfg.total_iterations() {
            for j in 0..p {
                if self.update(j, scales[j], sweep)? {
                    if sweep < cfg.burn_in {
                        window_accepts[j] += 1;
                    } else {
                        kept_accepts[j] += 1;
                    }
                }
            }
            if self.mode == LikelihoodMode::DIntervalStyle {
                self.refresh_latents()?;
            }
            if sweep < cfg.burn_in {
                if (sweep + 1) % cfg.adapt_window == 0 {
                    round += 1;
                    let rates: Vec<f64> = window_accepts
                        .iter()
                        .map(|&a| a as f64 / cfg.adapt_window as f64)
                        .collect();
                    adapt_step_sizes(&mut scales, &rates, round);
                    window_accepts.iter_mut().for_each(|a| *a = 0);
                }
                continue;
            }
            if (sweep - cfg.burn_in + 1).is_multiple_of(cfg.thin) {
                let dev = self.monitored_deviance();
                if !dev.is_finite() {
                    return Err(self.numeric(sweep, 0));
                }
                out.draws.extend_from_slice(&self.theta);
                out.deviance.push(dev);
                out.latents
                    .extend(self.latent_rows.iter().map(|&r| self.latent[r]));
            }
        }
        let kept_sweeps = (cfg.n_keep * cfg.thin) as f64;
        out.acceptance = kept_accepts
            .iter()
            .map(|&a| a as f64 / kept_sweeps)
            .collect();
        Ok(out)
    }
}
