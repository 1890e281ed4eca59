//! Bayesian estimation under independent gamma priors.
//!
//! With `alpha ~ Gamma(a, b)` and `beta ~ Gamma(c, d)` (shape, rate) the
//! joint posterior kernel is
//!
//! ```text
//! alpha^{D2+a-1} exp[-alpha (b + nu(beta))]
//!   * beta^{D2+c-1} exp[-beta (d - sum ln x_i)] exp[sum x_i^beta]
//! ```
//!
//! The alpha-conditional is an exact gamma law, so the Gibbs step for alpha
//! is a direct draw; beta is updated with a random-walk Metropolis step on
//! its full conditional. The importance sampler proposes beta from the
//! gamma factor above and alpha from the gamma law that keeps only the
//! withdrawn/terminal part of `nu`, then reweights by kernel over proposal.
//!
//! Point estimates are reported under squared-error (posterior mean), LINEX
//! `-(1/g) ln E[e^{-g eta}]` and entropy `(E[eta^{-q}])^{-1/q}` loss.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::censoring::CensoredSample;
use crate::chen::ChenParams;
use crate::error::{Error, Result};
use crate::mle::{self, nu, MleOptions};
use crate::rng;

/// Independent gamma priors (shape, rate) for alpha and beta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPrior {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Default for GammaPrior {
    fn default() -> Self {
        Self { a: 2.0, b: 2.0, c: 2.0, d: 2.0 }
    }
}

impl GammaPrior {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let p = Self { a, b, c, d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("prior hyperparameter {name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Prior means `(a/b, c/d)`.
    pub fn mean(&self) -> ChenParams {
        ChenParams::new(self.a / self.b, self.c / self.d).expect("validated hyperparameters")
    }
}

/// LINEX constant `g` and entropy-loss constant `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossParams {
    pub g: f64,
    pub q: f64,
}

impl Default for LossParams {
    fn default() -> Self {
        Self { g: 1.0, q: 1.0 }
    }
}

impl LossParams {
    pub fn new(g: f64, q: f64) -> Result<Self> {
        let l = Self { g, q };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        if self.g == 0.0 || !self.g.is_finite() {
            return Err(Error::InvalidConfig(format!("LINEX constant g must be nonzero, got {}", self.g)));
        }
        if self.q == 0.0 || !self.q.is_finite() {
            return Err(Error::InvalidConfig(format!("entropy constant q must be nonzero, got {}", self.q)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MhConfig {
    pub chain_length: usize,
    pub burn_in: usize,
    /// Random-walk scale for beta; `None` means `max(0.1 * beta_init, 0.01)`.
    pub proposal_sd: Option<f64>,
    /// Starting point; `None` means the MLE, or the prior mean if the fit fails.
    pub init: Option<ChenParams>,
    pub seed: u64,
}

impl Default for MhConfig {
    fn default() -> Self {
        Self { chain_length: 11_000, burn_in: 1_000, proposal_sd: None, init: None, seed: 0 }
    }
}

impl MhConfig {
    pub fn validate(&self) -> Result<()> {
        if self.burn_in >= self.chain_length {
            return Err(Error::InvalidConfig(format!(
                "burn-in ({}) must be smaller than the chain length ({})",
                self.burn_in, self.chain_length
            )));
        }
        if let Some(sd) = self.proposal_sd {
            if !(sd > 0.0 && sd.is_finite()) {
                return Err(Error::InvalidConfig(format!("proposal sd must be > 0, got {sd}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsConfig {
    pub draws: usize,
    pub seed: u64,
}

impl Default for IsConfig {
    fn default() -> Self {
        Self { draws: 10_000, seed: 0 }
    }
}

/// One value per loss function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossEstimates {
    pub sel: f64,
    pub linex: f64,
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sampler", rename_all = "snake_case")]
pub enum Diagnostics {
    Mh {
        acceptance_rate: f64,
        proposal_sd: f64,
        kept: usize,
        /// Set when the acceptance rate falls outside `[0.1, 0.6]`.
        warning: Option<String>,
    },
    Is {
        /// `sum(w) / max(w)`.
        effective_sample_size: f64,
        /// Shannon entropy of the normalized weights.
        weight_entropy: f64,
        draws: usize,
    },
}

/// Point estimates with Monte Carlo standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesResult {
    pub alpha: LossEstimates,
    pub beta: LossEstimates,
    pub alpha_mc_se: LossEstimates,
    pub beta_mc_se: LossEstimates,
    pub diagnostics: Diagnostics,
}

pub fn log_posterior_kernel(p: &ChenParams, s: &CensoredSample, prior: &GammaPrior) -> f64 {
    let (a, b) = (p.alpha(), p.beta());
    let d2 = s.d2() as f64;
    let sum_ln: f64 = s.times().iter().map(|x| x.ln()).sum();
    let sum_pow: f64 = s.times().iter().map(|x| x.powf(b)).sum();
    (d2 + prior.a - 1.0) * a.ln() - a * (prior.b + nu(s, b)) + (d2 + prior.c - 1.0) * b.ln()
        - b * (prior.d - sum_ln)
        + sum_pow
}

/// Every beta-dependent term of the joint kernel at fixed alpha.
pub fn beta_conditional_log_kernel(
    s: &CensoredSample,
    alpha: f64,
    beta: f64,
    prior: &GammaPrior,
) -> f64 {
    if !(beta > 0.0) {
        return f64::NEG_INFINITY;
    }
    let d2 = s.d2() as f64;
    let mut acc = (d2 + prior.c - 1.0) * beta.ln() - beta * prior.d;
    for &x in s.times() {
        acc += beta * x.ln() + x.powf(beta);
    }
    acc - alpha * nu(s, beta)
}

/// Log Metropolis ratio for moving beta from `from` to `to` at fixed alpha.
pub fn log_acceptance_ratio(
    s: &CensoredSample,
    alpha: f64,
    from: f64,
    to: f64,
    prior: &GammaPrior,
) -> f64 {
    beta_conditional_log_kernel(s, alpha, to, prior)
        - beta_conditional_log_kernel(s, alpha, from, prior)
}

/// Exact draw from `alpha | beta ~ Gamma(D2 + a, rate = b + nu(beta))`.
pub fn gibbs_draw_alpha<R: Rng + ?Sized>(
    s: &CensoredSample,
    beta: f64,
    prior: &GammaPrior,
    rng: &mut R,
) -> f64 {
    let (shape, rate) = alpha_conditional(s, beta, prior);
    draw_gamma(shape, rate, rng)
}

/// `(shape, rate)` of the alpha full conditional.
pub fn alpha_conditional(s: &CensoredSample, beta: f64, prior: &GammaPrior) -> (f64, f64) {
    (s.d2() as f64 + prior.a, prior.b + nu(s, beta))
}

fn draw_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> f64 {
    Gamma::new(shape, 1.0 / rate)
        .expect("gamma shape and rate are positive")
        .sample(rng)
}

fn ln_gamma_pdf(x: f64, shape: f64, rate: f64) -> f64 {
    shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * x.ln() - rate * x
}

/// Random-walk Metropolis update of beta at fixed alpha. Non-positive
/// proposals are rejected outright.
pub fn mh_step_beta<R: Rng + ?Sized>(
    s: &CensoredSample,
    alpha: f64,
    beta_current: f64,
    prior: &GammaPrior,
    proposal_sd: f64,
    rng: &mut R,
) -> (f64, bool) {
    let z: f64 = StandardNormal.sample(rng);
    let proposal = beta_current + proposal_sd * z;
    if !(proposal > 0.0) {
        return (beta_current, false);
    }
    let log_ratio = log_acceptance_ratio(s, alpha, beta_current, proposal, prior);
    let u: f64 = rng.random();
    if log_ratio >= 0.0 || u.ln() < log_ratio {
        (proposal, true)
    } else {
        (beta_current, false)
    }
}

/// Full Metropolis-within-Gibbs chain, burn-in included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcChain {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub accepted: usize,
    pub burn_in: usize,
    pub proposal_sd: f64,
    pub init: ChenParams,
}

impl McmcChain {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.beta.len() as f64
    }

    pub fn kept_alpha(&self) -> &[f64] {
        &self.alpha[self.burn_in..]
    }

    pub fn kept_beta(&self) -> &[f64] {
        &self.beta[self.burn_in..]
    }

    pub fn estimates(&self, loss: &LossParams) -> Result<BayesResult> {
        let alpha = summarize(self.kept_alpha(), None, loss)?;
        let beta = summarize(self.kept_beta(), None, loss)?;
        let rate = self.acceptance_rate();
        let warning = (!(0.1..=0.6).contains(&rate))
            .then(|| format!("acceptance rate {rate:.3} outside [0.1, 0.6]; consider another proposal sd"));
        Ok(BayesResult {
            alpha: alpha.estimates,
            beta: beta.estimates,
            alpha_mc_se: alpha.mc_se,
            beta_mc_se: beta.mc_se,
            diagnostics: Diagnostics::Mh {
                acceptance_rate: rate,
                proposal_sd: self.proposal_sd,
                kept: self.beta.len() - self.burn_in,
                warning,
            },
        })
    }
}

/// Starting point for the chain when none is configured.
pub fn default_init(s: &CensoredSample, prior: &GammaPrior) -> ChenParams {
    mle::fit(s, &MleOptions::default())
        .map(|f| f.params)
        .unwrap_or_else(|_| prior.mean())
}

pub fn run_mh_gibbs(s: &CensoredSample, prior: &GammaPrior, cfg: &MhConfig) -> Result<McmcChain> {
    prior.validate()?;
    cfg.validate()?;
    let init = cfg.init.unwrap_or_else(|| default_init(s, prior));
    if !beta_conditional_log_kernel(s, init.alpha(), init.beta(), prior).is_finite() {
        return Err(Error::InvalidConfig(format!(
            "chain start beta = {} has zero posterior density",
            init.beta()
        )));
    }
    let proposal_sd = cfg.proposal_sd.unwrap_or_else(|| (0.1 * init.beta().abs()).max(0.01));
    let mut rng = rng::seeded(cfg.seed);

    let mut alpha_chain = Vec::with_capacity(cfg.chain_length);
    let mut beta_chain = Vec::with_capacity(cfg.chain_length);
    let mut beta = init.beta();
    let mut accepted = 0;
    for _ in 0..cfg.chain_length {
        let alpha = gibbs_draw_alpha(s, beta, prior, &mut rng);
        let (next, ok) = mh_step_beta(s, alpha, beta, prior, proposal_sd, &mut rng);
        beta = next;
        accepted += ok as usize;
        alpha_chain.push(alpha);
        beta_chain.push(beta);
    }
    Ok(McmcChain {
        alpha: alpha_chain,
        beta: beta_chain,
        accepted,
        burn_in: cfg.burn_in,
        proposal_sd,
        init,
    })
}

/// Importance draws with unnormalized log weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedDraws {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub log_weights: Vec<f64>,
}

impl WeightedDraws {
    /// Weights scaled so the largest is 1.
    fn relative_weights(&self) -> Vec<f64> {
        let max = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.log_weights.iter().map(|&l| (l - max).exp()).collect()
    }

    /// Self-normalized weights (sum to one).
    pub fn normalized_weights(&self) -> Vec<f64> {
        let w = self.relative_weights();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    }

    /// `sum(w) / max(w)`, between 1 and the number of draws.
    pub fn effective_sample_size(&self) -> f64 {
        self.relative_weights().iter().sum()
    }

    pub fn weight_entropy(&self) -> f64 {
        self.normalized_weights()
            .iter()
            .filter(|&&w| w > 0.0)
            .map(|&w| -w * w.ln())
            .sum()
    }

    pub fn estimates(&self, loss: &LossParams) -> Result<BayesResult> {
        let w = self.normalized_weights();
        let alpha = summarize(&self.alpha, Some(&w), loss)?;
        let beta = summarize(&self.beta, Some(&w), loss)?;
        Ok(BayesResult {
            alpha: alpha.estimates,
            beta: beta.estimates,
            alpha_mc_se: alpha.mc_se,
            beta_mc_se: beta.mc_se,
            diagnostics: Diagnostics::Is {
                effective_sample_size: self.effective_sample_size(),
                weight_entropy: self.weight_entropy(),
                draws: self.alpha.len(),
            },
        })
    }
}

/// Rate of the beta proposal, `d - sum ln x_i`.
pub fn beta_proposal_rate(s: &CensoredSample, prior: &GammaPrior) -> f64 {
    prior.d - s.times().iter().map(|x| x.ln()).sum::<f64>()
}

pub fn importance_sample(
    s: &CensoredSample,
    prior: &GammaPrior,
    cfg: &IsConfig,
) -> Result<WeightedDraws> {
    prior.validate()?;
    if cfg.draws == 0 {
        return Err(Error::InvalidConfig("importance sampling needs at least one draw".into()));
    }
    let beta_rate = beta_proposal_rate(s, prior);
    if !(beta_rate > 0.0) {
        return Err(Error::ProposalInvalid { rate: beta_rate });
    }
    let d2 = s.d2() as f64;
    let beta_shape = d2 + prior.c;
    let alpha_shape = d2 + prior.a;
    let mut rng = rng::seeded(cfg.seed);

    let mut out = WeightedDraws {
        alpha: Vec::with_capacity(cfg.draws),
        beta: Vec::with_capacity(cfg.draws),
        log_weights: Vec::with_capacity(cfg.draws),
    };
    for _ in 0..cfg.draws {
        let beta = draw_gamma(beta_shape, beta_rate, &mut rng);
        let alpha_rate = prior.b
            + s.censored_groups()
                .map(|(x, w)| w * x.powf(beta).exp_m1())
                .sum::<f64>();
        if !alpha_rate.is_finite() {
            // e^{x^beta} overflowed: the draw has no posterior mass
            out.alpha.push(f64::MIN_POSITIVE);
            out.beta.push(beta);
            out.log_weights.push(f64::NEG_INFINITY);
            continue;
        }
        let alpha = draw_gamma(alpha_shape, alpha_rate, &mut rng);
        let p = ChenParams::new(alpha, beta);
        let log_w = match p {
            Ok(p) => {
                log_posterior_kernel(&p, s, prior)
                    - ln_gamma_pdf(alpha, alpha_shape, alpha_rate)
                    - ln_gamma_pdf(beta, beta_shape, beta_rate)
            }
            // a draw that underflowed to zero carries no posterior mass
            Err(_) => f64::NEG_INFINITY,
        };
        out.alpha.push(alpha);
        out.beta.push(beta);
        out.log_weights.push(if log_w.is_nan() { f64::NEG_INFINITY } else { log_w });
    }
    if out.log_weights.iter().all(|l| !l.is_finite()) {
        return Err(Error::DegenerateSample("every importance weight is zero".into()));
    }
    Ok(out)
}

pub struct Summary {
    pub estimates: LossEstimates,
    pub mc_se: LossEstimates,
}

/// SEL, LINEX and entropy-loss estimates of one coordinate.
///
/// `weights`, when given, must be normalized to sum to one; otherwise the
/// sample is treated as an equally weighted (possibly autocorrelated) chain
/// and standard errors use batch means.
pub fn loss_estimates(values: &[f64], weights: Option<&[f64]>, loss: &LossParams) -> Result<LossEstimates> {
    summarize(values, weights, loss).map(|s| s.estimates)
}

pub fn summarize(values: &[f64], weights: Option<&[f64]>, loss: &LossParams) -> Result<Summary> {
    loss.validate()?;
    if values.is_empty() {
        return Err(Error::InvalidConfig("no draws to summarize".into()));
    }
    if let Some(w) = weights {
        if w.len() != values.len() {
            return Err(Error::InvalidConfig("weights and draws differ in length".into()));
        }
    }
    // Zero-weight draws carry no information and may sit at degenerate values.
    let kept: Option<(Vec<f64>, Vec<f64>)> = weights.map(|w| {
        values.iter().zip(w).filter(|(_, &w)| w > 0.0).map(|(&v, &w)| (v, w)).unzip()
    });
    let (values, weights) = match &kept {
        Some((v, w)) => (v.as_slice(), Some(w.as_slice())),
        None => (values, None),
    };
    if values.is_empty() {
        return Err(Error::InvalidConfig("no draws with positive weight".into()));
    }
    if values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Domain("posterior draws must be positive".into()));
    }
    let (g, q) = (loss.g, loss.q);

    let sel = mean(values, weights);

    // LINEX around the posterior mean; expm1/ln_1p keep small g accurate.
    let shifted: Vec<f64> = values.iter().map(|&v| -g * (v - sel)).collect();
    let top = shifted.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (linex, se_linex) = if top <= 1.0 {
        let e: Vec<f64> = shifted.iter().map(|t| t.exp_m1()).collect();
        let em = mean(&e, weights);
        (sel - em.ln_1p() / g, mean_se(&e, weights, em) / (g.abs() * (1.0 + em)))
    } else {
        let scaled: Vec<f64> = shifted.iter().map(|&t| (t - top).exp()).collect();
        let sm = mean(&scaled, weights);
        (sel - (top + sm.ln()) / g, mean_se(&scaled, weights, sm) / (g.abs() * sm))
    };

    let powered: Vec<f64> = values.iter().map(|&v| v.powf(-q)).collect();
    let power_mean = mean(&powered, weights);
    let entropy = power_mean.powf(-1.0 / q);

    let se_sel = mean_se(values, weights, sel);
    let se_entropy =
        (1.0 / q).abs() * power_mean.powf(-1.0 / q - 1.0) * mean_se(&powered, weights, power_mean);

    Ok(Summary {
        estimates: LossEstimates { sel, linex, entropy },
        mc_se: LossEstimates { sel: se_sel, linex: se_linex, entropy: se_entropy },
    })
}

fn mean(values: &[f64], weights: Option<&[f64]>) -> f64 {
    match weights {
        Some(w) => values.iter().zip(w).map(|(v, w)| v * w).sum(),
        None => values.iter().sum::<f64>() / values.len() as f64,
    }
}

/// Monte Carlo standard error of a (weighted) mean.
fn mean_se(values: &[f64], weights: Option<&[f64]>, center: f64) -> f64 {
    match weights {
        Some(w) => values
            .iter()
            .zip(w)
            .map(|(v, w)| (w * (v - center)).powi(2))
            .sum::<f64>()
            .sqrt(),
        None => batch_means_se(values, center),
    }
}

fn batch_means_se(values: &[f64], center: f64) -> f64 {
    let n = values.len();
    let batches = (n as f64).sqrt().floor() as usize;
    if batches < 2 {
        return f64::NAN;
    }
    let size = n / batches;
    let means: Vec<f64> = (0..batches)
        .map(|k| values[k * size..(k + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let var = means.iter().map(|m| (m - center).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (var / batches as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::censoring::CensoringPlan;

    fn sample() -> CensoredSample {
        let plan = CensoringPlan::new(12, 6, vec![1, 1, 1, 1, 1, 1], 0.5, 3.0).unwrap();
        crate::censoring::load_sample(&[0.05, 0.2, 0.45, 0.7, 1.1, 1.9], plan).unwrap()
    }

    #[test]
    fn constant_draws_give_constant_estimates() {
        let v = vec![0.7; 50];
        let e = loss_estimates(&v, None, &LossParams::default()).unwrap();
        assert!((e.sel - 0.7).abs() < 1e-15);
        assert!((e.linex - 0.7).abs() < 1e-14);
        assert!((e.entropy - 0.7).abs() < 1e-14);
    }

    #[test]
    fn entropy_with_q_minus_one_is_the_mean() {
        let v: Vec<f64> = (1..200).map(|i| 0.01 * i as f64).collect();
        let e = loss_estimates(&v, None, &LossParams::new(1.0, -1.0).unwrap()).unwrap();
        assert_eq!(e.entropy, e.sel);
        let w = vec![1.0 / v.len() as f64; v.len()];
        let e = loss_estimates(&v, Some(&w), &LossParams::new(1.0, -1.0).unwrap()).unwrap();
        assert_eq!(e.entropy, e.sel);
    }

    #[test]
    fn zero_weight_draws_are_ignored() {
        let v = [f64::MIN_POSITIVE, 0.5, 1.5];
        let w = [0.0, 0.5, 0.5];
        let e = loss_estimates(&v, Some(&w), &LossParams::new(2.0, 2.0).unwrap()).unwrap();
        assert_eq!(e.sel, 1.0);
        assert!(e.entropy.is_finite() && e.entropy < 1.0);
    }

    #[test]
    fn linex_approaches_sel_for_small_g() {
        let v: Vec<f64> = (1..200).map(|i| 0.01 * i as f64).collect();
        let e = loss_estimates(&v, None, &LossParams::new(1e-6, 1.0).unwrap()).unwrap();
        assert!((e.linex - e.sel).abs() < 1e-4 * e.sel);
    }

    #[test]
    fn loss_params_and_prior_validation() {
        assert!(LossParams::new(0.0, 1.0).is_err());
        assert!(LossParams::new(1.0, 0.0).is_err());
        assert!(GammaPrior::new(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(MhConfig { burn_in: 10, chain_length: 10, ..Default::default() }.validate().is_err());
        assert!(loss_estimates(&[], None, &LossParams::default()).is_err());
    }

    #[test]
    fn kernel_at_unit_beta_uses_plain_sum() {
        let s = sample();
        let prior = GammaPrior::default();
        let p = ChenParams::new(0.3, 1.0).unwrap();
        let d2 = s.d2() as f64;
        let sum_ln: f64 = s.times().iter().map(|x| x.ln()).sum();
        let sum_x: f64 = s.times().iter().sum();
        let expect = (d2 + 1.0) * 0.3f64.ln() - 0.3 * (2.0 + nu(&s, 1.0)) - (2.0 - sum_ln) + sum_x;
        assert!((log_posterior_kernel(&p, &s, &prior) - expect).abs() < 1e-12);
    }

    #[test]
    fn acceptance_ratio_is_antisymmetric() {
        let s = sample();
        let prior = GammaPrior::default();
        for (x, y) in [(0.3, 0.9), (1.2, 0.4), (0.05, 2.0)] {
            let f = log_acceptance_ratio(&s, 0.4, x, y, &prior);
            let r = log_acceptance_ratio(&s, 0.4, y, x, &prior);
            assert_eq!(f, -r);
        }
    }

    #[test]
    fn vanishing_proposal_accepts_everything() {
        let s = sample();
        let cfg = MhConfig {
            chain_length: 2000,
            burn_in: 0,
            proposal_sd: Some(1e-12),
            init: Some(ChenParams::new(0.3, 0.8).unwrap()),
            seed: 5,
        };
        let chain = run_mh_gibbs(&s, &GammaPrior::default(), &cfg).unwrap();
        assert!(chain.acceptance_rate() > 0.99);
        assert!(chain.beta.iter().all(|&b| (b - 0.8).abs() < 1e-8));
    }

    #[test]
    fn importance_weights_normalize() {
        let s = sample();
        let draws = importance_sample(&s, &GammaPrior::default(), &IsConfig { draws: 500, seed: 3 }).unwrap();
        let w = draws.normalized_weights();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let ess = draws.effective_sample_size();
        assert!((1.0..=500.0).contains(&ess));
    }

    #[test]
    fn equal_weights_give_full_ess() {
        let d = WeightedDraws { alpha: vec![1.0; 10], beta: vec![1.0; 10], log_weights: vec![-3.0; 10] };
        assert_eq!(d.effective_sample_size(), 10.0);
    }

    #[test]
    fn invalid_proposal_is_reported() {
        let plan = CensoringPlan::complete(4).unwrap();
        let s = crate::censoring::load_sample(&[2.0, 3.0, 4.0, 5.0], plan).unwrap();
        let err = importance_sample(&s, &GammaPrior::default(), &IsConfig::default()).unwrap_err();
        assert!(matches!(err, Error::ProposalInvalid { .. }));
        assert!(err.to_string().contains("Metropolis"));
    }
}
