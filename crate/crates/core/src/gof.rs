//! Kolmogorov-Smirnov and Anderson-Darling goodness of fit for the Chen
//! model on complete data, with parametric bootstrap p-values.
//!
//! Two null hypotheses are supported. [`NullModel::Fitted`] estimates the
//! parameters by maximum likelihood and refits every bootstrap sample, so
//! the p-value accounts for estimation. [`NullModel::Specified`] tests a
//! fully specified Chen law; bootstrap samples are scored against the same
//! parameters without refitting.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::censoring::CensoredSample;
use crate::chen::ChenParams;
use crate::error::{Error, Result};
use crate::mle::{self, MleOptions};
use crate::rng;

pub const MIN_BOOTSTRAP_REPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GofStatistic {
    Ks,
    Ad,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NullModel {
    Fitted,
    Specified { params: ChenParams },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub ks_stat: f64,
    pub ad_stat: f64,
    pub ks_pvalue: f64,
    pub ad_pvalue: f64,
    /// Parameters the statistics were evaluated at.
    pub fitted: ChenParams,
    pub null: NullModel,
    pub bootstrap_reps: usize,
    pub failed_refits: usize,
}

fn sorted_cdf(data: &[f64], p: &ChenParams) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::Domain("goodness of fit needs at least one observation".into()));
    }
    let mut x = data.to_vec();
    x.sort_by(f64::total_cmp);
    x.iter().map(|&v| p.cdf(v)).collect()
}

/// `D = max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n)`.
pub fn ks_statistic(data: &[f64], p: &ChenParams) -> Result<f64> {
    let u = sorted_cdf(data, p)?;
    Ok(ks_from_uniform(&u))
}

fn ks_from_uniform(u: &[f64]) -> f64 {
    let n = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &f)| {
            let i = i as f64;
            ((i + 1.0) / n - f).max(f - i / n)
        })
        .fold(0.0, f64::max)
}

/// `A^2 = -n - (1/n) sum (2i-1) [ln F(x_(i)) + ln(1 - F(x_(n+1-i)))]`.
pub fn ad_statistic(data: &[f64], p: &ChenParams) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Domain("goodness of fit needs at least one observation".into()));
    }
    let mut x = data.to_vec();
    x.sort_by(f64::total_cmp);
    let mut ln_f = Vec::with_capacity(x.len());
    let mut ln_s = Vec::with_capacity(x.len());
    for &v in &x {
        let f = p.cdf(v)?;
        let ls = p.ln_survival(v)?;
        if !(f > 0.0) || !(ls < 0.0) || !ls.is_finite() {
            return Err(Error::DegenerateSample(format!(
                "model cdf at {v} is {f}; Anderson-Darling needs values strictly inside (0, 1)"
            )));
        }
        ln_f.push(f.ln());
        ln_s.push(ls);
    }
    let n = x.len();
    let sum: f64 = (0..n)
        .map(|i| (2 * i + 1) as f64 * (ln_f[i] + ln_s[n - 1 - i]))
        .sum();
    Ok(-(n as f64) - sum / n as f64)
}

/// Complete-sample maximum likelihood fit.
pub fn fit_complete(data: &[f64], opts: &MleOptions) -> Result<ChenParams> {
    let s = CensoredSample::complete(data)?;
    Ok(mle::fit(&s, opts)?.params)
}

struct Bootstrap {
    stats: Vec<(f64, f64)>,
    failed: usize,
}

fn bootstrap(n: usize, null_params: &ChenParams, refit: bool, reps: usize, seed: u64, opts: &MleOptions) -> Bootstrap {
    let results: Vec<Option<(f64, f64)>> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let x = null_params.sample(&mut r, n);
            let at = if refit { fit_complete(&x, opts).ok()? } else { *null_params };
            let ks = ks_statistic(&x, &at).ok()?;
            let ad = ad_statistic(&x, &at).ok()?;
            Some((ks, ad))
        })
        .collect();
    let failed = results.iter().filter(|r| r.is_none()).count();
    Bootstrap { stats: results.into_iter().flatten().collect(), failed }
}

fn add_one_pvalue(observed: f64, boot: impl Iterator<Item = f64>) -> f64 {
    let (mut hits, mut total) = (0usize, 0usize);
    for b in boot {
        total += 1;
        if b >= observed {
            hits += 1;
        }
    }
    (1 + hits) as f64 / (total + 1) as f64
}

/// Both statistics and their bootstrap p-values.
pub fn goodness_of_fit(
    data: &[f64],
    null: NullModel,
    reps: usize,
    seed: u64,
    opts: &MleOptions,
) -> Result<GofReport> {
    if reps < MIN_BOOTSTRAP_REPS {
        return Err(Error::InvalidConfig(format!(
            "bootstrap needs at least {MIN_BOOTSTRAP_REPS} replications, got {reps}"
        )));
    }
    let (params, refit) = match null {
        NullModel::Fitted => (fit_complete(data, opts)?, true),
        NullModel::Specified { params } => (params, false),
    };
    let ks_stat = ks_statistic(data, &params)?;
    let ad_stat = ad_statistic(data, &params)?;
    let boot = bootstrap(data.len(), &params, refit, reps, seed, opts);
    if boot.failed * 10 > reps {
        return Err(Error::BootstrapFailures { failed: boot.failed, reps });
    }
    Ok(GofReport {
        ks_stat,
        ad_stat,
        ks_pvalue: add_one_pvalue(ks_stat, boot.stats.iter().map(|s| s.0)),
        ad_pvalue: add_one_pvalue(ad_stat, boot.stats.iter().map(|s| s.1)),
        fitted: params,
        null,
        bootstrap_reps: reps,
        failed_refits: boot.failed,
    })
}

/// Bootstrap p-value of a single statistic.
pub fn bootstrap_pvalue(
    data: &[f64],
    which: GofStatistic,
    null: NullModel,
    reps: usize,
    seed: u64,
) -> Result<f64> {
    let r = goodness_of_fit(data, null, reps, seed, &MleOptions::default())?;
    Ok(match which {
        GofStatistic::Ks => r.ks_pvalue,
        GofStatistic::Ad => r.ad_pvalue,
    })
}
