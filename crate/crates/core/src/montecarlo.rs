//! Replicated simulation studies: bias, MSE, interval coverage and average
//! interval length per scenario and estimator.
//!
//! Replication `i` of a scenario draws everything from its own stream
//! `rng::stream(seed, i)`, so results do not depend on the worker count.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{self, BayesResult, GammaPrior, IsConfig, LossParams, MhConfig};
use crate::censoring::{simulate_experiment, CensoringPlan, TerminationCase};
use crate::chen::ChenParams;
use crate::error::{Error, Result};
use crate::mle::{self, ConfidenceIntervals, MleOptions};
use crate::rng;

/// Canonical removal layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    /// All removals at the last failure.
    I,
    /// All removals at the first failure.
    II,
    /// All removals at the middle failure.
    III,
    /// `(n - m) / m` removals at every failure.
    IV,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [Self::I, Self::II, Self::III, Self::IV];
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::I => "I",
            Self::II => "II",
            Self::III => "III",
            Self::IV => "IV",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Self::I),
            "II" | "2" => Ok(Self::II),
            "III" | "3" => Ok(Self::III),
            "IV" | "4" => Ok(Self::IV),
            other => Err(Error::InvalidConfig(format!("unknown scheme {other:?}; expected I, II, III or IV"))),
        }
    }
}

pub fn build_scheme(kind: SchemeKind, n: usize, m: usize) -> Result<Vec<usize>> {
    if m == 0 || m > n {
        return Err(Error::InvalidPlan(format!("need 1 <= m <= n, got n={n}, m={m}")));
    }
    let total = n - m;
    let mut r = vec![0; m];
    match kind {
        SchemeKind::I => r[m - 1] = total,
        SchemeKind::II => r[0] = total,
        SchemeKind::III => {
            let pos = if m % 2 == 1 { (m + 1) / 2 } else { m / 2 };
            r[pos - 1] = total;
        }
        SchemeKind::IV => {
            if total % m != 0 {
                return Err(Error::InvalidPlan(format!(
                    "scheme IV needs m to divide n - m, but {m} does not divide {total}"
                )));
            }
            r.iter_mut().for_each(|v| *v = total / m);
        }
    }
    Ok(r)
}

/// Spread `n - m` removals over `m` failures as evenly as possible; the
/// extra units land on evenly spaced positions. Equals scheme IV whenever
/// `m` divides `n - m`.
pub fn spread_scheme(n: usize, m: usize) -> Result<Vec<usize>> {
    if m == 0 || m > n {
        return Err(Error::InvalidPlan(format!("need 1 <= m <= n, got n={n}, m={m}")));
    }
    let total = n - m;
    Ok((0..m).map(|i| (i + 1) * total / m - i * total / m).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalSpec {
    Scheme(SchemeKind),
    Explicit(Vec<usize>),
}

impl fmt::Display for RemovalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Scheme(k) => write!(f, "{k}"),
            Self::Explicit(r) => {
                let parts: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                write!(f, "({})", parts.join(" "))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Estimator {
    Mle,
    MhBayes,
    IsBayes,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [Self::Mle, Self::MhBayes, Self::IsBayes];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Mle => "mle",
            Self::MhBayes => "mh",
            Self::IsBayes => "is",
        }
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mle" => Ok(Self::Mle),
            "mh" | "mh-bayes" => Ok(Self::MhBayes),
            "is" | "is-bayes" => Ok(Self::IsBayes),
            other => Err(Error::InvalidConfig(format!("unknown estimator {other:?}; expected mle, mh or is"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub n: usize,
    pub m: usize,
    pub removals: RemovalSpec,
    pub t1: f64,
    pub t2: f64,
    pub truth: ChenParams,
    pub replications: usize,
    pub estimators: Vec<Estimator>,
    pub prior: GammaPrior,
    pub loss: LossParams,
    pub ci_level: f64,
    pub seed: u64,
    pub mle: MleOptions,
    /// Chain settings; the seed and start are set per replication.
    pub mh: MhConfig,
    /// Draw count; the seed is set per replication.
    pub is: IsConfig,
}

impl Scenario {
    /// Scenario with the default estimator settings and all three estimators.
    pub fn new(n: usize, m: usize, removals: RemovalSpec, t1: f64, t2: f64, truth: ChenParams) -> Self {
        Self {
            n,
            m,
            removals,
            t1,
            t2,
            truth,
            replications: 2000,
            estimators: Estimator::ALL.to_vec(),
            prior: GammaPrior::default(),
            loss: LossParams::default(),
            ci_level: 0.95,
            seed: 0,
            mle: MleOptions::default(),
            mh: MhConfig::default(),
            is: IsConfig::default(),
        }
    }

    pub fn plan(&self) -> Result<CensoringPlan> {
        let r = match &self.removals {
            RemovalSpec::Scheme(k) => build_scheme(*k, self.n, self.m)?,
            RemovalSpec::Explicit(r) => r.clone(),
        };
        CensoringPlan::new(self.n, self.m, r, self.t1, self.t2)
    }

    pub fn validate(&self) -> Result<()> {
        self.plan()?;
        if self.replications == 0 {
            return Err(Error::InvalidConfig("at least one replication is required".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidConfig("no estimators requested".into()));
        }
        self.prior.validate()?;
        self.loss.validate()?;
        self.mle.validate()?;
        self.mh.validate()?;
        mle::normal_critical_value(self.ci_level)?;
        if self.is.draws == 0 {
            return Err(Error::InvalidConfig("importance sampling needs at least one draw".into()));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!("n={} m={} scheme={} T=({}, {})", self.n, self.m, self.removals, self.t1, self.t2)
    }
}

/// The simulation grid: three sizes, four schemes, two threshold pairs, with
/// `alpha = 0.2`, `beta = 0.5`, `a = b = c = d = 2`, `g = q = 1`.
pub fn paper_grid(replications: usize, master_seed: u64) -> Vec<Scenario> {
    let truth = ChenParams::new(0.2, 0.5).expect("valid");
    let mut out = Vec::with_capacity(24);
    for (t1, t2) in [(0.4, 4.0), (1.0, 7.0)] {
        for (n, m) in [(15, 5), (20, 10), (30, 15)] {
            for kind in SchemeKind::ALL {
                let mut s = Scenario::new(n, m, RemovalSpec::Scheme(kind), t1, t2, truth);
                s.replications = replications;
                s.seed = rng::stream_seed(master_seed, out.len() as u64);
                out.push(s);
            }
        }
    }
    out
}

/// What one replication produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationOutcome {
    pub case: TerminationCase,
    pub d2: usize,
    pub mle: Option<(ChenParams, ConfidenceIntervals)>,
    pub mh: Option<BayesResult>,
    pub is: Option<BayesResult>,
}

/// Run a single replication with its own stream.
pub fn run_replication(scn: &Scenario, plan: &CensoringPlan, index: usize) -> ReplicationOutcome {
    let mut r = rng::stream(scn.seed, index as u64);
    let sample = simulate_experiment(plan, &scn.truth, &mut r);
    let mh_seed: u64 = r.random();
    let is_seed: u64 = r.random();

    let wants = |e: Estimator| scn.estimators.contains(&e);
    let fit = mle::fit(&sample, &scn.mle).ok();
    let mle_out = if wants(Estimator::Mle) {
        fit.as_ref().and_then(|f| {
            mle::confidence_intervals(f, scn.ci_level)
                .ok()
                .map(|ci| (f.params, ci))
        })
    } else {
        None
    };
    let mh = if wants(Estimator::MhBayes) {
        let init = fit.as_ref().map(|f| f.params).unwrap_or_else(|| scn.prior.mean());
        let cfg = MhConfig { seed: mh_seed, init: Some(init), ..scn.mh };
        bayes::run_mh_gibbs(&sample, &scn.prior, &cfg)
            .and_then(|c| c.estimates(&scn.loss))
            .ok()
    } else {
        None
    };
    let is = if wants(Estimator::IsBayes) {
        let cfg = IsConfig { seed: is_seed, ..scn.is };
        bayes::importance_sample(&sample, &scn.prior, &cfg)
            .and_then(|d| d.estimates(&scn.loss))
            .ok()
    } else {
        None
    };
    ReplicationOutcome { case: sample.case(), d2: sample.d2(), mle: mle_out, mh, is }
}

/// One aggregated line: scenario x estimator x parameter x loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub estimator: String,
    pub parameter: String,
    /// `mle` for the likelihood estimator, else `sel`, `linex` or `entropy`.
    pub loss: String,
    pub truth: f64,
    pub mean_estimate: f64,
    /// Mean estimate minus truth.
    pub bias: f64,
    pub mse: f64,
    /// Population variance of the estimates (so `mse = variance + bias^2`).
    pub variance: f64,
    /// Standard error of `bias`.
    pub bias_se: f64,
    pub coverage: Option<f64>,
    pub average_length: Option<f64>,
    pub used: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub id: usize,
    pub label: String,
    pub n: usize,
    pub m: usize,
    pub scheme: String,
    pub t1: f64,
    pub t2: f64,
    pub alpha: f64,
    pub beta: f64,
    pub replications: usize,
    /// Counts of Case1, Case2, Case3 terminations.
    pub case_counts: [usize; 3],
    pub rows: Vec<ReportRow>,
}

impl ScenarioReport {
    pub fn row(&self, estimator: Estimator, parameter: &str, loss: &str) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.estimator == estimator.name() && r.parameter == parameter && r.loss == loss)
    }

    pub fn case_frequencies(&self) -> [f64; 3] {
        let n = self.replications as f64;
        self.case_counts.map(|c| c as f64 / n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub scenarios: Vec<ScenarioReport>,
}

struct Accumulator {
    values: Vec<f64>,
    covered: usize,
    length_sum: f64,
}

impl Accumulator {
    fn new() -> Self {
        Self { values: Vec::new(), covered: 0, length_sum: 0.0 }
    }

    fn row(&self, estimator: Estimator, parameter: &str, loss: &str, truth: f64, total: usize, with_ci: bool) -> ReportRow {
        let used = self.values.len();
        let nf = used as f64;
        let (mean, variance, mse) = if used == 0 {
            (f64::NAN, f64::NAN, f64::NAN)
        } else {
            let mean = self.values.iter().sum::<f64>() / nf;
            let variance = self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
            let mse = self.values.iter().map(|v| (v - truth).powi(2)).sum::<f64>() / nf;
            (mean, variance, mse)
        };
        ReportRow {
            estimator: estimator.name().to_string(),
            parameter: parameter.to_string(),
            loss: loss.to_string(),
            truth,
            mean_estimate: mean,
            bias: mean - truth,
            mse,
            variance,
            bias_se: (variance / nf).sqrt(),
            coverage: with_ci.then(|| self.covered as f64 / nf),
            average_length: with_ci.then(|| self.length_sum / nf),
            used,
            failed: total - used,
        }
    }
}

fn aggregate(id: usize, scn: &Scenario, outcomes: &[ReplicationOutcome]) -> ScenarioReport {
    let mut case_counts = [0usize; 3];
    for o in outcomes {
        case_counts[o.case.index()] += 1;
    }
    let total = outcomes.len();
    let (ta, tb) = (scn.truth.alpha(), scn.truth.beta());
    let mut rows = Vec::new();
    for est in &scn.estimators {
        match est {
            Estimator::Mle => {
                let (mut acc_a, mut acc_b) = (Accumulator::new(), Accumulator::new());
                for (p, ci) in outcomes.iter().filter_map(|o| o.mle.as_ref()) {
                    acc_a.values.push(p.alpha());
                    acc_b.values.push(p.beta());
                    acc_a.covered += (ci.alpha.0 <= ta && ta <= ci.alpha.1) as usize;
                    acc_b.covered += (ci.beta.0 <= tb && tb <= ci.beta.1) as usize;
                    acc_a.length_sum += ci.alpha_width();
                    acc_b.length_sum += ci.beta_width();
                }
                rows.push(acc_a.row(*est, "alpha", "mle", ta, total, true));
                rows.push(acc_b.row(*est, "beta", "mle", tb, total, true));
            }
            Estimator::MhBayes | Estimator::IsBayes => {
                let pick = |o: &ReplicationOutcome| -> Option<BayesResult> {
                    if *est == Estimator::MhBayes { o.mh.clone() } else { o.is.clone() }
                };
                let results: Vec<BayesResult> = outcomes.iter().filter_map(pick).collect();
                for (param, truth) in [("alpha", ta), ("beta", tb)] {
                    for loss in ["sel", "linex", "entropy"] {
                        let mut acc = Accumulator::new();
                        for r in &results {
                            let e = if param == "alpha" { r.alpha } else { r.beta };
                            acc.values.push(match loss {
                                "sel" => e.sel,
                                "linex" => e.linex,
                                _ => e.entropy,
                            });
                        }
                        rows.push(acc.row(*est, param, loss, truth, total, false));
                    }
                }
            }
        }
    }
    ScenarioReport {
        id,
        label: scn.label(),
        n: scn.n,
        m: scn.m,
        scheme: scn.removals.to_string(),
        t1: scn.t1,
        t2: scn.t2,
        alpha: ta,
        beta: tb,
        replications: total,
        case_counts,
        rows,
    }
}

fn run_outcomes(scn: &Scenario, plan: &CensoringPlan) -> Vec<ReplicationOutcome> {
    (0..scn.replications)
        .into_par_iter()
        .map(|i| run_replication(scn, plan, i))
        .collect()
}

/// Run one scenario. `workers = None` uses the global rayon pool.
pub fn run_scenario(id: usize, scn: &Scenario, workers: Option<usize>) -> Result<ScenarioReport> {
    scn.validate()?;
    let plan = scn.plan()?;
    let outcomes = match workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?
            .install(|| run_outcomes(scn, &plan)),
        None => run_outcomes(scn, &plan),
    };
    let all_failed = outcomes
        .iter()
        .all(|o| o.mle.is_none() && o.mh.is_none() && o.is.is_none());
    if all_failed {
        return Err(Error::AllReplicationsFailed(outcomes.len()));
    }
    Ok(aggregate(id, scn, &outcomes))
}

pub fn run_study(scenarios: &[Scenario], workers: Option<usize>) -> Result<StudyReport> {
    for s in scenarios {
        s.validate()?;
    }
    let reports = scenarios
        .iter()
        .enumerate()
        .map(|(i, s)| run_scenario(i, s, workers))
        .collect::<Result<Vec<_>>>()?;
    Ok(StudyReport { scenarios: reports })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_layouts() {
        assert_eq!(build_scheme(SchemeKind::I, 15, 5).unwrap(), vec![0, 0, 0, 0, 10]);
        assert_eq!(build_scheme(SchemeKind::II, 15, 5).unwrap(), vec![10, 0, 0, 0, 0]);
        assert_eq!(build_scheme(SchemeKind::III, 15, 5).unwrap(), vec![0, 0, 10, 0, 0]);
        let r = build_scheme(SchemeKind::III, 20, 10).unwrap();
        assert_eq!(r[4], 10);
        assert_eq!(r.iter().sum::<usize>(), 10);
        assert_eq!(build_scheme(SchemeKind::IV, 30, 15).unwrap(), vec![1; 15]);
        assert!(build_scheme(SchemeKind::IV, 20, 15).is_err());
    }

    #[test]
    fn spread_matches_iv_when_divisible() {
        assert_eq!(spread_scheme(30, 15).unwrap(), build_scheme(SchemeKind::IV, 30, 15).unwrap());
        let r = spread_scheme(200, 150).unwrap();
        assert_eq!(r.iter().sum::<usize>(), 50);
        assert!(r.iter().all(|&v| v <= 1));
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("iv".parse::<SchemeKind>().unwrap(), SchemeKind::IV);
        assert!("V".parse::<SchemeKind>().is_err());
        assert_eq!("mh".parse::<Estimator>().unwrap(), Estimator::MhBayes);
    }

    #[test]
    fn grid_shape() {
        let g = paper_grid(10, 1);
        assert_eq!(g.len(), 24);
        for s in &g {
            let p = s.plan().unwrap();
            assert_eq!(p.removals().iter().sum::<usize>() + p.m(), p.n());
            assert_eq!(s.prior, GammaPrior { a: 2.0, b: 2.0, c: 2.0, d: 2.0 });
            assert_eq!(s.loss, LossParams { g: 1.0, q: 1.0 });
        }
    }

    #[test]
    fn zero_replications_is_an_error() {
        let mut s = paper_grid(1, 0).remove(0);
        s.replications = 0;
        assert!(run_scenario(0, &s, Some(1)).is_err());
    }
}
