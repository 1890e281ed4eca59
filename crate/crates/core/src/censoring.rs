//! Improved adaptive Type-II progressive censoring.
//!
//! `n` units go on test with a planned removal vector `R` of length `m` and
//! two time thresholds `t1 < t2`. After the i-th failure at time `x`:
//!
//! - if `x < t1`, `R_i` surviving units are withdrawn at random;
//! - if `x >= t1` nothing is withdrawn (the test is being accelerated).
//!
//! The test stops at the m-th failure (Case 1 if it happened before `t1`,
//! Case 2 otherwise) or at `t2` if fewer than `m` failures have been seen by
//! then (Case 3). Units still on test at termination are censored there.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chen::ChenParams;
use crate::error::{Error, Result};

/// Pre-experiment design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensoringPlan {
    n: usize,
    m: usize,
    removals: Vec<usize>,
    t1: f64,
    t2: f64,
}

impl CensoringPlan {
    pub fn new(n: usize, m: usize, removals: Vec<usize>, t1: f64, t2: f64) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidPlan(format!("need 1 <= m <= n, got n={n}, m={m}")));
        }
        if removals.len() != m {
            return Err(Error::InvalidPlan(format!(
                "removal vector has length {}, expected m={m}",
                removals.len()
            )));
        }
        let total: usize = removals.iter().sum();
        if total + m != n {
            return Err(Error::InvalidPlan(format!(
                "sum(R) + m = {} but n = {n}",
                total + m
            )));
        }
        if !(t1 > 0.0 && t1 < t2) || t1.is_nan() || t2.is_nan() {
            return Err(Error::InvalidPlan(format!("need 0 < t1 < t2, got t1={t1}, t2={t2}")));
        }
        Ok(Self { n, m, removals, t1, t2 })
    }

    /// Complete-sample design: `m = n`, no removals, thresholds at infinity.
    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, n, vec![0; n], f64::MAX, f64::INFINITY)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn removals(&self) -> &[usize] {
        &self.removals
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    /// Same design with both thresholds multiplied by `factor`.
    pub fn with_scaled_thresholds(&self, factor: f64) -> Result<Self> {
        Self::new(self.n, self.m, self.removals.clone(), self.t1 * factor, self.t2 * factor)
    }
}

/// Termination case of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TerminationCase {
    /// All `m` failures observed before `t1`.
    Case1,
    /// `m`-th failure observed in `[t1, t2)`.
    Case2,
    /// Fewer than `m` failures by `t2`; the test is cut at `t2`.
    Case3,
}

impl TerminationCase {
    pub fn index(self) -> usize {
        match self {
            Self::Case1 => 0,
            Self::Case2 => 1,
            Self::Case3 => 2,
        }
    }
}

impl std::fmt::Display for TerminationCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Case1 => "Case1",
            Self::Case2 => "Case2",
            Self::Case3 => "Case3",
        };
        f.write_str(s)
    }
}

/// Likelihood coefficients of an observed failure record.
///
/// `k2` is the number of failures recorded when the test stopped; it equals
/// `d2` in every case and is below `m` only in Case 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub case: TerminationCase,
    pub k1: usize,
    pub k2: usize,
    pub d1: usize,
    pub d2: usize,
    pub b: usize,
    pub x_b: f64,
}

/// Deterministic coefficient extraction for a sorted failure record.
pub fn classify(times: &[f64], plan: &CensoringPlan) -> Result<Classification> {
    if times.len() > plan.m {
        return Err(Error::Inconsistent(format!(
            "{} failures recorded but the plan stops at m={}",
            times.len(),
            plan.m
        )));
    }
    if let Some(w) = times.windows(2).find(|w| !(w[0] <= w[1])) {
        return Err(Error::Inconsistent(format!(
            "failure times must be sorted ascending ({} before {})",
            w[0], w[1]
        )));
    }
    if let Some(&x) = times.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Inconsistent(format!("failure time {x} is not positive and finite")));
    }
    if let Some(&x) = times.last() {
        if x >= plan.t2 {
            return Err(Error::Inconsistent(format!(
                "failure at {x} is not before the termination time t2={}",
                plan.t2
            )));
        }
    }

    let d2 = times.len();
    let k1 = times.iter().take_while(|&&x| x < plan.t1).count();
    let removed: usize = plan.removals[..k1].iter().sum();
    let case = if d2 < plan.m {
        TerminationCase::Case3
    } else if k1 == plan.m {
        TerminationCase::Case1
    } else {
        TerminationCase::Case2
    };
    let (b, x_b) = match case {
        TerminationCase::Case1 => (0, times[d2 - 1]),
        TerminationCase::Case2 => (plan.n - plan.m - removed, times[d2 - 1]),
        TerminationCase::Case3 => {
            let b = plan.n.checked_sub(d2 + removed).ok_or_else(|| {
                Error::Inconsistent("more units removed than were on test".into())
            })?;
            (b, plan.t2)
        }
    };
    Ok(Classification { case, k1, k2: d2, d1: k1, d2, b, x_b })
}

/// Realised outcome of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensoredSample {
    times: Vec<f64>,
    case: TerminationCase,
    k1: usize,
    k2: usize,
    effective_removals: Vec<usize>,
    d1: usize,
    d2: usize,
    b: usize,
    x_b: f64,
    plan: CensoringPlan,
}

impl CensoredSample {
    fn from_classified(times: Vec<f64>, plan: CensoringPlan) -> Result<Self> {
        let c = classify(&times, &plan)?;
        let effective_removals = (0..c.d2)
            .map(|i| if i < c.k1 { plan.removals[i] } else { 0 })
            .collect();
        Ok(Self {
            times,
            case: c.case,
            k1: c.k1,
            k2: c.k2,
            effective_removals,
            d1: c.d1,
            d2: c.d2,
            b: c.b,
            x_b: c.x_b,
            plan,
        })
    }

    /// Complete (uncensored) sample, e.g. for goodness-of-fit work.
    pub fn complete(times: &[f64]) -> Result<Self> {
        load_sample(times, CensoringPlan::complete(times.len().max(1))?)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn case(&self) -> TerminationCase {
        self.case
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn k2(&self) -> usize {
        self.k2
    }

    pub fn effective_removals(&self) -> &[usize] {
        &self.effective_removals
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn x_b(&self) -> f64 {
        self.x_b
    }

    pub fn plan(&self) -> &CensoringPlan {
        &self.plan
    }

    pub fn classification(&self) -> Classification {
        Classification {
            case: self.case,
            k1: self.k1,
            k2: self.k2,
            d1: self.d1,
            d2: self.d2,
            b: self.b,
            x_b: self.x_b,
        }
    }

    /// Units accounted for: failures + withdrawn + censored at the end.
    pub fn units_accounted(&self) -> usize {
        self.d2 + self.effective_removals.iter().sum::<usize>() + self.b
    }

    /// Survival-only contributions as `(time, count)` pairs: the withdrawals
    /// at each early failure and the terminal censoring group. Zero counts
    /// are skipped.
    pub fn censored_groups(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times
            .iter()
            .zip(&self.effective_removals)
            .filter(|(_, &r)| r > 0)
            .map(|(&x, &r)| (x, r as f64))
            .chain((self.b > 0).then_some((self.x_b, self.b as f64)))
    }

    /// Every survival-term contribution including the failures themselves,
    /// as `(time, multiplicity)`. This is the set the `nu` sum runs over.
    pub fn exposure_groups(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times
            .iter()
            .zip(&self.effective_removals)
            .map(|(&x, &r)| (x, 1.0 + r as f64))
            .chain((self.b > 0).then_some((self.x_b, self.b as f64)))
    }

    /// Rescale every time (failures, `x_b`, thresholds) by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::Domain(format!("scale factor must be positive, got {factor}")));
        }
        let plan = self.plan.with_scaled_thresholds(factor)?;
        let mut out = self.clone();
        out.times.iter_mut().for_each(|x| *x *= factor);
        out.x_b *= factor;
        out.plan = plan;
        Ok(out)
    }
}

/// Wrap an observed failure record. Times are sorted with a stable sort so
/// tied readings keep their input order.
pub fn load_sample(times: &[f64], plan: CensoringPlan) -> Result<CensoredSample> {
    if times.is_empty() {
        return Err(Error::Inconsistent("no failure times supplied".into()));
    }
    if let Some(&x) = times.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!("failure times must be positive and finite, got {x}")));
    }
    let mut sorted = times.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    CensoredSample::from_classified(sorted, plan)
}

/// Run the censoring mechanism on a given set of latent lifetimes.
///
/// `lifetimes.len()` must equal `plan.n()`. Withdrawn units are chosen
/// uniformly at random among the survivors.
pub fn censor_lifetimes<R: Rng + ?Sized>(
    lifetimes: &[f64],
    plan: &CensoringPlan,
    rng: &mut R,
) -> Result<CensoredSample> {
    if lifetimes.len() != plan.n {
        return Err(Error::Inconsistent(format!(
            "{} lifetimes supplied for a plan with n={}",
            lifetimes.len(),
            plan.n
        )));
    }
    if let Some(&x) = lifetimes.iter().find(|&&x| !(x > 0.0) || x.is_nan()) {
        return Err(Error::Domain(format!("lifetimes must be positive, got {x}")));
    }
    let mut alive = lifetimes.to_vec();
    alive.sort_by(|a, b| a.total_cmp(b));

    let mut observed = Vec::with_capacity(plan.m);
    // `alive` stays sorted; its head is always the next failure.
    let mut head = 0usize;
    while observed.len() < plan.m && head < alive.len() {
        let x = alive[head];
        if x >= plan.t2 {
            break;
        }
        head += 1;
        observed.push(x);
        if x < plan.t1 {
            let due = plan.removals[observed.len() - 1];
            let remaining = alive.len() - head;
            let r = due.min(remaining);
            if r > 0 {
                let mut drop = vec![false; remaining];
                for i in index::sample(rng, remaining, r) {
                    drop[i] = true;
                }
                let mut k = 0;
                let tail: Vec<f64> = alive[head..]
                    .iter()
                    .copied()
                    .filter(|_| {
                        let keep = !drop[k];
                        k += 1;
                        keep
                    })
                    .collect();
                alive.truncate(head);
                alive.extend(tail);
            }
        }
    }

    let sample = CensoredSample::from_classified(observed, plan.clone())?;
    debug_assert_eq!(sample.units_accounted(), plan.n);
    debug_assert_eq!(sample.b, alive.len() - head);
    Ok(sample)
}

/// Simulate one experiment with Chen lifetimes.
pub fn simulate_experiment<R: Rng + ?Sized>(
    plan: &CensoringPlan,
    params: &ChenParams,
    rng: &mut R,
) -> CensoredSample {
    let lifetimes = params.sample(rng, plan.n);
    censor_lifetimes(&lifetimes, plan, rng)
        .expect("Chen variates are positive and the plan is validated")
}
