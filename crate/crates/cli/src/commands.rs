use std::fs;
use std::path::Path;

use chen_censor::bayes::{self, BayesResult, Diagnostics, GammaPrior, IsConfig, LossParams, MhConfig};
use chen_censor::censoring::{load_sample, simulate_experiment, CensoredSample, CensoringPlan};
use chen_censor::data;
use chen_censor::gof::{self, NullModel};
use chen_censor::mle::{self, MleOptions};
use chen_censor::montecarlo::{self, Estimator, RemovalSpec, Scenario, SchemeKind, StudyReport};
use chen_censor::rng;
use chen_censor::ChenParams;
use serde_json::{json, Value};

use crate::cli::{
    BayesArgs, DataArgs, FitArgs, GofArgs, LossArgs, MleArgs, PlanArgs, PriorArgs, SampleArgs, Sampler, SamplerArgs,
    StudyArgs,
};
use crate::error::CliError;
use crate::output::{join, num, opt_num, Report};

/// Side files produced by a command, written only after the report succeeds.
pub type SideFiles = Vec<(std::path::PathBuf, String)>;

fn params(alpha: f64, beta: f64) -> Result<ChenParams, CliError> {
    Ok(ChenParams::new(alpha, beta)?)
}

fn removals_from(plan: &PlanArgs, n: usize, m: usize) -> Result<RemovalSpec, CliError> {
    match (&plan.scheme, &plan.removals) {
        (Some(s), None) => Ok(RemovalSpec::Scheme(s.parse::<SchemeKind>()?)),
        (None, Some(r)) => Ok(RemovalSpec::Explicit(r.clone())),
        (None, None) if m == n => Ok(RemovalSpec::Explicit(vec![0; m])),
        (None, None) => Err(CliError::usage("give --scheme or --removals")),
        (Some(_), Some(_)) => Err(CliError::usage("--scheme and --removals are mutually exclusive")),
    }
}

fn build_plan(plan: &PlanArgs) -> Result<(CensoringPlan, RemovalSpec), CliError> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::usage(format!("--{name} is required")));
    let n = plan.n.ok_or_else(|| CliError::usage("--n is required"))?;
    let m = plan.m.ok_or_else(|| CliError::usage("--m is required"))?;
    let t1 = need(plan.t1, "t1")?;
    let t2 = need(plan.t2, "t2")?;
    let spec = removals_from(plan, n, m)?;
    let r = match &spec {
        RemovalSpec::Scheme(k) => montecarlo::build_scheme(*k, n, m)?,
        RemovalSpec::Explicit(r) => r.clone(),
    };
    Ok((CensoringPlan::new(n, m, r, t1, t2)?, spec))
}

pub fn read_times(source: &str) -> Result<Vec<f64>, CliError> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return data::builtin(name)
            .map(|d| d.to_vec())
            .ok_or_else(|| CliError::usage(format!("unknown built-in data set {name:?}; available: devices30")));
    }
    let text = fs::read_to_string(Path::new(source))
        .map_err(|e| CliError::usage(format!("cannot read {source}: {e}")))?;
    Ok(data::parse_times(&text)?)
}

/// Observed sample: a complete sample when `--m` is absent.
fn observed_sample(args: &DataArgs) -> Result<CensoredSample, CliError> {
    let times = read_times(&args.data)?;
    if args.plan.m.is_none() {
        let p = &args.plan;
        if p.n.is_some() || p.scheme.is_some() || p.removals.is_some() || p.t1.is_some() || p.t2.is_some() {
            return Err(CliError::usage("plan flags need --m; omit them all for a complete sample"));
        }
        return Ok(CensoredSample::complete(&times)?);
    }
    let (plan, _) = build_plan(&args.plan)?;
    Ok(load_sample(&times, plan)?)
}

fn sample_json(s: &CensoredSample) -> Value {
    json!({
        "times": s.times(),
        "case": s.case().to_string(),
        "k1": s.k1(),
        "k2": s.k2(),
        "d1": s.d1(),
        "d2": s.d2(),
        "removals": s.effective_removals(),
        "b": s.b(),
        "x_b": s.x_b(),
    })
}

fn plan_json(p: &CensoringPlan) -> Value {
    json!({ "n": p.n(), "m": p.m(), "removals": p.removals(), "t1": p.t1(), "t2": p.t2() })
}

fn params_json(p: &ChenParams) -> Value {
    json!({ "alpha": p.alpha(), "beta": p.beta() })
}

pub fn sample(args: &SampleArgs, seed: u64) -> Result<Report, CliError> {
    let (plan, _) = build_plan(&args.plan)?;
    let truth = params(args.alpha, args.beta)?;
    if args.count == 0 {
        return Err(CliError::usage("--count must be at least 1"));
    }
    let samples: Vec<CensoredSample> = (0..args.count)
        .map(|i| simulate_experiment(&plan, &truth, &mut rng::stream(seed, i as u64)))
        .collect();
    let rows = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let r: Vec<String> = s.effective_removals().iter().map(|v| v.to_string()).collect();
            vec![
                (i + 1).to_string(),
                s.case().to_string(),
                s.k1().to_string(),
                s.k2().to_string(),
                s.d1().to_string(),
                s.d2().to_string(),
                s.b().to_string(),
                num(s.x_b()),
                join(s.times()),
                r.join(";"),
            ]
        })
        .collect();
    Ok(Report {
        json: json!({
            "plan": plan_json(&plan),
            "params": params_json(&truth),
            "seed": seed,
            "records": samples.iter().map(sample_json).collect::<Vec<_>>(),
        }),
        headers: vec!["record", "case", "k1", "k2", "d1", "d2", "b", "x_b", "times", "removals"],
        rows,
        notes: vec![],
    })
}

fn mle_options(m: &MleArgs) -> Result<MleOptions, CliError> {
    let o = MleOptions { beta_init: m.beta_init, tol: m.tol, max_iter: m.max_iter, ..MleOptions::default() };
    o.validate()?;
    Ok(o)
}

pub fn fit(args: &FitArgs) -> Result<Report, CliError> {
    let opts = mle_options(&args.mle)?;
    mle::normal_critical_value(args.level)?;
    if args.hazard_grid == Some(0) {
        return Err(CliError::usage("--hazard-grid needs at least one point"));
    }
    let s = observed_sample(&args.data)?;
    let f = mle::fit(&s, &opts)?;
    let ci = mle::confidence_intervals(&f, args.level)?;
    let se = [f.varcov[0][0].sqrt(), f.varcov[1][1].sqrt()];
    let mut json = json!({
        "alpha": f.params.alpha(),
        "beta": f.params.beta(),
        "loglik": f.loglik,
        "varcov": f.varcov,
        "information": f.info,
        "std_error": { "alpha": se[0], "beta": se[1] },
        "ci": { "level": ci.level, "alpha": [ci.alpha.0, ci.alpha.1], "beta": [ci.beta.0, ci.beta.1] },
        "iterations": f.iterations,
        "method": format!("{:?}", f.converged_by),
        "sample": sample_json(&s),
    });
    let notes = vec![
        format!("log-likelihood: {}", f.loglik),
        format!("case: {}  d2: {}  solver: {:?} ({} iterations)", s.case(), s.d2(), f.converged_by, f.iterations),
        format!(
            "varcov: [[{}, {}], [{}, {}]]",
            f.varcov[0][0], f.varcov[0][1], f.varcov[1][0], f.varcov[1][1]
        ),
    ];
    if let Some(points) = args.hazard_grid {
        let top = s.times().iter().copied().fold(0.0, f64::max) * 1.05;
        let mut rows = Vec::with_capacity(points);
        let mut grid = Vec::with_capacity(points);
        for i in 1..=points {
            let x = top * i as f64 / points as f64;
            let (h, d, sv) = (f.params.hazard(x)?, f.params.pdf(x)?, f.params.survival(x)?);
            rows.push(vec![num(x), num(h), num(d), num(sv)]);
            grid.push(json!({ "x": x, "hazard": h, "pdf": d, "survival": sv }));
        }
        json["hazard_grid"] = Value::Array(grid);
        return Ok(Report { json, headers: vec!["x", "hazard", "pdf", "survival"], rows, notes });
    }
    let rows = vec![
        vec!["alpha".into(), num(f.params.alpha()), num(se[0]), num(ci.alpha.0), num(ci.alpha.1)],
        vec!["beta".into(), num(f.params.beta()), num(se[1]), num(ci.beta.0), num(ci.beta.1)],
    ];
    Ok(Report { json, headers: vec!["parameter", "estimate", "std_error", "lower", "upper"], rows, notes })
}

fn prior_from(p: &PriorArgs) -> Result<GammaPrior, CliError> {
    Ok(GammaPrior::new(p.a, p.b, p.c, p.d)?)
}

fn loss_from(l: &LossArgs) -> Result<LossParams, CliError> {
    Ok(LossParams::new(l.g, l.q)?)
}

fn mh_config(o: &SamplerArgs, seed: u64) -> Result<MhConfig, CliError> {
    let cfg = MhConfig {
        chain_length: o.chain_length,
        burn_in: o.burn_in,
        proposal_sd: o.proposal_sd,
        init: None,
        seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn is_config(o: &SamplerArgs, seed: u64) -> Result<IsConfig, CliError> {
    if o.draws == 0 {
        return Err(CliError::usage("--draws must be at least 1"));
    }
    Ok(IsConfig { draws: o.draws, seed })
}

pub fn bayes(args: &BayesArgs, seed: u64) -> Result<(Report, SideFiles), CliError> {
    let prior = prior_from(&args.prior)?;
    let loss = loss_from(&args.loss)?;
    let mh = mh_config(&args.sampler_opts, seed)?;
    let is = is_config(&args.sampler_opts, seed)?;
    let s = observed_sample(&args.data)?;
    let mut side = SideFiles::new();
    let result = match args.sampler {
        Sampler::Mh => {
            let chain = bayes::run_mh_gibbs(&s, &prior, &mh)?;
            if let Some(path) = &args.dump_chain {
                let mut text = String::from("iteration,alpha,beta,kept\n");
                for (i, (a, b)) in chain.alpha.iter().zip(&chain.beta).enumerate() {
                    text.push_str(&format!("{},{},{},{}\n", i + 1, a, b, i >= chain.burn_in));
                }
                side.push((path.clone(), text));
            }
            chain.estimates(&loss)?
        }
        Sampler::Is => {
            let draws = bayes::importance_sample(&s, &prior, &is)?;
            if let Some(path) = &args.dump_chain {
                let w = draws.normalized_weights();
                let mut text = String::from("draw,alpha,beta,log_weight,weight\n");
                for i in 0..draws.alpha.len() {
                    text.push_str(&format!(
                        "{},{},{},{},{}\n",
                        i + 1,
                        draws.alpha[i],
                        draws.beta[i],
                        draws.log_weights[i],
                        w[i]
                    ));
                }
                side.push((path.clone(), text));
            }
            draws.estimates(&loss)?
        }
    };
    Ok((bayes_report(&result, &s, &prior, &loss, args.sampler), side))
}

fn bayes_report(r: &BayesResult, s: &CensoredSample, prior: &GammaPrior, loss: &LossParams, sampler: Sampler) -> Report {
    let mut rows = Vec::new();
    for (name, est, se) in [("alpha", r.alpha, r.alpha_mc_se), ("beta", r.beta, r.beta_mc_se)] {
        rows.push(vec![name.into(), "sel".into(), num(est.sel), num(se.sel)]);
        rows.push(vec![name.into(), "linex".into(), num(est.linex), num(se.linex)]);
        rows.push(vec![name.into(), "entropy".into(), num(est.entropy), num(se.entropy)]);
    }
    let mut notes = vec![format!("loss: g = {}, q = {}", loss.g, loss.q)];
    match &r.diagnostics {
        Diagnostics::Mh { acceptance_rate, proposal_sd, kept, warning } => {
            notes.push(format!(
                "sampler: mh  acceptance rate: {acceptance_rate:.4}  proposal sd: {proposal_sd}  kept draws: {kept}"
            ));
            if let Some(w) = warning {
                notes.push(format!("warning: {w}"));
            }
        }
        Diagnostics::Is { effective_sample_size, weight_entropy, draws } => notes.push(format!(
            "sampler: is  draws: {draws}  effective sample size: {effective_sample_size:.1}  weight entropy: {weight_entropy:.4}"
        )),
    }
    Report {
        json: json!({
            "sampler": match sampler { Sampler::Mh => "mh", Sampler::Is => "is" },
            "estimates": r,
            "prior": prior,
            "loss": loss,
            "sample": sample_json(s),
        }),
        headers: vec!["parameter", "loss", "estimate", "mc_se"],
        rows,
        notes,
    }
}

fn study_scenarios(args: &StudyArgs, seed: u64) -> Result<Vec<Scenario>, CliError> {
    if args.reps == 0 {
        return Err(CliError::usage("--reps must be at least 1"));
    }
    if args.workers == Some(0) {
        return Err(CliError::usage("--workers must be at least 1"));
    }
    let estimators = args
        .estimators
        .iter()
        .map(|e| e.parse::<Estimator>())
        .collect::<chen_censor::Result<Vec<_>>>()?;
    let prior = prior_from(&args.prior)?;
    let loss = loss_from(&args.loss)?;
    let mh = mh_config(&args.sampler_opts, 0)?;
    let is = is_config(&args.sampler_opts, 0)?;
    let mut scenarios = if args.paper_grid {
        let p = &args.plan;
        if p.n.is_some() || p.m.is_some() || p.scheme.is_some() || p.removals.is_some() || p.t1.is_some() || p.t2.is_some() {
            return Err(CliError::usage("--paper-grid fixes the plans; drop the plan flags"));
        }
        montecarlo::paper_grid(args.reps, seed)
    } else {
        let (plan, spec) = build_plan(&args.plan)?;
        let mut s = Scenario::new(plan.n(), plan.m(), spec, plan.t1(), plan.t2(), params(args.alpha, args.beta)?);
        s.replications = args.reps;
        s.seed = seed;
        vec![s]
    };
    for s in scenarios.iter_mut() {
        s.estimators = estimators.clone();
        s.prior = prior;
        s.loss = loss;
        s.ci_level = args.level;
        s.mh = mh;
        s.is = is;
        s.validate()?;
    }
    Ok(scenarios)
}

pub fn study(args: &StudyArgs, seed: u64) -> Result<Report, CliError> {
    let scenarios = study_scenarios(args, seed)?;
    if args.dry_run {
        let rows = scenarios
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let plan = s.plan().expect("validated");
                let r: Vec<String> = plan.removals().iter().map(|v| v.to_string()).collect();
                vec![
                    (i + 1).to_string(),
                    s.n.to_string(),
                    s.m.to_string(),
                    s.removals.to_string(),
                    num(s.t1),
                    num(s.t2),
                    num(s.truth.alpha()),
                    num(s.truth.beta()),
                    s.replications.to_string(),
                    r.join(";"),
                ]
            })
            .collect();
        let json = json!({ "dry_run": true, "scenarios": scenarios });
        return Ok(Report {
            json,
            headers: vec!["scenario", "n", "m", "scheme", "t1", "t2", "alpha", "beta", "replications", "removals"],
            rows,
            notes: vec![],
        });
    }
    let report = montecarlo::run_study(&scenarios, args.workers)?;
    Ok(study_report(&report))
}

pub const STUDY_COLUMNS: [&str; 22] = [
    "scenario", "n", "m", "scheme", "t1", "t2", "estimator", "parameter", "loss", "truth", "mean", "bias", "mse",
    "variance", "bias_se", "coverage", "avg_length", "used", "failed", "case1", "case2", "case3",
];

fn study_report(report: &StudyReport) -> Report {
    let mut rows = Vec::new();
    for sc in &report.scenarios {
        for r in &sc.rows {
            rows.push(vec![
                (sc.id + 1).to_string(),
                sc.n.to_string(),
                sc.m.to_string(),
                sc.scheme.clone(),
                num(sc.t1),
                num(sc.t2),
                r.estimator.clone(),
                r.parameter.clone(),
                r.loss.clone(),
                num(r.truth),
                num(r.mean_estimate),
                num(r.bias),
                num(r.mse),
                num(r.variance),
                num(r.bias_se),
                opt_num(r.coverage),
                opt_num(r.average_length),
                r.used.to_string(),
                r.failed.to_string(),
                sc.case_counts[0].to_string(),
                sc.case_counts[1].to_string(),
                sc.case_counts[2].to_string(),
            ]);
        }
    }
    Report {
        json: serde_json::to_value(report).expect("report serializes"),
        headers: STUDY_COLUMNS.to_vec(),
        rows,
        notes: vec![],
    }
}

pub fn gof(args: &GofArgs, seed: u64) -> Result<Report, CliError> {
    if args.reps < gof::MIN_BOOTSTRAP_REPS {
        return Err(CliError::usage(format!(
            "--reps must be at least {}, got {}",
            gof::MIN_BOOTSTRAP_REPS,
            args.reps
        )));
    }
    let null = match (args.alpha, args.beta) {
        (Some(a), Some(b)) => NullModel::Specified { params: params(a, b)? },
        _ => NullModel::Fitted,
    };
    let times = read_times(&args.data)?;
    let r = gof::goodness_of_fit(&times, null, args.reps, seed, &MleOptions::default())?;
    let label = match null {
        NullModel::Fitted => "fitted by maximum likelihood",
        NullModel::Specified { .. } => "fully specified",
    };
    Ok(Report {
        json: serde_json::to_value(&r).expect("report serializes"),
        headers: vec!["statistic", "value", "p_value"],
        rows: vec![
            vec!["ks".into(), num(r.ks_stat), num(r.ks_pvalue)],
            vec!["ad".into(), num(r.ad_stat), num(r.ad_pvalue)],
        ],
        notes: vec![
            format!("null: Chen(alpha = {}, beta = {}), {label}", r.fitted.alpha(), r.fitted.beta()),
            format!("bootstrap replications: {}  failed refits: {}", r.bootstrap_reps, r.failed_refits),
        ],
    })
}
