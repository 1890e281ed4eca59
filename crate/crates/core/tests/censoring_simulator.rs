mod common;

use chen_censor::censoring::{censor_lifetimes, load_sample, simulate_experiment, CensoringPlan, TerminationCase};
use chen_censor::chen::ChenParams;
use chen_censor::data::DEVICES30;
use chen_censor::montecarlo::{build_scheme, SchemeKind};
use chen_censor::rng;
use rand::seq::SliceRandom;
use rand::Rng;

fn chen(a: f64, b: f64) -> ChenParams {
    ChenParams::new(a, b).unwrap()
}

/// Brute-force replay: sort every latent lifetime once, then walk the list
/// skipping withdrawn units. Returns (case, d2).
fn replay_case<R: Rng>(plan: &CensoringPlan, params: &ChenParams, rng: &mut R) -> (TerminationCase, usize) {
    let mut life = params.sample(rng, plan.n());
    life.sort_by(f64::total_cmp);
    let mut gone = vec![false; life.len()];
    let mut observed = Vec::new();
    for i in 0..life.len() {
        if gone[i] {
            continue;
        }
        if observed.len() == plan.m() || life[i] >= plan.t2() {
            break;
        }
        gone[i] = true;
        observed.push(life[i]);
        if life[i] < plan.t1() {
            let mut alive: Vec<usize> = (i + 1..life.len()).filter(|&j| !gone[j]).collect();
            alive.shuffle(rng);
            for &j in alive.iter().take(plan.removals()[observed.len() - 1]) {
                gone[j] = true;
            }
        }
    }
    let d2 = observed.len();
    let case = if d2 < plan.m() {
        TerminationCase::Case3
    } else if observed[d2 - 1] < plan.t1() {
        TerminationCase::Case1
    } else {
        TerminationCase::Case2
    };
    (case, d2)
}

#[test]
fn conservation_over_random_plans() {
    let mut r = rng::seeded(11);
    for _ in 0..10_000 {
        let n = r.random_range(1..40usize);
        let m = r.random_range(1..=n);
        let mut removals = vec![0usize; m];
        for _ in 0..n - m {
            removals[r.random_range(0..m)] += 1;
        }
        let t1 = r.random_range(0.01..3.0);
        let t2 = t1 + r.random_range(0.01..5.0);
        let plan = CensoringPlan::new(n, m, removals, t1, t2).unwrap();
        let p = chen(r.random_range(0.05..2.0), r.random_range(0.2..2.0));
        let s = simulate_experiment(&plan, &p, &mut r);
        assert_eq!(s.units_accounted(), n);
        assert_eq!(s.d2(), s.times().len());
        assert!(s.d1() <= s.d2());
        assert!(s.times().windows(2).all(|w| w[0] <= w[1]));
        for (x, &er) in s.times().iter().zip(s.effective_removals()) {
            if *x >= t1 {
                assert_eq!(er, 0);
            }
        }
        match s.case() {
            TerminationCase::Case1 => {
                assert_eq!(s.b(), 0);
                assert_eq!(s.d2(), m);
                assert!(s.times()[m - 1] < t1);
            }
            TerminationCase::Case2 => {
                assert_eq!(s.d2(), m);
                assert_eq!(s.x_b(), s.times()[m - 1]);
            }
            TerminationCase::Case3 => {
                assert!(s.d2() < m);
                assert_eq!(s.x_b(), t2);
            }
        }
    }
}

#[test]
fn case_frequencies_match_replay_oracle() {
    let plan = CensoringPlan::new(30, 15, build_scheme(SchemeKind::I, 30, 15).unwrap(), 0.4, 4.0).unwrap();
    let p = chen(0.2, 0.5);
    let reps = 10_000;
    let mut lib = [0usize; 3];
    let mut oracle = [0usize; 3];
    let mut r1 = rng::seeded(101);
    let mut r2 = rng::seeded(202);
    for _ in 0..reps {
        lib[simulate_experiment(&plan, &p, &mut r1).case().index()] += 1;
        oracle[replay_case(&plan, &p, &mut r2).0.index()] += 1;
    }
    let n = reps as f64;
    for k in 0..3 {
        let (a, b) = (lib[k] as f64 / n, oracle[k] as f64 / n);
        let pooled = (a + b) / 2.0;
        let se = (pooled * (1.0 - pooled) * 2.0 / n).sqrt();
        assert!((a - b).abs() <= 3.0 * se + 1e-12, "case {k}: {a} vs {b} (se {se})");
    }
}

#[test]
fn replay_agrees_on_other_schemes() {
    let p = chen(0.2, 0.5);
    for kind in SchemeKind::ALL {
        let plan = CensoringPlan::new(20, 10, build_scheme(kind, 20, 10).unwrap(), 1.0, 7.0).unwrap();
        let reps = 4000;
        let mut lib = [0usize; 3];
        let mut oracle = [0usize; 3];
        let mut r1 = rng::seeded(7);
        let mut r2 = rng::seeded(8);
        for _ in 0..reps {
            lib[simulate_experiment(&plan, &p, &mut r1).case().index()] += 1;
            oracle[replay_case(&plan, &p, &mut r2).0.index()] += 1;
        }
        let n = reps as f64;
        for k in 0..3 {
            let (a, b) = (lib[k] as f64 / n, oracle[k] as f64 / n);
            let pooled = (a + b) / 2.0;
            let se = (pooled * (1.0 - pooled) * 2.0 / n).sqrt();
            assert!((a - b).abs() <= 3.5 * se + 1e-12, "{kind} case {k}: {a} vs {b}");
        }
    }
}

/// Progressive Type-II order statistics through uniform spacings.
fn classical_progressive(removals: &[usize], params: &ChenParams, rng: &mut impl Rng) -> Vec<f64> {
    let m = removals.len();
    let mut prod = 1.0;
    let mut out = Vec::with_capacity(m);
    for i in (1..=m).rev() {
        let tail: usize = removals[m - i..].iter().sum();
        let w: f64 = rng.random();
        let v = w.powf(1.0 / (i + tail) as f64);
        prod *= v;
        out.push(1.0 - prod);
    }
    out.into_iter().map(|u| params.quantile(u).unwrap()).collect()
}

#[test]
fn unbounded_thresholds_reduce_to_classical_progressive_censoring() {
    let removals = vec![2, 0, 3, 0, 0, 1, 0, 6];
    let m = removals.len();
    let plan = CensoringPlan::new(20, m, removals.clone(), 1e300, f64::INFINITY).unwrap();
    let p = chen(0.3, 0.8);
    let reps = 10_000;
    let mut lib: Vec<Vec<f64>> = vec![Vec::with_capacity(reps); m];
    let mut classic: Vec<Vec<f64>> = vec![Vec::with_capacity(reps); m];
    let mut r1 = rng::seeded(31);
    let mut r2 = rng::seeded(32);
    for _ in 0..reps {
        let s = simulate_experiment(&plan, &p, &mut r1);
        assert_eq!(s.case(), TerminationCase::Case1);
        for (i, &x) in s.times().iter().enumerate() {
            lib[i].push(x);
        }
        for (i, x) in classical_progressive(&removals, &p, &mut r2).into_iter().enumerate() {
            classic[i].push(x);
        }
    }
    let threshold = 0.01 / m as f64;
    for i in 0..m {
        let pv = common::ks_two_sample_pvalue(&lib[i], &classic[i]);
        assert!(pv > threshold, "coordinate {i}: p = {pv}");
    }
}

#[test]
fn larger_thresholds_never_move_toward_case3() {
    let mut r = rng::seeded(77);
    let p = chen(0.2, 0.5);
    let removals = build_scheme(SchemeKind::I, 20, 10).unwrap();
    let thresholds = [(0.05, 0.2), (0.2, 1.0), (0.4, 4.0), (1.0, 7.0), (5.0, 50.0)];
    for _ in 0..2000 {
        let life = p.sample(&mut r, 20);
        let mut last = usize::MAX;
        for &(t1, t2) in &thresholds {
            let plan = CensoringPlan::new(20, 10, removals.clone(), t1, t2).unwrap();
            let s = censor_lifetimes(&life, &plan, &mut rng::seeded(0)).unwrap();
            let idx = s.case().index();
            // Case order: Case3 (2) is worst, then Case2 (1), then Case1 (0)
            assert!(idx <= last, "moved from {last} to {idx} at ({t1}, {t2})");
            last = idx;
        }
    }
}

#[test]
fn extreme_thresholds_force_the_case() {
    let p = chen(0.2, 0.5);
    let removals = build_scheme(SchemeKind::IV, 30, 15).unwrap();
    let early = CensoringPlan::new(30, 15, removals.clone(), 1e-10, 1e-9).unwrap();
    let late = CensoringPlan::new(30, 15, removals, 1e6, 1e7).unwrap();
    let mut r = rng::seeded(3);
    for _ in 0..1000 {
        let s = simulate_experiment(&early, &p, &mut r);
        assert_eq!(s.case(), TerminationCase::Case3);
        assert!(s.d2() <= 2);
        assert_eq!(s.units_accounted(), 30);
        assert_eq!(simulate_experiment(&late, &p, &mut r).case(), TerminationCase::Case1);
    }
}

#[test]
fn complete_design_gives_order_statistics() {
    let plan = CensoringPlan::new(5, 5, vec![0; 5], 1e300, f64::INFINITY).unwrap();
    let p = chen(1.0, 1.0);
    let s = simulate_experiment(&plan, &p, &mut rng::seeded(9));
    let mut direct = p.sample(&mut rng::seeded(9), 5);
    direct.sort_by(f64::total_cmp);
    assert_eq!(s.times(), &direct[..]);
    assert_eq!((s.case(), s.d1(), s.d2(), s.b()), (TerminationCase::Case1, 5, 5, 0));
}

#[test]
fn device_data_scheme_one_keeps_smallest_times() {
    let plan = CensoringPlan::new(30, 5, build_scheme(SchemeKind::I, 30, 5).unwrap(), 0.4, 4.0).unwrap();
    let s = censor_lifetimes(&DEVICES30, &plan, &mut rng::seeded(1)).unwrap();
    assert_eq!(s.times(), &[0.02, 0.10, 0.13, 0.23, 0.23]);
    assert_eq!((s.case(), s.k1(), s.k2()), (TerminationCase::Case1, 5, 5));
}

#[test]
fn device_records_reproduce_reported_counts() {
    let rec = [
        0.02, 0.13, 0.23, 0.23, 0.28, 0.30, 0.65, 0.80, 0.88, 1.06, 1.43, 1.47, 1.73, 1.81, 2.12, 2.45,
        2.47, 2.61, 2.66, 3.00,
    ];
    let mut r = vec![0usize; 20];
    r[0] = 1;
    r[19] = 9;
    let late = load_sample(&rec, CensoringPlan::new(30, 20, r.clone(), 1.0, 7.0).unwrap()).unwrap();
    assert_eq!((late.case(), late.k1(), late.k2()), (TerminationCase::Case2, 9, 20));
    let early = load_sample(&rec, CensoringPlan::new(30, 20, r, 0.4, 4.0).unwrap()).unwrap();
    assert_eq!((early.k1(), early.k2()), (6, 20));
    assert_eq!(late.units_accounted(), 30);

    let m15 = [
        0.02, 0.10, 0.13, 0.23, 0.23, 0.28, 0.30, 0.65, 0.80, 0.88, 1.06, 1.43, 1.47, 1.73, 1.81,
    ];
    let r2 = build_scheme(SchemeKind::II, 30, 15).unwrap();
    let a = load_sample(&m15, CensoringPlan::new(30, 15, r2.clone(), 0.4, 4.0).unwrap()).unwrap();
    let b = load_sample(&m15, CensoringPlan::new(30, 15, r2, 1.0, 7.0).unwrap()).unwrap();
    assert_eq!((a.k1(), a.k2()), (7, 15));
    assert_eq!((b.k1(), b.k2()), (10, 15));
}

#[test]
fn load_sample_rejects_bad_input() {
    let plan = CensoringPlan::new(10, 3, vec![7, 0, 0], 1.0, 5.0).unwrap();
    assert!(load_sample(&[], plan.clone()).is_err());
    assert!(load_sample(&[0.1, -0.2], plan.clone()).is_err());
    assert!(load_sample(&[0.1, f64::NAN], plan.clone()).is_err());
    assert!(load_sample(&[0.1, 0.2, 0.3, 0.4], plan.clone()).is_err());
    let s = load_sample(&[0.3, 0.1, 0.2], plan).unwrap();
    assert_eq!(s.times(), &[0.1, 0.2, 0.3]);
}
