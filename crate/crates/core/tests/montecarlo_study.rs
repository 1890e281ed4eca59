use chen_censor::chen::ChenParams;
use chen_censor::montecarlo::{self, Estimator, RemovalSpec, Scenario, SchemeKind};

fn scenario(n: usize, m: usize, kind: SchemeKind, t1: f64, t2: f64, reps: usize) -> Scenario {
    let mut s = Scenario::new(n, m, RemovalSpec::Scheme(kind), t1, t2, ChenParams::new(0.2, 0.5).unwrap());
    s.replications = reps;
    s.seed = 123;
    s
}

fn quick_bayes(mut s: Scenario) -> Scenario {
    s.mh.chain_length = 1200;
    s.mh.burn_in = 200;
    s.is.draws = 1000;
    s
}

#[test]
fn report_rows_and_invariants() {
    let s = quick_bayes(scenario(20, 10, SchemeKind::IV, 0.4, 4.0, 40));
    let r = montecarlo::run_scenario(0, &s, Some(2)).unwrap();
    assert_eq!(r.case_counts.iter().sum::<usize>(), 40);
    // mle: 2 rows; mh and is: 2 parameters x 3 losses
    assert_eq!(r.rows.len(), 2 + 6 + 6);
    for row in &r.rows {
        assert_eq!(row.used + row.failed, 40);
        if row.used == 0 {
            continue;
        }
        assert!(row.mse >= row.bias * row.bias - 1e-12);
        assert!((row.mse - (row.variance + row.bias * row.bias)).abs() < 1e-9 * (1.0 + row.mse));
        if let Some(c) = row.coverage {
            assert!((0.0..=1.0).contains(&c));
            assert!(row.average_length.unwrap() > 0.0);
        }
    }
    let mle_alpha = r.row(Estimator::Mle, "alpha", "mle").unwrap();
    assert!(mle_alpha.coverage.is_some());
    assert!(r.row(Estimator::MhBayes, "beta", "linex").unwrap().coverage.is_none());
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let s = quick_bayes(scenario(15, 5, SchemeKind::II, 1.0, 7.0, 24));
    let one = montecarlo::run_scenario(0, &s, Some(1)).unwrap();
    let four = montecarlo::run_scenario(0, &s, Some(4)).unwrap();
    assert_eq!(one, four);
}

#[test]
fn extreme_thresholds_drive_case_frequencies() {
    let mut s = scenario(20, 10, SchemeKind::I, 1e-8, 1e-7, 200);
    s.estimators = vec![Estimator::Mle];
    // every replication fails to fit, so the study aborts
    assert!(matches!(
        montecarlo::run_scenario(0, &s, Some(2)),
        Err(chen_censor::Error::AllReplicationsFailed(200))
    ));

    let mut late = scenario(20, 10, SchemeKind::I, 1e6, 1e7, 200);
    late.estimators = vec![Estimator::Mle];
    let r = montecarlo::run_scenario(0, &late, Some(2)).unwrap();
    assert_eq!(r.case_frequencies()[0], 1.0);

    let mut early = scenario(20, 10, SchemeKind::I, 0.001, 0.05, 200);
    early.estimators = vec![Estimator::Mle];
    let r = montecarlo::run_scenario(0, &early, Some(2)).unwrap();
    assert!(r.case_frequencies()[2] > 0.95, "{:?}", r.case_counts);
}

#[test]
fn mle_is_consistent_with_nominal_coverage() {
    let mut s = scenario(120, 60, SchemeKind::IV, 0.4, 4.0, 400);
    s.estimators = vec![Estimator::Mle];
    let r = montecarlo::run_scenario(0, &s, None).unwrap();
    let a = r.row(Estimator::Mle, "alpha", "mle").unwrap();
    let b = r.row(Estimator::Mle, "beta", "mle").unwrap();
    assert!(a.bias.abs() < 0.04, "{a:?}");
    assert!(b.bias.abs() < 0.06, "{b:?}");
    for row in [a, b] {
        let c = row.coverage.unwrap();
        assert!((0.9..=0.98).contains(&c), "{row:?}");
    }
}

#[test]
fn explicit_removals_are_accepted() {
    let r = montecarlo::spread_scheme(25, 10).unwrap();
    let mut s = scenario(25, 10, SchemeKind::I, 0.4, 4.0, 20);
    s.removals = RemovalSpec::Explicit(r);
    s.estimators = vec![Estimator::Mle];
    let rep = montecarlo::run_scenario(3, &s, Some(1)).unwrap();
    assert_eq!(rep.id, 3);
    assert!(rep.scheme.starts_with('('));
}

#[test]
fn invalid_scenarios_are_rejected_before_running() {
    let mut s = scenario(20, 15, SchemeKind::IV, 0.4, 4.0, 10);
    assert!(montecarlo::run_study(std::slice::from_ref(&s), Some(1)).is_err());
    s.removals = RemovalSpec::Scheme(SchemeKind::I);
    s.estimators.clear();
    assert!(montecarlo::run_study(&[s], Some(1)).is_err());
}

#[test]
fn paper_grid_runs_end_to_end() {
    let mut grid = montecarlo::paper_grid(3, 9);
    for s in grid.iter_mut() {
        s.mh.chain_length = 300;
        s.mh.burn_in = 50;
        s.is.draws = 300;
    }
    let report = montecarlo::run_study(&grid, None).unwrap();
    assert_eq!(report.scenarios.len(), 24);
    assert!(report.scenarios.iter().all(|s| s.case_counts.iter().sum::<usize>() == 3));
}
