use ugen::bench::{
    gen_banded_quadrics, gen_katsura, gen_mle_symmetric, projectivize, random_data,
    run_dropped_equation_experiment, ExperimentConfig, Method,
};
use ugen::regen::{measured_ratio, savings_report};
use ugen::tracker::TrackerSettings;
use ugen::Error;

#[test]
fn reports_account_for_every_path() {
    let f = gen_katsura(4).unwrap();
    for m in [Method::Ugen, Method::Regen] {
        let e = run_dropped_equation_experiment("katsura-4", &f, 4, m, &ExperimentConfig::default()).unwrap();
        let r = &e.report;
        assert!(r.is_consistent(), "{r:?}");
        assert_eq!(r.distinct_solutions, 16);
        assert_eq!(r.method, m);
        assert_eq!(e.finite, 16);
        assert_eq!(r.paths_main, 16);
        assert_eq!(r.paths_prep, if m == Method::Regen { 8 } else { 0 });
    }
}

#[test]
fn regeneration_uses_one_and_a_half_times_the_paths() {
    let f = gen_katsura(5).unwrap();
    let cfg = ExperimentConfig::default();
    let u = run_dropped_equation_experiment("k5", &f, 5, Method::Ugen, &cfg).unwrap().report;
    let r = run_dropped_equation_experiment("k5", &f, 5, Method::Regen, &cfg).unwrap().report;
    let ratio = measured_ratio(u.paths_prep + u.paths_main, r.paths_prep + r.paths_main);
    let predicted = savings_report(2, 16).unwrap();
    assert!((ratio - 2.0 / 3.0).abs() < 1e-12, "{ratio}");
    assert_eq!(predicted.ugen_paths as usize, u.paths_main);
    assert_eq!(predicted.regen_paths as usize, r.paths_prep + r.paths_main);
}

#[test]
fn dropping_the_linear_equation_also_works() {
    let f = gen_katsura(4).unwrap();
    let e = run_dropped_equation_experiment("k4", &f, 0, Method::Ugen, &ExperimentConfig::default()).unwrap();
    assert_eq!(e.report.distinct_solutions, 16);
    assert_eq!(e.report.paths_main, 16);
}

#[test]
fn homogeneous_systems_are_not_homogenized_again() {
    let f = gen_banded_quadrics(5, 2, 0).unwrap();
    let p = projectivize(&f).unwrap();
    assert_eq!(p.ring().names(), f.ring().names());
    let k = projectivize(&gen_katsura(3).unwrap()).unwrap();
    assert_eq!(k.nvars(), 5);
    assert!(k.is_homogeneous());
}

#[test]
fn small_banded_system_hits_the_bezout_bound() {
    let f = gen_banded_quadrics(6, 2, 1).unwrap();
    for m in [Method::Ugen, Method::Regen] {
        let e = run_dropped_equation_experiment("banded-6-2", &f, 5, m, &ExperimentConfig::default()).unwrap();
        assert_eq!(e.report.distinct_solutions, 32, "{m}");
        assert!(e.report.is_consistent());
    }
}

#[test]
fn full_rank_likelihood_has_degree_one() {
    let u = random_data(3, 10, 5);
    let f = gen_mle_symmetric(3, 3, &u).unwrap().system;
    let cfg = ExperimentConfig {
        settings: TrackerSettings::mle(),
        ..Default::default()
    };
    let e = run_dropped_equation_experiment("mle-3-3", &f, f.len() - 1, Method::Ugen, &cfg).unwrap();
    assert_eq!(e.finite, 1);
    assert!(e.report.is_consistent());
}

#[test]
fn regeneration_is_refused_on_products_of_projective_spaces() {
    let f = gen_mle_symmetric(3, 2, &random_data(3, 10, 0)).unwrap().system;
    let err = run_dropped_equation_experiment("mle", &f, f.len() - 1, Method::Regen, &ExperimentConfig::default());
    assert!(matches!(err, Err(Error::InvalidArgument(_))));
}

#[test]
fn bad_equation_index_is_an_error() {
    let f = gen_katsura(3).unwrap();
    assert!(run_dropped_equation_experiment("k3", &f, 9, Method::Ugen, &ExperimentConfig::default()).is_err());
}

#[test]
fn report_serializes_with_lowercase_method() {
    let f = gen_katsura(3).unwrap();
    let e = run_dropped_equation_experiment("k3", &f, 3, Method::Regen, &ExperimentConfig::default()).unwrap();
    let v = serde_json::to_value(&e.report).unwrap();
    assert_eq!(v["method"], "regen");
    assert_eq!(v["system"], "k3");
}
