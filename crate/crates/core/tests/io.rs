use ugen::bench::{
    gen_cyclic, gen_katsura, gen_mle_symmetric, random_data, run_dropped_equation_experiment,
    ExperimentConfig, Method,
};
use ugen::io::{check_solutions, SolutionFile, SolutionStatus, SystemFile};
use ugen::{Cx, Error, PolySystem};

fn round_trip(f: &PolySystem) -> PolySystem {
    let text = serde_json::to_string(&SystemFile::from_system(f)).unwrap();
    let back: SystemFile = serde_json::from_str(&text).unwrap();
    back.to_system().unwrap()
}

#[test]
fn system_files_round_trip() {
    let mle = gen_mle_symmetric(4, 2, &random_data(4, 10, 0)).unwrap().system;
    for f in [gen_katsura(4).unwrap(), gen_cyclic(5).unwrap(), mle.clone(), mle.homogenize().unwrap()] {
        let g = round_trip(&f);
        assert_eq!(g.ring().names(), f.ring().names());
        assert_eq!(g.ring().groups(), f.ring().groups());
        assert_eq!(g.ring().homogenizers(), f.ring().homogenizers());
        assert_eq!(g.polys(), f.polys());
    }
}

#[test]
fn system_file_has_the_documented_keys() {
    let v: serde_json::Value = serde_json::to_value(SystemFile::from_system(&gen_cyclic(3).unwrap())).unwrap();
    assert_eq!(v["variables"], serde_json::json!(["x0", "x1", "x2"]));
    assert_eq!(v["groups"], serde_json::json!([["x0", "x1", "x2"]]));
    assert_eq!(v["equations"].as_array().unwrap().len(), 3);
    assert!(v.get("homogenizers").is_none());
}

#[test]
fn hand_written_system_file_parses() {
    let text = r#"{"variables": ["x", "y"], "groups": [["x", "y"]], "equations": ["x^2 + y^2 - 1", "x - y"]}"#;
    let f: SystemFile = serde_json::from_str(text).unwrap();
    let f = f.to_system().unwrap();
    let s = 0.5f64.sqrt();
    let v = f.evaluate(&[Cx::new(s, 0.0), Cx::new(s, 0.0)]).unwrap();
    assert!(v.iter().all(|c| c.norm() < 1e-15));
}

#[test]
fn bad_equation_reports_its_index() {
    let file = SystemFile {
        variables: vec!["x".into()],
        groups: vec![vec!["x".into()]],
        homogenizers: vec![],
        equations: vec!["x - 1".into(), "x +* 2".into()],
    };
    let err = file.to_system().unwrap_err().to_string();
    assert!(err.contains("equation 1"), "{err}");
}

fn solved_katsura() -> (PolySystem, SolutionFile) {
    let f = gen_katsura(3).unwrap();
    let e = run_dropped_equation_experiment("k3", &f, 3, Method::Ugen, &ExperimentConfig::default()).unwrap();
    let file = SolutionFile::new(&e.system, "ugen", 0, &e.solutions, e.finite);
    (f, file)
}

#[test]
fn solution_file_round_trips_and_verifies() {
    let (f, file) = solved_katsura();
    assert_eq!(file.finite(), 8);
    let text = serde_json::to_string_pretty(&file).unwrap();
    let back: SolutionFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back, file);
    // against the affine system and against the stored projective one
    let res = check_solutions(&f, &back).unwrap();
    assert!(res.iter().all(|&r| r < 1e-10), "{res:?}");
    let stored = back.system.to_system().unwrap();
    assert_eq!(check_solutions(&stored, &back).unwrap(), res);
}

#[test]
fn tampered_solution_is_flagged() {
    let (f, mut file) = solved_katsura();
    file.solutions[2].coordinates[0][1][0] += 1e-3;
    let res = check_solutions(&f, &file).unwrap();
    assert!(res[2] > 1e-6);
    assert_eq!(res.iter().filter(|&&r| r > 1e-8).count(), 1);
}

#[test]
fn wrong_shapes_are_errors() {
    let (f, mut file) = solved_katsura();
    file.solutions[0].coordinates[0].pop();
    assert!(matches!(check_solutions(&f, &file), Err(Error::InvalidArgument(_))));
    let (_, file) = solved_katsura();
    let other = gen_cyclic(5).unwrap();
    assert!(matches!(check_solutions(&other, &file), Err(Error::RingMismatch(_))));
}

#[test]
fn statuses_follow_the_finite_prefix() {
    let (_, file) = solved_katsura();
    let n = file.finite();
    assert!(file.solutions[..n].iter().all(|s| s.status == SolutionStatus::Finite));
    assert!(file.solutions[n..].iter().all(|s| s.status == SolutionStatus::AtInfinity));
    let v = serde_json::to_value(&file.solutions[0]).unwrap();
    assert_eq!(v["status"], "finite");
}
