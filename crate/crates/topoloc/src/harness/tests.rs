use super::*;

const HALDANE: &str = r#"
task = "chern"

[model]
model = "haldane"
[model.params]
t1 = 1.0
t2 = 0.3333333333333333
phi = 1.5707963267948966
M = 0.0
[model.geometry]
d = 2
extent = [8, 8]
boundary = "periodic"

[options]
nk = 16

[output]
timing = false
"#;

fn with_sweep(extra: &str) -> RunConfig {
    RunConfig::from_toml(&format!("{HALDANE}\n{extra}")).unwrap()
}

#[test]
fn parses_defaults() {
    let c = RunConfig::from_toml(HALDANE).unwrap();
    assert_eq!(c.task, Some(Task::Chern));
    assert_eq!(c.options.nk, 16);
    assert_eq!(c.options.mu, 0.0);
    assert_eq!(c.max_points, DEFAULT_MAX_POINTS);
    assert_eq!(c.validate().unwrap().len(), 1);
}

#[test]
fn unknown_keys_report_their_path() {
    let err = RunConfig::from_toml(&HALDANE.replace("nk = 16", "nk = 16\nbogus = 1")).unwrap_err();
    match err {
        Error::ConfigInvalid { path, .. } => assert_eq!(path, "options.bogus"),
        e => panic!("{e:?}"),
    }
}

#[test]
fn sweep_paths_must_exist() {
    let c = with_sweep("[[sweep]]\npath = \"model.params.Q\"\nvalues = [1.0]\n");
    match c.validate() {
        Err(Error::ConfigInvalid { path, .. }) => assert_eq!(path, "sweep[0].path"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn sweep_cap_rejects_before_computing() {
    let values: Vec<String> = (0..101).map(|i| format!("{i}.0")).collect();
    let text = format!("[[sweep]]\npath = \"model.params.M\"\nvalues = [{0}]\n[[sweep]]\npath = \"options.mu\"\nvalues = [{0}]\n", values.join(","));
    let c = with_sweep(&text);
    assert_eq!(c.point_count(), 101 * 101);
    assert!(matches!(run(&c), Err(Error::ConfigInvalid { .. })));
    assert_eq!(exit_code(&run(&c)), 1);
}

#[test]
fn point_seeds_depend_only_on_index() {
    assert_eq!(point_seed(7, 3), point_seed(7, 3));
    assert_ne!(point_seed(7, 3), point_seed(7, 4));
    assert_ne!(point_seed(7, 3), point_seed(8, 3));
    let mut c = with_sweep("[[sweep]]\npath = \"model.params.M\"\nvalues = [0.0, 1.0]\n");
    c.seeds = vec![1, 2];
    let pts = c.validate().unwrap();
    assert_eq!(pts.len(), 4);
    assert_eq!(pts[3].seed, point_seed(2, 3));
}

#[test]
fn haldane_sweep_jumps_at_critical_mass() {
    let masses: Vec<String> = (0..=6).map(|i| format!("{:?}", i as f64 / 3.0)).collect();
    let c = with_sweep(&format!("[[sweep]]\npath = \"model.params.M\"\nvalues = [{}]\n", masses.join(",")));
    let r = run(&c).unwrap();
    assert!(r.all_ok());
    let critical = 3.0 * 3f64.sqrt() / 3.0;
    for p in &r.points {
        let m = p.parameters["model.params.M"].as_f64().unwrap();
        let expect = if m < critical { -1 } else { 0 };
        assert_eq!(p.results[0].value, Some(Value::Integer(expect)), "M = {m}");
    }
}

#[test]
fn reports_are_deterministic_and_order_independent() {
    let c = with_sweep("[[sweep]]\npath = \"model.params.M\"\nvalues = [0.0, 0.5, 2.5]\n");
    let a = run_with(&c, Execution::Parallel).unwrap().to_json().unwrap();
    let b = run_with(&c, Execution::Serial).unwrap().to_json().unwrap();
    assert_eq!(a, b);
    assert_eq!(a, run(&c).unwrap().to_json().unwrap());
}

#[test]
fn integers_stay_integers_and_reals_are_rounded() {
    let r = run(&RunConfig::from_toml(HALDANE).unwrap()).unwrap();
    let v: Json = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    let res = &v["points"][0]["results"][0];
    assert!(res["value"].is_i64());
    assert_eq!(v["schema_version"], 1);
    assert_eq!(round_significant(std::f64::consts::PI), 3.14159265359);
    assert_eq!(round_significant(-1.0000000000004), -1.0);
}

#[test]
fn failed_points_carry_error_codes() {
    let mut c = with_sweep("[[sweep]]\npath = \"model.params.M\"\nvalues = [0.0, 1.7320508075688772]\n");
    // the Dirac points lie on a grid divisible by three
    c.options.nk = 24;
    let r = run(&c).unwrap();
    assert_eq!(r.summary.failed, 1);
    let err = r.points[1].results[0].error.as_ref().unwrap();
    assert_eq!(err.code, "GapClosedOnGrid");
    assert_eq!(exit_code(&Ok(r)), 2);
}

#[test]
fn csv_has_one_row_per_point() {
    let mut c = with_sweep("[[sweep]]\npath = \"model.params.M\"\nvalues = [0.0, 2.0]\n");
    c.output.format = OutputFormat::Csv;
    let text = run(&c).unwrap().render(OutputFormat::Csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("point,seed,model.params.M,route,value"));
    assert!(lines[1].contains(",chern,-1,"));
    assert!(lines[2].contains(",chern,0,"));
}

#[test]
fn cross_validation_flags_agreement() {
    let text = HALDANE.replace("task = \"chern\"", "routes = [\"chern\", \"index\", \"localizer\"]").replace("[8, 8]", "[14, 14]");
    let r = cross_validate(&RunConfig::from_toml(&text).unwrap()).unwrap();
    let p = &r.points[0];
    assert_eq!(p.agree, Some(true), "{:?}", p.results);
    assert!(p.results.iter().all(|x| x.canonical() == Some(-1)));
}

#[test]
fn consensus_lists_divergent_routes() {
    let mk = |route, v: Value| RouteResult {
        route,
        value: Some(v),
        certificate: Some(Certificate { route: "x".into(), ..Certificate::default() }),
        error: None,
        elapsed_ms: None,
    };
    let rs = vec![mk(Task::Chern, Value::Integer(1)), mk(Task::Index, Value::Integer(1)), mk(Task::Bbc, Value::Integer(0)), mk(Task::Marker, Value::Real(0.97))];
    assert_eq!(compare(&rs, 0.1), (false, vec![Task::Bbc]));
}

#[test]
fn cross_validation_needs_two_routes() {
    let text = HALDANE.replace("task = \"chern\"", "routes = [\"chern\"]");
    assert!(matches!(cross_validate(&RunConfig::from_toml(&text).unwrap()), Err(Error::ConfigInvalid { .. })));
}
