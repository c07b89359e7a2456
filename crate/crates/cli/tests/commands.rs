use std::path::PathBuf;
use std::process::Command;

use momentcone_cli::{InstanceDomain, ModelFile, ReportFile};
use momentcone_cli::instance::instance_from_values;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_momentcone"));
    c.env_remove("MOMENTCONE_QUAD_ORDER");
    c
}

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("instances").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn report(stdout: &str) -> ReportFile {
    serde_json::from_str(stdout).unwrap()
}

#[test]
fn check_lebesgue_is_interior() {
    let (code, out, _) = run(&["check", instance("lebesgue_interval.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    let r = report(&out);
    assert!((r.fstar.unwrap() + 1.0).abs() < 1e-7);
    assert!(r.homogenization.is_none());
    assert!(r.trace.is_none());
}

#[test]
fn check_gaussian_goes_through_the_circle() {
    let (code, out, _) = run(&["check", instance("gaussian_line.json").to_str().unwrap(), "--trace"]);
    assert_eq!(code, 0);
    let r = report(&out);
    let h = r.homogenization.expect("homogenization logged");
    assert_eq!(h.sector.dim(), 2);
    // y~_(4-k, k) = y_k
    let v: Vec<f64> = h.moments.iter().map(|m| m.value).collect();
    assert_eq!(v.len(), 5);
    assert!(r.trace.is_some_and(|t| !t.is_empty()));
    assert!(r.message.contains("homogenized"));
}

#[test]
fn check_exterior_exits_two() {
    let (code, out, _) = run(&["check", instance("exterior.json").to_str().unwrap()]);
    assert_eq!(code, 2);
    let r = report(&out);
    assert!(!r.necessary_check.passed());
}

#[test]
fn tight_budget_is_inconclusive() {
    let (code, _, _) = run(&["check", instance("gaussian_line.json").to_str().unwrap(), "--max-iters", "1"]);
    assert_eq!(code, 3);
}

#[test]
fn barrier_values() {
    let (code, out, _) = run(&["barrier", instance("lebesgue_interval.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!((report(&out).fstar.unwrap() + 1.0).abs() < 1e-7);
    let (code, out, _) = run(&["barrier", instance("scaled_lebesgue.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    let want = 2.0 * 2f64.ln() - 2.0;
    assert!((report(&out).fstar.unwrap() - want).abs() < 1e-6);
    let (code, out, err) = run(&["barrier", instance("dirac_boundary.json").to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("outside barrier domain"));
    assert!(report(&out).message.contains("outside barrier domain"));
}

#[test]
fn reconstruct_writes_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("model.json");
    let (code, _, _) = run(&[
        "reconstruct",
        instance("scaled_lebesgue.json").to_str().unwrap(),
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let m: ModelFile = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((m.coefficients[0].value - 2f64.ln()).abs() < 1e-6);
    assert!(m.coefficients[1..].iter().all(|c| c.value.abs() < 1e-6));
    assert!(m.verification.passed && m.verification.independent_passed);
}

#[test]
fn reconstruct_recovers_forward_generated_polynomial() {
    // y' = grad f(p') for p' = 0.3 - 1.2 x + 0.8 x^2 + 0.5 x^3 - 1.5 x^4
    use momentcone::domain::{DomainSpec, MeasureSpec};
    use momentcone::quadrature::{build_box_rule, default_box_points};
    use momentcone::{BasisSpec, ObjectiveContext, PolyCoeffs};
    let p = vec![0.3, -1.2, 0.8, 0.5, -1.5];
    let rule = build_box_rule(&DomainSpec::unit_box(1), &MeasureSpec::uniform(), default_box_points(4)).unwrap();
    let ctx = ObjectiveContext::new(BasisSpec::all_degrees(1, 4), rule).unwrap();
    let y = ctx.eval_grad(&PolyCoeffs::new(*ctx.spec(), p.clone()).unwrap()).unwrap();
    let file = instance_from_values(1, 4, InstanceDomain::Box { lower: None, upper: None }, y.values()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("forward.json");
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let out = dir.path().join("model.json");
    let (code, _, _) = run(&["reconstruct", path.to_str().unwrap(), out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let m: ModelFile = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    for (c, want) in m.coefficients.iter().zip(&p) {
        assert!((c.value - want).abs() < 1e-6, "{} vs {want}", c.value);
    }
}

#[test]
fn reconstruct_failing_verification_exits_four() {
    // 6 points per angle cannot resolve the peaked density; the finer rule notices
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("model.json");
    let (code, _, err) = run(&[
        "reconstruct",
        instance("exponential_halfline.json").to_str().unwrap(),
        out.to_str().unwrap(),
        "--quad-order",
        "6",
    ]);
    assert_eq!(code, 4, "{err}");
    assert!(err.contains("verification failed"));
}

#[test]
fn schema_errors_exit_one_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"n":1,"degree":3,"domain":{"kind":"box"},"moments":[]}"#).unwrap();
    let (code, _, err) = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("`degree`"), "{err}");
    std::fs::write(&path, r#"{"n":1,"degree":2,"domain":{"kind":"disk"},"moments":[]}"#).unwrap();
    let (code, _, err) = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("`domain.kind`"), "{err}");
    let (code, _, _) = run(&["check", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn quad_order_from_environment() {
    let out = bin()
        .env("MOMENTCONE_QUAD_ORDER", "9")
        .args(["check", instance("lebesgue_interval.json").to_str().unwrap()])
        .output()
        .unwrap();
    let r = report(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(r.config.quadrature.order, 9);
    let (_, out, _) = run(&["check", instance("lebesgue_interval.json").to_str().unwrap(), "--quad-order", "11"]);
    assert_eq!(report(&out).config.quadrature.order, 11);
}

#[test]
fn report_round_trips_and_matches_schema_keys() {
    let (_, out, _) = run(&["check", instance("gaussian_line.json").to_str().unwrap(), "--trace"]);
    let r = report(&out);
    assert_eq!(momentcone_cli::report::to_json(&r), out);
    let schema: Value = serde_json::from_str(include_str!("../schemas/report.v1.schema.json")).unwrap();
    let required: Vec<&str> = schema["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let actual: Value = serde_json::from_str(&out).unwrap();
    let keys: Vec<&String> = actual.as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), required.len());
    for k in keys {
        assert!(required.contains(&k.as_str()), "{k} missing from schema");
    }
}

#[test]
fn instances_match_schema_keys() {
    let schema: Value = serde_json::from_str(include_str!("../schemas/instance.v1.schema.json")).unwrap();
    let props = schema["properties"].as_object().unwrap();
    for entry in std::fs::read_dir(instance("")).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        for k in v.as_object().unwrap().keys() {
            assert!(props.contains_key(k));
        }
        momentcone_cli::parse_instance(&text).unwrap();
    }
}
