use vubqc_core::scenario::{execute_audit, execute_run, AuditConfig, RunConfig};
use vubqc_core::Error;

fn run(text: &str) -> vubqc_core::scenario::Report {
    execute_run(&RunConfig::from_json(text).unwrap()).unwrap()
}

#[test]
fn unknown_fields_are_rejected() {
    assert!(matches!(
        RunConfig::from_json(r#"{"protocol":"P1","seed":1,"colour":1}"#),
        Err(Error::Config(_))
    ));
    assert!(
        AuditConfig::from_json(r#"{"audit":{"kind":"partition_stats","N":2,"extra":0}}"#).is_err()
    );
    assert!(RunConfig::from_json(r#"{"protocol":"P7"}"#).is_err());
}

#[test]
fn digest_covers_the_seed() {
    let a =
        run(r#"{"protocol":"P2","pattern":{"kind":"corpus","name":"line-3-classical"},"seed":1}"#);
    let b =
        run(r#"{"protocol":"P2","pattern":{"kind":"corpus","name":"line-3-classical"},"seed":2}"#);
    assert_ne!(a.config_digest, b.config_digest);
    assert_eq!(a.seed, 1);
    assert_eq!(a.accept, Some(true));
}

#[test]
fn every_protocol_runs_honestly() {
    let circuit = r#"{"wires":1,"gates":[{"gate":"j","wire":0,"angle":2}]}"#;
    let configs = [
        r#"{"protocol":"P1","pattern":{"kind":"corpus","name":"line-4"}}"#.to_string(),
        r#"{"protocol":"P2","pattern":{"kind":"line","angles":[1,2]},"input":{"kind":"classical","bits":[true]}}"#.to_string(),
        r#"{"protocol":"P3","pattern":{"kind":"corpus","name":"line-3"},"dummy_hosts":[0,2]}"#.to_string(),
        format!(r#"{{"protocol":"P4","circuit":{circuit}}}"#),
        format!(r#"{{"protocol":"P5","N":3,"circuit":{circuit}}}"#),
        r#"{"protocol":"P6","pattern":{"kind":"corpus","name":"line-4"}}"#.to_string(),
        format!(r#"{{"protocol":"P8","N":2,"circuit":{circuit}}}"#),
    ];
    for text in &configs {
        let r = run(text);
        assert_eq!(r.accept, Some(true), "{text}");
        if let Some(f) = r.values["output"]["fidelity_with_reference"].as_f64() {
            assert!(f > 1.0 - 1e-9, "{text}: {f}");
        }
    }
}

#[test]
fn inconsistent_requests_are_errors() {
    let bad = [
        r#"{"protocol":"P8","circuit":{"wires":1,"gates":[]}}"#,
        r#"{"protocol":"P8","N":1,"circuit":{"wires":1,"gates":[{"gate":"j","wire":0,"angle":1}]}}"#,
        r#"{"protocol":"P8","N":2,"d":3,"encoding":{"provider":"identity"},"circuit":{"wires":1,"gates":[]}}"#,
        r#"{"protocol":"P1","pattern":{"kind":"corpus","name":"line-2+d1"}}"#,
        r#"{"protocol":"P4"}"#,
    ];
    for text in bad {
        assert!(
            execute_run(&RunConfig::from_json(text).unwrap()).is_err(),
            "{text}"
        );
    }
}

#[test]
fn sampled_bound_suite_agrees_with_exact() {
    let exact = AuditConfig::from_json(
        r#"{"audit":{"kind":"p_incorrect","pattern":{"kind":"line","angles":[3,6]},"input_bits":[false],
            "attacks":{"list":[{"label":"ZII","attack":{"deviations":[{"stage":1,"deviation":{"kind":"pauli","qubit":0,"pauli":"Z"}}]}}]}},"seed":3}"#,
    )
    .unwrap();
    let mut sampled = exact.clone();
    sampled.mode = vubqc_core::scenario::ModeFlag::Sample;
    sampled.samples = Some(400);
    let e = execute_audit(&exact, 1).unwrap().report;
    let s = execute_audit(&sampled, 1).unwrap().report;
    let p_exact = e.values["attacks"][0]["p_incorrect"].as_f64().unwrap();
    let p_sampled = s.values["attacks"][0]["p_incorrect"].as_f64().unwrap();
    let half = s.values["attacks"][0]["half_width"].as_f64().unwrap();
    assert!(
        (p_exact - p_sampled).abs() <= 2.0 * half + 1e-12,
        "{p_exact} vs {p_sampled} ± {half}"
    );
    assert!(e.pass && s.pass);
}

#[test]
fn jobs_do_not_change_the_report() {
    let config = AuditConfig::from_json(
        r#"{"audit":{"kind":"bound_suite","pattern":{"kind":"line","angles":[1]}},"seed":5}"#,
    )
    .unwrap();
    let one = execute_audit(&config, 1).unwrap().report.to_json();
    let three = execute_audit(&config, 3).unwrap().report.to_json();
    assert_eq!(one, three);
}
