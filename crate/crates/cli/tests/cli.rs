use std::collections::HashMap;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn udisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_udisc")).args(args).env_remove("UDISC_CAP").output().expect("binary runs")
}

fn kv(out: &Output) -> HashMap<String, String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

fn num(map: &HashMap<String, String>, key: &str) -> f64 {
    map.get(key).unwrap_or_else(|| panic!("missing {key}")).parse().unwrap()
}

#[test]
fn build_writes_a_file_that_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.povm");
    let path = path.to_str().unwrap();
    let built = udisc(&["build", "--m", "3", "--n", "2", "--family", "universal", "--out", path, "--format", "kv"]);
    assert_eq!(built.status.code(), Some(0));
    let report = kv(&built);
    assert_eq!(report["c"], "0.5");
    assert_eq!(report["elements"], "3");
    assert_eq!(report["dim"], "27");

    let verified = udisc(&["verify", path, "--format", "kv"]);
    assert_eq!(verified.status.code(), Some(0));
    let report = kv(&verified);
    assert_eq!(report["pass"], "true");
    assert_eq!(report["covariant"], "true");
    assert!(num(&report, "max_leakage") < 1e-9);
}

#[test]
fn half_identity_fails_verification_with_full_leakage() {
    let out = udisc(&["verify", &fixture("half_identity.povm"), "--format", "kv"]);
    assert_eq!(out.status.code(), Some(1));
    let report = kv(&out);
    assert_eq!(report["valid"], "true");
    assert_eq!(report["pass"], "false");
    assert_eq!(num(&report, "leakage_1"), 1.0);
}

#[test]
fn truncated_povm_is_a_parse_error_with_a_line_number() {
    let out = udisc(&["verify", &fixture("truncated.povm")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 15"));
}

#[test]
fn orthonormal_pair_reaches_a_quarter() {
    let out = udisc(&["prob", &fixture("orthonormal_pair.states"), "--family", "universal"]);
    assert_eq!(out.status.code(), Some(0));
    let report = kv(&out);
    assert_eq!(report["p"], "0.25");
    assert_eq!(report["p_s"], "1");
    assert_eq!(report["bound_lower"], "0.25");
    assert_eq!(report["bound_upper"], "0.25");
}

#[test]
fn overlap_pair_probabilities() {
    let out = udisc(&["prob", &fixture("overlap_pair.states"), "--which", "2", "--format", "kv"]);
    let report = kv(&out);
    assert!((num(&report, "p") - 0.16).abs() < 1e-12);
    assert!((num(&report, "p_operational") - 0.16).abs() < 1e-12);
    assert!((num(&report, "p_s") - 0.4).abs() < 1e-12);
}

#[test]
fn text_and_kv_report_the_same_numbers() {
    let text = kv(&udisc(&["prob", &fixture("overlap_pair.states")]));
    let machine = kv(&udisc(&["prob", &fixture("overlap_pair.states"), "--format", "kv"]));
    assert_eq!(text, machine);
}

#[test]
fn dependent_states_warn_and_give_zero() {
    let out = udisc(&["prob", &fixture("dependent_triple.states")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("linearly dependent"));
    let report = kv(&out);
    assert_eq!(report["independent"], "false");
    assert_eq!(report["p"], "0");
}

#[test]
fn sampling_is_reproducible_and_never_misidentifies() {
    let args = ["sample", &fixture("overlap_pair.states"), "--which", "2", "--shots", "4000", "--seed", "11"];
    let (a, b) = (udisc(&args), udisc(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report = kv(&a);
    assert_eq!(report["count_1"], "0");
    let total: u64 = (0..3).map(|k| report[&format!("count_{k}")].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 4000);
    assert!((num(&report, "freq_2") - 0.16).abs() < 5.0 * num(&report, "se_2"));
}

#[test]
fn mixed_states_with_disjoint_cores() {
    let out = udisc(&["mixed", &fixture("rho_a.rho"), &fixture("rho_b.rho"), "--data", "1", "--shots", "2000"]);
    assert_eq!(out.status.code(), Some(0));
    let report = kv(&out);
    assert_eq!(report["discriminable"], "true");
    assert_eq!(report["regime"], "equal");
    assert_eq!(report["bounds_ok"], "true");
    assert_eq!(report["count_part2"], "0");
}

#[test]
fn identical_densities_are_not_discriminable() {
    let out = udisc(&["mixed", &fixture("rho_a.rho"), &fixture("rho_a.rho")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(kv(&out)["discriminable"], "false");
    assert!(String::from_utf8_lossy(&out.stderr).contains("not unambiguously discriminable"));
}

#[test]
fn a_core_can_vanish() {
    let out = udisc(&["mixed", &fixture("qubit_mixed.rho"), &fixture("qubit_zero.rho"), "--data", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let report = kv(&out);
    assert_eq!(report["tilde_trace_2"], "0");
    assert!((num(&report, "tilde_trace_1") - 0.5).abs() < 1e-12);
}

#[test]
fn limits_and_bad_arguments_exit_with_two() {
    let over = udisc(&["--cap", "256", "build", "--m", "4", "--n", "3", "--family", "universal"]);
    assert_eq!(over.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&over.stderr).contains("cap"));
    assert_eq!(udisc(&["--cap", "16", "build", "--m", "2", "--n", "2", "--family", "optimal"]).status.code(), Some(2));
    assert_eq!(udisc(&["build", "--m", "2", "--n", "3", "--family", "universal"]).status.code(), Some(2));
    assert_eq!(udisc(&["prob", &fixture("overlap_pair.states"), "--which", "3"]).status.code(), Some(2));
    assert_eq!(udisc(&["prob", "/nonexistent/file"]).status.code(), Some(2));
    assert_eq!(udisc(&["build", "--m", "2"]).status.code(), Some(2));
}

#[test]
fn cap_is_read_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_udisc"))
        .args(["build", "--m", "4", "--n", "3", "--family", "universal"])
        .env("UDISC_CAP", "256")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
