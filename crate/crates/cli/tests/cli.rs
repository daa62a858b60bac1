use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn psinorm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psinorm"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

const WEIBULL2: &str = r#"{"kind": "weibull", "lambda": 1, "shape": 2}"#;
const SYM_WEIBULL2: &str = r#"{"kind": "symmetrized_weibull", "lambda": 1, "shape": 2}"#;

#[test]
fn norm_success_writes_files_and_embeds_config() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "n.json",
        &format!(r#"{{"seed": 4, "norm": {{"distribution": {WEIBULL2}, "p": 2, "norms": ["luxemburg", "moment"]}}}}"#),
    );
    let out = psinorm(dir.path(), &["norm", "--config", "n.json", "--out", "res"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["config"]["seed"], 4);
    assert_eq!(r["config"]["norm"]["p"], 2.0);
    let lux = r["results"][0]["value"].as_f64().unwrap();
    assert!((lux - 2f64.sqrt()).abs() < 1e-8);

    let csv = std::fs::read_to_string(dir.path().join("res/norm.csv")).unwrap();
    assert!(csv.starts_with("norm,value,status\nluxemburg,"));
    let saved: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("res/report.json")).unwrap()).unwrap();
    assert_eq!(saved, r);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "n.json",
        &format!(r#"{{"seed": 4, "norm": {{"distribution": {WEIBULL2}, "p": 2}}}}"#),
    );
    let out = psinorm(
        dir.path(),
        &["norm", "--config", "n.json", "--seed", "11", "--samples", "5000"],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["config"]["seed"], 11);
    assert_eq!(r["provenance"]["mode"], "empirical");
    assert_eq!(r["provenance"]["samples"], 5000);
}

#[test]
fn infinite_norm_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "n.json",
        r#"{"norm": {"distribution": {"kind": "exponential", "rate": 1}, "p": 2}}"#,
    );
    let out = psinorm(dir.path(), &["norm", "--config", "n.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["results"][0]["status"], "infinite");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "unknown.json", r#"{"seed": 1, "colour": "blue"}"#);
    let out = psinorm(dir.path(), &["norm", "--config", "unknown.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    let out = psinorm(dir.path(), &["norm"]);
    assert_eq!(out.status.code(), Some(2));

    write(
        dir.path(),
        "tau1.json",
        &format!(r#"{{"norm": {{"distribution": {SYM_WEIBULL2}, "p": 1, "norms": ["tau"]}}}}"#),
    );
    let out = psinorm(dir.path(), &["norm", "--config", "tau1.json"]);
    assert_eq!(out.status.code(), Some(2));

    let out = psinorm(dir.path(), &["norm", "--config", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_matrix_csv_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ragged.csv", "1,2\n3\n");
    write(dir.path(), "text.csv", "1,2\n3,abc\n");
    for file in ["ragged.csv", "text.csv"] {
        write(
            dir.path(),
            "v.json",
            &format!(r#"{{"vecnorm": {{"source": {{"kind": "empirical", "path": "{file}"}}, "p": 2}}}}"#),
        );
        let out = psinorm(dir.path(), &["vecnorm", "--config", "v.json"]);
        assert_eq!(out.status.code(), Some(2), "{file}");
    }
}

#[test]
fn one_dimensional_vector_chain_collapses() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "v.json",
        &format!(
            r#"{{"vecnorm": {{"source": {{"kind": "independent_product", "coords": [{SYM_WEIBULL2}]}}, "p": 2}}}}"#
        ),
    );
    let out = psinorm(dir.path(), &["vecnorm", "--config", "v.json"]);
    assert_eq!(out.status.code(), Some(0));
    let chain = &report(&out)["chain"];
    let m = chain["max_coord"].as_f64().unwrap();
    for key in ["psi_vec", "e_p", "upper"] {
        let v = chain[key].as_f64().unwrap();
        assert!((v - m).abs() <= 1e-6 * m, "{key}: {v} vs {m}");
    }
}

#[test]
fn paths_resolve_relative_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("cfg")).unwrap();
    let rows: String = (0..400)
        .map(|i| format!("{},{}\n", (i % 7) as f64 - 3.0, (i % 5) as f64 - 2.0))
        .collect();
    write(&dir.path().join("cfg"), "m.csv", &rows);
    write(
        &dir.path().join("cfg"),
        "v.json",
        r#"{"vecnorm": {"source": {"kind": "empirical", "path": "m.csv"}, "p": 2}}"#,
    );
    let out = psinorm(dir.path(), &["vecnorm", "--config", "cfg/v.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["chain"]["chain_holds"], true);
}

fn chaos_config(c: &str) -> String {
    let coords = [SYM_WEIBULL2; 4].join(",");
    format!(
        r#"{{"chaos_verify": {{"array": {{"kind": "identity", "dim": 4}},
            "source": {{"kind": "independent_product", "coords": [{coords}]}}, "d": 2, "c": {c}}}}}"#
    )
}

#[test]
fn chaos_verify_verdicts_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ok.json", &chaos_config("0.5"));
    let out = psinorm(
        dir.path(),
        &[
            "chaos-verify",
            "--config",
            "ok.json",
            "--samples",
            "50000",
            "--out",
            "ok",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["verdict"], true);
    assert_eq!(r["samples"], 50000);
    for f in ["empirical.csv", "bound.csv", "report.json"] {
        assert!(dir.path().join("ok").join(f).exists(), "{f}");
    }

    write(dir.path(), "tiny.json", &chaos_config("0.001"));
    let out = psinorm(
        dir.path(),
        &["chaos-verify", "--config", "tiny.json", "--samples", "50000"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["verdict"], false);

    write(dir.path(), "neg.json", &chaos_config("-1"));
    let out = psinorm(dir.path(), &["chaos-verify", "--config", "neg.json"]);
    assert_eq!(out.status.code(), Some(2));

    write(dir.path(), "word.json", &chaos_config("\"guess\""));
    let out = psinorm(dir.path(), &["chaos-verify", "--config", "word.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn chaos_order_mismatch_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "c.json",
        &chaos_config("0.5").replace("\"d\": 2", "\"d\": 3"),
    );
    let out = psinorm(dir.path(), &["chaos-verify", "--config", "c.json", "--samples", "1000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rotation_check_and_zoo_list() {
    let dir = tempfile::tempdir().unwrap();
    let g = r#"{"kind": "gaussian", "mean": 0, "sigma": 1}"#;
    write(
        dir.path(),
        "r.json",
        &format!(r#"{{"rotation_check": {{"coords": [{g}, {g}], "weights": [3, 4], "p": 2}}}}"#),
    );
    let out = psinorm(dir.path(), &["rotation-check", "--config", "r.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &report(&out)["result"];
    assert!((r["lhs"].as_f64().unwrap() - r["rhs"].as_f64().unwrap()).abs() < 1e-6);

    let out = psinorm(dir.path(), &["zoo-list"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["members"].as_array().unwrap().len() >= 5);
}

#[test]
fn calibrate_c_reports_a_grid_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = psinorm(dir.path(), &["calibrate-c", "--samples", "100000", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let c = report(&out)["C"].as_f64().unwrap();
    let k = 4.0 * c.log2();
    assert!((k - k.round()).abs() < 1e-9 && (-8.0..=16.0).contains(&k), "{c}");

    let out = psinorm(dir.path(), &["calibrate-c", "--samples", "100"]);
    assert_eq!(out.status.code(), Some(2));
}
