use std::path::PathBuf;
use std::process::{Command, Output};

fn pencil(args: &[&str], out_dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pencil"))
        .args(args)
        .env("PENCIL_OUT_DIR", out_dir)
        .output()
        .expect("spawn pencil")
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pencil-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn error_record(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr is a JSON error record")
}

#[test]
fn default_output_lands_in_out_dir_with_sidecar() {
    let dir = scratch("default");
    let out = pencil(&["spectrum-line", "--k-max", "2"], &dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("spectrum-line.csv")).unwrap();
    assert!(csv.starts_with("branch_index,re_lambda,im_lambda,mu,residual,verified"));
    assert_eq!(csv.lines().count(), 1 + 6);
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("spectrum-line.csv.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["metadata"]["config"]["command"], "spectrum-line");
    assert!(meta["metadata"]["generated_by"].as_str().unwrap().starts_with("pencil "));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn json_document_has_metadata_and_data() {
    let dir = scratch("json");
    let out = pencil(&["oscillator", "--n", "2", "--k-max", "3", "--format", "json"], &dir);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("oscillator.json")).unwrap()).unwrap();
    let values = doc["data"]["values"].as_array().unwrap();
    assert_eq!(values.len(), 4);
    assert!((values[0].as_f64().unwrap() - 1.060_362_090_4).abs() < 1e-6);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn bad_parameter_exits_2_with_record() {
    let dir = scratch("param");
    let out = pencil(&["spectrum-line", "--n", "0"], &dir);
    assert_eq!(out.status.code(), Some(2));
    let rec = error_record(&out);
    assert_eq!(rec["exit_code"], 2);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn unknown_flag_exits_2() {
    let dir = scratch("flag");
    let out = pencil(&["spectrum-line", "--bogus"], &dir);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["exit_code"], 2);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn unwritable_output_exits_4() {
    let dir = scratch("io");
    let target = dir.join("missing").join("x.csv");
    let out = pencil(&["oscillator", "--out", target.to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(4));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn help_exits_0() {
    let dir = scratch("help");
    let out = pencil(&["--help"], &dir);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("spectrum-line"));
    std::fs::remove_dir_all(dir).unwrap();
}
