//! End-to-end checks of the `mured` binary: flag handling, output formats,
//! exit codes, and agreement with the library on the same inputs.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mured"))
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn write_tmp(name: &str, contents: &str) -> PathBuf {
    let path = tmp(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).unwrap()
}

fn regime_csv() -> String {
    let mut body = String::from("year,x,y,z\n");
    for year in 2000..=2003 {
        for x in 0..2usize {
            for y in 0..2usize {
                body.push_str(&format!("{year},{x},{y},{}\n", x ^ y));
            }
        }
    }
    for year in 2004..=2007 {
        for x in 0..2usize {
            for y in 0..2usize {
                for z in 0..2usize {
                    body.push_str(&format!("{year},{x},{y},{z}\n"));
                }
            }
        }
    }
    body
}

#[test]
fn describe_reports_columns_and_time_range() {
    let path = write_tmp(
        "describe.csv",
        "year,u,i\n1980,1,1\n1981,1,0\n1982,0,1\n1983,0,0\n",
    );
    let out = run(&[
        "describe",
        path.to_str().unwrap(),
        "--time-col",
        "year",
    ]);
    let json = stdout_json(&out);
    let result = &json["results"][0];
    assert_eq!(result["row_count"], 4);
    assert_eq!(result["columns"][1]["name"], "u");
    assert_eq!(result["columns"][1]["cardinality"], 2);
    assert_eq!(result["time"]["min"], "1980");
    assert_eq!(result["time"]["max"], "1983");
}

#[test]
fn missing_file_exits_2_with_no_record() {
    let out = run(&["describe", "/definitely/not/here.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn ragged_row_exits_2_and_names_the_line() {
    let path = write_tmp("ragged.csv", "u,i\n1,1\n1\n");
    let out = run(&[
        "measure",
        path.to_str().unwrap(),
        "--vars",
        "u,i",
        "--measure",
        "t",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 3"), "stderr: {stderr}");
}

#[test]
fn unknown_variable_exits_2() {
    let path = write_tmp("unknown_var.csv", "u,i\n1,1\n0,1\n");
    let out = run(&[
        "measure",
        path.to_str().unwrap(),
        "--vars",
        "u,bogus",
        "--measure",
        "t",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synth_then_measure_round_trips_exactly() {
    let table = tmp("parity4.csv");
    let out = run(&[
        "synth",
        "--kind",
        "parity",
        "--arity",
        "4",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = run(&[
        "measure",
        table.to_str().unwrap(),
        "--weighted",
        "weight",
        "--vars",
        "x,y,z,w",
        "--measure",
        "t",
    ]);
    let json = stdout_json(&out);
    let value = json["results"][0]["value"].as_f64().unwrap();

    let dist = mured_core::synth::parity(4).unwrap();
    let expected =
        mured_core::measures::transmission_n(&dist, &dist.variable_set()).unwrap();
    assert!((value - expected).abs() < 1e-12);
}

#[test]
fn synth_independent_writes_uniform_weight_table() {
    let table = tmp("independent22.csv");
    let out = run(&[
        "synth",
        "--kind",
        "independent",
        "--cards",
        "2,2",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&table).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,weight");
    assert_eq!(lines.len(), 5);
    for line in &lines[1..] {
        assert!(line.ends_with(",0.25"), "line: {line}");
    }
}

#[test]
fn redundancy_report_carries_the_sign_rule() {
    let table = tmp("parity3_sign.csv");
    run(&[
        "synth",
        "--kind",
        "parity",
        "--arity",
        "3",
        "--out",
        table.to_str().unwrap(),
    ]);
    let out = run(&[
        "measure",
        table.to_str().unwrap(),
        "--weighted",
        "weight",
        "--vars",
        "x,y,z",
        "--measure",
        "r",
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["results"][0]["value"], -1.0);
    assert_eq!(json["results"][0]["sign_rule"], "(−1)^(n+1)·T");
}

#[test]
fn explain_extras_recombine_to_the_value() {
    let table = tmp("parity3_explain.csv");
    run(&[
        "synth",
        "--kind",
        "parity",
        "--arity",
        "3",
        "--out",
        table.to_str().unwrap(),
    ]);
    let out = run(&[
        "measure",
        table.to_str().unwrap(),
        "--weighted",
        "weight",
        "--vars",
        "x,y,z",
        "--measure",
        "t",
        "--explain",
    ]);
    let json = stdout_json(&out);
    let result = &json["results"][0];
    let extra = result["extra"].as_object().unwrap();
    let h = |k: &str| extra[k].as_f64().unwrap();
    let recombined = h("H(x)") + h("H(y)") + h("H(z)") - h("H(x,y)") - h("H(x,z)")
        - h("H(y,z)")
        + h("H(x,y,z)");
    assert!((recombined - result["value"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn csv_and_json_carry_identical_values() {
    let path = write_tmp("formats.csv", &regime_csv());
    let json_out = run(&[
        "measure",
        path.to_str().unwrap(),
        "--vars",
        "x,y,z",
        "--measure",
        "y",
    ]);
    let json_value = stdout_json(&json_out)["results"][0]["value"]
        .as_f64()
        .unwrap();

    let csv_out = run(&[
        "measure",
        path.to_str().unwrap(),
        "--vars",
        "x,y,z",
        "--measure",
        "y",
        "--format",
        "csv",
    ]);
    assert!(csv_out.status.success());
    let text = String::from_utf8(csv_out.stdout).unwrap();
    let data_line = text.lines().nth(1).unwrap();
    let csv_value: f64 = data_line.split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(csv_value, json_value);
}

#[test]
fn tcond_requires_and_uses_given() {
    let path = write_tmp("tcond.csv", &regime_csv());
    let out = run(&[
        "measure",
        path.to_str().unwrap(),
        "--vars",
        "x,y",
        "--measure",
        "tcond",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&[
        "measure",
        path.to_str().unwrap(),
        "--vars",
        "x,y",
        "--measure",
        "tcond",
        "--given",
        "z",
    ]);
    let json = stdout_json(&out);
    assert!(json["results"][0]["value"].as_f64().unwrap() >= 0.0);
}

#[test]
fn base_flag_rescales_values() {
    let table = tmp("parity3_base.csv");
    run(&[
        "synth",
        "--kind",
        "parity",
        "--arity",
        "3",
        "--out",
        table.to_str().unwrap(),
    ]);
    let out = run(&[
        "measure",
        table.to_str().unwrap(),
        "--weighted",
        "weight",
        "--vars",
        "x,y,z",
        "--measure",
        "entropy",
        "--base",
        "4",
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["results"][0]["value"], 1.0);
    assert_eq!(json["results"][0]["log_base"], 4.0);
}

#[test]
fn series_steps_and_full_range_matches_measure() {
    let path = write_tmp("series.csv", &regime_csv());
    let out = run(&[
        "series",
        path.to_str().unwrap(),
        "--time-col",
        "year",
        "--window",
        "1",
        "--step",
        "1",
        "--vars",
        "x,y,z",
        "--measure",
        "t",
    ]);
    let json = stdout_json(&out);
    let points = json["results"].as_array().unwrap();
    assert_eq!(points.len(), 8);
    for point in &points[..4] {
        assert_eq!(point["value"], -1.0);
    }
    for point in &points[4..] {
        assert_eq!(point["value"], 0.0);
    }

    // One window covering everything equals the plain measure.
    let out = run(&[
        "series",
        path.to_str().unwrap(),
        "--time-col",
        "year",
        "--window",
        "8",
        "--step",
        "8",
        "--vars",
        "x,y,z",
        "--measure",
        "t",
    ]);
    let json = stdout_json(&out);
    let series_value = json["results"][0]["value"].as_f64().unwrap();

    let out = run(&[
        "measure",
        path.to_str().unwrap(),
        "--vars",
        "x,y,z",
        "--measure",
        "t",
    ]);
    let measure_value = stdout_json(&out)["results"][0]["value"].as_f64().unwrap();
    assert_eq!(series_value, measure_value);
}

#[test]
fn empty_middle_window_becomes_a_warning() {
    let path = write_tmp(
        "gap.csv",
        "year,v\n2000,a\n2000,b\n2002,a\n2002,b\n",
    );
    let out = run(&[
        "series",
        path.to_str().unwrap(),
        "--time-col",
        "year",
        "--window",
        "1",
        "--step",
        "1",
        "--vars",
        "v",
        "--measure",
        "entropy",
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["results"].as_array().unwrap().len(), 2);
    let warnings = json["warnings"].as_array().unwrap();
    assert_eq!(warnings.len(), 1);
    assert!(warnings[0].as_str().unwrap().contains("2001..2001"));
}

#[test]
fn oracle_check_reads_files_too() {
    let path = write_tmp("oracle_file.csv", &regime_csv());
    let out = run(&[
        "oracle-check",
        "--input",
        path.to_str().unwrap(),
        "--vars",
        "x,y,z",
        "--measure",
        "q",
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["results"][0]["passed"], true);
}

#[test]
fn oracle_check_rejects_oversized_input() {
    let out = run(&[
        "oracle-check",
        "--kind",
        "independent",
        "--cards",
        "101,101,101",
        "--measure",
        "entropy",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("oracle"), "stderr: {stderr}");
}

#[test]
fn bad_weight_column_exits_2() {
    let path = write_tmp("badweight.csv", "x,weight\n0,not-a-number\n");
    let out = run(&[
        "measure",
        path.to_str().unwrap(),
        "--weighted",
        "weight",
        "--vars",
        "x",
        "--measure",
        "entropy",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tab_delimited_input_is_supported() {
    let path = write_tmp("tabs.tsv", "u\ti\n1\t1\n1\t0\n0\t1\n0\t0\n");
    let out = run(&[
        "measure",
        path.to_str().unwrap(),
        "--tab",
        "--vars",
        "u,i",
        "--measure",
        "t",
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["results"][0]["value"], 0.0);
}

#[test]
fn headerless_input_gets_synthetic_names() {
    let path = write_tmp("noheader.csv", "1,1\n1,0\n0,1\n0,0\n");
    let out = run(&[
        "measure",
        path.to_str().unwrap(),
        "--no-header",
        "--vars",
        "c0,c1",
        "--measure",
        "t",
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["results"][0]["value"], 0.0);
}
