//! Black-box tests against the built binary: output bytes, exit codes, and
//! determinism across parallelism settings.

use std::path::PathBuf;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    run_with_env(args, &[])
}

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut command = Command::new(env!("CARGO_BIN_EXE_chipfire"));
    command.args(args);
    for (key, value) in env {
        command.env(key, value);
    }
    let output = command.output().expect("binary runs");
    (
        output.status.code().expect("no signal"),
        String::from_utf8(output.stdout).expect("utf-8 stdout"),
        String::from_utf8(output.stderr).expect("utf-8 stderr"),
    )
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("chipfire-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).expect("temp file writes");
    path
}

#[test]
fn count_known_values() {
    let (code, out, _) = run(&["count", "--graph", "cycle:3", "--source", "3,0,0", "--mode", "debt"]);
    assert_eq!((code, out.trim()), (0, "4"));
    let (code, out, _) = run(&[
        "count", "--graph", "cycle:3", "--source", "3,0,0", "--mode", "reachable",
    ]);
    assert_eq!((code, out.trim()), (0, "2"));
    let (code, out, _) = run(&["count", "--graph", "path:3", "--source", "0,0,0", "--mode", "debt"]);
    assert_eq!((code, out.trim()), (0, "1"));
}

#[test]
fn sweep_emits_exact_csv() {
    let (code, out, _) = run(&[
        "sweep", "--graph", "cycle:3", "--cmin", "0", "--cmax", "6", "--modes", "debt",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "c,debt_count,reachable_count,block_count,seconds\n\
         0,1,,,\n1,1,,,\n2,2,,,\n3,4,,,\n4,5,,,\n5,7,,,\n6,10,,,\n"
    );
}

#[test]
fn sweep_output_does_not_depend_on_worker_count() {
    let args = |jobs: &'static str| {
        vec![
            "sweep", "--graph", "cycle:4", "--cmin", "0", "--cmax", "12", "--modes",
            "debt,reachable,blocks", "--jobs", jobs,
        ]
    };
    let (code_one, serial, _) = run(&args("1"));
    let (code_four, parallel, _) = run(&args("4"));
    assert_eq!((code_one, code_four), (0, 0));
    assert_eq!(serial, parallel, "output bytes must not depend on --jobs");
    assert!(serial.contains("\n3,5,2,4,\n"), "c=3 row of:\n{serial}");
}

#[test]
fn sweep_rejects_an_empty_range() {
    let (code, _, err) = run(&["sweep", "--graph", "cycle:3", "--cmin", "5", "--cmax", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("empty sweep range"), "stderr: {err}");
}

#[test]
fn sweep_jsonl_wraps_counts_in_strings() {
    let (code, out, _) = run(&[
        "sweep", "--graph", "cycle:3", "--cmin", "2", "--cmax", "3", "--modes", "debt,blocks",
        "--format", "jsonl",
    ]);
    assert_eq!(code, 0);
    let rows: Vec<serde_json::Value> = out
        .lines()
        .map(|line| serde_json::from_str(line).expect("valid json"))
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["c"], 3);
    assert_eq!(rows[1]["debt_count"], "4");
    assert_eq!(rows[1]["block_count"], 3);
    assert!(rows[1]["reachable_count"].is_null());
    assert!(rows[1]["seconds"].is_null());
}

#[test]
fn fit_reports_the_triangle_law_as_json() {
    let (code, out, _) = run(&[
        "fit", "--graph", "cycle:3", "--cmin", "0", "--cmax", "14", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(out.trim()).expect("valid json");
    assert_eq!(report["period"], 3);
    assert_eq!(report["degree"], 2);
    assert_eq!(report["onset"], 0);
    assert_eq!(report["leading_coefficient_ok"], true);
    assert_eq!(report["residues"][0]["branch"], "(c^2 + 3c + 6)/6");
    assert_eq!(report["residues"][1]["coefficients"][2][0], 1);
    assert_eq!(report["residues"][1]["coefficients"][2][1], 6);
}

#[test]
fn fit_with_too_few_samples_is_a_usage_error() {
    let (code, _, err) = run(&[
        "fit", "--graph", "cycle:3", "--cmin", "0", "--cmax", "8", "--period", "3", "--degree",
        "2", "--onset", "0",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("insufficient samples"), "stderr: {err}");
}

#[test]
fn fit_with_a_wrong_shape_is_a_verification_failure() {
    let (code, _, err) = run(&[
        "fit", "--graph", "cycle:3", "--cmin", "0", "--cmax", "13", "--period", "2", "--degree",
        "2", "--onset", "0",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("no quasipolynomial"), "stderr: {err}");
}

#[test]
fn fit_reads_a_values_file() {
    let path = temp_file("constant.csv", "c,count\n0,7\n1,7\n2,7\n3,7\n4,7\n");
    let (code, out, _) = run(&["fit", "--values", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0);
    assert!(out.contains("period: 1"), "stdout: {out}");
    assert!(out.contains("degree: 0"), "stdout: {out}");
    assert!(out.contains("c \u{2261} 0 (mod 1): 7"), "stdout: {out}");
}

#[test]
fn verify_triangle_debt_passes() {
    let (code, out, _) = run(&["verify", "triangle-debt", "--cmax", "30"]);
    assert_eq!(code, 0, "stdout: {out}");
    assert!(out.contains("ok - triangle debt counts"), "stdout: {out}");
    assert!(out.contains("1 check(s) passed"), "stdout: {out}");
}

#[test]
fn verify_offsets_pass_on_the_triangle_but_fail_on_even_cycles() {
    let (code, out, _) = run(&["verify", "cycle-debt-offset", "--n", "3", "--cmax", "30"]);
    assert_eq!(code, 0, "stdout: {out}");
    // The constant-offset structure genuinely fails on the 4-cycle, so the
    // default bundle reports it and exits 1.
    let (code, out, err) = run(&["verify", "cycle-debt-offset", "--cmax", "30"]);
    assert_eq!(code, 1, "stdout: {out}");
    assert!(out.contains("FAILED - 4-cycle"), "stdout: {out}");
    assert!(out.contains("ok - 3-cycle"), "stdout: {out}");
    assert!(out.contains("ok - 5-cycle"), "stdout: {out}");
    assert!(err.contains("check(s) failed"), "stderr: {err}");
}

#[test]
fn verify_rejects_an_unknown_bundle() {
    let (code, _, err) = run(&["verify", "no-such-bundle"]);
    assert_eq!(code, 2);
    assert!(err.contains("no-such-bundle"), "stderr: {err}");
}

#[test]
fn spanning_trees_of_the_complete_graph() {
    let (code, out, _) = run(&["spanning-trees", "--graph", "complete:4"]);
    assert_eq!((code, out.trim()), (0, "16"));
}

#[test]
fn reachability_reports_witness_and_oracle_agreement() {
    let (code, out, _) = run(&[
        "reachability", "--graph", "cycle:3", "--from", "3,0,0", "--to", "0,3,0", "--oracle",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("debt-reachable: yes"), "stdout: {out}");
    assert!(out.contains("witness: 2,0,1"), "stdout: {out}");
    assert!(out.contains("reachable: no"), "stdout: {out}");
    assert!(out.contains("bfs-oracle: no"), "stdout: {out}");
}

#[test]
fn state_cap_env_var_trips_the_resource_guard() {
    let (code, _, err) = run_with_env(
        &["count", "--graph", "cycle:3", "--source", "9,0,0", "--mode", "reachable"],
        &[("CHIPFIRE_MAX_STATES", "2")],
    );
    assert_eq!(code, 3);
    assert!(err.contains("states"), "stderr: {err}");
    // The command-line flag takes precedence over the environment.
    let (code, out, _) = run_with_env(
        &[
            "count", "--graph", "cycle:3", "--source", "9,0,0", "--mode", "reachable",
            "--max-states", "100000",
        ],
        &[("CHIPFIRE_MAX_STATES", "2")],
    );
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "17");
}

#[test]
fn graphs_load_from_json_files() {
    let path = temp_file(
        "triangle.json",
        "{\"n\":3,\"edges\":[[0,1],[1,2],[0,2]]}",
    );
    let spec = format!("file:{}", path.display());
    let (code, out, _) = run(&["count", "--graph", &spec, "--source", "3,0,0", "--mode", "debt"]);
    std::fs::remove_file(&path).ok();
    assert_eq!((code, out.trim()), (0, "4"));
}

#[test]
fn blocks_lists_the_partition() {
    let (code, out, _) = run(&["blocks", "--graph", "cycle:3", "--c", "1", "--list"]);
    assert_eq!(code, 0);
    assert!(out.contains("blocks: 3"), "stdout: {out}");
    assert!(out.contains("sizes: 1,1,1"), "stdout: {out}");
    assert_eq!(
        out.lines().filter(|line| line.starts_with("block ")).count(),
        3,
        "stdout: {out}"
    );
}
