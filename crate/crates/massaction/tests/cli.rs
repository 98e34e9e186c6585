use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use massaction::engine::automaton::{three_species_example, Input};

fn massaction(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_massaction"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn identity_automaton_derives_the_identity_map() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("identity.pa");
    fs::write(
        &file,
        "species: a b\nsolitary:\n1 0\n0 1\nbinary a:\n1 0\n0 1\nbinary b:\n1 0\n0 1\n",
    )
    .unwrap();
    let o = massaction(&["derive", file.to_str().unwrap(), "--alpha", "0.7"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "x'_1 = x_1\nx'_2 = x_2\n");
}

#[test]
fn mean_run_matches_a_direct_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    let o = massaction(&["run", "table1_sparse", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    // the update written out term by term
    let a = three_species_example();
    let (alpha, c_bin) = (0.1, 2.0);
    let mut x = vec![0.4, 0.3, 0.3];
    for _ in 0..500 {
        // outflow written as x_k·Σx_i; plain x_k lets roundoff in the total grow
        let total: f64 = x.iter().sum();
        let mut next = x.clone();
        for k in 0..3 {
            let solo: f64 = (0..3).map(|i| x[i] * a.row(i, Input::Solitary)[k]).sum();
            let pair: f64 = (0..3)
                .flat_map(|i| (0..3).map(move |j| (i, j)))
                .map(|(i, j)| x[i] * x[j] * a.row(i, Input::Encounter(j))[k])
                .sum();
            next[k] += (1.0 - alpha) * (solo - x[k]) + c_bin * alpha * (pair - x[k] * total);
        }
        x = next;
    }
    let table = rows(&out.join("trajectory.csv"));
    assert_eq!(table[0], ["t", "q1", "q2", "q3"]);
    assert_eq!(table.len(), 502);
    let last = &table[501];
    assert_eq!(last[0], "500");
    for k in 0..3 {
        let got: f64 = last[k + 1].parse().unwrap();
        assert!((got - x[k]).abs() < 1e-3, "species {k}: {got} vs {}", x[k]);
    }
}

#[test]
fn repeated_runs_write_identical_data() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (name, jobs) in [("a", "1"), ("b", "3")] {
        let out = dir.path().join(name);
        let o = massaction(&[
            "run",
            "table1_dense",
            "--model",
            "ssa",
            "--replicates",
            "6",
            "--horizon",
            "40",
            "--jobs",
            jobs,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        outputs.push(fs::read(out.join("ensemble.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn ssa_ensemble_reports_mean_and_std() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let o = massaction(&[
        "run",
        "table1_sparse",
        "--model",
        "ssa",
        "--replicates",
        "200",
        "--horizon",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let table = rows(&out.join("ensemble.csv"));
    assert_eq!(table[0], ["t", "q1_mean", "q2_mean", "q3_mean", "q1_std", "q2_std", "q3_std"]);
    assert_eq!(table.len(), 22);
    let means: f64 = table[21][1..4].iter().map(|v| v.parse::<f64>().unwrap()).sum();
    assert!((means - 1000.0).abs() < 1e-3);
    let spread: f64 = table[21][4].parse().unwrap();
    assert!(spread > 0.0);
    assert!(out.join("ensemble.csv.meta.json").exists());
}

#[test]
fn exit_codes_separate_bad_input_from_runtime_failure() {
    let o = massaction(&["run", "no_such_scenario"]);
    assert_eq!(o.status.code(), Some(2));
    let o = massaction(&["derive", "three_species"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let o = massaction(&[
        "run",
        "table1_sparse",
        "--alpha",
        "1",
        "--c-bin",
        "50",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at step"));
}

#[test]
fn alpha_command_bridges_geometry() {
    let o = massaction(&["alpha", "--r", "0.3", "--width", "20", "--height", "20", "--m", "1100"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("0.540"), "{}", stdout(&o));
    let o = massaction(&["alpha", "--r", "0.3", "--width", "20", "--height", "20", "--m", "1"]);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn separated_catalysts_produce_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = massaction(&["experiment", "c", "--replicates", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let table = rows(&out.join("spatial_ensemble.csv"));
    let header = &table[0];
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    for row in &table[1..] {
        for name in ["C_mean", "E_mean"] {
            assert_eq!(row[col(name)].parse::<f64>().unwrap(), 0.0);
        }
    }
    for file in ["spatial_ensemble.csv", "ssa_ensemble.csv", "meanfield.csv", "comparison.csv"] {
        assert!(out.join(format!("{file}.meta.json")).exists(), "{file}");
    }
}

#[test]
fn frames_and_sidecars_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f");
    let o = massaction(&[
        "run",
        "five_species_a",
        "--replicates",
        "1",
        "--horizon",
        "20",
        "--frames",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    for t in [0, 10, 20] {
        let frame = out.join("frames").join(format!("frame_{t}.csv"));
        let table = rows(&frame);
        assert_eq!(table[0], ["id", "species", "x", "y"]);
        assert_eq!(table.len(), 1101);
        assert!(frame.with_file_name(format!("frame_{t}.csv.meta.json")).exists());
    }
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("counts.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["model"], "spatial");
    assert_eq!(meta["horizon"], 20);
    assert!(meta["rng_algorithm"].as_str().unwrap().starts_with("chacha8"));
}
