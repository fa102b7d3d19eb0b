mod common;

use common::{config, fixture, run, stderr, stdout};
use std::fs;
use trackeval::harness::EvalReport;
use trackeval::synth::{Motion, SynthManifest};
use trackeval_cli::ValidationSummary;

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_then_validate_matches_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("synth.toml");
    fs::write(
        &cfg,
        "out = \"data\"\nnum_sequences = 3\nframes_per_sequence = 4\nimage_width = 640\nimage_height = 512\nseed = 11\n\
         sessions = [\"02\", \"03\", \"04\"]\n\n[motion]\nkind = \"translation\"\ndx = 1.0\ndy = 0.5\n",
    )
    .unwrap();
    let o = run(&["synth", path(&cfg)], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let data = dir.path().join("data");
    let manifest = SynthManifest::read(&data.join("manifest.json")).unwrap();

    let out = dir.path().join("validate.json");
    let o = run(&["validate", path(&data), "--out", path(&out)], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("sequences: 3"));
    let v: ValidationSummary = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v.sequences, manifest.sequences.len());
    assert_eq!(v.total_points, manifest.total_points());
    assert_eq!(v.sessions, vec!["02", "03", "04"]);
    assert_eq!(v.total_frames, 12);
    assert!(v.skipped.is_empty());
    for s in &v.per_sequence {
        let m = manifest.sequences.iter().find(|m| m.sequence_id == s.sequence_id).unwrap();
        assert_eq!(s.frames, m.frames);
        assert_eq!(s.points, m.point_count);
        assert_eq!(s.frame_size, m.image_size);
    }
}

#[test]
fn control_on_static_fixture_reports_one_hundred() {
    let fx = fixture(&config(2, 3, Motion::Static));
    let out = fx.root().join("report.json");
    let o = run(&["eval2d", path(fx.root()), "--tracker", "control", "--out", path(&out)], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = stdout(&o);
    let avg_col = table.lines().find(|l| l.starts_with("| control")).unwrap();
    assert!(avg_col.trim_end().ends_with("100.00 |"), "{table}");
    let report = EvalReport::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.accuracy.average, 1.0);
    assert_eq!(report.control.unwrap().accuracy.average, 1.0);
}

#[test]
fn json_goes_to_stdout_without_out() {
    let fx = fixture(&config(1, 2, Motion::Static));
    let o = run(&["eval2d", path(fx.root()), "--tracker", "control"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(EvalReport::from_json(&stdout(&o)).is_ok());
    assert!(stderr(&o).contains("Avg."));
}

#[test]
fn missing_root_is_a_data_error() {
    let o = run(&["eval2d", "missing/"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dataset root not found"));
    let o = run(&["validate", "/no/such/root"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_documents_every_flag() {
    let o = run(&["--help"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let top = stdout(&o);
    for flag in ["--config", "--jobs", "--out"] {
        assert!(top.contains(flag), "{flag} missing from help");
    }
    let o = run(&["eval2d", "--help"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let eval = stdout(&o);
    for flag in ["--tracker", "--thresholds", "--latency", "TRACKEVAL_TRACKER"] {
        assert!(eval.contains(flag), "{flag} missing from eval2d help");
    }
    let o = run(&["latency", "--help"], &[]);
    assert!(stdout(&o).contains("--mode"));
    let o = run(&["synth", "--help"], &[]);
    assert!(stdout(&o).contains("--seed"));
    assert_eq!(run(&["--version"], &[]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["--bogus"], &[]).status.code(), Some(1));
    assert_eq!(run(&[], &[]).status.code(), Some(1));
    assert_eq!(run(&["eval2d", ".", "--tracker", "nope"], &[]).status.code(), Some(1));
    let fx = fixture(&config(1, 2, Motion::Static));
    let root = path(fx.root());
    for list in ["4,2", "0,1", "a,b"] {
        let o = run(&["eval2d", root, "--tracker", "control", "--thresholds", list], &[]);
        assert_eq!(o.status.code(), Some(1), "{list}: {}", stderr(&o));
    }
    let o = run(&["eval2d", root], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no tracker selected"));
}

#[test]
fn report_renders_the_threshold_columns() {
    let fx = fixture(&config(1, 3, Motion::Static));
    let out = fx.root().join("r.json");
    run(&["eval2d", path(fx.root()), "--tracker", "template", "--out", path(&out)], &[]);
    let o = run(&["report", path(&out)], &[]);
    assert_eq!(o.status.code(), Some(0));
    let table = stdout(&o);
    let header = table.lines().find(|l| l.contains("Method")).unwrap();
    let cols: Vec<&str> = header.split('|').map(str::trim).filter(|c| !c.is_empty()).collect();
    assert_eq!(cols, ["Method", "l_i=4", "l_i=8", "l_i=16", "l_i=32", "l_i=64", "Avg."]);
    assert!(table.contains("100.00"));
}

#[test]
fn report_with_violations_exits_three() {
    let fx = fixture(&config(1, 2, Motion::Static));
    let out = fx.root().join("r.json");
    run(&["eval2d", path(fx.root()), "--tracker", "control", "--out", path(&out)], &[]);
    let mut report = EvalReport::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    report.contract_violations = 1;
    fs::write(&out, report.to_json()).unwrap();
    assert_eq!(run(&["report", path(&out)], &[]).status.code(), Some(3));
    fs::write(&out, "{\"schema_version\": 99}").unwrap();
    assert_eq!(run(&["report", path(&out)], &[]).status.code(), Some(2));
}

#[test]
fn identical_runs_give_identical_reports() {
    let fx = fixture(&config(2, 4, Motion::Translation { dx: 1.0, dy: 1.0 }));
    let a = fx.root().join("a.json");
    let b = fx.root().join("b.json");
    for (out, jobs) in [(&a, "1"), (&b, "4")] {
        let o = run(
            &["eval3d", path(fx.root()), "--tracker", "chain", "--jobs", jobs, "--out", path(out)],
            &[],
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    fs::write(&cfg, "num_sequences = 1\nframes_per_sequence = 2\nimage_width = 320\nimage_height = 256\nblobs = 3\n").unwrap();
    for name in ["x", "y"] {
        let out = dir.path().join(name);
        let o = run(&["synth", path(&cfg), "--seed", "5", "--out", path(&out)], &[]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let x = fs::read(dir.path().join("x/manifest.json")).unwrap();
    let y = fs::read(dir.path().join("y/manifest.json")).unwrap();
    assert_eq!(x, y);
    assert!(String::from_utf8(x).unwrap().contains("\"seed\": 5"));
}

#[test]
fn flags_override_env_override_config_file() {
    let fx = fixture(&config(1, 2, Motion::Static));
    let cfg = fx.root().join("run.toml");
    fs::write(&cfg, "tracker = \"chain\"\nthresholds = [1.0, 2.0]\n").unwrap();
    let root = path(fx.root());
    let tracker_of = |args: &[&str], env: &[(&str, &str)]| {
        let o = run(args, env);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        EvalReport::from_json(&stdout(&o)).unwrap()
    };
    let r = tracker_of(&["eval2d", root, "--config", path(&cfg)], &[]);
    assert_eq!(r.tracker, "chain");
    assert_eq!(r.accuracy.thresholds.values(), [1.0, 2.0]);
    let r = tracker_of(&["eval2d", root, "--config", path(&cfg)], &[("TRACKEVAL_TRACKER", "template")]);
    assert_eq!(r.tracker, "template");
    let r = tracker_of(
        &["eval2d", root, "--config", path(&cfg), "--tracker", "control", "--thresholds", "3"],
        &[("TRACKEVAL_TRACKER", "template")],
    );
    assert_eq!(r.tracker, "control");
    assert_eq!(r.accuracy.thresholds.values(), [3.0]);
    let r = tracker_of(&["eval2d", root], &[("TRACKEVAL_CONFIG", path(&cfg))]);
    assert_eq!(r.tracker, "chain");
}

#[test]
fn bad_config_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "trackr = \"chain\"\n").unwrap();
    let o = run(&["eval2d", ".", "--config", path(&cfg)], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn make_gt_writes_ground_truth_files() {
    let fx = fixture(&config(2, 2, Motion::Static));
    let o = run(&["make-gt", path(fx.root())], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for seq in &fx.dataset.sequences {
        assert!(seq.gt_path().is_file());
    }
    let out = fx.root().join("r.json");
    run(&["eval2d", path(fx.root()), "--tracker", "control", "--out", path(&out)], &[]);
    let report = EvalReport::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report.sequences.iter().all(|s| s.gt_from_file));
}

#[test]
fn latency_reports_per_frame_statistics() {
    let fx = fixture(&config(2, 5, Motion::Static));
    let out = fx.root().join("lat.json");
    let o = run(&["latency", path(fx.root()), "--tracker", "template", "--mode", "3d", "--out", path(&out)], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["mode"], "3d");
    assert_eq!(v["latency"]["stats"]["samples"], 10);
    assert_eq!(v["latency"]["eligible"], true);
    let s = &v["latency"]["stats"];
    let mean = s["mean_ms"].as_f64().unwrap();
    let score = s["score_ms"].as_f64().unwrap();
    let p95 = s["p95_ms"].as_f64().unwrap();
    let p99 = s["p99_ms"].as_f64().unwrap();
    assert!((score - (mean + p95 + p99) / 3.0).abs() < 1e-9);
    assert!(stdout(&o).contains("Latency (ms)"));
}
