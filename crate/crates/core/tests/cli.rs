use std::process::Command;

fn hyshift(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hyshift")).args(args).output().unwrap()
}

#[test]
fn analyze_prints_json_verdict() {
    let out = hyshift(&["analyze", "--weights", "const:2", "--space", "lp:2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["outcome"], "NoSubspace");
    for key in ["criterion_values", "certificate", "horizons", "space", "weights"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn bad_spec_names_the_token_on_stderr() {
    let out = hyshift(&["analyze", "--weights", "periodic:[1,x]", "--space", "lp:2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("`x`"), "{err}");
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = hyshift(&["analyze", "--weights", "linear", "--space", "entire", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["outcome"], "HasSubspace");
}

#[test]
fn csv_uses_commas_points_and_lf() {
    let out = hyshift(&["simulate", "--weights", "const:0.5", "--vector", "3:1", "--horizon", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    assert_eq!(text, "n,log_value,value\n0,0,1\n1,-0.6931471805599453,0.5\n2,-1.3862943611198906,0.25\n");
}

#[test]
fn thread_cap_does_not_change_reports() {
    let args = ["analyze", "--weights", "periodic:[0.5,3]", "--space", "lp:2"];
    let capped = Command::new(env!("CARGO_BIN_EXE_hyshift"))
        .args(args)
        .env("HYSHIFT_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(capped.stdout, hyshift(&args).stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_hyshift"))
        .args(args)
        .env("HYSHIFT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn every_subcommand_runs() {
    let cases: &[&[&str]] = &[
        &["table", "--weights", "const:2", "--nmax", "3", "--kmax", "4"],
        &["simulate", "--weights", "linear", "--space", "entire", "--vector", "4:1,6:-2"],
        &["witness", "--weights", "const:2", "--stages", "20", "--horizon", "40"],
        &["prefix", "--weights", "const:2", "--targets", "1:1;1:1,2:1", "--times", "10,20"],
        &["poly", "--weights", "linear", "--space", "entire", "--poly", "1,1,1"],
        &["verify", "polyorbit", "--seed", "3", "--count", "5"],
        &["presets", "--format", "text"],
    ];
    for args in cases {
        let out = hyshift(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty());
    }
}
