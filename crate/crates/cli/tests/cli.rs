use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_debruijn-census")).env_remove("DEBRUIJN_CENSUS_CACHE").args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn count_rows() {
    let (code, out, _) = run(&["count", "--family", "index", "--bound", "1", "--max-size", "5", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next().unwrap(), "# n,count");
    assert_eq!(data_rows(&out), vec!["2,1", "3,1", "4,2", "5,5"]);
    assert_eq!(out.lines().filter(|l| l.starts_with('#')).count(), 1);
}

#[test]
fn table1_matches_published_values() {
    let published = [
        (2, 2, 0.0385234386, 0.4381229337),
        (3, 2, 0.0210625856, 0.4414407371),
        (4, 2, 0.0167136805, 0.4463973717),
        (5, 2, 0.0148700270, 0.4504258849),
        (6, 2, 0.0138224393, 0.4536185043),
        (7, 2, 0.0131157948, 0.4561987871),
        (8, 3, 0.0125868052, 0.4583333333),
        (9, 3, 0.0582322465, 0.4566104777),
        (10, 3, 0.0470481360, 0.4560418340),
        (11, 3, 0.0396601986, 0.4560810348),
        (12, 3, 0.0345090124, 0.4564489368),
    ];
    let (code, out, _) = run(&["table1", "--from", "2", "--to", "12"]);
    assert_eq!(code, 0);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), published.len());
    for (row, (k, j1, s, b)) in rows.iter().zip(published) {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[0].parse::<u32>().unwrap(), k);
        assert_eq!(f[1].parse::<u32>().unwrap(), j1);
        assert!((f[2].parse::<f64>().unwrap() - s).abs() < 1e-6, "{row}");
        assert!((f[3].parse::<f64>().unwrap() - b).abs() < 1e-6, "{row}");
    }
}

#[test]
fn verify_reports_ok() {
    let (code, out, _) = run(&["verify", "--max-size", "10", "--bound", "2", "--family", "levels"]);
    assert_eq!((code, out.trim()), (0, "OK"));
}

#[test]
fn domain_errors_are_json_with_exit_1() {
    let (code, out, err) = run(&["dist", "--family", "levels", "--bound", "1", "--size", "3"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"], "empty_size");
    assert_eq!(v["n"], 3);

    let (code, _, err) = run(&["singularity", "--family", "levels", "--bound", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("degenerate_bound"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["count", "--max-size", "5"],
        vec!["count", "--bound", "1"],
        vec!["count", "--bound", "0", "--max-size", "3"],
        vec!["dist", "--bound", "1", "--size", "5", "--mark", "leaves@1"],
        vec!["moments", "--family", "levels", "--bound", "2", "--size", "5", "--mark", "leaves@3"],
        vec!["count", "--family", "trees", "--bound", "1", "--max-size", "3"],
        vec!["frobnicate"],
        vec!["table1", "--from", "5", "--to", "3"],
    ] {
        let (code, out, _) = run(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty(), "{args:?}");
    }
}

#[test]
fn csv_and_json_agree() {
    let (_, csv, _) = run(&["moments", "--bound", "2", "--size", "30", "--mark", "total"]);
    let (_, json, _) = run(&["moments", "--bound", "2", "--size", "30", "--mark", "total", "--format", "json"]);
    let header: Vec<&str> = csv.lines().next().unwrap().trim_start_matches("# ").split(',').collect();
    let row: Vec<&str> = data_rows(&csv)[0].split(',').collect();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for (name, value) in header.iter().zip(row) {
        let j = &v[0][*name];
        let text = j.as_str().map(str::to_string).unwrap_or_else(|| j.to_string());
        assert_eq!(text, value, "{name}");
    }
}

#[test]
fn sampling_is_deterministic() {
    let args = ["sample", "--family", "levels", "--bound", "3", "--size", "40", "--samples", "5", "--seed", "9"];
    let (code, a, _) = run(&args);
    let (_, b, _) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 5);
    let (_, j, _) = run(&[&args[..], &["--format", "json"]].concat());
    let terms: Vec<String> = serde_json::from_str(&j).unwrap();
    assert_eq!(terms.join("\n"), a.trim_end());
}

#[test]
fn stats_json() {
    let (code, out, _) = run(&["stats", "--family", "levels", "--bound", "1", "--size", "2", "--samples", "10", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["empirical_variance"], 0.0);
    assert_eq!(v["samples"], 10);
}

#[test]
fn singularity_report() {
    let (code, out, _) = run(&["singularity", "--family", "levels", "--bound", "8", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["vanishing_indices"], serde_json::json!([2, 3]));
    assert_eq!(v["boundary"], true);
    assert!((v["rho"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-9);
}

#[test]
fn profile_plot_data() {
    let (code, out, _) = run(&["profile", "--family", "levels", "--bound", "3", "--size", "20,40", "--emit-plot-data"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next().unwrap(), "# level,n,mean");
    assert_eq!(data_rows(&out).len(), 8);
    let (code, _, err) = run(&["profile", "--bound", "3", "--size", "20"]);
    assert_eq!(code, 1);
    assert!(err.contains("unsupported"));
}

#[test]
fn cache_dir_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, first, _) = run(&["count", "--bound", "2", "--max-size", "30", "--cache-dir", d]);
    assert_eq!(code, 0);
    assert!(std::fs::read_dir(dir.path()).unwrap().count() > 0);
    let (_, second, _) = run(&["count", "--bound", "2", "--max-size", "30", "--cache-dir", d]);
    assert_eq!(first, second);
}
