use std::process::{Command, Output};

use serde_json::Value;

fn isofib(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_isofib"));
    cmd.args(args);
    match workers {
        Some(w) => cmd.env("ISOFIB_WORKERS", w),
        None => cmd.env_remove("ISOFIB_WORKERS"),
    };
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn atlas_genus_two() {
    let o = isofib(&["atlas", "--genus", "2"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.contains(" reference ")).count() >= 7);
    assert!(text.lines().any(|l| l.contains("Z/8 ") && l.contains(" extra ")));
}

#[test]
fn atlas_json_lists_missing_rows() {
    let o = isofib(&["atlas", "--genus", "3", "--format", "json"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["rows"].as_array().unwrap().len() >= 25);
    assert!(v["missing"].is_array());
}

#[test]
fn classify_cube_against_reference() {
    let args = [
        "classify",
        "--genus-f",
        "3",
        "--group",
        "2,2,2",
        "--base-a",
        "0",
        "--base-b",
        "0",
        "--pg",
        "3..6",
        "--compare",
        "zero",
    ];
    let o = isofib(&args, None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("G  "));
    assert!(text.contains("5 rows paired, 5 exact, 0 discrepancies"), "{text}");
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let v: Value = serde_json::from_slice(&isofib(&json_args, None).stdout).unwrap();
    assert_eq!(v["comparison"]["discrepancies"].as_array().unwrap().len(), 0);
    let rows: Vec<&str> = v["comparison"]["matches"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["row"].as_str().unwrap())
        .collect();
    assert_eq!(rows, ["row 9", "row 10", "row 11", "row 12", "row 13"]);
}

#[test]
fn family_table_columns() {
    let o = isofib(
        &[
            "classify",
            "--genus-f",
            "2",
            "--group",
            "2,2",
            "--base-a",
            "0",
            "--base-b",
            "1",
            "--pg",
            "3..6",
            "--format",
            "csv",
        ],
        None,
    );
    assert_eq!(stdout(&o), "G,g(A),g(B),g(F),g(D),K²,t\nZ/2×Z/2,0,1,2,2m-1,4m-4,8m-8\n");
}

#[test]
fn empty_csv_is_header_only() {
    let o = isofib(
        &[
            "classify",
            "--genus-f",
            "3",
            "--group",
            "3",
            "--base-a",
            "0",
            "--base-b",
            "0",
            "--pg",
            "3..5",
            "--format",
            "csv",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "G,g(A),g(B),g(F),g(D),K²,t\n");
}

#[test]
fn invalid_input_exits_one() {
    for args in [
        vec!["invariants", "missing.json"],
        vec!["atlas", "--genus", "7"],
        vec!["atlas"],
        vec![
            "classify",
            "--genus-f",
            "3",
            "--group",
            "2,x",
            "--base-a",
            "0",
            "--base-b",
            "0",
            "--pg",
            "3..4",
        ],
        vec![
            "classify",
            "--genus-f",
            "3",
            "--group",
            "2",
            "--base-a",
            "0",
            "--base-b",
            "0",
            "--pg",
            "4..3",
        ],
        vec!["compare", "no-such-table"],
        vec!["covers", "--group", "0"],
    ] {
        let o = isofib(&args, None);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = isofib(&["atlas", "--genus", "2"], Some("zero"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_spec_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"group":[2],"coverF":{"base_genus":0,"branch":[{"elem":[1],"mult":3}]},"coverD":{"base_genus":0,"branch":[]}}"#).unwrap();
    let o = isofib(&["invariants", path.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn classify_output_roundtrips_through_spec_reader() {
    let o = isofib(
        &[
            "classify",
            "--genus-f",
            "3",
            "--group",
            "2,8",
            "--base-a",
            "0",
            "--base-b",
            "1",
            "--pg",
            "3..5",
            "--format",
            "json",
        ],
        None,
    );
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut checked = 0;
    for fam in v["families"].as_array().unwrap() {
        for m in fam["members"].as_array().unwrap() {
            let spec = serde_json::json!({
                "group": fam["group"],
                "coverF": fam["cover_f"],
                "coverD": m["cover_d"],
            });
            let path = dir.path().join(format!("s{checked}.json"));
            std::fs::write(&path, spec.to_string()).unwrap();
            let out = isofib(&["invariants", path.to_str().unwrap(), "--format", "json"], None);
            assert_eq!(out.status.code(), Some(0));
            let r: Value = serde_json::from_slice(&out.stdout).unwrap();
            assert_eq!(r["p_g"], m["p_g"]);
            assert_eq!(r["K2"], m["K2"]);
            assert_eq!(r["t_z"], m["t_z"]);
            assert_eq!(r["sing"], m["sing"]);
            assert_eq!(r["q"], 1);
            checked += 1;
        }
    }
    assert!(checked >= 3);
}

#[test]
fn invariants_json_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("klein.json");
    std::fs::write(
        &path,
        r#"{"group":[2,2],
            "coverF":{"base_genus":0,"branch":[{"elem":[1,0],"mult":1},{"elem":[0,1],"mult":1},{"elem":[1,1],"mult":3}],"twist":[]},
            "coverD":{"base_genus":0,"branch":[{"elem":[1,0],"mult":2},{"elem":[0,1],"mult":8}],"twist":[]}}"#,
    )
    .unwrap();
    let o = isofib(&["invariants", path.to_str().unwrap(), "--format", "json"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["p_g", "q", "chi", "euler_e", "K2", "t_z", "sing", "canonical_character"] {
        assert!(keys.contains(&k), "{k}");
    }
    assert_eq!(keys.len(), 8);
    assert_eq!(
        (v["p_g"].as_u64(), v["K2"].as_i64(), v["euler_e"].as_i64()),
        (Some(3), Some(12), Some(36))
    );
}

#[test]
fn byte_identical_across_runs_and_workers() {
    let args = [
        "classify",
        "--genus-f",
        "3",
        "--group",
        "all",
        "--base-a",
        "any",
        "--base-b",
        "any",
        "--pg",
        "3..5",
        "--format",
        "json",
    ];
    let a = isofib(&args, Some("1"));
    let b = isofib(&args, Some("4"));
    let c = isofib(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let atlas = ["atlas", "--genus", "3", "--format", "csv"];
    assert_eq!(isofib(&atlas, Some("1")).stdout, isofib(&atlas, Some("3")).stdout);
}

#[test]
fn compare_subcommand() {
    let o = isofib(&["compare", "sedici", "--format", "csv"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("sedici,family,mismatch,p_g,m,m+1,1"), "{text}");
    let o = isofib(&["compare", "tabelladue", "--format", "json"], None);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let kinds: Vec<&str> = v["discrepancies"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["kind"].as_str().unwrap())
        .collect();
    assert!(!kinds.is_empty() && kinds.iter().all(|k| *k == "extra"));
}

#[test]
fn covers_subcommand() {
    let o = isofib(
        &[
            "covers",
            "--group",
            "2,2",
            "--genus",
            "2",
            "--up-to-automorphism",
            "--format",
            "json",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["genus"], 2);
}
