use quasi_einstein::cli::{run, EXIT_USAGE};

fn qe3(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qe3").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn table_csv_matches_golden() {
    let (code, out, _) = qe3(&["table", "--format", "csv"]);
    assert_eq!(out, include_str!("golden/table.csv"));
    assert_eq!(code, 2, "only disputed cells differ");
}

#[test]
fn table_is_deterministic() {
    let (_, a, _) = qe3(&["table", "--format", "json", "--certify"]);
    let (_, b, _) = qe3(&["table", "--format", "json", "--certify"]);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["cells"].as_array().unwrap().len(), 54);
    assert_eq!(v["summary"]["disputed"], 2);
    assert_eq!(v["summary"]["mismatched"], 0);
}

#[test]
fn table_markdown_reports_disputes() {
    let (code, out, _) = qe3(&["table"]);
    assert_eq!(code, 2);
    assert!(out.contains("| SU(2) | Exists | Exists | Exists | Exists | None | None |"));
    assert!(out.contains("| R3 | None | Trivial | None | None | Trivial | None |"));
    assert!(out.contains("### SL2R~ (m>0,A<0): disputed"));
    assert!(out.contains("witness reproduced"));
    assert!(out.contains("e3 is never Killing") || out.contains("no metric of the group attains it"));
    assert!(out.ends_with("54 cells: 52 match, 2 disputed, 0 mismatched\n"));
}

#[test]
fn filtered_table_exit_codes() {
    assert_eq!(qe3(&["table", "--group", "nil"]).0, 0);
    assert_eq!(qe3(&["table", "--group", "h3", "--a-sign", "neg"]).0, 0);
    assert_eq!(qe3(&["table", "--group", "sl2r", "--m-sign", "pos", "--a-sign", "pos"]).0, 0);
    assert_eq!(qe3(&["table", "--group", "sl2r", "--m-sign", "pos"]).0, 2);
    let (code, out, _) = qe3(&["table", "--group", "s2xr", "--m-sign", "neg", "--a-sign", "pos", "--format", "csv"]);
    assert_eq!((code, out.as_str()), (0, "geometry,cell,expected,computed,status\nS2xR,\"m<0,A>0\",Exists,Exists,match\n"));
}

#[test]
fn solve_examples() {
    let (code, out, _) = qe3(&["solve", "--group", "nil", "--lambda", "2,0,0", "--m", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("- X = (2, 0, 0), A = -2,"));
    assert!(out.contains("- X = (-2, 0, 0), A = -2,"));

    let (code, out, _) = qe3(&["solve", "--group", "r3", "--m", "-1"]);
    assert_eq!(code, 0);
    assert!(out.contains("- X = (0, 0, 0), A = 0,"));

    let (code, out, _) = qe3(&["solve", "--group", "su2", "--lambda", "2,2,2", "--m", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("- X = (0, 0, 0), A = 2,"));
}

#[test]
fn solve_maps_back_to_input_frame() {
    let (code, out, _) = qe3(&["solve", "--group", "sl2r", "--lambda", "-2,2,2", "--m", "2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let xs: Vec<_> = v["solutions"].as_array().unwrap().iter().map(|s| s["X"].clone()).collect();
    assert_eq!(xs, [serde_json::json!([4.0, 0.0, 0.0]), serde_json::json!([-4.0, 0.0, 0.0])]);
    assert_eq!(v["oracle"]["missed"], 0);
}

#[test]
fn solve_h2xr_and_products() {
    let (_, out, _) = qe3(&["solve", "--group", "h2xr", "--m", "4"]);
    assert!(out.contains("- X = (0, 0, 2), A = -1,"));
    let (_, out, _) = qe3(&["solve", "--group", "h2xr", "--m", "-1"]);
    assert!(out.contains("## Non-Killing solutions\n\n- X = (-1, 0, 0), A = 0,"));
    let (_, out, _) = qe3(&["solve", "--group", "s2xr", "--m", "-1"]);
    assert!(out.contains("verdict: Exists\nA = 1\n"));
    let (_, out, _) = qe3(&["solve", "--group", "h3", "--m", "2", "--a", "-1"]);
    assert!(out.contains("verdict: Trivial"));
}

#[test]
fn riccati_examples() {
    let (code, out, _) = qe3(&["riccati", "--lambda", "0"]);
    assert_eq!(code, 0);
    assert!(out.contains("identically zero"));
    let (_, out, _) = qe3(&["riccati", "--lambda", "1", "--m", "1"]);
    assert!(out.contains("no global solutions"));

    let (code, out, _) = qe3(&["riccati", "--lambda", "-1", "--m", "1", "--f0", "0", "--integrate"]);
    assert_eq!(code, 0);
    let rows: Vec<(f64, f64)> = out
        .lines()
        .filter(|l| !l.starts_with('#') && *l != "t,f")
        .map(|l| {
            let (t, f) = l.split_once(',').unwrap();
            (t.parse().unwrap(), f.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 101);
    for (t, f) in rows {
        assert!((f + f64::tanh(t)).abs() < 1e-6, "t = {t}: {f}");
    }
}

#[test]
fn usage_errors() {
    assert_eq!(qe3(&["riccati", "--lambda", "1", "--m", "0"]).0, EXIT_USAGE);
    assert_eq!(qe3(&["solve", "--group", "nil", "--m", "1"]).0, EXIT_USAGE);
    assert_eq!(qe3(&["solve", "--group", "nil", "--lambda", "1,1", "--m", "1"]).0, EXIT_USAGE);
    assert_eq!(qe3(&["solve", "--group", "su2", "--lambda", "1,0,0", "--m", "1"]).0, EXIT_USAGE);
    assert_eq!(qe3(&["solve", "--group", "nil", "--lambda", "1,0,0", "--m", "0"]).0, EXIT_USAGE);
    assert_eq!(qe3(&["table", "--tolerance", "1e-3"]).0, EXIT_USAGE);
    assert_eq!(qe3(&["table", "--group", "torus"]).0, EXIT_USAGE);
    assert_eq!(qe3(&["frobnicate"]).0, EXIT_USAGE);
    let (code, out, _) = qe3(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("table"));
}
