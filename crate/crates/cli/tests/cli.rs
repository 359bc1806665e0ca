use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voronoi-forge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn compute_examples() {
    let cases = [
        (&["compute", "kloosterman", "--m", "1", "--n", "1", "--c", "3"][..], "-1.000000000000000"),
        (&["compute", "lambda", "--k", "12", "--n", "2"][..], "-0.530330085889911"),
        (&["compute", "bessel-j", "--k", "12", "--x", "0"][..], "0"),
        (&["compute", "gauss-sum", "--q", "5", "--chi", "quadratic"][..], "2.236067977499790"),
    ];
    for (args, want) in cases {
        let o = run(args);
        assert!(o.status.success(), "{args:?}");
        assert_eq!(stdout(&o).trim(), want, "{args:?}");
    }
}

#[test]
fn compute_exact_form() {
    let o = run(&["compute", "kloosterman", "--m", "1", "--n", "1", "--c", "5", "--exact"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].contains("exp(2 pi i/5)"));
}

#[test]
fn bad_input_exits_with_two() {
    for args in [
        &["verify", "no-such-suite"][..],
        &["verify", "gauss", "--bogus", "1"][..],
        &["verify", "gauss", "--format", "xml"][..],
        &["verify", "petersson", "--k", "24"][..],
        &["compute", "no-such-kind"][..],
        &["compute", "kloosterman", "--m", "1"][..],
        &["compute", "lambda", "--k", "13", "--n", "2"][..],
        &["frobnicate"][..],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
    let o = run(&["verify", "no-such-suite"]);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("Usage") && err.contains("charsum-reciprocity"));
}

#[test]
fn unwritable_output_exits_with_three() {
    let o = run(&["verify", "gauss", "--q-max", "5", "--out", "/nonexistent-dir/x.jsonl"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn failing_case_exits_with_one() {
    let o = run(&["verify", "charsum-reciprocity", "--r-max", "6", "--mutation", "flip-sign", "--no-timing"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.contains("\"pass\":false")));
}

#[test]
fn serial_reports_are_byte_stable() {
    let args = ["verify", "charsum-reciprocity", "--r-max", "8", "--seed", "7", "--jobs", "1", "--no-timing"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["verify", "charsum-reciprocity", "--r-max", "8", "--seed", "8", "--jobs", "1", "--no-timing"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn parallel_runs_match_serial_pass_set() {
    let serial = run(&["verify", "gauss", "--q-max", "30", "--jobs", "1", "--no-timing"]);
    let par = run(&["verify", "gauss", "--q-max", "30", "--jobs", "2", "--no-timing"]);
    assert!(serial.status.success() && par.status.success());
    assert_eq!(stdout(&serial).lines().count(), stdout(&par).lines().count());
}

#[test]
fn csv_output_has_fixed_header() {
    let o = run(&["verify", "gauss", "--q-max", "7", "--format", "csv", "--no-timing"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(
        out.lines().next().unwrap(),
        "suite,params,lhs,rhs,residual,tolerance,exact,pass,runtimeMs,seed"
    );
    assert!(out.lines().count() > 1);
}

#[test]
fn config_file_with_command_line_override() {
    let dir = std::env::temp_dir().join(format!("vf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("petersson.cfg");
    std::fs::write(&cfg, "# empty space\nk = 14\n").unwrap();
    let o = run(&["verify", "petersson", "--config", cfg.to_str().unwrap(), "--no-timing"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 9);
    let o = run(&["verify", "petersson", "--config", cfg.to_str().unwrap(), "--k", "24"]);
    assert_eq!(o.status.code(), Some(2));
    let out = dir.join("r.jsonl");
    let o = run(&["verify", "petersson", "--k", "14", "--out", out.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 9);
    std::fs::remove_dir_all(&dir).unwrap();
}
