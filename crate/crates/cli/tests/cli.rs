use std::fs;
use std::process::{Command, Output};

use ldp_contraction::fdiv_bounds::{default_sweep, SWEEP_POINTS};
use ldp_contraction::SweepAxis;
use ldp_contraction_cli::format::{
    fmt_num, parse_compose_csv, parse_kl_compare_csv, parse_num, parse_sdpi_csv,
};

fn ldpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldpc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = ldpc(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    ldpc(args).status.code().unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

const FIG: [&str; 6] = ["--eps", "ln(6)", "--delta", "0.01", "--gamma-prime", "2.5"];

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn eval_examples() {
    let eg = [
        "eval",
        "--divergence",
        "egamma",
        "--p",
        "0.7,0.3",
        "--q",
        "0.4,0.6",
    ];
    assert_eq!(stdout(&with(&eg, &["--gamma", "1.5"])), "0.1\n");
    assert_eq!(stdout(&with(&eg, &["--gamma", "2"])), "0\n");
    assert_eq!(stdout(&with(&eg, &["--gamma", "1"])), "0.3\n");
    assert_eq!(
        stdout(&[
            "eval",
            "--divergence",
            "kl",
            "--p",
            "0.7,0.3",
            "--q",
            "0.4,0.6"
        ]),
        "0.183786897387\n"
    );
    assert_eq!(
        stdout(&[
            "eval",
            "--divergence",
            "dmax",
            "--p",
            "1,0",
            "--q",
            "0.5,0.5"
        ]),
        format!("{}\n", fmt_num(2f64.ln()))
    );
    assert_eq!(
        stdout(&[
            "eval",
            "--divergence",
            "dmax",
            "--p",
            "0.5,0.5",
            "--q",
            "1,0"
        ]),
        "inf\n"
    );
    let sum = stdout(&[
        "eval",
        "--divergence",
        "fdiv",
        "--f",
        "chi2",
        "--p",
        "0.7,0.3",
        "--q",
        "0.4,0.6",
    ]);
    let integral = stdout(&[
        "eval",
        "--divergence",
        "fdiv",
        "--f",
        "chi2",
        "--integral",
        "--p",
        "0.7,0.3",
        "--q",
        "0.4,0.6",
    ]);
    assert!((parse_num(&sum).unwrap() - 0.375).abs() < 1e-12);
    assert!((parse_num(&integral).unwrap() - 0.375).abs() < 1e-6);

    let v = json(&with(&eg, &["--gamma", "1.5", "--format", "json"]));
    assert_eq!(v["value"], serde_json::json!(0.1));
    assert_eq!(v["divergence"], "egamma");
}

#[test]
fn eval_reads_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.txt");
    fs::write(&p, "0.7\n0.3\n").unwrap();
    let p = p.to_str().unwrap();
    assert_eq!(
        stdout(&["eval", "--divergence", "tv", "--p", p, "--q", "0.4,0.6"]),
        "0.3\n"
    );
}

#[test]
fn eval_exit_codes() {
    let base = [
        "eval",
        "--divergence",
        "egamma",
        "--q",
        "0.5,0.5",
        "--gamma",
        "2",
    ];
    assert_eq!(code(&with(&base, &["--p", "0.7,0.4"])), 2);
    assert_eq!(code(&with(&base, &["--p", "-0.1,1.1"])), 2);
    assert_eq!(code(&with(&base, &["--p", "0.5,0.25,0.25"])), 2);
    assert_eq!(code(&with(&base, &["--p", "/no/such/file"])), 2);
    assert_eq!(
        code(&[
            "eval",
            "--divergence",
            "egamma",
            "--p",
            "0.5,0.5",
            "--q",
            "0.5,0.5",
            "--gamma",
            "0.5"
        ]),
        3
    );
    assert_eq!(
        code(&[
            "eval",
            "--divergence",
            "dmax-smooth",
            "--p",
            "0.5,0.5",
            "--q",
            "0.5,0.5",
            "--delta",
            "2"
        ]),
        3
    );
    assert_eq!(
        code(&["eval", "--divergence", "nope", "--p", "1", "--q", "1"]),
        2
    );
}

#[test]
fn check_ldp_examples() {
    let dir = tempfile::tempdir().unwrap();
    let bsc = dir.path().join("bsc.json");
    fs::write(&bsc, "[[0.8, 0.2], [0.2, 0.8]]").unwrap();
    let id = dir.path().join("id.json");
    fs::write(&id, "[[1, 0], [0, 1]]").unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "[[0.8, 0.3], [0.2, 0.8]]").unwrap();
    let (bsc, id, bad) = (
        bsc.to_str().unwrap(),
        id.to_str().unwrap(),
        bad.to_str().unwrap(),
    );

    let v = json(&[
        "check-ldp",
        "--channel",
        bsc,
        "--eps",
        "1.3862944",
        "--delta",
        "0",
    ]);
    assert_eq!(v["verdict"], true);
    let v = json(&["check-ldp", "--channel", bsc, "--eps", "0"]);
    assert_eq!(v["tightest_delta"], serde_json::json!(0.6));
    assert!(v.get("verdict").is_none());
    let v = json(&["check-ldp", "--channel", id, "--delta", "0"]);
    assert_eq!(v["tightest_epsilon"], "inf");
    let v = json(&[
        "check-ldp",
        "--channel",
        bsc,
        "--eps",
        "ln(3)",
        "--delta",
        "0.1",
    ]);
    assert_eq!(v["verdict"], false);

    assert_eq!(code(&["check-ldp", "--channel", bad, "--eps", "1"]), 2);
    assert_eq!(code(&["check-ldp", "--channel", bsc]), 2);
    assert_eq!(code(&["check-ldp", "--channel", bsc, "--eps=-1"]), 3);
}

#[test]
fn sdpi_curve_golden_rows() {
    let text = stdout(&with(&["sdpi-curve"], &with(&FIG, &["--grid", "11"])));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,dpi,linear_sdpi,nonlinear_sdpi");
    assert_eq!(lines[1], "0,0,0,0");
    assert_eq!(lines[3], "0.2,0.2,0.101,0.002");
    assert_eq!(lines[4], "0.3,0.3,0.1515,0.003");
    assert_eq!(lines[11], "1,1,0.505,0.505");
    assert_eq!(lines.len(), 12);
    assert!(text.ends_with('\n') && !text.contains('\r'));
}

#[test]
fn sdpi_curve_round_trips() {
    let text = stdout(&with(&["sdpi-curve"], &with(&FIG, &["--grid", "37"])));
    let curves = parse_sdpi_csv(&text).unwrap();
    assert_eq!(curves.len(), 3);
    assert_eq!(curves[2].label(), "nonlinear_sdpi");
    let v = json(&with(
        &["sdpi-curve", "--format", "json"],
        &with(&FIG, &["--grid", "37"]),
    ));
    for (parsed, emitted) in curves.iter().zip(v.as_array().unwrap()) {
        assert_eq!(emitted["label"], parsed.label());
        let pts = emitted["points"].as_array().unwrap();
        for (&(x, y), p) in parsed.points().iter().zip(pts) {
            assert_eq!(p[0].as_f64().unwrap(), x);
            assert_eq!(p[1].as_f64().unwrap(), y);
        }
    }
}

#[test]
fn kl_compare_defaults_match_library() {
    for (axis, name) in [
        (SweepAxis::Lambda, "lambda"),
        (SweepAxis::Epsilon, "epsilon"),
    ] {
        let text = stdout(&["kl-compare", "--axis", name]);
        let parsed = parse_kl_compare_csv(&text).unwrap();
        let expected = default_sweep(axis, SWEEP_POINTS).unwrap();
        assert_eq!(parsed.len(), 3);
        for ((s, a, b), (es, ea, eb)) in parsed.iter().zip(&expected) {
            assert_eq!(*s, *es);
            for (got, want) in a
                .points()
                .iter()
                .zip(ea.points())
                .chain(b.points().iter().zip(eb.points()))
            {
                assert_eq!(fmt_num(got.0), fmt_num(want.0));
                assert_eq!(fmt_num(got.1), fmt_num(want.1));
            }
            assert!(a.ys().zip(b.ys()).all(|(x, y)| x <= y));
        }
    }
}

#[test]
fn kl_compare_point() {
    let text = stdout(&[
        "kl-compare",
        "--axis",
        "epsilon",
        "--delta",
        "0.1",
        "--lambda",
        "0.1",
        "--tau",
        "0.25",
        "--from",
        "1",
        "--to",
        "1",
        "--grid",
        "1",
    ]);
    assert_eq!(
        text,
        "x,series,ours,dasgupta\n1,0.1,0.214129715657,4.85939945668\n"
    );
    assert_eq!(code(&["kl-compare", "--axis", "epsilon", "--eps", "1"]), 2);
    assert_eq!(
        code(&[
            "kl-compare",
            "--axis",
            "lambda",
            "--from",
            "0",
            "--to",
            "0.5"
        ]),
        3
    );
}

#[test]
fn compose_rows() {
    let text = stdout(&with(
        &["compose"],
        &with(&FIG, &["--n-max", "3", "--grid", "11"]),
    ));
    let curves = parse_compose_csv(&text).unwrap();
    assert_eq!(curves.len(), 3);
    let at = |n: usize, i: usize| curves[n].1.points()[i].1;
    assert_eq!(fmt_num(at(0, 10)), "0.505");
    assert_eq!(fmt_num(at(1, 10)), "0.150014285714");
    assert_eq!(fmt_num(at(2, 10)), "0.00150014285714");
    for (n, c) in &curves {
        assert_eq!(c.points()[0].1, 0.0);
        assert!((c.points()[3].1 - 0.01f64.powi(*n as i32) * 0.3).abs() < 1e-15);
    }
    assert!(text.lines().any(|l| l == "1,2,0.150014285714"));
    let bad = [
        "compose",
        "--eps",
        "ln(6)",
        "--delta",
        "0.01",
        "--gamma-prime",
        "8",
    ];
    assert_eq!(code(&bad), 3);
}

#[test]
fn verify_reports() {
    let v = json(&[
        "verify",
        "--suite",
        "dpi_and_sdpi",
        "--trials",
        "1000",
        "--seed",
        "7",
    ]);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["suite"], "dpi_and_sdpi");
    let v = json(&[
        "verify",
        "--suite",
        "integral_rep",
        "--trials",
        "100",
        "--seed",
        "7",
    ]);
    assert_eq!(v["violations"], 0);
    assert!(v["worst_slack"].as_f64().unwrap() >= -1e-6);
    let v = json(&[
        "verify",
        "--suite",
        "achievability",
        "--trials",
        "100",
        "--seed",
        "7",
    ]);
    assert_eq!(v["violations"], 0);

    assert_eq!(code(&["verify", "--suite", "nope"]), 2);
    assert_eq!(
        code(&[
            "verify",
            "--suite",
            "fdiv_bounds",
            "--lambda",
            "input",
            "--seed",
            "7"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "verify",
            "--suite",
            "fdiv_bounds",
            "--lambda",
            "pair",
            "--seed",
            "7"
        ]),
        0
    );
    assert_eq!(
        code(&["verify", "--suite", "composition", "--gamma-prime", "9"]),
        3
    );
}

#[test]
fn verify_is_deterministic() {
    let args = [
        "verify",
        "--suite",
        "composition",
        "--trials",
        "50",
        "--seed",
        "11",
    ];
    let first = ldpc(&args).stdout;
    let sequential = ldpc(&with(&args, &["--sequential"])).stdout;
    assert_eq!(first, ldpc(&args).stdout);
    assert_eq!(first, sequential);
    assert_ne!(
        first,
        ldpc(&[
            "verify",
            "--suite",
            "composition",
            "--trials",
            "50",
            "--seed",
            "12"
        ])
        .stdout
    );
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let path_s = path.to_str().unwrap();
    let printed = ldpc(&with(&["sdpi-curve", "--out", path_s], &FIG));
    assert!(printed.status.success());
    assert!(printed.stdout.is_empty());
    assert!(fs::read_to_string(&path).unwrap().starts_with("t,dpi,"));
}
