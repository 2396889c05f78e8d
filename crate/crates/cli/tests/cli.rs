use std::fs;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_l0rls");
const QUICK: &[&str] = &[
    "--n", "8", "--k", "2", "--trials", "2", "--iters", "300", "--lambda", "0.98",
];

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("L0RLS_OUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn help_lists_every_subcommand_and_flag_symbol() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for cmd in ["exp1", "exp2", "exp3", "single", "lemma1", "audit"] {
        assert!(text.contains(cmd), "{cmd} missing");
    }
    let text = stdout(&run(&["exp1", "--help"]));
    for needle in [
        "--preset", "--snr-db", "--grid", "--config", "λ", "β", "κ", "P_ν", "N", "K",
    ] {
        assert!(text.contains(needle), "{needle} missing from help");
    }
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        vec!["exp1", "--bogus"],
        vec!["exp1", "--grid", "1:2"],
        vec!["exp1", "--lambda", "1.5"],
        vec!["nope"],
        vec!["single", "--k", "40", "--n", "8"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn runtime_errors_exit_with_two() {
    let mut args = vec!["single", "--out", "/proc/definitely/not/here.csv"];
    args.extend_from_slice(QUICK);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/proc/definitely"));
}

#[test]
fn sweep_csv_is_deterministic_and_ordered() {
    let mut args = vec!["exp1", "--grid", "1e-5:1e-2:4:log"];
    args.extend_from_slice(QUICK);
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 13);
    assert!(lines[0].starts_with("experiment,sweep_var,sweep_value,source"));
    let sources: Vec<&str> = lines[1..4]
        .iter()
        .map(|l| l.split(',').nth(3).unwrap())
        .collect();
    assert_eq!(sources, ["sim", "theory", "rls-baseline"]);
}

#[test]
fn single_with_zero_kappa_is_the_rls_baseline() {
    let mut args = vec!["single", "--kappa", "0"];
    args.extend_from_slice(QUICK);
    let text = stdout(&run(&args));
    let theory: Vec<&str> = text.lines().filter(|l| l.contains(",theory,")).collect();
    let base: Vec<&str> = text
        .lines()
        .filter(|l| l.contains(",rls-baseline,"))
        .collect();
    assert_eq!(theory[0].split(',').nth(4), base[0].split(',').nth(4));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"n": 8, "k": 2, "trials": 2, "iters": 300, "lambda": 0.98, "kappa": 1e-3, "seed": 5}"#,
    )
    .unwrap();
    let out = dir.path().join("a.csv");
    let o = run(&[
        "single",
        "--config",
        cfg.to_str().unwrap(),
        "--kappa",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = fs::read_to_string(&out).unwrap();
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[6].parse::<f64>().unwrap(), 0.0);
    assert_eq!(fields[8], "5");

    fs::write(&cfg, r#"{"n": 8, "wat": 1}"#).unwrap();
    assert_eq!(
        run(&["single", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn output_directory_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["exp3"];
    args.extend_from_slice(QUICK);
    let o = Command::new(BIN)
        .args(&args)
        .env("L0RLS_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(dir.path().join("exp3.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.starts_with("exp3,K,")));
}

#[test]
fn lemma1_and_audit_print_reports() {
    let text = stdout(&run(&[
        "lemma1", "--lambda", "0.99", "--n", "4", "--trials", "20", "--iters", "300",
    ]));
    assert!(text.contains("predicted = "));
    assert!(text.contains("empirical = "));
    let o = run(&[
        "audit", "--n", "8", "--k", "2", "--trials", "5", "--iters", "400", "--lambda", "0.98",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sign_agreement = "));
}

#[test]
fn system_dump_is_json() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.json");
    let mut args = vec!["single", "--system-out", sys.to_str().unwrap()];
    args.extend_from_slice(QUICK);
    assert_eq!(run(&args).status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&sys).unwrap()).unwrap();
    assert_eq!(v[0]["s"].as_array().unwrap().len(), 8);
}
