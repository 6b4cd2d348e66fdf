use std::fs;
use std::process::{Command, Output};

use selbound::mc::{read_csv, SweepRow, VerificationRow};

fn selbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selbound"))
        .args(args)
        .env("RUST_LOG", "warn")
        .env_remove("SELBOUND_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_value(text: &str, column: &str) -> String {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == column).unwrap();
    r.records().next().unwrap().unwrap()[idx].to_string()
}

#[test]
fn pnorm_marginal_example() {
    let o = selbound(&["bound", "--kind", "pnorm-marginal", "--p", "2", "--sigma", "1", "--marginal", "0.5,0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(csv_value(&stdout(&o), "value"), "1.0");
}

#[test]
fn entropy_examples() {
    let o = selbound(&["entropy", "--hq", "--q", "inf", "--marginal", "1,0,0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0.0\n");
    let o = selbound(&["entropy", "--marginal", "0.5,0.5"]);
    assert_eq!(stdout(&o).trim().parse::<f64>().unwrap(), std::f64::consts::LN_2);
}

#[test]
fn verify_example_passes_with_mgf_row() {
    let o = selbound(&[
        "verify", "--law", "gaussian", "--n", "2", "--selection", "argmax", "--spec", "subgaussian:1",
        "--replicates", "1000000", "--seed", "7",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows: Vec<VerificationRow> = read_csv(o.stdout.as_slice()).unwrap();
    let mgf = rows.iter().find(|r| r.bound_name == "MgfClassical").unwrap();
    assert!((mgf.bound_value - 1.17741).abs() < 1e-5);
    assert!(rows.iter().all(|r| r.passed && r.seed == 7));
}

#[test]
fn single_values() {
    let o = selbound(&["conjugate", "--spec", "subgaussian:1", "--at", "2", "--inverse"]);
    assert_eq!(stdout(&o).trim().parse::<f64>().unwrap(), 2.0);
    let o = selbound(&["conjugate", "--spec", "power:2", "--at", "3", "--primal", "--inverse"]);
    assert_eq!(stdout(&o).trim().parse::<f64>().unwrap(), 3f64.sqrt());
    let o = selbound(&["norm", "--spec", "power:2", "--values", "1,-1"]);
    assert!((stdout(&o).trim().parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
    let o = selbound(&["norm", "--spec", "power:2", "--values", "3,0", "--probs", "0.5,0.5", "--kind", "amemiya", "--conjugate"]);
    assert!((stdout(&o).trim().parse::<f64>().unwrap() - 4.5f64.sqrt()).abs() < 1e-7, "{}", stdout(&o));
}

#[test]
fn marginal_drift_is_renormalized_only_when_tiny() {
    let ok = selbound(&["entropy", "--marginal", "0.5,0.5000000001"]);
    assert!(ok.status.success(), "{}", stderr(&ok));
    let bad = selbound(&["entropy", "--marginal", "0.5,0.6"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("drift"));
}

#[test]
fn instance_files_drive_conditional_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.inst");
    fs::write(
        &path,
        "# symmetric argmax\nn 2\nm 2\nsupport 1 -1\nsupport -1 1\nprobs 0.5 0.5\nkernel 1 0\nkernel 0 1\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let o = selbound(&["bound", "--kind", "thm1-conditional", "--p", "2", "--instance", p, "--oracle", "2001"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let value: f64 = csv_value(&text, "value").parse().unwrap();
    let grid: f64 = csv_value(&text, "oracle_value").parse().unwrap();
    let slack: f64 = csv_value(&text, "oracle_slack").parse().unwrap();
    assert!((value - 1.0).abs() < 1e-6);
    assert!((value - grid).abs() <= slack.max(1e-6));

    let o = selbound(&["entropy", "--instance", p, "--mi"]);
    assert!((stdout(&o).trim().parse::<f64>().unwrap() - std::f64::consts::LN_2).abs() < 1e-12);

    fs::write(&path, "n 2\nm 1\nsupport 1 -1\nprobs 0.7\nkernel 1 0\n").unwrap();
    let o = selbound(&["bound", "--kind", "thm1-conditional", "--p", "2", "--instance", p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn oracle_scale_cap_is_stated() {
    let o = selbound(&["bound", "--kind", "thm1-marginal", "--p", "2", "--marginal", "0.2,0.2,0.2,0.2,0.2", "--oracle", "11"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cap of 4"), "{}", stderr(&o));
    let o = selbound(&["bound", "--kind", "thm1-marginal", "--p", "2", "--marginal", "0.5,0.5", "--oracle", "5000"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cap of 2001"), "{}", stderr(&o));
}

#[test]
fn config_files_fill_in_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(
        &conf,
        "# verify run\ncommand = verify\nlaw = rademacher\nn = 3\nselection = softmax:2\nspec = subgaussian:1\nreplicates = 20000\nseed = 5\nformat = table\n",
    )
    .unwrap();
    let c = conf.to_str().unwrap();
    let from_file = selbound(&["--config", c]);
    assert!(from_file.status.success(), "{}", stderr(&from_file));
    assert!(stdout(&from_file).starts_with("bound_name "));

    let overridden = selbound(&["--config", c, "--seed", "6", "--format", "csv"]);
    let rows: Vec<VerificationRow> = read_csv(overridden.stdout.as_slice()).unwrap();
    assert!(rows.iter().all(|r| r.seed == 6));

    fs::write(&conf, "command = verify\nlaw = rademacher\nreplicas = 10\n").unwrap();
    let o = selbound(&["--config", c]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`replicas`"), "{}", stderr(&o));
}

#[test]
fn sweep_csv_is_identical_across_thread_counts_and_reparses() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str, threads: &str| {
        vec![
            "sweep".to_string(), "--law".into(), "gaussian".into(), "--n".into(), "2,3".into(), "--beta".into(),
            "0,10".into(), "--spec".into(), "power:2".into(), "--replicates".into(), "5000".into(), "--seed".into(),
            "3".into(), "--output".into(), out.into(), "--threads".into(), threads.into(),
        ]
    };
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("sweep{threads}.csv"));
        let a = args(out.to_str().unwrap(), threads);
        let o = selbound(&a.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);

    let env_run = Command::new(env!("CARGO_BIN_EXE_selbound"))
        .args(["sweep", "--law", "gaussian", "--n", "2,3", "--beta", "0,10", "--spec", "power:2", "--replicates", "5000", "--seed", "3"])
        .env("SELBOUND_THREADS", "2")
        .env("RUST_LOG", "warn")
        .output()
        .unwrap();
    assert_eq!(env_run.stdout, outputs[0]);

    let rows: Vec<SweepRow> = read_csv(outputs[0].as_slice()).unwrap();
    assert_eq!(rows.iter().filter(|r| r.bound_name == "PnormMarginalHq").count(), 4);
    let header = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(header.starts_with("n,beta,bound_name,bound_value,estimate,std_error,passed,seed,config_digest\n"));
}

#[test]
fn one_based_indices_and_usage_errors() {
    let o = selbound(&["verify", "--law", "gaussian", "--n", "2", "--selection", "deterministic:2", "--spec", "power:2", "--replicates", "1000"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = selbound(&["verify", "--law", "gaussian", "--n", "2", "--selection", "deterministic:3", "--spec", "power:2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = selbound(&["verify", "--law", "gaussian", "--n", "2", "--selection", "deterministic:0", "--spec", "power:2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = selbound(&["bound", "--kind", "thm1-marginal", "--spec", "power:2@3", "--marginal", "0.5,0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("b = inf"), "{}", stderr(&o));
}
