use std::path::Path;
use std::process::{Command, Output};

fn hc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypercoverage"))
        .args(args)
        .env_remove("HYPERCOVERAGE_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_os_reports_verdicts() {
    let o = hc(&[
        "generate",
        "--sampler",
        "os",
        "--p",
        "2",
        "--d",
        "3",
        "--seed",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert!(csv.starts_with("x1,x2,x3\n"));
    assert_eq!(csv.lines().count(), 9);
    // verdicts stay off stdout when it carries the sample
    assert!(stderr(&o).contains("latin: true"));
    assert!(stderr(&o).contains("orthogonal: true"));
}

#[test]
fn generate_os_rejects_one_dimension() {
    let o = hc(&[
        "generate",
        "--sampler",
        "os",
        "--p",
        "2",
        "--d",
        "1",
        "--seed",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("d >= 2"));
    assert!(o.stdout.is_empty());
}

#[test]
fn generate_lhs_n_not_power_skips_orthogonal_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = hc(&[
        "generate",
        "--sampler",
        "lhs",
        "--n",
        "7",
        "--d",
        "3",
        "--seed",
        "1",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "latin: true\n");
    let v = hc(&["validate", "--in", p(&out)]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("latin: true"));
    assert!(stdout(&v).contains("orthogonal: n/a"));
}

#[test]
fn validate_flags_broken_sample() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.csv");
    std::fs::write(&f, "x1,x2\n1,2\n1,1\n").unwrap();
    let o = hc(&["validate", "--in", p(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("latin: false"));
    let o = hc(&["validate", "--in", p(&dir.path().join("missing.csv"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn oa_round_trip_through_tang() {
    let dir = tempfile::tempdir().unwrap();
    let oa = dir.path().join("oa.csv");
    let o = hc(&[
        "oa",
        "--s",
        "5",
        "--d",
        "6",
        "--randomize-seed",
        "3",
        "--out",
        p(&oa),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("oa.json").exists());
    let json = dir.path().join("tang.json");
    let o = hc(&[
        "generate",
        "--sampler",
        "tang",
        "--oa",
        p(&oa),
        "--seed",
        "9",
        "--format",
        "json",
        "--out",
        p(&json),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("latin: true"));
    assert!(stdout(&o).contains("pairwise-uniform: true"));
    let v = hc(&["validate", "--in", p(&json)]);
    assert!(stdout(&v).contains("n: 25, d: 6"));
}

#[test]
fn oa_rejects_non_prime() {
    let dir = tempfile::tempdir().unwrap();
    let o = hc(&[
        "oa",
        "--s",
        "4",
        "--d",
        "3",
        "--out",
        p(&dir.path().join("oa.csv")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn campaign_writes_outputs_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = hc(&[
            "campaign",
            "--n-list",
            "4,8,16",
            "--d",
            "3",
            "--t",
            "2",
            "--replicates",
            "20",
            "--seed",
            "11",
            "--out",
            p(&out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        (out, stdout(&o))
    };
    let (a, report) = run("a");
    let (b, _) = run("b");
    assert!(report.contains("gradient threshold=0.5"));
    for f in [
        "campaign_n4.csv",
        "campaign_n8_subspaces.csv",
        "summary.csv",
        "summary.json",
        "gradient.csv",
        "run.conf",
    ] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let summary = std::fs::read_to_string(a.join("summary.csv")).unwrap();
    assert!(summary.starts_with("n,d,t,sampler,threshold,mean_trials,stderr,completed,censored\n"));
    assert_eq!(summary.lines().count(), 1 + 3 * 4);
}

#[test]
fn campaign_censored_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = hc(&[
        "campaign",
        "--n-list",
        "8",
        "--d",
        "3",
        "--t",
        "2",
        "--replicates",
        "5",
        "--max-trials",
        "1",
        "--seed",
        "1",
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(dir.path().join("summary.csv").exists());
}

#[test]
fn campaign_bad_n_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = hc(&[
        "campaign",
        "--n-list",
        "8,0",
        "--d",
        "3",
        "--t",
        "4",
        "--seed",
        "1",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let o = hc(&[
        "campaign",
        "--n-list",
        "4,8",
        "--d",
        "3",
        "--t",
        "2",
        "--replicates",
        "10",
        "--seed",
        "21",
        "--out",
        p(&first),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let conf = first.join("run.conf");

    let replay = dir.path().join("replay");
    let o = hc(&["--config", p(&conf), "--out", p(&replay)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["summary.csv", "campaign_n8.csv", "run.conf"] {
        assert_eq!(
            std::fs::read(first.join(f)).unwrap(),
            std::fs::read(replay.join(f)).unwrap()
        );
    }

    let changed = dir.path().join("changed");
    let o = hc(&[
        "campaign",
        "--config",
        p(&conf),
        "--replicates",
        "4",
        "--out",
        p(&changed),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(changed.join("run.conf")).unwrap();
    assert!(text.contains("replicates = 4"));
    assert!(text.contains("seed = 21"));

    let o = hc(&["curve", "--config", p(&conf), "--k-max", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_from_environment_and_generated() {
    let run = |env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_hypercoverage"));
        c.args(["generate", "--sampler", "lhs", "--n", "6", "--d", "2"]);
        match env {
            Some(v) => c.env("HYPERCOVERAGE_SEED", v),
            None => c.env_remove("HYPERCOVERAGE_SEED"),
        };
        c.output().unwrap()
    };
    let a = run(Some("77"));
    let b = hc(&[
        "generate",
        "--sampler",
        "lhs",
        "--n",
        "6",
        "--d",
        "2",
        "--seed",
        "77",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let g = run(None);
    assert_eq!(g.status.code(), Some(0));
    assert!(stderr(&g).contains("pass --seed"));
    assert_eq!(run(Some("abc")).status.code(), Some(2));
}

#[test]
fn curve_and_plotdata() {
    let dir = tempfile::tempdir().unwrap();
    let o = hc(&[
        "curve",
        "--n",
        "4",
        "--d",
        "3",
        "--t",
        "2",
        "--k-max",
        "6",
        "--replicates",
        "30",
        "--seed",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert!(csv.starts_with("k,empirical,conjectured,asymptotic,stderr\n"));
    assert_eq!(csv.lines().count(), 7);

    let camp = dir.path().join("camp");
    hc(&[
        "campaign",
        "--n-list",
        "4,8,16",
        "--d",
        "3",
        "--t",
        "2",
        "--replicates",
        "10",
        "--seed",
        "3",
        "--out",
        p(&camp),
    ]);
    let o = hc(&["plotdata", "--in", p(&camp)]);
    assert_eq!(o.status.code(), Some(0));
    let plot = stdout(&o);
    assert!(plot.starts_with("n,d,t,sampler,threshold,log10_n,log10_mean_trials,mean_trials,stderr\n"));
    assert_eq!(plot.lines().count(), 13);
}

#[test]
fn subblocks_os_uniform_and_unreachable_target() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sb");
    let o = hc(&[
        "subblocks",
        "--p",
        "2",
        "--d",
        "3",
        "--sampler",
        "os",
        "--replicates",
        "4",
        "--seed",
        "1",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("positive variance in every pair: 0.0000"));
    let pair = std::fs::read_to_string(out.join("pair_1_3.csv")).unwrap();
    assert_eq!(pair.lines().count(), 1 + 4);

    let none = dir.path().join("none");
    let o = hc(&[
        "subblocks",
        "--p",
        "2",
        "--d",
        "3",
        "--coverage-target",
        "1.0",
        "--max-trials",
        "1",
        "--seed",
        "1",
        "--out",
        p(&none),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!none.exists());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(hc(&["campaign"]).status.code(), Some(2));
    assert_eq!(
        hc(&["generate", "--sampler", "lhs", "--n", "4"]).status.code(),
        Some(2)
    );
    assert_eq!(
        hc(&["generate", "--sampler", "tang", "--s", "3"]).status.code(),
        Some(2)
    );
}
