use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SMALL: &str = r#"
seed = 3
start = "2013-01-01"
end = "2015-01-01"
n_rp = 120
n_wgc = 20
n_ad = 0
n_groups = 8
rates = [[6.0, 3.0, 0.0], [3.0, 2.0, 0.0], [0.0, 0.0, 0.0]]
origin_rates = [1.0, 1.0, 0.0]
"#;

fn hiernet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hiernet")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, name: &str) -> PathBuf {
    let cfg = dir.join("small.toml");
    fs::write(&cfg, SMALL).unwrap();
    let out = dir.join(name);
    let o = hiernet(&["synth", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn validate_clean_file_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let edges = write(dir.path(), "edges.csv", "sender,receiver,date,list,message_id\na,b,2014-01-02,,\nb,a,2014-01-03,,\n");
    let o = hiernet(&["validate", "--edges", s(&edges)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("0 errors, 0 warnings"));
}

#[test]
fn validate_self_loop_cites_row_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let edges = write(dir.path(), "edges.csv", "sender,receiver,date,list,message_id\na,b,2014-01-02,,\nc,c,2014-01-03,,\n");
    let o = hiernet(&["validate", "--edges", s(&edges)]);
    assert_eq!(o.status.code(), Some(1));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains(":3"), "{out}");
    assert!(out.contains("self-loop"), "{out}");
}

#[test]
fn lenient_validate_reports_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let edges = write(dir.path(), "edges.csv", "sender,receiver,date,list,message_id\na,b,2014-01-02,,\na,b,2014-13-40,,\n");
    let o = hiernet(&["validate", "--lenient", "--edges", s(&edges)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("1 errors"));
}

#[test]
fn role_metric_without_roles_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let edges = write(dir.path(), "edges.csv", "sender,receiver,date,list,message_id\na,b,2014-01-02,,\n");
    let o = hiernet(&["validate", "--edges", s(&edges), "--metrics", "flows"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("flows"));
}

#[test]
fn missing_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = hiernet(&["validate", "--edges", s(&dir.path().join("nope.csv"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = hiernet(&[
        "report",
        "--edges",
        s(&dir.path().join("nope.csv")),
        "--out",
        s(&dir.path().join("out")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn synth_is_seed_deterministic_and_honours_zero_ad() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "a");
    let b = synth(dir.path(), "b");
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "edges.csv"));
    for n in &names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n:?}");
    }
    assert!(!a.join("ad_listings.csv").exists());
    let roles = fs::read_to_string(a.join("roles.csv")).unwrap();
    assert!(roles.lines().skip(1).all(|l| l.split(',').nth(1) == Some("WGC")));
}

#[test]
fn synth_seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "a");
    let cfg = dir.path().join("small.toml");
    let b = dir.path().join("b");
    let o = hiernet(&["synth", "--config", s(&cfg), "--out", s(&b), "--seed", "4"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("\"seed\": 4"));
    assert_ne!(fs::read(a.join("edges.csv")).unwrap(), fs::read(b.join("edges.csv")).unwrap());
}

#[test]
fn report_writes_flows_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "data");
    let out = dir.path().join("out");
    let o = hiernet(&[
        "report",
        "--edges",
        s(&data.join("edges.csv")),
        "--roles",
        s(&data.join("roles.csv")),
        "--from",
        "2013-01-01",
        "--to",
        "2015-01-01",
        "--metrics",
        "flows,proportions",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let flows = fs::read_to_string(out.join("flows.csv")).unwrap();
    let mut lines = flows.lines();
    assert_eq!(
        lines.next(),
        Some("window_start,window_end,pair,upward,downward,proportion_up")
    );
    // 13 windows, three pairs each
    assert_eq!(lines.count(), 13 * 3);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("run_metadata.json")).unwrap()).unwrap();
    assert!(meta.get("threads").is_none());
    let issues = hiernet::report::schema::lint_report_dir(&out).unwrap();
    assert!(issues.is_empty(), "{issues:?}");
}

#[test]
fn report_refuses_windows_before_role_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "data");
    let o = hiernet(&[
        "report",
        "--edges",
        s(&data.join("edges.csv")),
        "--roles",
        s(&data.join("roles.csv")),
        "--from",
        "2013-01-01",
        "--to",
        "2015-01-01",
        "--metrics",
        "flows",
        "--roles-valid-from",
        "2013-06-01",
        "--out",
        s(&dir.path().join("out")),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2013-06-01"));
}

#[test]
fn report_is_thread_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "data");
    let run = |threads: &str| {
        let out = dir.path().join(format!("out{threads}"));
        let o = hiernet(&[
            "report",
            "--edges",
            s(&data.join("edges.csv")),
            "--roles",
            s(&data.join("roles.csv")),
            "--lists",
            s(&data.join("lists.csv")),
            "--origins",
            s(&data.join("origins.csv")),
            "--group-events",
            s(&data.join("group_events.csv")),
            "--from",
            "2013-01-01",
            "--to",
            "2015-01-01",
            "--threads",
            threads,
            "--out",
            s(&out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("1"), run("3"));
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 8, "{names:?}");
    for n in &names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n:?}");
    }
}
