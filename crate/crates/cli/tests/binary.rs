use std::io::Write;
use std::process::{Command, Output, Stdio};

fn ivme(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ivme"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn json_lines(o: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&o.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

const TRIANGLE: &str = "R + 1 2\nS + 2 3\nT + 3 1 * 2\nR - 1 2\n";

#[test]
fn run_from_stdin() {
    let o = ivme(&["run", "--stream", "-", "--verify", "--emit", "per-step"], Some(TRIANGLE));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let answers: Vec<i64> = json_lines(&o).iter().map(|v| v["answer"].as_i64().unwrap()).collect();
    assert_eq!(answers, [0, 0, 2, 0]);
}

#[test]
fn every_mode_agrees() {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), TRIANGLE.replace("R - 1 2\n", "")).unwrap();
    let path = f.path().to_str().unwrap();
    for args in [
        vec!["--mode", "ivm-eps", "--epsilon", "0.25"],
        vec!["--mode", "classic", "--epsilon", "1"],
        vec!["--mode", "factorized", "--epsilon-rst", "0,0,1"],
        vec!["--mode", "refined"],
        vec!["--mode", "enum"],
        vec!["--mode", "static"],
    ] {
        let mut full = vec!["run", "--stream", path, "--verify"];
        full.extend(args.iter());
        let o = ivme(&full, None);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let recs = json_lines(&o);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0]["answer"], 2, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    let bad_cfg = ivme(&["run", "--mode", "classic", "--epsilon", "0.5", "--stream", "-"], Some(TRIANGLE));
    assert_eq!(bad_cfg.status.code(), Some(2));
    let wrong_query = ivme(&["run", "--query", "path4", "--mode", "refined"], None);
    assert_eq!(wrong_query.status.code(), Some(2));
    let bad_stream = ivme(&["run", "--stream", "-"], Some("R + 1\n"));
    assert_eq!(bad_stream.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad_stream.stderr).contains("line 1"));
    let missing = ivme(&["run", "--stream", "/nonexistent/stream.txt"], None);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn metrics_csv() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.csv");
    let o = ivme(&["run", "--stream", "-", "--metrics", m.to_str().unwrap()], Some(TRIANGLE));
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_path(&m).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "step");
    assert!(headers.iter().any(|h| h == "total"));
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[2][1], "T + 3 1 * 2");
}

#[test]
fn gen_then_run() {
    for q in ["triangle", "triangle-selfjoin", "path4", "lw:4"] {
        let g = ivme(&["gen", "--query", q, "--length", "400", "--domain", "8", "--seed", "3"], None);
        assert!(g.status.success());
        let text = String::from_utf8(g.stdout).unwrap();
        assert_eq!(text.lines().count(), 400);
        let o = ivme(&["run", "--query", q, "--stream", "-", "--verify"], Some(&text));
        assert!(o.status.success(), "{q}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn generated_run_is_seeded() {
    let a = ivme(&["run", "--query", "path4", "--length", "300", "--seed", "9"], None);
    let b = ivme(&["run", "--query", "path4", "--length", "300", "--seed", "9"], None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bench_csv_to_stdout() {
    let o = ivme(&["bench", "--sizes", "100,200,400", "--epsilon", "0.5", "--mode", "ivm-eps,static"], None);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(rdr.records().count(), 6);
}
