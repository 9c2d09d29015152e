use std::path::Path;
use std::process::{Command, Output};

fn npol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_npol")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SQUARE: &str = "dim 2\nvertices 4\n0 0\n1 0\n0 1\n1 1\n";

#[test]
fn normal_on_p4_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = npol(&["gallery", "P4"]);
    let path = write(dir.path(), "p4.poly", &stdout(&g));
    let o = npol(&["normal", "--in", &path]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "normal, 41 lattice points\n");
}

#[test]
fn square_height_one_jumps() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "square.poly", SQUARE);
    let o = npol(&["jumps", "--in", &path]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("jumps 12"));
    assert!(lines.all(|l| l.ends_with("height 1")));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(npol(&["points", "--gallery", "P4", "--bogus"]).status.code(), Some(2));
    assert_eq!(npol(&["points"]).status.code(), Some(2));
    assert_eq!(npol(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(npol(&["widths", "--gallery", "P9"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    // the empty tetrahedron of volume 3 is not normal
    let o = npol(&["jumps", "--gallery", "empty3-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not normal"));
    let flat = write(dir.path(), "flat.poly", "dim 3\nvertices 3\n0 0 0\n1 0 0\n0 1 0\n");
    assert_eq!(npol(&["hull", "--in", &flat]).status.code(), Some(1));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "bad.poly", "dim 3\nvertices 2\n0 0 0\n1 0\n");
    let o = npol(&["hull", "--in", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn json_and_text_agree() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&npol(&["gallery", "P4prime"]));
    let json = stdout(&npol(&["gallery", "P4prime", "--format", "json"]));
    let t = write(dir.path(), "p.poly", &text);
    let j = write(dir.path(), "p.json", &json);
    let a = stdout(&npol(&["widths", "--in", &t]));
    let b = stdout(&npol(&["widths", "--in", &j]));
    assert_eq!(a, b);
    // gallery output is canonical, so hull reproduces it before its facet comments
    let h = stdout(&npol(&["hull", "--in", &t]));
    assert!(h.starts_with(&text));
}

#[test]
fn cross_polytope_point_verdict() {
    let o = npol(&["jumps", "--gallery", "cross2", "--point", "0,1,5"]);
    assert_eq!(stdout(&o), "(0,1,5): accepted, height 2\n");
}

#[test]
fn certify_writes_certificate_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let log = dir.path().join("cert.log");
    let o = npol(&[
        "certify-max",
        "--gallery",
        "cross1",
        "--exhaustive",
        "--out",
        cert.to_str().unwrap(),
        "--log",
        log.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("conclusion not maximal"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(v["conclusion"]["verdict"], "not-maximal");
    assert!(std::fs::read_to_string(&log).unwrap().contains("conclusion not-maximal"));
}

#[test]
fn search_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let out = dir.path().join(format!("{tag}.json"));
        let log = dir.path().join(format!("{tag}.log"));
        let o = npol(&[
            "search", "--dim", "2", "--seed", "11", "--runs", "2", "--max-points", "12", "--workers", "1",
            "--out", out.to_str().unwrap(), "--log", log.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (stdout(&o), std::fs::read(out).unwrap(), std::fs::read(log).unwrap())
    };
    let a = run("a");
    assert_eq!(a, run("b"));
    assert!(a.0.contains("maximal 0"));
}

#[test]
fn ellipsoid_checks() {
    let o = npol(&["ellipsoid", "--ball", "2", "--check"]);
    let out = stdout(&o);
    assert!(out.contains("# lattice points 33"));
    assert!(out.contains("# normal yes"));
    assert!(out.contains("# two-point decomposition yes"));
}
