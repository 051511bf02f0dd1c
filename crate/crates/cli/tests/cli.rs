use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn pya(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pya")).args(args).env("PYA_COLOR", "0").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn triv() -> Value {
    json!([{"label": "1", "dim": 1, "selfdual": "orthogonal"}])
}

fn doc(group: &str, n: u32, segs: &[(&str, &str, usize)]) -> Value {
    let segments: Vec<Value> = segs.iter().map(|(b, e, m)| json!({"rho": "1", "b": b, "e": e, "mult": m})).collect();
    json!({"group": {"type": group, "n": n}, "rho_classes": triv(), "segments": segments})
}

fn phi1(group: &str, n: u32) -> Value {
    doc(group, n, &[("0", "1", 1), ("-1", "0", 1), ("0", "0", 2)])
}

fn phi4(group: &str, n: u32) -> Value {
    doc(group, n, &[("1", "1", 1), ("-1", "-1", 1), ("0", "0", 4)])
}

struct Files(TempDir);

impl Files {
    fn new() -> Files {
        Files(tempfile::tempdir().unwrap())
    }

    fn write(&self, name: &str, v: &Value) -> PathBuf {
        self.write_text(name, &v.to_string())
    }

    fn write_text(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn multiset(v: &Value) -> Vec<(String, String, u64)> {
    let mut out: Vec<_> = v["segments"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| (x["b"].as_str().unwrap().to_string(), x["e"].as_str().unwrap().to_string(), x["mult"].as_u64().unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn dual_is_an_involution_on_so7() {
    let f = Files::new();
    let out = pya(&["dual", s(&f.write("p1.json", &phi1("SO_odd", 3)))]);
    assert_eq!(code(&out), 0);
    let d = stdout_json(&out);
    assert_eq!(multiset(&d), multiset(&phi4("SO_odd", 3)));
    assert!(d.get("trace").is_none());

    let back = pya(&["dual", s(&f.write("p4.json", &d))]);
    assert_eq!(code(&back), 0);
    assert_eq!(multiset(&stdout_json(&back)), multiset(&phi1("SO_odd", 3)));
}

#[test]
fn dual_output_roundtrips_byte_for_byte() {
    let f = Files::new();
    let first = pya(&["dual", s(&f.write("p.json", &phi1("SO_odd", 3)))]);
    let second = pya(&["dual", s(&f.write_text("d.json", std::str::from_utf8(&first.stdout).unwrap()))]);
    let third = pya(&["dual", s(&f.write_text("dd.json", std::str::from_utf8(&second.stdout).unwrap()))]);
    assert_eq!(first.stdout, third.stdout);
    let again = pya(&["dual", s(&f.write("p2.json", &phi1("SO_odd", 3)))]);
    assert_eq!(first.stdout, again.stdout);
}

#[test]
fn dual_trace_lists_steps() {
    let f = Files::new();
    let out = pya(&["dual", "--trace", s(&f.write("p.json", &phi4("SO_odd", 3)))]);
    assert_eq!(code(&out), 0);
    let trace = stdout_json(&out)["trace"].as_array().unwrap().clone();
    assert_eq!(trace.len(), 2);
    assert_eq!(trace[0]["algorithm"], "bad-parity");
    assert_eq!(trace[0]["d"], "1");
    assert_eq!(trace[0]["chain"].as_array().unwrap().len(), 2);
    assert_eq!(trace[1]["d"], "0");
    assert!(trace[1]["remainder"].as_array().unwrap().is_empty());
}

#[test]
fn parse_errors_exit_1() {
    let f = Files::new();
    let bad_half = doc("SO_odd", 3, &[("1/3", "1", 1)]);
    let out = pya(&["dual", s(&f.write("h.json", &bad_half))]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("1/3"));
    assert_eq!(code(&pya(&["dual", s(&f.write_text("j.json", "{\"group\":"))])), 1);
    assert_eq!(code(&pya(&["dual", "/nonexistent/file.json"])), 1);
    assert_eq!(code(&pya(&["dual", "--bogus", "x"])), 1);
    let unknown = json!({"group": {"type": "GL", "n": 1}, "rho_classes": triv(), "segments": [{"rho": "z", "b": "0", "e": "0", "mult": 1}]});
    assert_eq!(code(&pya(&["rank", s(&f.write("u.json", &unknown))])), 1);
    assert_eq!(code(&pya(&["--help"])), 0);
}

#[test]
fn validation_errors_exit_2() {
    let f = Files::new();
    let phi0 = doc("SO_odd", 3, &[("-1", "1", 1), ("0", "0", 3)]);
    let out = pya(&["dual", s(&f.write("p0.json", &phi0))]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad-line-odd-multiplicity"));
    assert!(out.stdout.is_empty());
    let wrong_dim = phi1("SO_odd", 2);
    let out = pya(&["rank", s(&f.write("w.json", &wrong_dim))]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension-mismatch"));
    // the same multi-segment is fine for GL_6
    assert_eq!(code(&pya(&["dual", s(&f.write("g.json", &doc("GL", 6, &[("-1", "1", 1), ("0", "0", 3)])))])), 0);
}

#[test]
fn rank_and_le() {
    let f = Files::new();
    let p1 = f.write("p1.json", &phi1("SO_odd", 3));
    let p4 = f.write("p4.json", &phi4("SO_odd", 3));
    let out = stdout_json(&pya(&["rank", s(&p1)]));
    assert_eq!(out["lines"][0]["rank_matrix"]["entries"], json!([[1, 0], [0, 1]]));
    assert_eq!(out["lines"][0]["rank_matrix"]["e_min"], "-1");

    assert_eq!(stdout_json(&pya(&["le", s(&p4), s(&p1)])), json!({"le": true, "ge": false}));
    assert_eq!(stdout_json(&pya(&["le", s(&p1), s(&p1)])), json!({"le": true, "ge": true}));
    let other = f.write("o.json", &doc("SO_odd", 3, &[("-1", "1", 2)]));
    assert_eq!(code(&pya(&["le", s(&p1), s(&other)])), 2);
    let gl = f.write("gl.json", &phi1("GL", 6));
    assert_eq!(code(&pya(&["le", s(&p1), s(&gl)])), 2);
}

fn lambda_doc(group: &str, n: u32) -> Value {
    json!({
        "group": {"type": group, "n": n},
        "rho_classes": triv(),
        "support": [{"rho": "1", "a": "1", "mult": 1}, {"rho": "1", "a": "0", "mult": 4}, {"rho": "1", "a": "-1", "mult": 1}]
    })
}

#[test]
fn enumerate_so7_and_gl6() {
    let f = Files::new();
    let so = f.write("so.json", &lambda_doc("SO_odd", 3));
    let out = stdout_json(&pya(&["enumerate", "--poset", s(&so)]));
    assert_eq!(out["nodes"].as_array().unwrap().len(), 2);
    assert_eq!(out["hasse"].as_array().unwrap().len(), 1);
    let [lo, hi] = [&out["hasse"][0][0], &out["hasse"][0][1]].map(|v| v.as_u64().unwrap() as usize);
    assert_eq!(multiset(&out["nodes"][lo]), multiset(&phi4("SO_odd", 3)));
    assert_eq!(multiset(&out["nodes"][hi]), multiset(&phi1("SO_odd", 3)));

    let gl = f.write("gl.json", &lambda_doc("GL", 6));
    let out = stdout_json(&pya(&["enumerate", s(&gl)]));
    assert_eq!(out["count"], 5);
    // a parameter document works too: its exponents are taken
    let from_segments = f.write("p.json", &phi1("GL", 6));
    assert_eq!(stdout_json(&pya(&["enumerate", s(&from_segments)]))["count"], 5);

    let dot = pya(&["enumerate", "--dot", s(&gl)]);
    assert_eq!(code(&dot), 0);
    let text = String::from_utf8(dot.stdout).unwrap();
    assert!(text.starts_with("digraph"));
    assert_eq!(text.matches("->").count(), 5);
}

#[test]
fn enumerate_cap() {
    let f = Files::new();
    let big = json!({"group": {"type": "GL", "n": 13}, "rho_classes": triv(), "support": [{"rho": "1", "a": "0", "mult": 13}]});
    let p = f.write("big.json", &big);
    let out = pya(&["enumerate", s(&p)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
    assert_eq!(stdout_json(&pya(&["enumerate", "--force", s(&p)]))["count"], 1);
    assert_eq!(stdout_json(&pya(&["enumerate", "--cap", "13", s(&p)]))["count"], 1);
}

#[test]
fn verify_dual_reports() {
    let f = Files::new();
    let p1 = f.write("p1.json", &phi1("SO_odd", 3));
    let out = pya(&["verify-dual", s(&p1)]);
    assert_eq!(code(&out), 0);
    let rep = stdout_json(&out);
    assert_eq!(rep["all_match"], true);
    let line = &rep["lines"][0];
    assert_eq!(line["mode"], "classical");
    assert_eq!(line["match"], true);
    assert_eq!(line["trials"], 5);
    assert_eq!(line["seed"], 0);
    assert_eq!(line["prime"], 2305843009213693951u64);
    assert_eq!(line["oracle_rank_matrix"]["entries"], json!([[0, 0], [0, 0]]));

    let other_prime = pya(&["verify-dual", "--prime", "4611686018427387847", "--seed", "3", "--trials", "2", s(&p1)]);
    assert_eq!(code(&other_prime), 0);

    let corrupted = pya(&["verify-dual", "--corrupt-expected", s(&p1)]);
    assert_eq!(code(&corrupted), 3);
    assert_eq!(stdout_json(&corrupted)["lines"][0]["match"], false);

    assert_eq!(code(&pya(&["verify-dual", "--prime", "1000", s(&p1)])), 1);
    assert_eq!(code(&pya(&["verify-dual", "--trials", "0", s(&p1)])), 1);
}

#[test]
fn selftest_runs() {
    let out = pya(&["selftest"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("FAIL"));
    assert!(!text.contains('\x1b'));

    let only = String::from_utf8(pya(&["selftest", "--filter", "bad-parity"]).stdout).unwrap();
    assert!(only.contains("so7-dual-phi1") && only.contains("bad-open-grid"));
    assert!(!only.contains("gl6-dual-phi0") && !only.contains("involution-catalog"));

    assert_eq!(code(&pya(&["selftest", "--filter", "no-such-fixture"])), 1);
}

#[test]
fn selftest_fixture_directory() {
    let f = Files::new();
    let case = json!([{"name": "mine", "tags": ["x"], "check": "dual",
        "input": phi1("SO_odd", 3), "expected": phi4("SO_odd", 3)}]);
    f.write("a.json", &case);
    let out = pya(&["selftest", "--fixtures", s(f.0.path()), "--filter", "x"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS mine"));

    let wrong = json!([{"name": "wrong", "tags": ["x"], "check": "dual",
        "input": phi1("SO_odd", 3), "expected": phi1("SO_odd", 3)}]);
    f.write("b.json", &wrong);
    let out = pya(&["selftest", "--fixtures", s(f.0.path()), "--filter", "x"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL wrong"));

    f.write_text("c.json", "[{\"name\": \"broken\"");
    assert_eq!(code(&pya(&["selftest", "--fixtures", s(f.0.path())])), 1);
}

#[test]
fn color_is_opt_out() {
    let out = Command::new(env!("CARGO_BIN_EXE_pya"))
        .args(["selftest", "--filter", "gl2-string-dual"])
        .env("PYA_COLOR", "1")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("\x1b[32mPASS"));
}
