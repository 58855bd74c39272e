use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simplex-embed")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn embed_exit_codes_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let no = dir.path().join("no.json");
    let o = run(&["embed", "--h", "(3,3,7)", "--g", "(2,3,7)", "--out", no.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&run(&["verify", no.to_str().unwrap()])), 0);

    let yes = dir.path().join("yes.json");
    let o = run(&["embed", "--h", "(0,0,3)", "--g", "[3^{[3,3]}]", "--out", yes.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&["verify", yes.to_str().unwrap()])), 0);
    assert_eq!(code(&run(&["lift", "--cert", yes.to_str().unwrap(), "--variant", "all"])), 0);

    let o = run(&["embed", "--h", "(3,4,4)", "--g", "(2,3,7)", "--max-chambers", "1"]);
    assert!([1, 2].contains(&code(&o)));
}

#[test]
fn tampered_reports_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    assert_eq!(code(&run(&["embed", "--h", "(3,3,7)", "--g", "(2,3,7)", "--out", p.to_str().unwrap()])), 1);
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    v["runs"][0]["frontier"].as_array_mut().unwrap().pop();
    std::fs::write(&p, v.to_string()).unwrap();
    assert_eq!(code(&run(&["verify", p.to_str().unwrap()])), 3);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&run(&["embed", "--h", "(3,3,7)"])), 4);
    assert_eq!(code(&run(&["embed", "--h", "nonsense", "--g", "(2,3,7)"])), 4);
    assert_eq!(code(&run(&["verify", "/nonexistent/file.json"])), 4);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn enumerate_and_classify() {
    let o = run(&["enumerate", "--ideal"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("[3^{[3,3]}]") || text.contains("3^{[3,3]}"), "{text}");
    let o = run(&["--json", "enumerate", "--rank", "5", "--compact"]);
    assert_eq!(code(&o), 0);

    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("d.txt");
    let o = run(&["enumerate", "--rank", "5", "--compact"]);
    assert_eq!(code(&o), 0);
    std::fs::write(&f, &o.stdout).unwrap();
    let o = run(&["--json", "classify", f.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).matches("compact").count() >= 5, "{}", stdout(&o));
}

#[test]
fn dioph_rows_verify() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("d.json");
    let o = run(&["dioph", "--h", "(0,0,3)", "--g", "[3^{1,1,1,1,1}]", "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&run(&["verify", p.to_str().unwrap()])), 0);
}

#[test]
fn lattice_build_and_store_verify() {
    let dir = tempfile::tempdir().unwrap();
    let st = dir.path().join("store");
    let s = st.to_str().unwrap();
    let o = run(&["lattice", "--build", s, "--names", "(2,3,7),(3,3,7),(0,0,3),[3^{[3,3]}]", "--out", "json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!doc["edges"].as_array().unwrap().is_empty());
    assert!(Path::new(s).join("evidence").is_dir());
    assert_eq!(code(&run(&["verify", s])), 0);
    let o = run(&["lattice", "--build", s, "--names", "(2,3,7),(3,3,7)", "--out", "dot"]);
    assert!(stdout(&o).starts_with("digraph"));
}
