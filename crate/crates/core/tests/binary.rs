use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn nsoperad(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nsoperad")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn binary_reports_exit_codes() {
    let assoc = fixture("associative.od");
    let assoc = assoc.to_str().unwrap();
    let (code, out) = nsoperad(&["validate", assoc]);
    assert_eq!(code, 0, "{out}");
    assert!(out.ends_with("VALID\n"));
    let (code, out) = nsoperad(&["hh", assoc, "--t-min", "-2", "--t-max", "1", "--strict"]);
    assert_eq!(code, 0, "{out}");
    let poisson = fixture("poisson_d3_a4.od");
    let (code, _) = nsoperad(&["hh", poisson.to_str().unwrap(), "--t-min", "-1", "--t-max", "1", "--strict"]);
    assert_eq!(code, 2);
    let (code, _) = nsoperad(&["validate", "/nonexistent.od"]);
    assert_eq!(code, 1);
    let (code, out) = nsoperad(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("pushout-check"));
}
