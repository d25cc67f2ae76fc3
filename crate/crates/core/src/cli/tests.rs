use std::path::PathBuf;

use super::format::{emit_bicomplex, parse_bicomplex, parse_rational, OperadDocument};
use super::run;
use crate::error::Error;
use crate::exactla::q;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nsoperad-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn call(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run(std::iter::once("nsoperad").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn call_on(args: &[&str], path: &PathBuf) -> (i32, String) {
    let p = path.to_str().unwrap();
    let mut v = vec![args[0], p];
    v.extend_from_slice(&args[1..]);
    call(&v)
}

#[test]
fn rationals_parse_in_both_forms() {
    assert_eq!(parse_rational("3", 1).unwrap(), q(3));
    assert_eq!(parse_rational("-6/4", 1).unwrap(), q(-3) / q(2));
    assert!(parse_rational("1/0", 1).is_err());
    assert!(parse_rational("x", 1).is_err());
}

#[test]
fn bundled_poisson_fixture_matches_the_generator() {
    let dest = scratch("poisson.od");
    let (code, out) = call(&["poisson", "--d", "3", "--arity-max", "4", "--out", dest.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(std::fs::read_to_string(&dest).unwrap(), fixture_text("poisson_d3_a4.od"));
    // the total dimension of Poiss(n) is n!
    for line in ["    3  1 3 2", "    4  1 6 11 6"] {
        assert!(out.contains(line), "{out}");
    }
}

#[test]
fn documents_round_trip() {
    for name in ["poisson_d3_a4.od", "associative.od", "truncated_associative.od"] {
        let doc = OperadDocument::parse(&fixture_text(name)).unwrap();
        let text = doc.emit().unwrap();
        let again = OperadDocument::parse(&text).unwrap();
        assert_eq!(again.emit().unwrap(), text, "{name}");
        assert_eq!(again.operad.compositions(), doc.operad.compositions(), "{name}");
        assert_eq!(again.multiplication, doc.multiplication);
        assert_eq!(again.basepoint, doc.basepoint);
    }
    let canonical = fixture_text("poisson_d3_a4.od");
    assert_eq!(OperadDocument::parse(&canonical).unwrap().emit().unwrap(), canonical);
}

#[test]
fn bicomplexes_round_trip() {
    let b = parse_bicomplex(&fixture_text("staircase.bc")).unwrap();
    let text = emit_bicomplex(&b);
    let again = parse_bicomplex(&text).unwrap();
    assert_eq!(emit_bicomplex(&again), text);
    assert_eq!(again.dim(1, 1), 1);
}

#[test]
fn validate_accepts_fixtures() {
    for name in ["poisson_d3_a4.od", "associative.od", "truncated_associative.od"] {
        let (code, out) = call_on(&["validate"], &fixture(name));
        assert_eq!(code, 0, "{name}: {out}");
        assert!(out.ends_with("VALID\n"));
    }
}

#[test]
fn corrupted_coefficient_is_rejected() {
    let text = fixture_text("poisson_d3_a4.od");
    let target = "compose 2 1 2 [x1,x2] [x1,x2] = ";
    let line = text.lines().find(|l| l.starts_with(target)).expect("bracket composite present");
    let corrupted_line = line.replacen(" 1/1", " 2/1", 1).replacen(" -1/1", " -2/1", 1);
    assert_ne!(line, corrupted_line);
    let path = scratch("corrupted.od");
    std::fs::write(&path, text.replacen(line, &corrupted_line, 1)).unwrap();
    let (code, out) = call_on(&["validate"], &path);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("INVALID"));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let text = fixture_text("associative.od").replace("compose 2 1 1 a2 a1 = a2 1", "compose 2 1 1 a2 a9 = a2 1");
    match OperadDocument::parse(&text) {
        Err(Error::Parse { line, .. }) => assert_eq!(text.lines().nth(line - 1).unwrap(), "compose 2 1 1 a2 a9 = a2 1"),
        other => panic!("expected a parse error, got {other:?}"),
    }
    let path = scratch("bad.od");
    std::fs::write(&path, "format_version 2\n").unwrap();
    assert_eq!(call_on(&["validate"], &path).0, 1);
    assert_eq!(call(&["validate", "/nonexistent/x.od"]).0, 1);
    assert_eq!(call(&["frobnicate"]).0, 1);
}

#[test]
fn hochschild_of_associative_is_the_ground_field() {
    let (code, out) = call_on(&["hh", "--t-min", "-3", "--t-max", "1", "--tsv", "--strict"], &fixture("associative.od"));
    assert_eq!(code, 0, "{out}");
    let dims: Vec<(String, String)> = out
        .lines()
        .map(|l| {
            let w: Vec<&str> = l.split('\t').collect();
            (w[0].to_string(), w[1].to_string())
        })
        .collect();
    for (t, d) in dims {
        assert_eq!(d, if t == "0" { "1" } else { "0" }, "t = {t}");
    }
}

#[test]
fn strict_flags_uncertified_windows() {
    let p = fixture("poisson_d3_a4.od");
    let (code, out) = call_on(&["hh", "--t-min", "-1", "--t-max", "1"], &p);
    assert_eq!(code, 0);
    assert!(out.contains('?'));
    assert_eq!(call_on(&["hh", "--t-min", "-1", "--t-max", "1", "--strict"], &p).0, 2);
    assert_eq!(call_on(&["hh", "--t-min", "0", "--t-max", "0", "--p-max", "9"], &p).0, 2);
    let (code, out) = call_on(&["hh", "--t-min", "-1", "--t-max", "1", "--compare-homology"], &p);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("certified degrees agree: yes"));
}

#[test]
fn staircase_has_a_nonzero_second_differential() {
    let (code, out) = call_on(&["ss", "--r-max", "3"], &fixture("staircase.bc"));
    assert_eq!(code, 0);
    assert!(out.contains("first nonzero differential on page 2 at (0,0)"), "{out}");
    assert!(out.contains("(constant)"));
    assert!(out.contains("E_inf totals match total homology: yes"));
    let (_, tsv) = call_on(&["ss", "--r-max", "3", "--tsv"], &fixture("staircase.bc"));
    assert!(tsv.lines().any(|l| l.starts_with("inf\t")), "{tsv}");
}

#[test]
fn spectral_sequence_of_an_operad() {
    let (code, out) = call_on(&["ss", "--r-max", "2"], &fixture("associative.od"));
    assert_eq!(code, 0);
    assert!(out.contains("verdict: collapses at E2"), "{out}");
    assert_eq!(call_on(&["ss", "--r-max", "2", "--strict"], &fixture("associative.od")).0, 2);
}

#[test]
fn free_binary_operad_has_catalan_dimensions() {
    let (code, out) = call(&["free", "--sphere", "0", "2", "--arity-max", "6", "--max-degree", "0"]);
    assert_eq!(code, 0, "{out}");
    let dims: Vec<usize> = out
        .lines()
        .skip(2)
        .map(|l| l.split_whitespace().nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(dims, [0, 1, 1, 2, 5, 14, 42]);
    let seq = fixture("arity2_disk.seq");
    let (code, out) = call(&["free", "--seq", seq.to_str().unwrap(), "--arity-max", "3", "--max-degree", "2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("    2      1      1      0"), "{out}");
    assert_eq!(call(&["free", "--disk", "0", "2"]).0, 1);
}

#[test]
fn pushout_presentation_agrees_with_oracle() {
    let (code, out) = call_on(
        &["pushout-check", "--p", "2", "--q", "2", "--arity-max", "4", "--max-degree", "4"],
        &fixture("truncated_associative.od"),
    );
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("presentation vs oracle: AGREE"));
    assert!(out.contains("quasi-isomorphism below degree 4: PASS"));
}

#[test]
fn formal_fixture_matches_its_homology() {
    use crate::operad::formal_test_operad;
    use crate::poisson::poisson_operad;
    let h = poisson_operad(3, 3).unwrap().multiplicative;
    let (o, _) = formal_test_operad(&h).unwrap();
    let doc = OperadDocument::with_default_labels(o.operad.clone()).with_multiplicative(&o).unwrap();
    assert_eq!(doc.emit().unwrap(), fixture_text("formal_poisson_d3_a3.od"));
    let (code, out) = call_on(
        &["hh", "--t-min", "-2", "--t-max", "1", "--compare-homology", "--tsv"],
        &fixture("formal_poisson_d3_a3.od"),
    );
    assert_eq!(code, 0, "{out}");
    for line in out.lines() {
        let w: Vec<&str> = line.split('\t').collect();
        assert_eq!(w[1], w[2], "{line}");
    }
}
