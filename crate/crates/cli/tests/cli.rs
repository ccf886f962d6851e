mod common;

use std::process::{Command, Stdio};
use std::io::Write;

use common::*;
use trirank_cli::format::{parse_presentation, serialize_presentation};
use trirank_cli::rankfile::{parse_rank_file, serialize_rank_function};

const OBJECTS: [&str; 9] = ["T1", "S1T3", "T2", "S-1T1", "T3", "S-1T2", "S-2T1", "S1T1", "S1T2"];

fn object_args() -> Vec<String> {
    OBJECTS.iter().flat_map(|o| ["--object".to_string(), o.to_string()]).collect()
}

/// Each golden report with the command line that produced it.
fn golden_cases() -> Vec<(&'static str, Vec<String>)> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let with_objects = |rank: &str| {
        let mut v = s(&["eval", "--rank", &fixture(rank)]);
        v.extend(object_args());
        v
    };
    vec![
        ("orbits_a3.json", s(&["orbits", "--cat", &fixture("a3.trc")])),
        ("eval_rho1_objects.json", with_objects("rho1.rf")),
        ("eval_rho2_objects.json", with_objects("rho2.rf")),
        (
            "eval_rho2_morphisms.json",
            s(&["eval", "--rank", &fixture("rho2.rf"), "--morphism", "f_T1_T3", "--morphism", "alpha_T1_T2"]),
        ),
        ("decompose_length.json", s(&["decompose", "--rank", &fixture("length.rf")])),
        ("classify_rho1.json", s(&["classify", "--rank", &fixture("rho1.rf")])),
        ("classify_rho2.json", s(&["classify", "--rank", &fixture("rho2.rf")])),
        ("classify_length.json", s(&["classify", "--rank", &fixture("length.rf")])),
    ]
}

#[test]
fn structured_reports_match_golden_files() {
    for (file, args) in golden_cases() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, out, _) = run_json(&args);
        assert_eq!(code, 0, "{file}");
        assert_eq!(out, golden(file), "{file}");
    }
}

#[test]
fn build_then_validate_through_stdin() {
    let built = run(&["build-an", "--n", "3"]);
    assert_eq!(built.code, 0);
    let v = run_with_stdin(&["validate"], &built.stdout);
    assert_eq!(v.code, 0);
    assert_eq!(v.stdout, "9 indecomposables, period 6\n");
    let j = run_with_stdin(&["--output", "json", "validate", "-"], &built.stdout);
    assert_eq!(j.stdout, golden("validate_a3.json"));
}

#[test]
fn binary_pipeline_and_environment_default() {
    let exe = env!("CARGO_BIN_EXE_trirank");
    let built = Command::new(exe).args(["build-an", "--n", "3"]).output().unwrap();
    assert!(built.status.success());
    let mut child = Command::new(exe)
        .arg("validate")
        .env("TRIRANK_OUTPUT", "json")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&built.stdout).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("validate_a3.json"));

    let human = Command::new(exe)
        .args(["--output", "human", "validate", &fixture("a3.trc")])
        .env("TRIRANK_OUTPUT", "json")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(human.stdout).unwrap(), "9 indecomposables, period 6\n");
}

#[test]
fn human_examples() {
    let e = run(&["eval", "--rank", &fixture("rho2.rf"), "--morphism", "f_T1_T3"]);
    assert_eq!((e.code, e.stdout.as_str()), (0, "0\n"));
    let d = run(&["decompose", "--rank", &fixture("length.rf"), "--cat", &fixture("a3.trc")]);
    assert_eq!(d.stdout, "T1 (6 objects): 1\nT2 (3 objects): 1\n");
    let t = run(&["eval", "--rank", &fixture("rho2.rf"), "--morphism", "cone_f_T1_T3.g"]);
    assert_eq!(t.stdout, "1\n");
    let s = run(&["simples", "--cat", &fixture("a3.trc")]);
    assert!(s.stdout.contains("S_T1 = coker(Hom(-, S1T2) -> Hom(-, T1))  [ar_T1]"), "{}", s.stdout);
    assert_eq!(s.stdout.lines().count(), 9);
}

#[test]
fn object_values_resolve_to_coefficients() {
    let (code, _, v) = run_json(&["check", "--rank", &fixture("rho2_values.rf")]);
    assert_eq!(code, 0);
    let c = &v["result"]["coefficients"];
    for o in OBJECTS {
        let expected = if o.contains("T2") { "1" } else { "0" };
        assert_eq!(c[o], expected, "{o}");
    }
    let (_, _, half) = run_json(&["check", "--rank", &fixture("ones.rf")]);
    assert_eq!(half["result"]["coefficients"]["T1"], "1/2");
    assert_eq!(half["result"]["coefficients"]["T2"], "0");
}

#[test]
fn qconvert_reports_module_elements() {
    let (code, _, v) = run_json(&[
        "qconvert",
        "--instance",
        "integers",
        "--values",
        &fixture("rho2_integers.qv"),
        "--triangle",
        "cone_f_T1_T3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["morphisms"][0]["value"]["text"], "0");
    let (code, _, v) = run_json(&[
        "qconvert",
        "--instance",
        "periodic:3",
        "--values",
        &fixture("middle_periodic3.qv"),
    ]);
    assert_eq!(code, 0);
    let rows = v["result"]["morphisms"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    let ar_t2 = rows.iter().find(|r| r["triangle"] == "ar_T2").unwrap();
    assert_eq!(ar_t2["value"], serde_json::json!({ "low": 1, "coeffs": ["1"], "text": "x" }));
    // Hom(Z, S-1T2) is one-dimensional for Z = T2, S-1T2 in the middle orbit.
    assert_eq!(v["result"]["object_values"]["S-1T2"]["text"], "1 + x^2");
}

#[test]
fn export_dot_parses_with_expected_counts() {
    for (file, nodes, edges) in [("a1.trc", 2, 0), ("a2.trc", 5, 5), ("a3.trc", 9, 12)] {
        let r = run(&["export-dot", "--cat", &fixture(file)]);
        assert_eq!(r.code, 0);
        let ast = dot_parser::ast::Graph::try_from(r.stdout.as_str()).unwrap();
        let g = dot_parser::canonical::Graph::from(ast);
        assert_eq!(g.nodes.set.len(), nodes, "{file}");
        assert_eq!(g.edges.set.len(), edges, "{file}");
    }
}

#[test]
fn written_outputs_match_standard_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a3.trc");
    let p = path.display().to_string();
    let w = run(&["build-an", "--n", "3", "-o", &p]);
    assert_eq!(w.code, 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), run(&["build-an", "--n", "3"]).stdout);
    let dot = dir.path().join("a3.dot");
    let (code, _, v) = run_json(&["export-dot", "--cat", &p, "-o", &dot.display().to_string()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["objects"], 9);
    assert!(std::fs::read_to_string(dot).unwrap().starts_with("digraph"));
}

#[test]
fn fixtures_are_canonical() {
    for file in ["a1.trc", "a2.trc", "a3.trc", "broken_triangle.trc"] {
        let text = std::fs::read_to_string(fixture_path(file)).unwrap();
        let p = parse_presentation(&text).unwrap();
        assert_eq!(serialize_presentation(&p), text, "{file}");
    }
    let a3 = std::sync::Arc::new(parse_presentation(&std::fs::read_to_string(fixture_path("a3.trc")).unwrap()).unwrap());
    for file in ["rho1.rf", "rho2.rf", "length.rf"] {
        let text = std::fs::read_to_string(fixture_path(file)).unwrap();
        let f = parse_rank_file(&text).unwrap();
        let c = f.resolve(&a3).unwrap().into_iter().map(Option::unwrap).collect();
        let rho = trirank::RankFunction::new(a3.clone(), c).unwrap();
        assert_eq!(serialize_rank_function(&rho, f.presentation.as_deref()), text, "{file}");
    }
}

#[test]
fn hand_written_triangle_is_distinguished() {
    let text = std::fs::read_to_string(fixture_path("a3.trc")).unwrap();
    let p = parse_presentation(&text).unwrap();
    let t = p.triangles().iter().find(|t| t.name == "cone_f_T1_T3").unwrap();
    assert!(p.check_triangle(t).is_empty());
    assert_eq!(p.morphism("f_T1_T3"), p.morphism("conn_T1"));
    assert_eq!(p.morphism("alpha_T1_T2"), p.morphism("arr_T1_T2"));
    assert!(p.is_valid());
}

fn assert_exit(args: &[&str], code: u8) {
    let r = run(args);
    assert_eq!(r.code, code, "{args:?}: {}{}", r.stdout, r.stderr);
    if code != 0 {
        assert!(r.stderr.starts_with("error: ") || !r.stderr.is_empty(), "{args:?}");
        let (c, _, v) = run_json(args);
        assert_eq!(c, code);
        assert_ne!(v["status"], "ok");
        assert!(!v["diagnostics"].as_array().unwrap().is_empty());
    }
}

#[test]
fn domain_errors_exit_with_one() {
    let rf = |f: &str| fixture(f);
    // validation failure
    assert_exit(&["validate", &rf("broken_triangle.trc")], 1);
    // axiom failure
    assert_exit(&["check", "--rank", &rf("bad_values.rf")], 1);
    // not Σ-invariant
    assert_exit(&["decompose", "--rank", &rf("not_invariant.rf")], 1);
    // no rank function with these object values
    assert_exit(&["eval", "--rank", &rf("bad_values.rf"), "--object", "T1"], 1);
    // q + 1 not regular
    assert_exit(&["qconvert", "--instance", "periodic:2", "--values", &rf("rho2_integers.qv")], 1);
    // mesh construction
    assert_exit(&["build-an", "--n", "0"], 1);
    assert_exit(&["build-an", "--n", "3", "--window", "1"], 1);
    // non-integral decomposition
    assert_exit(&["decompose", "--rank", &rf("ones.rf")], 1);
    // untwisted values give a negative quotient
    assert_exit(
        &["qconvert", "--instance", "periodic:3", "--values", &rf("rho2_integers.qv"), "--cat", &rf("a3.trc")],
        1,
    );
}

#[test]
fn missing_values_are_domain_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("partial.rf");
    std::fs::write(&path, "version = 1\n[object_values]\nT1 = 1\n").unwrap();
    let p = path.display().to_string();
    assert_exit(&["eval", "--rank", &p, "--cat", &fixture("a3.trc"), "--object", "T1"], 1);
    let r = run(&["check", "--rank", &p, "--cat", &fixture("a3.trc")]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("no value given for object S1T3"), "{}", r.stderr);
    let qv = dir.path().join("shifted.qv");
    std::fs::write(&qv, "version = 1\n[coefficients]\nT2 = 1\n").unwrap();
    assert_exit(
        &["qconvert", "--instance", "periodic:3", "--values", &qv.display().to_string(), "--cat", &fixture("a3.trc")],
        1,
    );
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.display().to_string()
    };
    // missing files
    assert_exit(&["validate", "/nonexistent/a.trc"], 2);
    assert_exit(&["decompose", "--rank", "/nonexistent/a.rf"], 2);
    let dangling = write("dangling.rf", "version = 1\npresentation = \"nowhere.trc\"\n[coefficients]\n");
    assert_exit(&["decompose", "--rank", &dangling], 2);
    // parse errors
    assert_exit(&["validate", &fixture("duplicate_object.trc")], 2);
    let garbage = write("garbage.trc", "objects = [\n");
    assert_exit(&["validate", &garbage], 2);
    let unknown = write("unknown.rf", "version = 1\n[coefficients]\nT9 = 1\n");
    assert_exit(&["decompose", "--rank", &unknown, "--cat", &fixture("a3.trc")], 2);
    // no presentation given
    let loose = write("loose.rf", "version = 1\n[coefficients]\nT1 = 1\n");
    assert_exit(&["decompose", "--rank", &loose], 2);
    // unknown references
    assert_exit(&["eval", "--rank", &fixture("rho2.rf"), "--morphism", "nope"], 2);
    assert_exit(&["eval", "--rank", &fixture("rho2.rf"), "--object", "T1+T9"], 2);
    assert_exit(&["eval", "--rank", &fixture("rho2.rf")], 2);
    assert_exit(&["check", "--rank", &fixture("rho2.rf"), "--triangle", "nope"], 2);
    // unwritable output
    assert_exit(&["build-an", "--n", "2", "-o", "/nonexistent/dir/a2.trc"], 2);
    // stdin parse error
    let r = run_with_stdin(&["validate", "-"], "version = 1\nobjects = 3\n");
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("<stdin>") || r.stderr.contains("-:"), "{}", r.stderr);
}

#[test]
fn argument_errors_exit_with_two() {
    for args in [
        vec![],
        vec!["frobnicate"],
        vec!["build-an"],
        vec!["qconvert", "--instance", "periodic:0", "--values", "x.qv"],
        vec!["--output", "yaml", "orbits", "--cat", "x"],
    ] {
        let r = run(&args);
        assert_eq!(r.code, 2, "{args:?}");
        assert!(!r.stderr.is_empty());
    }
    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["--version"]).code, 0);
}
