#![allow(dead_code)]

use std::path::PathBuf;

pub fn fixture(name: &str) -> String {
    fixture_path(name).display().to_string()
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub struct Run {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_with_stdin(args: &[&str], stdin: &str) -> Run {
    let mut argv = vec!["trirank"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = trirank_cli::run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

pub fn run(args: &[&str]) -> Run {
    run_with_stdin(args, "")
}

/// Structured-mode run; the report must parse as JSON.
pub fn run_json(args: &[&str]) -> (u8, String, serde_json::Value) {
    let mut a = vec!["--output", "json"];
    a.extend_from_slice(args);
    let r = run(&a);
    let v = serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {}", r.stdout));
    (r.code, r.stdout, v)
}
