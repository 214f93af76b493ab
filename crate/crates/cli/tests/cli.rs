//! End-to-end runs of the binary against the shipped fixture files,
//! pinning the exit-code contract: 0 pass, 1 failed verdict, 2 parse or
//! usage error, 3 budget exceeded.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn isw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isw"))
        .args(args)
        .env_remove("ISW_BUDGET")
        .output()
        .expect("binary runs")
}

fn isw_with_budget(budget: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isw"))
        .args(args)
        .env("ISW_BUDGET", budget)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn validate_passes_on_fixtures() {
    for name in ["term.isw", "flat2.isw", "bfly.isw"] {
        let out = isw(&["validate", fixture(name).to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{name}: {out:?}");
    }
}

#[test]
fn validate_fails_with_a_counterexample() {
    let out = isw(&["validate", fixture("broken.isw").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("axiom 3"), "{text}");
    assert!(text.contains("FAIL"), "{text}");
}

#[test]
fn validate_reports_interpolation_failure() {
    let out = isw(&["validate", fixture("gipfail.isw").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("axiom 10 (entailment interpolation): FAIL"), "{text}");
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempdir();
    let bad = dir.join("bad.isw");
    std::fs::write(&bad, "system X\ndelta d\ntokens d\ncon e : {}\n").unwrap();
    let out = isw(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("line 4"), "{text}");
    // Usage errors are 2 as well.
    let out = isw(&["no-such-command"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn budget_exceeded_exits_3() {
    let out = isw_with_budget(
        "cpts=4",
        &[
            "expo",
            fixture("flat2.isw").to_str().unwrap(),
            fixture("flat2.isw").to_str().unwrap(),
        ],
    );
    assert_eq!(code(&out), 3, "{out:?}");
    let out = isw_with_budget("3", &["states", fixture("bfly.isw").to_str().unwrap()]);
    assert_eq!(code(&out), 3, "{out:?}");
    // Bad budget strings are usage errors.
    let out = isw_with_budget("tokens=zap", &["validate", fixture("term.isw").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn states_and_dot_export() {
    let dir = tempdir();
    let dot = dir.join("f.dot");
    let out = isw(&[
        "states",
        fixture("flat2.isw").to_str().unwrap(),
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("3 states"));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert_eq!(text.matches("->").count(), 2);
}

#[test]
fn from_poset_matches_fixture() {
    let out = isw(&["from-poset", fixture("flat2.poset").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let expected = std::fs::read_to_string(fixture("flat2.isw")).unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout), expected);
}

#[test]
fn iso_between_poset_and_state_space() {
    let out = isw(&[
        "iso",
        fixture("bfly.poset").to_str().unwrap(),
        fixture("bfly.isw").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let out = isw(&[
        "iso",
        fixture("flat2.poset").to_str().unwrap(),
        fixture("bfly.isw").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn product_and_expo_files_validate() {
    let dir = tempdir();
    let prod = dir.join("ft.isw");
    let out = isw(&[
        "product",
        fixture("flat2.isw").to_str().unwrap(),
        fixture("term.isw").to_str().unwrap(),
        "-o",
        prod.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    assert_eq!(code(&isw(&["validate", prod.to_str().unwrap()])), 0);

    let expo = dir.join("tt.isw");
    let out = isw(&[
        "expo",
        fixture("term.isw").to_str().unwrap(),
        fixture("term.isw").to_str().unwrap(),
        "-o",
        expo.to_str().unwrap(),
        "--materialize",
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    assert_eq!(code(&isw(&["validate", expo.to_str().unwrap()])), 0);
    let sidecar = std::fs::read_to_string(dir.join("tt.sidecar")).unwrap();
    assert_eq!(sidecar.lines().count(), 4);
}

#[test]
fn map_check_and_compose() {
    let out = isw(&["map-check", fixture("idflat2.map").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{out:?}");
    let dir = tempdir();
    let comp = dir.join("c.map");
    // Composition needs the referenced systems next to the map files.
    std::fs::copy(fixture("idflat2.map"), dir.join("idflat2.map")).unwrap();
    std::fs::copy(fixture("flat2.isw"), dir.join("flat2.isw")).unwrap();
    let out = isw(&[
        "compose",
        dir.join("idflat2.map").to_str().unwrap(),
        dir.join("idflat2.map").to_str().unwrap(),
        "-o",
        comp.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let text = std::fs::read_to_string(&comp).unwrap();
    assert!(text.starts_with("map"), "{text}");
}

#[test]
fn roundtrips_and_ccc_commands() {
    let out = isw(&[
        "roundtrips",
        fixture("term.isw").to_str().unwrap(),
        fixture("flat2.isw").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("3 states and 3 mappings"));

    let out = isw(&[
        "check-ccc",
        fixture("term.isw").to_str().unwrap(),
        fixture("term.isw").to_str().unwrap(),
        fixture("flat2.isw").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
}

#[test]
fn sweep_posets_command() {
    let out = isw(&["sweep-posets", "--max-n", "4"]);
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("9 local-lub posets"));
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "isw-cli-test-{}-{:?}",
        std::process::id(),
        std::thread::current().id()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
