use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use catmn_cli::syntax::parse_document;
use catmn_cli::workspace::spec_document;
use catmn_core::fibered::{canonical_c2, random_spec, trivial_spec, Limits};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn catmn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catmn"))
        .args(args)
        .env_remove("CATMN_MAX_MORPHISMS")
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = catmn(args);
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_accepts_the_positive_fixtures() {
    for name in ["canonical_c2.spec", "trivial.spec", "reflection.cat", "coreflection.cat"] {
        let (code, out, _) = run(&["validate", path(&fixture(name))]);
        assert_eq!(code, 0, "{name}:\n{out}");
        assert!(!out.contains("FAIL"));
    }
}

#[test]
fn cyclic_fiber_is_rejected_with_the_cycle() {
    let (code, out, _) = run(&["validate", path(&fixture("corrupt/cyclic_fiber.spec"))]);
    assert_eq!(code, 1);
    assert!(out.contains("[order.cycle] over b0: cycle bot0 <= mid0 <= top0 <= bot0"), "{out}");
}

#[test]
fn empty_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.spec");
    std::fs::write(&empty, "").unwrap();
    let (code, out, err) = run(&["validate", path(&empty)]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("line 1, column 1: empty document"), "{err}");
}

#[test]
fn malformed_line_reports_its_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cat");
    std::fs::write(&bad, "CATEGORY C\nOBJECTS\n  a\nMORPHISMS\n  f a -> a\n").unwrap();
    let (code, _, err) = run(&["validate", path(&bad)]);
    assert_eq!(code, 2);
    assert!(err.contains("line 5"), "{err}");
}

#[test]
fn missing_file_is_an_input_error() {
    let (code, _, err) = run(&["validate", "/nonexistent/x.spec"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
}

#[test]
fn mn_check_passes_on_c2_and_the_trivial_spec() {
    let (code, out, _) = run(&["mn-check", path(&fixture("canonical_c2.spec"))]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("fixed by monad: 2 objects: (b0,top0) (b1,top1)"), "{out}");
    assert!(out.contains("fixed by comonad: 2 objects: (b0,bot0) (b1,bot1)"), "{out}");
    assert!(out.contains("object-bijective yes"));
    assert!(out.ends_with("result: pass\n"));

    let (code, out, _) = run(&["mn-check", path(&fixture("trivial.spec"))]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("identity functors: monad yes, comonad yes"), "{out}");
}

#[test]
fn mn_check_stops_at_validation_for_a_non_monotone_action() {
    let (code, out, _) = run(&["mn-check", path(&fixture("corrupt/non_monotone_action.spec"))]);
    assert_eq!(code, 1);
    assert!(out.contains("result: FAIL (stage validation)"), "{out}");
    assert!(out.contains("action.monotone"));
}

#[test]
fn transport_passes_in_both_modes() {
    for mode in ["relabel-opposite", "powerset-duality-demo"] {
        let (code, out, _) = run(&["transport", "--mode", mode, path(&fixture("canonical_c2.spec"))]);
        assert_eq!(code, 0, "{mode}:\n{out}");
        assert!(out.ends_with("result: pass\n"));
    }
    for mode in ["relabel-opposite", "powerset-duality-demo"] {
        let (code, out, _) = run(&["transport", "--mode", mode, path(&fixture("trivial.spec"))]);
        assert_eq!(code, 0, "trivial, {mode}:\n{out}");
    }
    let (_, out, _) = run(&["transport", path(&fixture("canonical_c2.spec"))]);
    assert!(out.contains("fixed by induced comonad T: 2 objects: op:(b0,top0) op:(b1,top1)"), "{out}");
    assert!(out.contains("fixed by induced monad S: 2 objects: op:(b0,bot0) op:(b1,bot1)"), "{out}");
}

#[test]
fn export_dot_draws_the_total_category() {
    let (code, out, _) = run(&["export-dot", path(&fixture("canonical_c2.spec"))]);
    assert_eq!(code, 0);
    let nodes = out.lines().filter(|l| l.starts_with("  \"") && !l.contains("->")).count();
    let edges = out.lines().filter(|l| l.contains("->")).count();
    assert_eq!((nodes, edges), (5, 9), "{out}");
    assert_eq!(out.matches("doublecircle").count(), 2);
    assert_eq!(out.matches("fillcolor=lightgray").count(), 2);

    let (_, trivial, _) = run(&["export-dot", path(&fixture("trivial.spec"))]);
    assert_eq!(trivial.lines().filter(|l| l.starts_with("  \"")).count(), 1, "{trivial}");
    assert!(!trivial.contains("->"));
}

#[test]
fn export_dot_is_byte_deterministic_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.dot"), dir.path().join("b.dot"));
    for out in [&a, &b] {
        let (code, _, _) = run(&["export-dot", path(&fixture("canonical_c2.spec")), "-o", path(out)]);
        assert_eq!(code, 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (_, stdout, _) = run(&["export-dot", path(&fixture("canonical_c2.spec"))]);
    assert_eq!(std::fs::read_to_string(&a).unwrap(), stdout);
}

#[test]
fn export_dot_of_a_plain_category_marks_fixed_objects() {
    let (code, out, _) = run(&["export-dot", path(&fixture("reflection.cat")), "--name", "R"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("\"r\" [shape=doublecircle]"), "{out}");
}

#[test]
fn fixtures_are_canonical() {
    for (name, spec, sname, base) in [
        ("canonical_c2.spec", canonical_c2(), "c2", "C2"),
        ("trivial.spec", trivial_spec(), "trivial", "T"),
    ] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        assert_eq!(spec_document(sname, base, &spec).to_string(), text, "{name}");
        let (code, out, _) = run(&["convert", path(&fixture(name))]);
        assert_eq!(code, 0);
        assert_eq!(out, text, "{name}");
    }
}

#[test]
fn json_mirrors_the_text_format() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("c2.json");
    let (code, out, _) = run(&["convert", "--json", path(&fixture("canonical_c2.spec"))]);
    assert_eq!(code, 0);
    let value: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(value["blocks"][0]["kind"], "category");
    assert_eq!(value["blocks"][1]["kind"], "spec");
    std::fs::write(&json, &out).unwrap();

    let (code, text, _) = run(&["convert", path(&json)]);
    assert_eq!(code, 0);
    assert_eq!(text, std::fs::read_to_string(fixture("canonical_c2.spec")).unwrap());
    let (_, from_json, _) = run(&["mn-check", path(&json)]);
    let (_, from_text, _) = run(&["mn-check", path(&fixture("canonical_c2.spec"))]);
    assert_eq!(from_json, from_text);
}

#[test]
fn morphism_guardrail_is_read_from_the_environment() {
    let c2 = fixture("canonical_c2.spec");
    let out = Command::new(env!("CARGO_BIN_EXE_catmn"))
        .args(["mn-check", path(&c2)])
        .env("CATMN_MAX_MORPHISMS", "13")
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(text.contains("above the limit of 13"), "{text}");
    assert!(text.contains("result: FAIL (stage total_category)"));

    let out = Command::new(env!("CARGO_BIN_EXE_catmn"))
        .args(["mn-check", path(&c2)])
        .env("CATMN_MAX_MORPHISMS", "14")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn random_is_reproducible_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["random", "--seed", "17", "--max-base", "3", "--max-fiber", "4"];
    let (code, first, _) = run(&args);
    assert_eq!(code, 0);
    let (_, second, _) = run(&args);
    assert_eq!(first, second);

    let limits = Limits { max_base_objects: 3, max_fiber: 4, ..Limits::default() };
    let expected = spec_document("random17", "B", &random_spec(17, limits).unwrap()).to_string();
    assert_eq!(first, expected);

    let file = dir.path().join("r.spec");
    let (code, _, _) = run(&[&args[..], &["-o", path(&file)]].concat());
    assert_eq!(code, 0);
    let (code, out, _) = run(&["mn-check", path(&file)]);
    assert_eq!(code, 0, "{out}");

    let (_, json, _) = run(&[&args[..], &["--json"]].concat());
    let doc = parse_document(&json).unwrap();
    assert_eq!(doc.to_string(), first);
}

#[test]
fn random_rejects_zero_limits() {
    let (code, _, err) = run(&["random", "--max-fiber", "0"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn demo_passes() {
    let (code, out, _) = run(&["demo"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.ends_with("demo: pass\n"));
}

#[test]
fn every_corrupt_fixture_fails_validation() {
    let dir = fixture("corrupt");
    let mut count = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let p = entry.unwrap().path();
        let (code, out, _) = run(&["validate", path(&p)]);
        assert_eq!(code, 1, "{}:\n{out}", p.display());
        count += 1;
    }
    assert!(count >= 10);
}
