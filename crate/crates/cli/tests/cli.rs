use std::path::Path;
use std::process::{Command, Output};

fn canon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_canon"))
        .args(args)
        .env_remove("CANON_ORACLE_BUDGET")
        .env_remove("CANON_ER_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_is_deterministic_and_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for f in [&a, &b] {
        let o = canon(&["gen", "--n", "2", "--N", "16", "--kind", "canonical", "--v", "1", "--out", p(f)]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let o = canon(&["oracle", p(&a), "--m", "5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("v = {1}"), "{}", stdout(&o));

    let r = dir.path().join("r.txt");
    canon(&["gen", "--n", "2", "--N", "9", "--kind", "random", "--colors", "3", "--seed", "5", "--out", p(&r)]);
    let text = std::fs::read_to_string(&r).unwrap();
    let colors: std::collections::BTreeSet<&str> =
        text.lines().skip(1).map(|l| l.split_whitespace().last().unwrap()).collect();
    assert!(colors.len() <= 3);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.txt");
    canon(&["gen", "--n", "2", "--N", "8", "--kind", "constant", "--out", p(&f)]);
    assert_eq!(code(&canon(&["verify", p(&f), "--subset", "1,3,5", "--v", ""])), 0);
    assert_eq!(code(&canon(&["verify", p(&f), "--subset", "1,3,5", "--v", "1"])), 1);
    assert_eq!(code(&canon(&["verify", p(&f), "--subset", "1,x"])), 64);
    assert_eq!(code(&canon(&["verify", p(&f), "--subset", "3,1"])), 64);
    assert_eq!(code(&canon(&["verify", p(&f), "--subset", "1,2,30"])), 64);
    assert_eq!(code(&canon(&["verify", "/nonexistent", "--subset", "1,2"])), 64);
}

#[test]
fn canonize_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.txt");
    let t = dir.path().join("t.json");
    canon(&["gen", "--n", "2", "--N", "256", "--kind", "canonical", "--v", "1", "--out", p(&f)]);
    let o = canon(&["canonize", p(&f), "--m", "4", "--seed", "3", "--trace", p(&t)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("v = {1}"));
    let first = std::fs::read(&t).unwrap();
    let again = dir.path().join("t2.json");
    canon(&["canonize", p(&f), "--m", "4", "--seed", "3", "--trace", p(&again)]);
    assert_eq!(first, std::fs::read(&again).unwrap());
    let o = canon(&["replay", p(&t), "--input", p(&f)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("replay identical"));

    // a replay against another coloring is refused
    let g = dir.path().join("g.txt");
    canon(&["gen", "--n", "2", "--N", "256", "--kind", "constant", "--out", p(&g)]);
    assert_eq!(code(&canon(&["replay", p(&t), "--input", p(&g)])), 64);

    let o = canon(&["canonize", p(&f), "--m", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["witness"]["subset"].as_array().unwrap().len(), 4);
}

#[test]
fn canonize_schedules() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.txt");
    canon(&["gen", "--n", "2", "--N", "64", "--kind", "injective", "--out", p(&f)]);
    let o = canon(&["canonize", p(&f), "--m", "3", "--schedule", "paper"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("threshold"), "{}", stdout(&o));
    let o = canon(&["canonize", p(&f), "--m", "3", "--schedule", "custom", "--sizes", "10,8,6"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("v = {1,2}"));
    assert_eq!(code(&canon(&["canonize", p(&f), "--m", "3", "--schedule", "custom", "--sizes", "10"])), 64);
    assert_eq!(code(&canon(&["canonize", p(&f), "--m", "3", "--schedule", "custom", "--sizes", "70,8,6"])), 2);
}

#[test]
fn er_search_front_end() {
    let o = canon(&["er-search", "--n", "1", "--m", "3", "--N", "5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("all colorings admit a witness"));
    let o = canon(&["er-search", "--n", "1", "--m", "3", "--N", "4"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("counterexample"));
    let o = canon(&["er-search", "--n", "2", "--m", "3", "--N", "9"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Bell"));
}

#[test]
fn bound_outputs() {
    let o = canon(&["bound", "--n", "2", "--m", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("m_1=24, m_2=576, m_3=1152"), "{}", stdout(&o));
    let o = canon(&["bound", "--n", "2", "--m", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schedule"]["m_small"][3], "1152");
    assert_eq!(v["schedule"]["all_steps_ok"], true);
    let o = canon(&["bound", "--n", "2", "--m", "2", "--check-obs16"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("all true: true\n"));
    assert_eq!(code(&canon(&["bound", "--n", "2", "--m", "1"])), 64);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&canon(&["bogus"])), 64);
    assert_eq!(code(&canon(&["gen", "--n", "2"])), 64);
    assert_eq!(code(&canon(&["--help"])), 0);
}
