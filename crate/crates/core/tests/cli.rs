use std::process::{Command, Output};
use treeaxes::folds::{format_morphism, random_morphism};
use treeaxes::free_group::{format_automorphism, nielsen_pool, GroupPresentation};

fn treeaxes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treeaxes")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn analyze_reports_each_word() {
    let o = treeaxes(&["analyze", "abab", "aAb", "abAB"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    let w = |i: usize| &v["checks"][i]["detail"];
    assert_eq!(w(0)["root"], "ab");
    assert_eq!(w(0)["exponent"], 2);
    assert_eq!(w(1)["reduced"], "b");
    assert_eq!(w(2)["translation_length"], 4);
    assert_eq!(w(2)["primitive"], false);

    let o = treeaxes(&["--presentation", "Z2*Z3", "analyze", "s1s2", "s2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["checks"][0]["detail"]["kind"], "loxodromic");
    assert_eq!(v["checks"][1]["detail"]["kind"], "finite_order");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["analyze", "abz"][..],
        &["--presentation", "Q"][..],
        &["frobnicate"][..],
        &["analyze"][..],
        &["--budget-set", "nonsense=1", "lemmas"][..],
        &["--format", "dot", "lemmas"][..],
    ] {
        let o = treeaxes(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(treeaxes(&["--help"]).status.code(), Some(0));
}

#[test]
fn words_file_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let words = dir.path().join("words.txt");
    std::fs::write(&words, "ab\n# comment\nbA\n").unwrap();
    let out = dir.path().join("r.json");
    let o = treeaxes(&["analyze", "--words-file", words.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 2);
}

#[test]
fn quick_lemmas_pass_and_are_reproducible() {
    let run = || treeaxes(&["--budget-quick", "--seed", "9", "lemmas"]);
    let (a, b) = (run(), run());
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let strip = |o: &Output| {
        let mut v = json(o);
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    assert_eq!(strip(&a), strip(&b));
    let text = treeaxes(&["--budget-quick", "--format", "text", "lemmas"]);
    assert!(stdout(&text).contains("overall: pass"));
}

#[test]
fn budget_overrides_reach_the_report() {
    let o = treeaxes(&["--budget-quick", "--budget-set", "twist_max=3", "--budget-samples", "7", "persistence", "--g", "a"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["budgets"]["twist_max"], 3);
    assert_eq!(v["budgets"]["random_instances"], 7);
}

#[test]
fn complex_with_a_pool_file_emits_dot() {
    let p = GroupPresentation::free(2);
    let pool: Vec<String> = nielsen_pool(&p, 2).iter().map(|phi| format_automorphism(&p, phi)).collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pool.txt");
    std::fs::write(&path, pool.join("---\n")).unwrap();
    let o = treeaxes(&["--budget-quick", "--format", "dot", "complex", "--g", "aabAB", "--pool-file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("graph C_K {"));
}

#[test]
fn persistence_csv_lists_trials() {
    let o = treeaxes(&["--budget-quick", "--format", "csv", "persistence", "--g", "aabAB"]);
    let s = stdout(&o);
    assert!(s.starts_with("pool_index,"), "{s}");
    assert!(s.lines().count() > 1);
}

#[test]
fn folds_on_a_morphism_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.txt");
    std::fs::write(&path, format_morphism(&random_morphism(4).unwrap())).unwrap();
    let o = treeaxes(&["--budget-quick", "folds", "--morphism", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&o);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["fold_decomposition", "bbt_bound"]);

    let o = treeaxes(&["--budget-quick", "--format", "text", "folds", "--morphism", path.to_str().unwrap()]);
    assert!(!stdout(&o).is_empty());

    std::fs::write(&path, "source\nvertices 1\nedge 0 0 x\nend\ntarget\nvertices 1\nend\nvertex_map 0\n").unwrap();
    let o = treeaxes(&["folds", "--morphism", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}
