use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainplex"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(name: &str) -> String {
    data(name).to_str().unwrap().to_string()
}

#[test]
fn recognize_accepts_and_prints_the_conclusion() {
    let o = run(&[
        "recognize",
        "--store",
        &path("svo.chains"),
        "--sentence",
        "cows eat grass",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("S"));
    assert!(stdout(&o).contains("witness 1: 5 instances, 6 bonds, dangling S"));
}

#[test]
fn recognize_rejects_scrambled_order() {
    let o = run(&[
        "recognize",
        "--store",
        &path("svo.chains"),
        "--sentence",
        "eat cows grass",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "reject\n");
}

#[test]
fn recognize_all_lists_several_witnesses() {
    let o = run(&[
        "recognize",
        "--store",
        &path("case.chains"),
        "--sentence",
        "he loves him",
        "--all",
        "--max-instances",
        "8",
    ]);
    assert_eq!(code(&o), 0);
    let n = stdout(&o)
        .lines()
        .filter(|l| l.starts_with("witness "))
        .count();
    assert!(n >= 2, "{n}");
}

#[test]
fn span_rule_can_be_switched_off() {
    let store = path("case.chains");
    let strict = run(&["recognize", "--store", &store, "--sentence", "he loves he"]);
    assert_eq!(code(&strict), 1);
    let loose = run(&[
        "recognize",
        "--store",
        &store,
        "--sentence",
        "he loves he",
        "--no-span",
    ]);
    assert_eq!(code(&loose), 0);
}

#[test]
fn stdin_mode_gives_one_verdict_per_line() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_chainplex"))
        .args(["recognize", "--store", &path("svo.chains"), "--stdin"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"cows eat grass\n\neat cows grass\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o), "cows eat grass\tS\neat cows grass\treject\n");
    assert_eq!(code(&o), 1);
}

#[test]
fn learning_appends_to_the_store_file() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("bats.chains");
    std::fs::write(
        &store,
        "\"birds\" - \"fly\" -> S\n\"birds\" - \"sing\" -> S",
    )
    .unwrap();
    let store = store.to_str().unwrap();
    let before = run(&["recognize", "--store", store, "--sentence", "bats sing"]);
    assert_eq!(code(&before), 1);

    // a fresh word can only be learned once something confirms it
    let birds = run(&[
        "recognize",
        "--store",
        store,
        "--sentence",
        "birds fly",
        "--learn",
    ]);
    assert_eq!(code(&birds), 0);
    let unchanged = std::fs::read_to_string(store).unwrap();
    assert_eq!(unchanged.lines().count(), 2);

    std::fs::write(store, format!("{unchanged}\n\"bats\" - \"fly\" -> S\n")).unwrap();
    let after = run(&[
        "recognize",
        "--store",
        store,
        "--sentence",
        "bats sing",
        "--learn",
    ]);
    assert_eq!(code(&after), 0);
    let text = std::fs::read_to_string(store).unwrap();
    assert!(text.ends_with("\"bats\" - \"sing\" -> S\n"), "{text}");
    let again = run(&["recognize", "--store", store, "--sentence", "bats sing"]);
    assert_eq!(code(&again), 0);
}

#[test]
fn learning_refuses_an_ambiguous_conclusion() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("svo.chains");
    std::fs::copy(data("svo.chains"), &store).unwrap();
    let before = std::fs::read_to_string(&store).unwrap();
    let o = run(&[
        "recognize",
        "--store",
        store.to_str().unwrap(),
        "--sentence",
        "cows eat grass",
        "--any-conclusion",
        "--learn",
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("several conclusions"));
    assert_eq!(std::fs::read_to_string(&store).unwrap(), before);
}

#[test]
fn emit_writes_each_format() {
    let dir = tempfile::tempdir().unwrap();
    let store = path("golden_line.chains");
    let sentence = "aurea purpuream subnectit fibula vestem";
    let xyz = dir.path().join("w.xyz");
    let o = run(&[
        "recognize",
        "--store",
        &store,
        "--sentence",
        sentence,
        "--emit",
        "xyz",
        "--out",
        xyz.to_str().unwrap(),
        "--style",
        &path("golden_line.style"),
        "--seed",
        "4",
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&xyz).unwrap();
    let atoms: usize = text.lines().next().unwrap().parse().unwrap();
    assert_eq!(text.lines().count(), atoms + 2);
    assert_eq!(
        text.lines().nth(1),
        Some(format!("{sentence} -> S").as_str())
    );
    let symbols: Vec<&str> = text
        .lines()
        .skip(2)
        .map(|l| l.split(' ').next().unwrap())
        .collect();
    assert!(symbols.contains(&"N") && symbols.contains(&"P"));

    let split = run(&[
        "recognize",
        "--store",
        &store,
        "--sentence",
        sentence,
        "--emit",
        "xyz",
        "--seed",
        "4",
        "--split-bonds",
    ]);
    let split_atoms: usize = stdout(&split).lines().next().unwrap().parse().unwrap();
    assert!(split_atoms > atoms);

    let again = run(&[
        "recognize",
        "--store",
        &store,
        "--sentence",
        sentence,
        "--emit",
        "xyz",
        "--seed",
        "4",
        "--style",
        &path("golden_line.style"),
    ]);
    assert_eq!(stdout(&again), text);

    let dot = run(&[
        "recognize",
        "--store",
        &store,
        "--sentence",
        sentence,
        "--emit",
        "dot",
    ]);
    assert!(stdout(&dot).starts_with("graph complex {\n"));
    let json = run(&[
        "recognize",
        "--store",
        &store,
        "--sentence",
        sentence,
        "--emit",
        "json",
    ]);
    let doc = chainplex::geometry::import_json(&stdout(&json)).unwrap();
    assert_eq!(doc.dangling.unwrap().label, "S");
    assert!(doc.coordinates.is_some());
}

#[test]
fn derive_counts_and_renders() {
    let o = run(&[
        "derive",
        "--types",
        &path("case.types"),
        "--sentence",
        "he loves Mary",
    ]);
    assert_eq!(code(&o), 0);
    let o = run(&[
        "derive",
        "--types",
        &path("case.types"),
        "--sentence",
        "he loves he",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "0 derivations\n");
    let o = run(&[
        "derive",
        "--types",
        &path("basic.types"),
        "--sentence",
        "birds sing",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "1 derivation\n[1,2] R1L : S\n  [1,1] \"birds\" : NP\n  [2,2] \"sing\" : NP\\S\n"
    );
    let o = run(&[
        "derive",
        "--types",
        &path("basic.types"),
        "--sentence",
        "birds fly",
    ]);
    assert_eq!(code(&o), 2);
    let o = run(&[
        "derive",
        "--types",
        &path("case.types"),
        "--sentence",
        "he loves him",
        "--all",
    ]);
    assert!(stdout(&o).contains("derivation 2:"));
}

#[test]
fn pipeline_traces_the_relative_clause_first() {
    let config = path("dutch.pipeline");
    let o = run(&[
        "pipeline",
        "--config",
        &config,
        "--sentence",
        "geiten haten kinderen die lawaai maken",
        "--trace",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "cp [4,6] CP\ns [1,4] S\nS\n");
    let o = run(&[
        "pipeline",
        "--config",
        &config,
        "--sentence",
        "geiten haten",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn pipeline_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.pipeline");
    std::fs::write(&empty, "# nothing here\n").unwrap();
    let o = run(&[
        "pipeline",
        "--config",
        empty.to_str().unwrap(),
        "--sentence",
        "a b",
    ]);
    assert_eq!(code(&o), 1);
    let missing = dir.path().join("missing.pipeline");
    std::fs::write(
        &missing,
        "[container s]\ntriggers = S\nchains = nowhere.chains\n",
    )
    .unwrap();
    let o = run(&[
        "pipeline",
        "--config",
        missing.to_str().unwrap(),
        "--sentence",
        "a b",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn crosscheck_reports_per_sentence() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.txt");
    let o = run(&[
        "crosscheck",
        "--store",
        &path("svo.chains"),
        "--max-len",
        "3",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&report).unwrap();
    assert_eq!(text.lines().count(), 39);
    for s in [
        "cows eat grass",
        "grass eat cows",
        "cows eat cows",
        "grass eat grass",
    ] {
        assert!(text.contains(&format!("{s}\tcfg:1\tcomplex:1\n")), "{s}");
    }
    let o = run(&["crosscheck", "--store", &path("bats.chains")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["recognize", "--store", "x", "--bogus"])), 2);
    assert_eq!(code(&run(&[])), 2);
    let o = run(&["recognize", "--store", "/no/such/file", "--sentence", "a"]);
    assert_eq!(code(&o), 2);
}
