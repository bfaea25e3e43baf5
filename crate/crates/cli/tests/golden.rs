//! Golden-file tests: each case runs the binary from the workspace root and compares exit
//! code, stdout and stderr with `tests/golden/<name>.out`. Set `UPDATE_GOLDEN=1` to rewrite.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

const LP: &str = "models/lp.json";
const EX2: &str = "models/ex2.json";
const ACC: &str = "models/accuracy-variant.json";
const ANCESTRY: &str = "models/thm1-counterexample.json";
const LP_CUT: &str = "crates/cli/tests/fixtures/lp-without-bh-bs.json";
const LP_STATE: &str = "ST=1,BT=1,SH=1,BH=0,BS=1";

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn transcript(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nscm")).args(args).current_dir(root()).output().unwrap();
    let code = out.status.code().unwrap();
    let text = format!(
        "$ nscm {}\nexit: {code}\n--- stdout\n{}--- stderr\n{}",
        args.join(" "),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap()
    );
    (code, text)
}

fn golden(name: &str, want_code: i32, args: &[&str]) {
    let (code, got) = transcript(args);
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.out"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &got).unwrap();
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(got, want, "output of `{name}` changed");
    assert_eq!(code, want_code, "exit code of `{name}`");
}

#[test]
fn validate() {
    golden("validate_lp", 0, &["validate", LP]);
    golden("validate_ancestry_json", 0, &["--json", "validate", ANCESTRY]);
    golden("validate_missing_file", 2, &["validate", "models/nope.json"]);
}

#[test]
fn solve() {
    golden("solve_ex2", 0, &["solve", EX2]);
    golden("solve_ex2_do", 0, &["solve", EX2, "--do", "X=0"]);
    golden("solve_ancestry_context_json", 0, &["--json", "solve", ANCESTRY, "--context", "A=2", "--do", "Z=1"]);
}

#[test]
fn eval() {
    golden(
        "eval_ex2_observation_first",
        0,
        &["eval", EX2, "--context", "", "--state", "X=1,Y=0", "--formula", "<X<-0> Y=1"],
    );
    golden("eval_ex2_intervention_first", 1, &["eval", EX2, "--state", "X=1,Y=0", "--formula", "[X<-0] Y=0"]);
    golden("eval_ex2_partial_json", 0, &["--json", "eval", EX2, "--context", "", "--formula", "[X<-0] (Y=0 | Y=1)"]);
    golden("eval_lp_model", 0, &["eval", LP, "--formula", "[ST<-1] BS=1 & <> BS=1"]);
    golden("eval_parse_error", 2, &["eval", LP, "--formula", "BS=1 &"]);
    golden("eval_not_a_solution", 3, &["eval", LP, "--state", "ST=1,BT=1,SH=0,BH=0,BS=1", "--formula", "BS=1"]);
}

#[test]
fn depends() {
    golden("depends_lp_witness", 0, &["depends", LP, "--from", "ST", "--to", "BS", "--witness"]);
    golden("depends_lp_direct", 1, &["depends", LP, "--from", "ST", "--to", "BS", "--direct"]);
    golden("depends_ancestry", 1, &["depends", ANCESTRY, "--from", "Z", "--to", "Y"]);
    golden("depends_ancestry_direct_json", 0, &["--json", "depends", ANCESTRY, "--from", "Z", "--to", "X", "--direct"]);
}

#[test]
fn cause() {
    golden("cause_lp_st", 0, &["cause", LP, "--state", LP_STATE, "--cause", "ST=1", "--effect", "BS=1", "--witnesses"]);
    golden("cause_lp_bt", 1, &["cause", LP, "--state", LP_STATE, "--cause", "BT=1", "--effect", "BS=1"]);
    golden(
        "cause_lp_st_json",
        0,
        &["--json", "cause", LP, "--state", LP_STATE, "--cause", "ST=1", "--effect", "BS=1", "--require-distinct"],
    );
    golden(
        "cause_accuracy",
        1,
        &[
            "cause",
            ACC,
            "--state",
            "ST=0,BT=1,SA=1,SH=0,BH=1,BS=1",
            "--cause",
            "ST=0",
            "--effect",
            "BS=1",
            "--no-prune",
        ],
    );
    golden("cause_false_atom", 3, &["cause", LP, "--state", LP_STATE, "--cause", "ST=0", "--effect", "BS=1"]);
}

#[test]
fn simplify() {
    golden("simplify_lp_all", 0, &["simplify", LP]);
    golden("simplify_lp_setting", 0, &["simplify", LP, "--setting-state", LP_STATE]);
    golden(
        "simplify_lp_remove_json",
        0,
        &["--json", "simplify", LP, "--remove", "BH->BS", "--setting-state", LP_STATE],
    );
    golden("simplify_lp_remove_illegal", 3, &["simplify", LP, "--remove", "SH->BS"]);
    golden("simplify_ancestry", 0, &["simplify", ANCESTRY]);
}

#[test]
fn extension() {
    golden("extension_lp_cut", 0, &["extension", LP, LP_CUT]);
    golden("extension_cut_lp", 1, &["extension", LP_CUT, LP]);
    golden("extension_mismatch_json", 3, &["--json", "extension", LP, EX2]);
}

#[test]
fn discover() {
    golden("discover_ex2", 0, &["discover", EX2]);
    golden("discover_lp_json", 0, &["--json", "discover", LP]);
    golden("discover_ex2_complete", 0, &["discover", EX2, "--graph", "complete"]);
    golden("discover_usage", 2, &["discover"]);
}

#[test]
fn discover_from_saved_possibilities() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("s.json");
    let saved = saved.to_str().unwrap();
    let (code, first) = transcript(&["--json", "discover", ANCESTRY, "--save-possibilities", saved]);
    assert_eq!(code, 0);
    let (code, second) = transcript(&["--json", "discover", "--possibilities", saved]);
    assert_eq!(code, 0);
    let body = |t: &str| t.split_once("--- stdout\n").unwrap().1.to_string();
    assert_eq!(body(&first), body(&second));

    let graph = dir.path().join("g.txt");
    fs::write(&graph, "A->X\nZ->X\nX->Y\nZ->Y\n").unwrap();
    let (code, _) = transcript(&["discover", "--possibilities", saved, "--graph", graph.to_str().unwrap()]);
    assert_eq!(code, 0);
    fs::write(&graph, "Z->Y\n").unwrap();
    let (code, _) = transcript(&["discover", "--possibilities", saved, "--graph", graph.to_str().unwrap()]);
    assert_eq!(code, 3);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["--json", "cause", LP, "--state", LP_STATE, "--cause", "ST=1", "--effect", "BS=1", "--witnesses"];
    assert_eq!(transcript(&args), transcript(&args));
}
