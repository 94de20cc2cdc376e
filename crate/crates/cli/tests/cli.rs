use std::path::Path;
use std::process::{Command, Output};

use ramseykit::fixtures::chain;
use ramseykit::{parse_structure, serialize_structure};

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramseykit"))
        .args(args)
        .current_dir(dir)
        .env_remove("RAMSEYKIT_WORKERS")
        .output()
        .unwrap()
}

fn run(args: &[&str]) -> Output {
    run_in(Path::new("."), args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_chain(dir: &Path, name: &str, n: usize) {
    std::fs::write(dir.join(name), serialize_structure(&chain(n))).unwrap();
}

#[test]
fn skew_table() {
    let o = run(&["skew", "2", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("0 -> 0.0\n"));
    assert!(text.contains("1 -> 1.0.0\n"));
}

#[test]
fn six_chain_arrow_holds_and_five_fails_with_a_checkable_witness() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for n in [2, 3, 5, 6] {
        write_chain(d, &format!("c{n}.txt"), n);
    }
    let o = run_in(d, &["arrow", "c6.txt", "c3.txt", "c2.txt", "-k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("holds"));

    let o = run_in(d, &["--format", "report", "arrow", "c5.txt", "c3.txt", "c2.txt"]);
    assert_eq!(o.status.code(), Some(1));
    let report = stdout(&o);
    assert!(report.starts_with("verdict: fails\n"));
    assert_eq!(report.matches(" color ").count(), 10);
    std::fs::write(d.join("r.txt"), &report).unwrap();
    let o = run_in(d, &["arrow", "c5.txt", "c3.txt", "c2.txt", "--verify", "r.txt"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "witness: valid\n"));

    // a tampered witness is caught
    let bad = report.replacen("color 0", "color 1", 3).replacen("color 1", "color 0", 1);
    std::fs::write(d.join("bad.txt"), bad).unwrap();
    let o = run_in(d, &["arrow", "c5.txt", "c3.txt", "c2.txt", "--verify", "bad.txt"]);
    assert_eq!(stdout(&o), "witness: invalid\n");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let args = ["--format", "report", "arrow", "1^<=4@Lt", "1^<=2@Lt", "1^<=1@Lt"];
    let one = stdout(&run(&[&["--workers", "1"], &args[..]].concat()));
    let four = Command::new(env!("CARGO_BIN_EXE_ramseykit")).args(args).env("RAMSEYKIT_WORKERS", "4").output().unwrap();
    assert_eq!(stdout(&four), one);
    assert!(one.starts_with("verdict: fails"));
}

#[test]
fn escalation_reaches_six_points() {
    let o = run(&["arrow", "1^<=3@Lt", "1^<=2@Lt", "1^<=1@Lt", "--escalate", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("C = 1^<=5@Lt\nC -> (B)^A_2: holds"));
    assert_eq!(text.matches(": fails").count(), 2);
}

#[test]
fn budget_and_input_errors_have_their_own_exit_codes() {
    let o = run(&["--budget", "5", "arrow", "1^<=5@Lt", "1^<=2@Lt", "1^<=1@Lt"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "verdict: budget\nbudget: 5\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("error[ramsey.budget-exceeded]"));

    let o = run(&["qftype", "no-such-file.txt", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[cli.invalid-argument]"));

    let o = run(&["closure", "2^<=1@L0", "9"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[structures."));

    assert_eq!(run(&["fill", "2^<=1@Ls", "-m", "0"]).status.code(), Some(3));
}

#[test]
fn tree_counterexample_fixture() {
    let o = run(&["fixtures", "amalgamation-It"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("A embeds in B1 via a0->b0 a1->b1 a2->b2 a3->b3: yes"));
    assert!(text.contains("b4 <= c4 <= c3 = b3"));
    assert!(text.ends_with("no amalgam up to bound 12\n"));
}

#[test]
fn amalgam_of_fixture_files() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures");
    let o = run_in(&root, &["amalgam", "a.txt", "b1.txt", "b2.txt", "--bound", "9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("no amalgam up to bound 9"));
    let o = run_in(&root, &["amalgam", "a.txt", "b1.txt", "b2.txt", "--class", "linear", "--bound", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("amalgam found with 6 elements"));
    let o = run_in(&root, &["amalgam", "a.txt", "b1.txt", "b2.txt", "--e1", "a0 a1 a2 a3"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn type_queries_by_label() {
    let o = run(&["closure", "2^<=2@L0", "0.0", "1"]);
    assert_eq!(stdout(&o), "() 0.0 1\n");
    let a = stdout(&run(&["qftype", "2^<=2@L0", "0.0", "1"]));
    let b = stdout(&run(&["qftype", "2^<=2@L0", "0", "1.1"]));
    assert_eq!(a, b);
    let c = stdout(&run(&["qftype", "2^<=2@L1", "0.0", "1"]));
    let d = stdout(&run(&["qftype", "2^<=2@L1", "0", "1.1"]));
    assert_ne!(c, d);
    let o = run(&["isolate", "2^<=1@L0", "0", "1"]);
    assert!(stdout(&o).starts_with("(and "));
}

#[test]
fn fill_writes_structures_that_read_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["fill", "2^<=1@Ls", "-m", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("k: 2\ny: 0.0 1.0\nmarks: () 0 1\n"));
    for f in ["filled.txt", "extract.txt"] {
        let s = parse_structure(&std::fs::read_to_string(out.join(f)).unwrap()).unwrap();
        assert!(s.is_valid(), "{f}");
    }
    let v = run(&["validate", out.join("filled.txt").to_str().unwrap()]);
    assert_eq!(stdout(&v), "valid: 5 elements\n");
}

#[test]
fn seeded_homogenization_is_reproducible_and_grows() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("g.txt"), "index 1^<=2@Lt\nb 1^<=2@Lt\npattern 1^<=1@Lt\ncoloring random 2\n").unwrap();
    let first = run_in(d, &["--seed", "4", "homogenize", "g.txt", "--grow"]);
    assert_eq!(first.status.code(), Some(0));
    let text = stdout(&first);
    assert!(text.starts_with("seed: 4\n"));
    assert!(text.contains("growing to 1^<=3@Lt"));
    assert!(text.contains("result: found"));
    assert_eq!(stdout(&run_in(d, &["--seed", "4", "homogenize", "g.txt", "--grow"])), text);
    let o = run_in(d, &["--seed", "4", "homogenize", "g.txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).ends_with("result: none\n"));
}

#[test]
fn explicit_family_request() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_chain(d, "c6.txt", 6);
    write_chain(d, "c3.txt", 3);
    std::fs::write(d.join("delta.txt"), "(rel < x1 x2)\n").unwrap();
    std::fs::write(d.join("fam.txt"), "0\n1\n2\n3\n4\n5\n").unwrap();
    std::fs::write(
        d.join("r.txt"),
        "index c6.txt\nb c3.txt\ntarget c6.txt\nfamily fam.txt\ndelta delta.txt\nmax_len 2\n",
    )
    .unwrap();
    let o = run_in(d, &["homogenize", "r.txt"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("copy: 0 1 2\n"));
    assert_eq!(run_in(d, &["homogenize", "r.txt", "--grow"]).status.code(), Some(3));
}
