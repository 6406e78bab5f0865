use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treedist"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Off-diagonal cell (1, 0) of a two-row TSV matrix.
fn cell_10(tsv: &str) -> String {
    tsv.lines().nth(2).unwrap().split('\t').nth(1).unwrap().to_string()
}

#[test]
fn identical_trees_rf_is_zero() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "t.nwk", "((1,2),3);\n((1,2),3);\n");
    let o = run(&["dist", "--metric", "rf", s(&f)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "\t0\t1\n0\t0\t0\n1\t0\t0\n");
}

#[test]
fn coincident_pair_geodesic_is_two() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "t.nwk", "# comment\n((1:1,2:1):1,3:1);\n\n((1:1,3:1):1,2:1);\n");
    let o = run(&["dist", "--metric", "geodesic", s(&f)]);
    assert!(o.status.success());
    assert_eq!(cell_10(&stdout(&o)), "2");
}

#[test]
fn divergent_pair_prints_twelve_digits() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "t.nwk", "((1,2),3,(4,5),6);\n((1,3),2,(4,6),5);\n");
    let o = run(&["dist", "--metric", "geodesic", s(&f)]);
    assert_eq!(cell_10(&stdout(&o)), "2.82842712475");
    let o = run(&["dist", "--metric", "rf", s(&f)]);
    assert_eq!(cell_10(&stdout(&o)), "4");
}

#[test]
fn malformed_newick_reports_line() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "t.nwk", "((1,2),3);\n((1,2),3;\n");
    let o = run(&["dist", "--metric", "rf", s(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("t.nwk:2:"), "{}", stderr(&o));
}

#[test]
fn engine_error_names_pair() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "t.nwk", "((1,2),3);\n((1,3),2);\n");
    let o = run(&["dist", "--metric", "quartet", s(&f)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("pair (0, 0)"), "{}", stderr(&o));
}

#[test]
fn mixed_label_sets_are_input_errors() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "t.nwk", "((1,2),3);\n((1,2),(3,4));\n");
    let o = run(&["dist", "--metric", "rf", s(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("t.nwk:2"));
}

#[test]
fn diagonals_follow_the_metric() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "t.nwk", "(((1,2),3),(4,5));\n((1,2),(3,(4,5)));\n");
    let diag = |metric: &str| {
        let o = run(&["dist", "--metric", metric, s(&f)]);
        assert!(o.status.success(), "{metric}: {}", stderr(&o));
        let text = stdout(&o);
        let row: Vec<String> = text.lines().nth(1).unwrap().split('\t').map(String::from).collect();
        row[1].clone()
    };
    assert_eq!(diag("cophenetic"), "1");
    assert_eq!(diag("align"), "3");
    // The cone path runs through the origin: 2 * sqrt(3) for three unit internal edges.
    assert_eq!(diag("cone"), "3.46410161514");
    for m in ["rf", "rfl", "quartet", "triplet", "triplet-length", "mast", "node", "node2", "simprob", "geodesic"] {
        assert_eq!(diag(m), "0", "{m}");
    }
}

#[test]
fn json_output_and_report_sidecar() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "t.nwk", "((1:1,2:1):1,3:1,4:1);\n((1:1,2:1):1,(3:1,4:1):1);\n");
    let out = dir.path().join("m.json");
    let o = run(&["dist", "--metric", "rfl", "--format", "json", "--out", s(&out), s(&f)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(m["matrix"][1][0], 1.0);
    assert_eq!(m["matrix"][0][1], 1.0);
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("m.json.report.json")).unwrap()).unwrap();
    // The resolved tree is ambiguous against itself as well.
    assert_eq!(r["flag_counts"]["ambiguous"], 2);
    assert_eq!((r["pairs"][0]["i"].clone(), r["pairs"][0]["j"].clone()), (1.into(), 0.into()));
}

#[test]
fn runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let trees: String = [
        "((((1:0.3,2:0.1):0.4,3:0.2):0.5,(4:0.1,5:0.7):0.2):0.1,6:0.3);",
        "(((1:0.2,3:0.1):0.2,2:0.4):0.6,((4:0.3,6:0.5):0.3,5:0.2):0.4);",
        "((1:0.2,(2:0.3,3:0.1):0.7):0.3,((4:0.1,5:0.2):0.1,6:0.9):0.2);",
        "(1:1,2:1,3:1,4:1,5:1,6:1);",
    ]
    .join("\n");
    let f = write(dir.path(), "t.nwk", &trees);
    for metric in ["geodesic", "rfl", "simprob", "align"] {
        let a = dir.path().join(format!("{metric}-a.tsv"));
        let b = dir.path().join(format!("{metric}-b.tsv"));
        assert!(run(&["dist", "--metric", metric, "--jobs", "1", "--out", s(&a), s(&f)]).status.success());
        assert!(run(&["dist", "--metric", metric, "--jobs", "4", "--out", s(&b), s(&f)]).status.success());
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{metric}");
        let ra = fs::read(format!("{}.report.json", s(&a))).unwrap();
        let rb = fs::read(format!("{}.report.json", s(&b))).unwrap();
        assert_eq!(ra, rb, "{metric} report");
    }
}

#[test]
fn matrix_is_symmetric() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "t.nwk",
        "(((1,2),3),(4,5));\n((1,2),(3,(4,5)));\n(((1,3),2),(4,5));\n((1,4),(2,(3,5)));\n",
    );
    let o = run(&["dist", "--metric", "triplet", s(&f)]);
    let rows: Vec<Vec<String>> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split('\t').skip(1).map(String::from).collect())
        .collect();
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            assert_eq!(x, &rows[j][i]);
        }
    }
}

#[test]
fn node_exponent_flag() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "t.nwk", "(((1,2),3),4);\n((1,2),(3,4));\n");
    let k2 = run(&["dist", "--metric", "node", "--k", "2", s(&f)]);
    let node2 = run(&["dist", "--metric", "node2", s(&f)]);
    assert_eq!(stdout(&k2), stdout(&node2));
    assert_eq!(run(&["dist", "--metric", "node", "--k", "3", s(&f)]).status.code(), Some(2));
}

#[test]
fn class_map_is_applied_and_checked() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "t.nwk", "(((1,2),3),(4,5));\n(((1,3),2),(4,5));\n");
    let good = write(dir.path(), "good.txt", "{1,2} 7\n");
    let o = run(&["dist", "--metric", "cophenetic", "--class-map", s(&good), s(&f)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let plain = run(&["dist", "--metric", "cophenetic", s(&f)]);
    assert_ne!(stdout(&o), stdout(&plain));

    let unknown = write(dir.path(), "unknown.txt", "{1,5} 2\n");
    let o = run(&["dist", "--metric", "cophenetic", "--class-map", s(&unknown), s(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown.txt:1"));

    // {1,2,3} at depth 1 above {1,2} at depth 2 breaks monotonicity.
    let bad = write(dir.path(), "bad.txt", "{1,2,3} 9\n");
    let o = run(&["dist", "--metric", "cophenetic", "--class-map", s(&bad), s(&f)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn encode_decode_round_trip() {
    let dir = TempDir::new().unwrap();
    let trees = "(((1:0.5,2:1):0.25,3:1):0.75,(4:1,5:1):0.125);\n((1:1,(2:1,3:1):0.3):0.2,4:1,5:1);\n";
    let f = write(dir.path(), "t.nwk", trees);
    let v = dir.path().join("v.txt");
    let o = run(&["encode", s(&f), "--out", s(&v)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&v).unwrap();
    assert!(text.starts_with('#'));
    let o = run(&["decode", s(&v)]);
    assert!(o.status.success());
    let back: Vec<String> = stdout(&o).lines().filter(|l| !l.starts_with('#')).map(String::from).collect();
    assert_eq!(back.len(), 2);

    // Internal structure survives; leaf edges come back at weight 1.
    let g = write(dir.path(), "back.nwk", &back.join("\n"));
    let both = run(&["dist", "--metric", "geodesic", s(&f), s(&g)]);
    let rows: Vec<Vec<String>> = stdout(&both)
        .lines()
        .skip(1)
        .map(|l| l.split('\t').skip(1).map(String::from).collect())
        .collect();
    assert_eq!(rows[2][0], "0");
    assert_eq!(rows[3][1], "0");
    let again = run(&["encode", s(&g)]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn vector_inputs_for_dist() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "v.txt", "n=3\n{0,3} 1\n\nn=3\n2 1\n");
    let o = run(&["dist", "--metric", "geodesic", s(&f)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(cell_10(&stdout(&o)), "2");
    let o = run(&["dist", "--metric", "cone", s(&f)]);
    assert_eq!(cell_10(&stdout(&o)), "2");
}

#[test]
fn bit_vector_example_is_incompatible() {
    let dir = TempDir::new().unwrap();
    // {0,1} and {0,3}: the third canonical split and the first.
    let f = write(dir.path(), "v.txt", "n=3\nbits 1 0 1\n");
    let o = run(&["decode", s(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("incompatible splits {0,1} and {0,3}"), "{}", stderr(&o));
    let single = write(dir.path(), "w.txt", "n=3\nbits 0 0 1\n");
    let o = run(&["decode", s(&single)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("((1:1,2:1):1,3:1);"), "{}", stdout(&o));
}

#[test]
fn validate_reports_each_line() {
    let dir = TempDir::new().unwrap();
    let ok = write(dir.path(), "ok.nwk", "((1,2),3);\n(1,2,3);\n");
    let o = run(&["validate", s(&ok)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches(": OK").count(), 2);

    let dup = write(dir.path(), "dup.nwk", "((1,2),3);\n((1,1),3);\n");
    let o = run(&["validate", s(&dup)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dup.nwk:2"));

    let deg2 = write(dir.path(), "deg2.nwk", "(((1,2)),3);\n");
    let o = run(&["validate", s(&deg2)]);
    assert_eq!(o.status.code(), Some(2));

    let vec = write(dir.path(), "v.txt", "n=4\n{1,2} 1\n\nn=4\n{1,2} 1\n{1,3} 1\n");
    let o = run(&["validate", s(&vec)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("v.txt:1: OK"));
    assert!(stderr(&o).contains("v.txt:4"));
}
