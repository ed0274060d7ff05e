use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

use dynsketch::graph::{apply_query, parse_graph, parse_query, Graph};
use dynsketch::oracle::{matching_size, max_flow};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dynsketch"));
    cmd.env_remove("DYNSKETCH_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.dir.path().join(name);
        fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }

    fn path(&self, name: &str) -> String {
        self.path_buf(name).to_str().unwrap().to_string()
    }

    fn path_buf(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

// path 0-1-2-3-4 plus pendant 5; terminals 0, 2, 5
const SAMPLE: &str = "6 3 0\nt 0\nt 2\nt 5\ne 0 1 1\ne 1 2 1\ne 2 3 1\ne 3 4 1\n";

const DIGRAPH: &str = "5 3 1\nt 0\nt 3\nt 4\ne 0 1 2\ne 1 3 1\ne 0 2 1\ne 2 3 3\ne 3 4 2\ne 2 4 1\n";

fn build(problem: &str, graph: &str, out: &str, extra: &[&str]) -> Output {
    let mut args = vec!["build", "--problem", problem, "-i", graph, "-o", out];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn build_reports_the_matching_size_formula() {
    let f = Files::new();
    let g = f.write("g.txt", SAMPLE);
    let out = build("matching", &g, &f.path("m.dsk"), &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let words = 4 * 3 * 3 + 6;
    assert_eq!(stdout(&out), format!("matching sketch: {words} words, {} bytes", 8 * words));
    assert_eq!(fs::metadata(f.path_buf("m.dsk")).unwrap().len(), 8 * words as u64);
}

#[test]
fn matching_queries_agree_with_the_oracle() {
    let f = Files::new();
    let g = f.write("g.txt", SAMPLE);
    let graph = parse_graph(SAMPLE).unwrap();
    let m = f.path("m.dsk");
    assert_eq!(code(&build("matching", &g, &m, &["--seed", "4"])), 0);
    for text in ["", "q 0 1\n", "q 1 2\n", "q 0 1\nq 0 2\nq 1 2\n"] {
        let q = f.write("q.txt", text);
        let want = matching_size(&apply_query(&graph, &parse_query(text).unwrap()).unwrap()).unwrap();
        let got = run(&["query", "-i", &m, "-q", &q]);
        assert_eq!(stdout(&got), want.to_string(), "query {text:?}");
        let oracle = run(&["oracle", "--problem", "matching", "-i", &g, "-q", &q]);
        assert_eq!(stdout(&oracle), want.to_string());
    }
    // no query file means the empty query
    let empty = run(&["query", "--problem", "matching", "-i", &m]);
    assert_eq!(stdout(&empty), matching_size(&graph).unwrap().to_string());
}

#[test]
fn cut_queries_agree_with_max_flow() {
    let f = Files::new();
    let g = f.write("d.txt", DIGRAPH);
    let graph = parse_graph(DIGRAPH).unwrap();
    let c = f.path("c.dsk");
    assert_eq!(code(&build("cut", &g, &c, &[])), 0);
    let side = |g: &Graph, ids: &[usize]| ids.iter().map(|&i| g.terminals()[i]).collect::<Vec<_>>();
    for (spec, a, b) in
        [("A:0 B:1", vec![0], vec![1]), ("A:0 B:1,2", vec![0], vec![1, 2]), ("A:0,1 B:2", vec![0, 1], vec![2])]
    {
        let want = max_flow(&graph, &side(&graph, &a), &side(&graph, &b)).to_string();
        assert_eq!(stdout(&run(&["query", "-i", &c, "--cut", spec])), want, "{spec}");
        assert_eq!(stdout(&run(&["oracle", "--problem", "cut", "-i", &g, "--cut", spec])), want);
    }
    let missing = run(&["query", "-i", &c]);
    assert_eq!(code(&missing), 1);
    let overlap = run(&["query", "-i", &c, "--cut", "A:0 B:0"]);
    assert_eq!(code(&overlap), 2);
}

#[test]
fn stconn_mst_and_path_round_trip_through_files() {
    let f = Files::new();
    let text = "5 2 1\nt 1\nt 2\ns 0\nd 4\ne 0 1 1\ne 2 4 1\ne 0 3 5\ne 3 4 5\n";
    let g = f.write("g.txt", text);
    let q = f.write("q.txt", "q 0 1 1\n");
    for (problem, want_empty, want_q) in [("stconn", "1", "2"), ("path", "10", "3")] {
        let out = f.path(&format!("{problem}.dsk"));
        assert_eq!(code(&build(problem, &g, &out, &[])), 0);
        assert_eq!(stdout(&run(&["query", "-i", &out])), want_empty, "{problem}");
        assert_eq!(stdout(&run(&["query", "-i", &out, "-q", &q])), want_q, "{problem}");
        assert_eq!(stdout(&run(&["oracle", "--problem", problem, "-i", &g, "-q", &q])), want_q);
    }
    let u = f.write("u.txt", "4 2 0\nt 0\nt 3\ne 0 1 4\ne 1 2 1\ne 2 3 6\n");
    let out = f.path("mst.dsk");
    assert_eq!(code(&build("mst", &u, &out, &[])), 0);
    assert_eq!(stdout(&run(&["query", "-i", &out])), "11");
    let cheap = f.write("cheap.txt", "q 0 1 2\n");
    assert_eq!(stdout(&run(&["query", "-i", &out, "-q", &cheap])), "7");
}

#[test]
fn unreachable_distance_prints_inf() {
    let f = Files::new();
    let g = f.write("g.txt", "3 1 1\nt 2\ns 1\nd 0\ne 0 1 1\n");
    let out = f.path("p.dsk");
    assert_eq!(code(&build("path", &g, &out, &[])), 0);
    assert_eq!(stdout(&run(&["query", "-i", &out])), "inf");
    assert_eq!(stdout(&run(&["oracle", "--problem", "path", "-i", &g])), "inf");
}

#[test]
fn parse_errors_exit_2_with_line_numbers() {
    let f = Files::new();
    let bad = f.write("bad.txt", "6 3 maybe\n");
    let out = build("matching", &bad, &f.path("x.dsk"), &[]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));
    let neg = f.write("neg.txt", "2 0 0\ne 0 1 -4\n");
    let out = build("mst", &neg, &f.path("x.dsk"), &[]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
    assert_eq!(code(&run(&["query", "-i", &f.path("missing.dsk")])), 2);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["build", "--problem", "nope", "-i", "a", "-o", "b"])), 1);
    assert_eq!(code(&run(&["size", "--problem", "cut", "--k", "3"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn stale_versions_and_wrong_tags_are_rejected() {
    let f = Files::new();
    let g = f.write("g.txt", SAMPLE);
    let m = f.path("m.dsk");
    assert_eq!(code(&build("matching", &g, &m, &[])), 0);
    let mut bytes = fs::read(&m).unwrap();
    bytes[8] = 0;
    let stale = f.path("stale.dsk");
    fs::write(&stale, &bytes).unwrap();
    let out = run(&["query", "-i", &stale]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("version"), "{}", stderr(&out));
    let out = run(&["query", "--problem", "mst", "-i", &m]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("matching"), "{}", stderr(&out));
}

fn seeded_build(f: &Files, graph: &str, name: &str, seed: Option<&str>) -> Vec<u8> {
    let out = f.path(name);
    let mut cmd = bin();
    cmd.args(["build", "--problem", "matching", "-i", graph, "-o", &out]);
    if let Some(s) = seed {
        cmd.env("DYNSKETCH_SEED", s);
    }
    assert!(cmd.output().unwrap().status.success());
    fs::read(out).unwrap()
}

#[test]
fn seed_comes_from_the_environment() {
    let f = Files::new();
    let g = f.write("g.txt", SAMPLE);
    let a = seeded_build(&f, &g, "a.dsk", Some("11"));
    let b = seeded_build(&f, &g, "b.dsk", Some("11"));
    let c = seeded_build(&f, &g, "c.dsk", Some("12"));
    assert_eq!(a, b);
    assert_ne!(a, c);
    let flag = f.path("flag.dsk");
    assert_eq!(code(&build("matching", &g, &flag, &["--seed", "11"])), 0);
    assert_eq!(fs::read(flag).unwrap(), a);
}

#[test]
fn fixtures_emit_parseable_graphs() {
    let f = Files::new();
    let q = f.path("q.txt");
    let out =
        run(&["fixture", "--name", "membership", "--size", "9", "--set", "1,5,9", "--element", "5", "--query-out", &q]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let g = parse_graph(&stdout(&out)).unwrap();
    assert_eq!((g.n(), g.k(), g.m()), (14, 8, 9));
    let query = parse_query(&fs::read_to_string(&q).unwrap()).unwrap();
    // element 5 is in S: both layers stay perfectly matched plus one
    assert_eq!(matching_size(&apply_query(&g, &query).unwrap()).unwrap(), 7);

    let cut = run(&["fixture", "--name", "cutlb", "--size", "2", "--set", "1,0"]);
    assert_eq!(code(&cut), 0, "{}", stderr(&cut));
    let g = parse_graph(&stdout(&cut)).unwrap();
    assert!(!g.is_directed());
    assert_eq!(g.k(), 4);
    assert_eq!(code(&run(&["fixture", "--name", "cutlb", "--size", "3"])), 1);
    assert_eq!(code(&run(&["fixture", "--name", "membership", "--size", "8"])), 2);
}

#[test]
fn verify_reports_and_passes() {
    for problem in ["mst", "path", "matching", "cutlb"] {
        let out = run(&["verify", "--problem", problem, "--trials", "10", "--seed", "3"]);
        assert_eq!(code(&out), 0, "{problem}: {}{}", stdout(&out), stderr(&out));
        assert!(stdout(&out).starts_with(&format!("PASS {problem}")), "{}", stdout(&out));
    }
    let f = Files::new();
    let g = f.write("g.txt", SAMPLE);
    let out = run(&["verify", "--problem", "matching", "-i", &g, "--trials", "4"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("4 instances, 32 queries"), "{}", stdout(&out));
}

#[test]
fn size_reports() {
    let f = Files::new();
    let g = f.write("g.txt", DIGRAPH);
    let c = f.path("c.dsk");
    let built = build("cut", &g, &c, &[]);
    let reported = run(&["size", "-i", &c]);
    assert_eq!(stdout(&reported), stdout(&built));
    let t = 4 * 2;
    let words = 4 * t * t + 8;
    assert_eq!(
        stdout(&run(&["size", "--problem", "stconn", "--k", "2"])),
        format!("stconn sketch, k = 2: {words} words, {} bytes", 8 * words)
    );
    assert!(Path::new(&c).exists());
}
