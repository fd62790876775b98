//! End-to-end checks of the `klsep` binary: exit codes, determinism, and
//! the WG1 emit/ingest round trip.

use std::path::PathBuf;
use std::process::{Command, Output};

fn klsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klsep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(klsep(&["group", "--family", "B", "--rank", "3"]).status.code(), Some(0));
    // Unknown family and unparsable elements: bad config.
    assert_eq!(klsep(&["group", "--family", "Q", "--rank", "3"]).status.code(), Some(2));
    assert_eq!(
        klsep(&["klbasis", "--family", "A", "--rank", "2", "--element", "xyz"])
            .status
            .code(),
        Some(2)
    );
    // Valid family, unsupported rank.
    assert_eq!(klsep(&["group", "--family", "D", "--rank", "3"]).status.code(), Some(3));
    assert_eq!(
        klsep(&["torsion", "--family", "A", "--rank", "2"]).status.code(),
        Some(3)
    );
    // clap usage errors already use 2.
    assert_eq!(klsep(&["group"]).status.code(), Some(2));
}

#[test]
fn klbasis_defining_example() {
    let out = klsep(&["klbasis", "--family", "A", "--rank", "1", "--element", "s"]);
    assert!(stdout(&out).contains("h_s = H_s + v^-1 H_e"));
}

#[test]
fn sigma_deterministic_and_thread_independent() {
    let base = klsep(&["sigma", "--family", "B", "--rank", "3", "--include-fw"]);
    for threads in ["1", "4"] {
        let other = klsep(&[
            "sigma", "--family", "B", "--rank", "3", "--include-fw", "--threads", threads,
        ]);
        assert_eq!(stdout(&base), stdout(&other), "threads={}", threads);
    }
}

#[test]
fn wgraph_roundtrip_matches_in_process_sigma() {
    let dir = std::env::temp_dir().join(format!("klsep-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let wg: PathBuf = dir.join("b3.wg1");
    let wg_s = wg.to_str().unwrap();

    let emit = klsep(&["wgraph", "--family", "B", "--rank", "3", "--output", wg_s]);
    assert_eq!(emit.status.code(), Some(0));

    let direct = klsep(&["sigma", "--family", "B", "--rank", "3", "--include-fw"]);
    let via_file = klsep(&[
        "sigma", "--family", "B", "--rank", "3", "--include-fw", "--from-wgraph", wg_s,
    ]);
    assert_eq!(stdout(&direct), stdout(&via_file), "byte-identical reports");

    // Ingest + re-emit is canonical.
    let reemit = klsep(&["wgraph", "--family", "B", "--rank", "3", "--input", wg_s]);
    assert_eq!(stdout(&reemit), std::fs::read_to_string(&wg).unwrap());

    // A graph for the wrong spec is rejected as bad input.
    let wrong = klsep(&["sigma", "--family", "A", "--rank", "2", "--from-wgraph", wg_s]);
    assert_eq!(wrong.status.code(), Some(2));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cache_hit_is_reported_and_consistent() {
    let dir = std::env::temp_dir().join(format!("klsep-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let dir_s = dir.to_str().unwrap();
    let args = ["klbasis", "--family", "B", "--rank", "2", "--cache", dir_s];
    let miss = klsep(&args);
    let hit = klsep(&args);
    assert!(stdout(&miss).contains("# cache miss"));
    assert!(stdout(&hit).contains("# cache hit"));
    // Body after the header is identical either way.
    let body = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(body(&stdout(&miss)), body(&stdout(&hit)));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn propagate_contradiction_is_bad_input() {
    let dir = std::env::temp_dir().join(format!("klsep-prop-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("assume.txt");
    std::fs::write(&file, "st neq\n").unwrap();
    let out = klsep(&[
        "propagate", "--family", "A", "--rank", "2", "--assume", file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}
