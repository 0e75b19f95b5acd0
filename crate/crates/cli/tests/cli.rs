use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use srti::fixtures::{SRI4, SRI7, SRI8};
use tempfile::TempDir;

fn srti(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srti"))
        .args(args)
        .env_remove("SRTI_SEED")
        .output()
        .expect("run srti")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

#[test]
fn solve_decision_exit_codes() {
    let dir = TempDir::new().unwrap();
    let sri7 = write(&dir, "sri7.txt", SRI7);
    let sri4 = write(&dir, "sri4.txt", SRI4);

    let o = srti(&["solve", "--instance", &sri7, "--mode", "decision"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(
        out.contains("a b\n")
            && out.contains("c d\n")
            && out.contains("f g\n")
            && out.contains("e e\n"),
        "{out}"
    );
    assert!(out.ends_with("status: stable\n"));

    let o = srti(&["solve", "--instance", &sri4, "--mode", "decision"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "status: no-stable\n");
}

#[test]
fn solve_objectives() {
    let dir = TempDir::new().unwrap();
    let sri8 = write(&dir, "sri8.txt", SRI8);
    let sri4 = write(&dir, "sri4.txt", SRI4);

    let o = srti(&["solve", "--instance", &sri8, "--mode", "egalitarian"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(
        out.contains("objective: 17\n")
            && out.contains("d e\n")
            && out.contains("status: optimal\n"),
        "{out}"
    );

    let o = srti(&["solve", "--instance", &sri8, "--mode", "rank-maximal"]);
    let out = stdout(&o);
    assert!(
        out.contains("d g\n") && out.contains("e f\n") && out.contains("profile: (4,1,2,0,0,1)\n"),
        "{out}"
    );

    let o = srti(&["solve", "--instance", &sri4, "--mode", "almost"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("objective: 1\n"));

    let o = srti(&["solve", "--instance", &sri8, "--mode", "all"]);
    let out = stdout(&o);
    assert_eq!(out.matches("% matching").count(), 2);
    assert!(out.contains("objective: 2\n"));
    let o = srti(&[
        "solve",
        "--instance",
        &sri8,
        "--mode",
        "all",
        "--limit",
        "1",
    ]);
    assert!(stdout(&o).contains("objective: 1\n"));
}

#[test]
fn solve_output_feeds_check() {
    let dir = TempDir::new().unwrap();
    let sri4 = write(&dir, "sri4.txt", SRI4);
    let sri8 = write(&dir, "sri8.txt", SRI8);

    let o = srti(&["solve", "--instance", &sri8, "--mode", "egalitarian"]);
    let m = write(&dir, "m8.txt", &stdout(&o));
    let o = srti(&["check", "--instance", &sri8, "--matching", &m]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "stable\n");

    let m = write(&dir, "m4.txt", "a b\nc d\n");
    let o = srti(&[
        "check",
        "--instance",
        &sri4,
        "--matching",
        &m,
        "--list-blocking",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "unstable: 1 blocking pair\nb c\n");
}

#[test]
fn check_rejects_bad_matching() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.txt", "a: b\nb: a\nc: a\n");
    let m = write(&dir, "m.txt", "a c\n");
    let o = srti(&["check", "--instance", &inst, "--matching", &m]);
    assert_eq!(o.status.code(), Some(3));
    let m = write(&dir, "m.txt", "a z\n");
    assert_eq!(
        srti(&["check", "--instance", &inst, "--matching", &m])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn usage_and_parse_errors() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.txt", "a: b b\nb: a\n");
    let o = srti(&["solve", "--instance", &bad]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    assert_eq!(
        srti(&["solve", "--instance", &bad, "--mode", "fast"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(srti(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(srti(&["--help"]).status.code(), Some(0));
}

#[test]
fn generate_is_reproducible_and_seed_env_applies() {
    let args = ["generate", "--n", "12", "--p", "0.5", "--ties-pct", "50"];
    let a = srti(&[&args[..], &["--seed", "7"]].concat());
    let b = srti(&[&args[..], &["--seed", "7"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("% meta: n=12 p=0.5 seed=7 tie_ops=6 completeness=50\n"));

    let env = Command::new(env!("CARGO_BIN_EXE_srti"))
        .args(args)
        .env("SRTI_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
    let default = srti(&args);
    assert_ne!(default.stdout, a.stdout);
}

#[test]
fn generated_instance_round_trips_through_solve() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "g.txt");
    let o = srti(&[
        "generate", "--n", "10", "--p", "0.5", "--seed", "3", "-o", &out,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = srti(&["solve", "--instance", &out, "--mode", "almost", "--stats"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nodes: "));
}

#[test]
fn af_program_and_solve() {
    let dir = TempDir::new().unwrap();
    let sri4 = write(&dir, "sri4.txt", SRI4);
    let sri8 = write(&dir, "sri8.txt", SRI8);
    let lp = path(&dir, "sri4.lp");

    let o = srti(&["af", "--instance", &sri4, "--emit-lp", &lp]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "arguments: 6\nattacks: 12\n");
    let program = fs::read_to_string(&lp).unwrap();
    assert_eq!(program.lines().count(), 6);
    assert!(program
        .lines()
        .all(|l| l.starts_with("in(") && l.ends_with('.')));

    let o = srti(&["af", "--instance", &sri8, "--solve"]);
    let out = stdout(&o);
    assert!(
        out.contains("extensions: 2\n") && out.contains("agree\n"),
        "{out}"
    );
}

#[test]
fn bench_and_report() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "grid.toml",
        "n = [8, 16]\np = [0.5]\nties = [0.0]\nper_cell = 3\nmodes = [\"decision\", \"egalitarian\"]\ntimeout_s = 30\nseed = 5\n",
    );
    let csv = path(&dir, "rows.csv");
    let outcomes = path(&dir, "outcomes.csv");
    let o = srti(&[
        "bench",
        "--config",
        &cfg,
        "-o",
        &csv,
        "--outcomes",
        &outcomes,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let rows = fs::read_to_string(&csv).unwrap();
    let mut lines = rows.lines();
    assert_eq!(
        lines.next(),
        Some("n,p,tie_pct,mode,solved,unsolved,timeouts,avg_time_solved_s,avg_time_unsolved_s")
    );
    assert_eq!(lines.count(), 4);

    let first = fs::read(&outcomes).unwrap();
    let again = path(&dir, "again.csv");
    srti(&[
        "bench",
        "--config",
        &cfg,
        "-o",
        &path(&dir, "x.csv"),
        "--outcomes",
        &again,
    ]);
    assert_eq!(first, fs::read(&again).unwrap());

    let o = srti(&["report", &csv]);
    assert_eq!(o.status.code(), Some(0));
    let report = stdout(&o);
    for id in ["O1", "O2", "O3", "O4", "O5", "O6", "O7", "O8"] {
        assert!(report.contains(&format!("{id}: ")), "{report}");
    }
}

#[test]
fn bench_flags_override_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "grid.toml", "n = [8]\np = [0.5]\nper_cell = 2\n");
    let o = srti(&["bench", "--config", &cfg, "--n", "6,10", "--per-cell", "1"]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 3, "{out}");
    assert!(out.contains("\n6,0.5,0.0,decision,") && out.contains("\n10,0.5,0.0,decision,"));
}

#[test]
fn bench_instance_reproduces_standalone() {
    let dir = TempDir::new().unwrap();
    let outcomes = path(&dir, "o.csv");
    srti(&[
        "bench",
        "--n",
        "12",
        "--p",
        "0.5",
        "--per-cell",
        "3",
        "--modes",
        "egalitarian",
        "--outcomes",
        &outcomes,
        "-o",
        &path(&dir, "r.csv"),
    ]);
    let text = fs::read_to_string(&outcomes).unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let inst = path(&dir, "i.txt");
        srti(&[
            "generate",
            "--n",
            f[0],
            "--p",
            f[1],
            "--ties-pct",
            f[2],
            "--seed",
            f[5],
            "-o",
            &inst,
        ]);
        assert!(Path::new(&inst).exists());
        let out = stdout(&srti(&["solve", "--instance", &inst, "--mode", f[3]]));
        assert!(
            out.ends_with(&format!("status: {}\n", f[6])),
            "{out} vs {line}"
        );
        if !f[7].is_empty() {
            assert!(
                out.contains(&format!("objective: {}\n", f[7])),
                "{out} vs {line}"
            );
        }
    }
}
