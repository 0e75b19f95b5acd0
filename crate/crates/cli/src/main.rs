//! `srti`: generate, solve, check and benchmark stable roommates instances.
//!
//! Exit codes: 0 success (stable / optimal), 1 `check` found blocking pairs,
//! 2 no stable matching, 3 error, 4 the deadline passed before a conclusion.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use srti::af::{build_af, emit_logic_program, extension_to_matching, stable_extensions};
use srti::bench::{
    read_rows_csv, report_observations, run_bench, write_outcomes_csv, write_rows_csv, BenchConfig,
};
use srti::generator::{generate, GenConfig};
use srti::{
    blocking_pairs, egalitarian_cost, matching_to_text, parse_instance, parse_matching,
    validate_matching, Instance, Mode, Solver, Status,
};

const EXIT_UNSTABLE: u8 = 1;
const EXIT_NO_STABLE: u8 = 2;
const EXIT_ERROR: u8 = 3;
const EXIT_TIMEOUT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "srti",
    version,
    about = "Stable roommates with ties and incomplete lists"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance
    Generate(GenerateArgs),
    /// Solve an instance in one of the solver modes
    Solve(SolveArgs),
    /// Check a matching for blocking pairs
    Check(CheckArgs),
    /// Build the argumentation framework of an instance
    Af(AfArgs),
    /// Run a benchmark grid and write CSV
    Bench(BenchArgs),
    /// Evaluate the scaling observations on a benchmark CSV
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, env = "SRTI_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    ties_pct: f64,
    /// Also add x to y's list on each tie operation
    #[arg(long)]
    symmetric_ties: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "decision")]
    mode: Mode,
    /// Stop after K matchings (mode all)
    #[arg(long)]
    limit: Option<usize>,
    /// Print search statistics to stderr
    #[arg(long)]
    stats: bool,
    /// Deadline in seconds
    #[arg(long)]
    timeout: Option<f64>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    matching: PathBuf,
    #[arg(long)]
    list_blocking: bool,
}

#[derive(Args)]
struct AfArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Write the logic program to OUT (`-` for stdout)
    #[arg(long, value_name = "OUT")]
    emit_lp: Option<PathBuf>,
    /// Enumerate stable extensions and print them as matchings
    #[arg(long)]
    solve: bool,
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    /// TOML file with grid and run settings; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    ties: Option<Vec<f64>>,
    #[arg(long)]
    per_cell: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<Mode>>,
    /// Per-solve deadline in seconds
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long, env = "SRTI_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Aggregate CSV, stdout if absent
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Per-instance outcomes CSV
    #[arg(long)]
    outcomes: Option<PathBuf>,
    /// Print the observation report to stderr
    #[arg(long)]
    report: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Aggregate CSV written by `bench`
    csv: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Generate(a) => cmd_generate(a),
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Check(a) => cmd_check(a),
        Cmd::Af(a) => cmd_af(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Report(a) => cmd_report(a),
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        _ => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn seconds(s: f64) -> Result<Duration> {
    if !(s > 0.0 && s.is_finite()) {
        bail!("timeout must be a positive number of seconds, got {s}");
    }
    Ok(Duration::from_secs_f64(s))
}

fn cmd_generate(a: GenerateArgs) -> Result<u8> {
    let mut cfg = GenConfig::new(a.n, a.p, a.seed).with_ties(a.ties_pct);
    cfg.symmetric_ties = a.symmetric_ties;
    let outcome = generate(&cfg)?;
    if outcome.warning {
        eprintln!(
            "warning: none of the {} tie operations could be applied",
            cfg.tie_count()
        );
    } else if outcome.skipped > 0 {
        eprintln!(
            "warning: {} of {} tie operations skipped",
            outcome.skipped,
            cfg.tie_count()
        );
    }
    write_out(a.out.as_deref(), &outcome.instance.to_text())?;
    Ok(0)
}

fn cmd_solve(a: SolveArgs) -> Result<u8> {
    let inst = read_instance(&a.instance)?;
    let mut solver = Solver::new(&inst);
    if let Some(t) = a.timeout {
        solver = solver.with_timeout(seconds(t)?);
    }
    let mut out = String::new();

    let (status, timed_out, stats) = if a.mode == Mode::All {
        let e = solver.enumerate(a.limit);
        for (i, m) in e.matchings.iter().enumerate() {
            out.push_str(&format!("% matching {}\n", i + 1));
            out.push_str(&matching_to_text(&inst, m));
        }
        out.push_str(&format!("objective: {}\n", e.matchings.len()));
        let status = match (e.matchings.is_empty(), e.stats.timed_out) {
            (false, _) => Status::Stable,
            (true, false) => Status::NoStable,
            (true, true) => Status::Unknown,
        };
        (status, e.stats.timed_out, e.stats)
    } else {
        let r = solver.solve(a.mode);
        if let Some(m) = &r.matching {
            out.push_str(&matching_to_text(&inst, m));
            // decision and rank-maximal have no objective of their own
            let objective = r.objective.unwrap_or_else(|| egalitarian_cost(&inst, m));
            out.push_str(&format!("objective: {objective}\n"));
        }
        if let (Mode::RankMaximal, Some(p)) = (a.mode, &r.profile) {
            out.push_str(&format!("profile: {p}\n"));
        }
        (r.status, r.stats.timed_out, r.stats)
    };

    let word = if timed_out && status != Status::NoStable {
        "timeout"
    } else {
        status.as_str()
    };
    out.push_str(&format!("status: {word}\n"));
    io::stdout().write_all(out.as_bytes())?;
    if a.stats {
        eprintln!("nodes: {}", stats.nodes);
        eprintln!("time_s: {:.6}", stats.elapsed.as_secs_f64());
        eprintln!("timed_out: {}", stats.timed_out);
    }
    Ok(match status {
        _ if timed_out => EXIT_TIMEOUT,
        Status::Stable | Status::Optimal => 0,
        Status::NoStable => EXIT_NO_STABLE,
        Status::Unknown => EXIT_TIMEOUT,
    })
}

fn cmd_check(a: CheckArgs) -> Result<u8> {
    let inst = read_instance(&a.instance)?;
    let text = fs::read_to_string(&a.matching)
        .with_context(|| format!("reading {}", a.matching.display()))?;
    let m = parse_matching(&inst, &text)
        .with_context(|| format!("parsing {}", a.matching.display()))?;
    if !validate_matching(&inst, &m) {
        bail!(
            "{} pairs agents that are not mutually acceptable",
            a.matching.display()
        );
    }
    let bps = blocking_pairs(&inst, &m);
    let mut out = String::new();
    if bps.is_empty() {
        out.push_str("stable\n");
    } else {
        let noun = if bps.len() == 1 { "pair" } else { "pairs" };
        out.push_str(&format!("unstable: {} blocking {noun}\n", bps.len()));
    }
    if a.list_blocking {
        for bp in &bps {
            out.push_str(&format!("{} {}\n", inst.name(bp.x), inst.name(bp.y)));
        }
    }
    io::stdout().write_all(out.as_bytes())?;
    Ok(if bps.is_empty() { 0 } else { EXIT_UNSTABLE })
}

fn cmd_af(a: AfArgs) -> Result<u8> {
    let inst = read_instance(&a.instance)?;
    let af = build_af(&inst);
    let to_stdout = a.emit_lp.as_deref() == Some(Path::new("-"));
    let mut out = String::new();
    if !to_stdout {
        out.push_str(&format!(
            "arguments: {}\nattacks: {}\n",
            af.len(),
            af.attack_count()
        ));
    }
    if let Some(path) = &a.emit_lp {
        write_out(Some(path), &emit_logic_program(&af))?;
    }
    if a.solve {
        let exts = stable_extensions(&af, a.limit)?;
        let mut from_af = Vec::with_capacity(exts.len());
        for (i, e) in exts.iter().enumerate() {
            let m = extension_to_matching(&inst, &af, e)?;
            out.push_str(&format!("% extension {}\n", i + 1));
            out.push_str(&matching_to_text(&inst, &m));
            from_af.push(m);
        }
        out.push_str(&format!("extensions: {}\n", exts.len()));
        if a.limit.is_none() {
            let mut searched = Solver::new(&inst).enumerate(None).matchings;
            searched.sort();
            from_af.sort();
            let verdict = if searched == from_af {
                "agree"
            } else {
                "disagree"
            };
            out.push_str(&format!(
                "search: {} stable matchings, {verdict}\n",
                searched.len()
            ));
        }
    }
    if to_stdout {
        eprint!("{out}");
    } else {
        io::stdout().write_all(out.as_bytes())?;
    }
    Ok(0)
}

fn cmd_bench(a: BenchArgs) -> Result<u8> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            BenchConfig::from_toml(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => BenchConfig::default(),
    };
    if a.n.is_some() || a.p.is_some() || a.ties.is_some() {
        let (ns, ps, ts) = cfg.axes();
        cfg.grid = BenchConfig::from_axes(
            &a.n.unwrap_or(ns),
            &a.p.unwrap_or(ps),
            &a.ties.unwrap_or(ts),
            cfg.per_cell,
            Vec::new(),
        )
        .grid;
    }
    if let Some(k) = a.per_cell {
        cfg.per_cell = k;
    }
    if let Some(m) = a.modes {
        cfg.modes = m;
    }
    if let Some(t) = a.timeout {
        cfg.timeout = seconds(t)?;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(j) = a.jobs {
        cfg.jobs = j;
    }

    let report = run_bench(&cfg)?;
    let mut buf = Vec::new();
    write_rows_csv(&report.rows, &mut buf)?;
    write_out(a.out.as_deref(), std::str::from_utf8(&buf)?)?;
    if let Some(path) = &a.outcomes {
        let f = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
        write_outcomes_csv(&report.outcomes, f)?;
    }
    if a.report {
        eprint!("{}", report_observations(&report.rows));
    }
    Ok(0)
}

fn cmd_report(a: ReportArgs) -> Result<u8> {
    let f = fs::File::open(&a.csv).with_context(|| format!("reading {}", a.csv.display()))?;
    let rows = read_rows_csv(f).with_context(|| format!("parsing {}", a.csv.display()))?;
    io::stdout().write_all(report_observations(&rows).as_bytes())?;
    Ok(0)
}
