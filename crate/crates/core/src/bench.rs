//! Benchmark harness: generate instance grids, run solver modes under a
//! deadline, aggregate per cell and check the scaling observations against
//! the harness's own numbers.
//!
//! # Config file
//!
//! TOML, every key optional:
//!
//! ```toml
//! n = [20, 40, 60]          # agent counts
//! p = [0.25, 0.5]           # edge probabilities
//! ties = [0.0, 50.0]        # tie operations, percent of n
//! per_cell = 10             # instances per (n, p, ties) cell
//! modes = ["decision"]      # decision | all | egalitarian | rank-maximal | almost
//! timeout_s = 60.0          # per solve
//! seed = 1
//! jobs = 1                  # worker threads
//! ```
//!
//! # CSV
//!
//! Aggregates: `n,p,tie_pct,mode,solved,unsolved,timeouts,avg_time_solved_s,avg_time_unsolved_s`.
//! Averages are 0 when the matching count is 0. Per-instance outcomes:
//! `n,p,tie_pct,mode,instance,seed,status,objective`; these carry no timings
//! and are byte-identical across runs with the same seed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{generate, GenConfig};
use crate::solvers::{Mode, Solver, Status};

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub p: f64,
    pub tie_pct: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub grid: Vec<Cell>,
    pub per_cell: usize,
    pub modes: Vec<Mode>,
    pub timeout: Duration,
    pub seed: u64,
    pub jobs: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: Option<Vec<usize>>,
    p: Option<Vec<f64>>,
    ties: Option<Vec<f64>>,
    per_cell: Option<usize>,
    modes: Option<Vec<String>>,
    timeout_s: Option<f64>,
    seed: Option<u64>,
    jobs: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig::from_axes(
            &[20, 40, 60],
            &[0.25, 0.5],
            &[0.0],
            10,
            vec![Mode::Decision],
        )
    }
}

impl BenchConfig {
    /// Cartesian grid, ordered by n, then p, then ties.
    pub fn from_axes(
        ns: &[usize],
        ps: &[f64],
        ties: &[f64],
        per_cell: usize,
        modes: Vec<Mode>,
    ) -> Self {
        let mut grid = Vec::new();
        for &n in ns {
            for &p in ps {
                for &tie_pct in ties {
                    grid.push(Cell { n, p, tie_pct });
                }
            }
        }
        BenchConfig {
            grid,
            per_cell,
            modes,
            timeout: Duration::from_secs(60),
            seed: 1,
            jobs: 1,
        }
    }

    /// Distinct n, p and tie values of the grid, in first-seen order.
    pub fn axes(&self) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
        let (mut ns, mut ps, mut ts) = (Vec::new(), Vec::new(), Vec::new());
        for c in &self.grid {
            if !ns.contains(&c.n) {
                ns.push(c.n);
            }
            if !ps.contains(&c.p) {
                ps.push(c.p);
            }
            if !ts.contains(&c.tie_pct) {
                ts.push(c.tie_pct);
            }
        }
        (ns, ps, ts)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let d = BenchConfig::default();
        let modes = match raw.modes {
            Some(ms) => ms
                .iter()
                .map(|m| m.parse())
                .collect::<Result<Vec<Mode>>>()?,
            None => d.modes,
        };
        let mut cfg = BenchConfig::from_axes(
            &raw.n.unwrap_or_else(|| vec![20, 40, 60]),
            &raw.p.unwrap_or_else(|| vec![0.25, 0.5]),
            &raw.ties.unwrap_or_else(|| vec![0.0]),
            raw.per_cell.unwrap_or(d.per_cell),
            modes,
        );
        if let Some(t) = raw.timeout_s {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "timeout_s = {t} must be positive"
                )));
            }
            cfg.timeout = Duration::from_secs_f64(t);
        }
        cfg.seed = raw.seed.unwrap_or(d.seed);
        cfg.jobs = raw.jobs.unwrap_or(d.jobs);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.grid {
            GenConfig::new(c.n, c.p, 0)
                .with_ties(c.tie_pct)
                .validate()?;
        }
        if self.timeout.is_zero() {
            return Err(Error::InvalidConfig("timeout must be positive".into()));
        }
        if self.jobs == 0 {
            return Err(Error::InvalidConfig("jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Seed of instance `index` in `cell`, independent of grid order.
pub fn instance_seed(base: u64, cell: &Cell, index: usize) -> u64 {
    let mut h = splitmix64(base);
    for word in [
        cell.n as u64,
        cell.p.to_bits(),
        cell.tie_pct.to_bits(),
        index as u64,
    ] {
        h = splitmix64(h ^ word);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub p: f64,
    pub tie_pct: f64,
    pub mode: String,
    pub solved: usize,
    pub unsolved: usize,
    pub timeouts: usize,
    pub avg_time_solved_s: f64,
    pub avg_time_unsolved_s: f64,
}

impl BenchRow {
    pub fn completeness(&self) -> f64 {
        self.p * 100.0
    }

    pub fn instances(&self) -> usize {
        self.solved + self.unsolved + self.timeouts
    }

    /// Mean time over instances that finished, if any did.
    pub fn avg_time(&self) -> Option<f64> {
        let k = self.solved + self.unsolved;
        (k > 0).then(|| {
            (self.avg_time_solved_s * self.solved as f64
                + self.avg_time_unsolved_s * self.unsolved as f64)
                / k as f64
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub n: usize,
    pub p: f64,
    pub tie_pct: f64,
    pub mode: String,
    pub instance: usize,
    pub seed: u64,
    pub status: String,
    pub objective: Option<u64>,
    #[serde(skip)]
    pub time_s: f64,
    #[serde(skip)]
    pub timed_out: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub outcomes: Vec<InstanceOutcome>,
}

/// Runs every mode on `per_cell` generated instances of every cell.
///
/// Only the solve call is timed. Results are ordered by cell, then mode,
/// regardless of which worker finished first.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let mut tasks = Vec::new();
    for ci in 0..cfg.grid.len() {
        for &mode in &cfg.modes {
            for i in 0..cfg.per_cell {
                tasks.push((ci, mode, i));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;

    let outcomes: Vec<InstanceOutcome> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(ci, mode, i)| {
                let cell = cfg.grid[ci];
                let seed = instance_seed(cfg.seed, &cell, i);
                let gen = GenConfig::new(cell.n, cell.p, seed).with_ties(cell.tie_pct);
                let inst = generate(&gen).expect("grid validated").instance;
                let start = Instant::now();
                let r = Solver::new(&inst).with_timeout(cfg.timeout).solve(mode);
                let time_s = start.elapsed().as_secs_f64();
                InstanceOutcome {
                    n: cell.n,
                    p: cell.p,
                    tie_pct: cell.tie_pct,
                    mode: mode.to_string(),
                    instance: i,
                    seed,
                    status: if r.stats.timed_out {
                        "timeout".into()
                    } else {
                        r.status.to_string()
                    },
                    objective: r.objective,
                    time_s,
                    timed_out: r.stats.timed_out,
                }
            })
            .collect()
    });

    let mut rows = Vec::new();
    for chunk in outcomes.chunks(cfg.per_cell.max(1)) {
        let Some(first) = chunk.first() else { continue };
        let mut row = BenchRow {
            n: first.n,
            p: first.p,
            tie_pct: first.tie_pct,
            mode: first.mode.clone(),
            solved: 0,
            unsolved: 0,
            timeouts: 0,
            avg_time_solved_s: 0.0,
            avg_time_unsolved_s: 0.0,
        };
        for o in chunk {
            if o.timed_out {
                row.timeouts += 1;
            } else if o.status == Status::NoStable.as_str() {
                row.unsolved += 1;
                row.avg_time_unsolved_s += o.time_s;
            } else {
                row.solved += 1;
                row.avg_time_solved_s += o.time_s;
            }
        }
        if row.solved > 0 {
            row.avg_time_solved_s /= row.solved as f64;
        }
        if row.unsolved > 0 {
            row.avg_time_unsolved_s /= row.unsolved as f64;
        }
        rows.push(row);
    }
    Ok(BenchReport { rows, outcomes })
}

pub fn write_rows_csv<W: io::Write>(rows: &[BenchRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_rows_csv<R: io::Read>(r: R) -> Result<Vec<BenchRow>> {
    let mut rd = csv::Reader::from_reader(r);
    rd.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

pub fn write_outcomes_csv<W: io::Write>(outcomes: &[InstanceOutcome], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for o in outcomes {
        wr.serialize(o)?;
    }
    wr.flush()?;
    Ok(())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Inconsistent,
    InsufficientData,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Inconsistent => "inconsistent",
            Verdict::InsufficientData => "insufficient data",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub id: &'static str,
    pub claim: &'static str,
    pub verdict: Verdict,
    /// Supporting aggregates, one line per comparison.
    pub evidence: Vec<String>,
}

/// How far apart the solved and unsolved averages may be and still count as comparable.
pub const COMPARABLE_RATIO: f64 = 2.0;

fn verdict(checks: &[bool]) -> Verdict {
    if checks.is_empty() {
        Verdict::InsufficientData
    } else if checks.iter().all(|&c| c) {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    }
}

type CellKey = (usize, u64, u64);

fn cell_key(r: &BenchRow) -> CellKey {
    (r.n, r.p.to_bits(), r.tie_pct.to_bits())
}

fn fmt_cell(r: &BenchRow) -> String {
    format!("n={} p={} ties={}%", r.n, r.p, r.tie_pct)
}

/// Checks whether a time series grows strictly along `axis`, grouping rows
/// that agree on everything else.
fn monotone<K: Ord>(
    rows: &[BenchRow],
    group: impl Fn(&BenchRow) -> K,
    describe: impl Fn(&BenchRow) -> String,
    axis: impl Fn(&BenchRow) -> f64,
    label: &str,
) -> (Vec<bool>, Vec<String>) {
    let mut groups: BTreeMap<K, Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        groups.entry(group(r)).or_default().push(r);
    }
    let mut checks = Vec::new();
    let mut evidence = Vec::new();
    for (_, mut g) in groups {
        g.sort_by(|a, b| axis(a).total_cmp(&axis(b)));
        let series: Vec<(f64, f64)> = g
            .iter()
            .filter_map(|r| r.avg_time().map(|t| (axis(r), t)))
            .collect();
        if series.len() < 2 {
            continue;
        }
        let ok = series.windows(2).all(|w| w[1].1 > w[0].1);
        checks.push(ok);
        let pts: Vec<String> = series
            .iter()
            .map(|(a, t)| format!("{label}={a}: {t:.6}s"))
            .collect();
        evidence.push(format!("{}: {}", describe(g[0]), pts.join(" -> ")));
    }
    (checks, evidence)
}

pub fn observations(rows: &[BenchRow]) -> Vec<Observation> {
    let mut out = Vec::new();
    let mut by_cell: BTreeMap<CellKey, BTreeMap<&str, &BenchRow>> = BTreeMap::new();
    for r in rows {
        by_cell
            .entry(cell_key(r))
            .or_default()
            .insert(r.mode.as_str(), r);
    }
    let time_of = |modes: &BTreeMap<&str, &BenchRow>, m: Mode| {
        modes.get(m.as_str()).and_then(|r| r.avg_time())
    };

    // O1
    let mut checks = Vec::new();
    let mut ev = Vec::new();
    for r in rows.iter().filter(|r| r.mode == Mode::Decision.as_str()) {
        if r.solved > 0 && r.unsolved > 0 {
            let (a, b) = (r.avg_time_solved_s, r.avg_time_unsolved_s);
            let ratio = a.max(b) / a.min(b).max(f64::MIN_POSITIVE);
            checks.push(ratio <= COMPARABLE_RATIO);
            ev.push(format!(
                "{}: with solution {a:.6}s, without {b:.6}s, ratio {ratio:.2}",
                fmt_cell(r)
            ));
        }
    }
    out.push(Observation {
        id: "O1",
        claim: "finding a stable matching and proving none exists take comparable time",
        verdict: verdict(&checks),
        evidence: ev,
    });

    // O2
    let mut checks = Vec::new();
    let mut ev = Vec::new();
    for modes in by_cell.values() {
        if let (Some(e), Some(r)) = (
            time_of(modes, Mode::Egalitarian),
            time_of(modes, Mode::RankMaximal),
        ) {
            checks.push(e <= r);
            ev.push(format!(
                "{}: egalitarian {e:.6}s, rank-maximal {r:.6}s",
                fmt_cell(modes.values().next().expect("non-empty"))
            ));
        }
    }
    let generally = if checks.is_empty() {
        Verdict::InsufficientData
    } else if 2 * checks.iter().filter(|&&c| c).count() >= checks.len() {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    out.push(Observation {
        id: "O2",
        claim: "egalitarian is generally no slower than rank-maximal",
        verdict: generally,
        evidence: ev,
    });

    // O3
    let mut checks = Vec::new();
    let mut ev = Vec::new();
    for modes in by_cell.values() {
        let Some(a) = time_of(modes, Mode::Almost) else {
            continue;
        };
        let others: Vec<f64> = [Mode::Egalitarian, Mode::RankMaximal]
            .into_iter()
            .filter_map(|m| time_of(modes, m))
            .collect();
        if others.is_empty() {
            continue;
        }
        let worst = others.iter().copied().fold(f64::MIN, f64::max);
        checks.push(a > worst);
        ev.push(format!(
            "{}: almost {a:.6}s, slowest fairness mode {worst:.6}s",
            fmt_cell(modes.values().next().expect("non-empty"))
        ));
    }
    out.push(Observation {
        id: "O3",
        claim: "almost-stable takes longer than egalitarian and rank-maximal",
        verdict: verdict(&checks),
        evidence: ev,
    });

    // O4
    let mut checks = Vec::new();
    let mut ev = Vec::new();
    for modes in by_cell.values() {
        let Some(d) = time_of(modes, Mode::Decision) else {
            continue;
        };
        for m in [Mode::Egalitarian, Mode::RankMaximal, Mode::Almost] {
            if let Some(t) = time_of(modes, m) {
                checks.push(t > d);
                ev.push(format!(
                    "{}: {m} {t:.6}s vs decision {d:.6}s",
                    fmt_cell(modes.values().next().expect("non-empty"))
                ));
            }
        }
    }
    out.push(Observation {
        id: "O4",
        claim: "optimisation variants take longer than the decision problem",
        verdict: verdict(&checks),
        evidence: ev,
    });

    // O5, O6
    let (checks, ev) = monotone(
        rows,
        |r| (r.n, r.tie_pct.to_bits(), r.mode.clone()),
        |r| format!("n={} ties={}% mode={}", r.n, r.tie_pct, r.mode),
        |r| r.p,
        "p",
    );
    out.push(Observation {
        id: "O5",
        claim: "time grows with the completeness degree",
        verdict: verdict(&checks),
        evidence: ev,
    });
    let (checks, ev) = monotone(
        rows,
        |r| (r.p.to_bits(), r.tie_pct.to_bits(), r.mode.clone()),
        |r| format!("p={} ties={}% mode={}", r.p, r.tie_pct, r.mode),
        |r| r.n as f64,
        "n",
    );
    out.push(Observation {
        id: "O6",
        claim: "time grows with the number of agents",
        verdict: verdict(&checks),
        evidence: ev,
    });

    // O7, O8: tied rows against the untied row of the same (n, p, mode)
    let mut time_checks = Vec::new();
    let mut time_ev = Vec::new();
    let mut solv_checks = Vec::new();
    let mut solv_ev = Vec::new();
    for base in rows.iter().filter(|r| r.tie_pct == 0.0) {
        for tied in rows
            .iter()
            .filter(|r| r.tie_pct > 0.0 && r.n == base.n && r.p == base.p && r.mode == base.mode)
        {
            if let (Some(t0), Some(t1)) = (base.avg_time(), tied.avg_time()) {
                time_checks.push(t1 > t0);
                time_ev.push(format!(
                    "{} mode={}: {t1:.6}s vs untied {t0:.6}s",
                    fmt_cell(tied),
                    tied.mode
                ));
            }
            if base.mode == Mode::Decision.as_str() {
                solv_checks.push(tied.solved >= base.solved);
                solv_ev.push(format!(
                    "{}: {} with a stable matching vs {} untied",
                    fmt_cell(tied),
                    tied.solved,
                    base.solved
                ));
            }
        }
    }
    out.push(Observation {
        id: "O7",
        claim: "instances with ties take longer than without",
        verdict: verdict(&time_checks),
        evidence: time_ev,
    });
    out.push(Observation {
        id: "O8",
        claim: "adding ties does not reduce the number of solvable instances",
        verdict: verdict(&solv_checks),
        evidence: solv_ev,
    });
    out
}

pub fn report_observations(rows: &[BenchRow]) -> String {
    let mut s = String::new();
    for o in observations(rows) {
        let _ = writeln!(s, "{}: {} -- {}", o.id, o.verdict.as_str(), o.claim);
        for e in &o.evidence {
            let _ = writeln!(s, "    {e}");
        }
    }
    s
}
