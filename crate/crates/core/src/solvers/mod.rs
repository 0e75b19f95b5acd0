//! Exact solvers for SRI/SRTI under weak stability.
//!
//! All modes share one search engine ([`search`]); they differ only in whether
//! stability is propagated and in how nodes are bounded:
//!
//! | mode          | stability | bound                                                  |
//! |---------------|-----------|--------------------------------------------------------|
//! | decision/all  | yes       | none                                                   |
//! | egalitarian   | yes       | sum over agents of the best rank still available       |
//! | rank-maximal  | yes       | per-rank optimistic counts, one stage per rank         |
//! | almost-stable | no        | pairs that block in every completion of the node       |
//!
//! Among co-optimal matchings the first one in search order is returned.

mod oracle;
mod search;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::error::Error;
use crate::instance::{AgentId, Instance};
use crate::matching::Matching;
use crate::stability;

pub use oracle::{brute_force_oracle, OracleOutcome, ORACLE_MAX_AGENTS};

use search::{Domains, Engine, Flow, Goal};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Decision,
    All,
    Egalitarian,
    RankMaximal,
    Almost,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Decision,
        Mode::All,
        Mode::Egalitarian,
        Mode::RankMaximal,
        Mode::Almost,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Decision => "decision",
            Mode::All => "all",
            Mode::Egalitarian => "egalitarian",
            Mode::RankMaximal => "rank-maximal",
            Mode::Almost => "almost",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown mode `{s}`")))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Stable,
    NoStable,
    Optimal,
    /// The deadline passed before anything could be concluded.
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Stable => "stable",
            Status::NoStable => "no-stable",
            Status::Optimal => "optimal",
            Status::Unknown => "unknown",
        }
    }

    pub fn has_matching(self) -> bool {
        matches!(self, Status::Stable | Status::Optimal)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Number of matched agents at each rank; `counts()[i]` is rank `i + 1`.
///
/// Ordered lexicographically so that a greater profile is better.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Profile(Vec<u32>);

impl Profile {
    pub fn of(inst: &Instance, m: &Matching) -> Self {
        let rt = inst.rank_table();
        let mut counts = Vec::new();
        for x in inst.agents() {
            let y = m.partner(x);
            if y == x {
                continue;
            }
            let r = rt.rank(x, y).expect("matched partner is acceptable") as usize;
            if counts.len() < r {
                counts.resize(r, 0);
            }
            counts[r - 1] += 1;
        }
        Profile(counts)
    }

    pub fn from_counts(mut counts: Vec<u32>) -> Self {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        Profile(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    /// Count at 1-based rank `r`.
    pub fn at(&self, r: usize) -> u32 {
        self.0.get(r - 1).copied().unwrap_or(0)
    }

    pub fn matched(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Profile {
    fn cmp(&self, other: &Self) -> Ordering {
        let len = self.0.len().max(other.0.len());
        (1..=len)
            .map(|r| self.at(r).cmp(&other.at(r)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for Profile {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Egalitarian cost: sum of partner ranks, single agents counted at their single rank.
pub fn egalitarian_cost(inst: &Instance, m: &Matching) -> u64 {
    let rt = inst.rank_table();
    inst.agents()
        .map(|x| u64::from(rt.partner_rank(x, m.partner(x))))
        .sum()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub nodes: u64,
    pub elapsed: Duration,
    pub timed_out: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub status: Status,
    pub matching: Option<Matching>,
    /// Egalitarian cost or blocking-pair count, depending on the mode.
    pub objective: Option<u64>,
    pub profile: Option<Profile>,
    pub stats: Stats,
}

impl SolveResult {
    fn new(
        inst: &Instance,
        status: Status,
        matching: Option<Matching>,
        objective: Option<u64>,
        stats: Stats,
    ) -> Self {
        let profile = matching.as_ref().map(|m| Profile::of(inst, m));
        SolveResult {
            status,
            matching,
            objective,
            profile,
            stats,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub matchings: Vec<Matching>,
    /// False when the limit or the deadline cut the enumeration short.
    pub complete: bool,
    pub stats: Stats,
}

/// Solver bound to one instance, with an optional deadline.
#[derive(Clone, Debug)]
pub struct Solver<'a> {
    inst: &'a Instance,
    timeout: Option<Duration>,
}

struct FirstStable {
    found: Option<Matching>,
}

impl Goal for FirstStable {
    fn prune(&self, _: &Domains) -> bool {
        false
    }

    fn leaf(&mut self, dom: &Domains, m: Matching) -> Flow {
        debug_assert!(stability::is_stable(dom.inst, &m));
        self.found = Some(m);
        Flow::Stop
    }
}

struct CollectAll {
    limit: Option<usize>,
    found: Vec<Matching>,
    truncated: bool,
}

impl Goal for CollectAll {
    fn prune(&self, _: &Domains) -> bool {
        false
    }

    fn leaf(&mut self, dom: &Domains, m: Matching) -> Flow {
        debug_assert!(stability::is_stable(dom.inst, &m));
        if self.limit.is_some_and(|l| self.found.len() >= l) {
            self.truncated = true;
            return Flow::Stop;
        }
        self.found.push(m);
        Flow::Continue
    }
}

struct MinCost {
    best: Option<(u64, Matching)>,
}

impl Goal for MinCost {
    fn prune(&self, dom: &Domains) -> bool {
        let Some((incumbent, _)) = &self.best else {
            return false;
        };
        let n = dom.inst.len();
        let bound: u64 = (0..n).map(|x| u64::from(dom.best_rank(x))).sum();
        bound >= *incumbent
    }

    fn leaf(&mut self, dom: &Domains, m: Matching) -> Flow {
        let cost = egalitarian_cost(dom.inst, &m);
        if self.best.as_ref().is_none_or(|(c, _)| cost < *c) {
            self.best = Some((cost, m));
        }
        Flow::Continue
    }
}

/// One stage of the rank-maximal chain: maximise the count at rank `stage`
/// while holding the counts at ranks `1..stage` to `targets`.
struct RankStage {
    stage: usize,
    targets: Vec<u32>,
    best: Option<(u32, Matching)>,
}

impl Goal for RankStage {
    fn prune(&self, dom: &Domains) -> bool {
        let n = dom.inst.len();
        let k = self.stage;
        // lo[r]: agents already fixed at rank r; hi[r]: agents that can still be
        let mut lo = vec![0u32; k + 1];
        let mut hi = vec![0u32; k + 1];
        let mut seen = vec![usize::MAX; k + 1];
        for x in 0..n {
            let cands = dom.candidates(x);
            let ranks = dom.candidate_ranks(x);
            if let Some(p) = dom.fixed(x) {
                if p != x {
                    let r = dom
                        .inst
                        .rank_table()
                        .rank(AgentId(x), AgentId(p))
                        .expect("mutual") as usize;
                    if r <= k {
                        lo[r] += 1;
                        hi[r] += 1;
                    }
                }
                continue;
            }
            for (j, &y) in cands.iter().enumerate() {
                let r = ranks[j] as usize;
                if r > k {
                    break;
                }
                if y != x && dom.is_live(x, y) && seen[r] != x {
                    seen[r] = x;
                    hi[r] += 1;
                }
            }
        }
        for r in 1..k {
            let t = self.targets[r - 1];
            if lo[r] > t || hi[r] < t {
                return true;
            }
        }
        match &self.best {
            Some((c, _)) => hi[k] <= *c,
            None => false,
        }
    }

    fn leaf(&mut self, dom: &Domains, m: Matching) -> Flow {
        let profile = Profile::of(dom.inst, &m);
        let ok = (1..self.stage).all(|r| profile.at(r) == self.targets[r - 1]);
        if !ok {
            return Flow::Continue;
        }
        let c = profile.at(self.stage);
        if self.best.as_ref().is_none_or(|(b, _)| c > *b) {
            self.best = Some((c, m));
        }
        Flow::Continue
    }
}

struct MinBlocking {
    best: Option<(u64, Matching)>,
    /// Objective value known to be optimal once reached.
    floor: u64,
}

impl MinBlocking {
    /// Pairs `{u, v}` that block every completion: neither can still get the
    /// other, and each is already certain to end with someone strictly worse.
    fn certain_blocking(dom: &Domains) -> u64 {
        let n = dom.inst.len();
        let rt = dom.inst.rank_table();
        let best: Vec<u32> = (0..n).map(|x| dom.best_rank(x)).collect();
        let mut count = 0;
        for u in 0..n {
            let cands = dom.candidates(u);
            let ranks = dom.candidate_ranks(u);
            for (j, &v) in cands.iter().enumerate() {
                if ranks[j] >= best[u] {
                    break;
                }
                if u < v {
                    let rv = rt.rank(AgentId(v), AgentId(u)).expect("mutual");
                    if rv < best[v] {
                        count += 1;
                    }
                }
            }
        }
        count
    }
}

impl Goal for MinBlocking {
    fn prune(&self, dom: &Domains) -> bool {
        match &self.best {
            Some((incumbent, _)) => Self::certain_blocking(dom) >= *incumbent,
            None => false,
        }
    }

    fn leaf(&mut self, dom: &Domains, m: Matching) -> Flow {
        let count = stability::count_blocking_pairs(dom.inst, &m) as u64;
        if self.best.as_ref().is_none_or(|(b, _)| count < *b) {
            self.best = Some((count, m));
        }
        if count <= self.floor {
            Flow::Stop
        } else {
            Flow::Continue
        }
    }
}

impl<'a> Solver<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        Solver {
            inst,
            timeout: None,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = Some(timeout);
        self
    }

    fn engine(&self, start: Instant) -> Engine {
        Engine::new(self.timeout.map(|t| start + t))
    }

    fn stats(engine: &Engine, start: Instant) -> Stats {
        Stats {
            nodes: engine.nodes,
            elapsed: start.elapsed(),
            timed_out: engine.timed_out,
        }
    }

    /// Some stable matching, or `NoStable`.
    pub fn decision(&self) -> SolveResult {
        let start = Instant::now();
        let mut engine = self.engine(start);
        let mut goal = FirstStable { found: None };
        engine.run(&mut Domains::new(self.inst, true), &mut goal);
        let stats = Self::stats(&engine, start);
        let status = match (&goal.found, stats.timed_out) {
            (Some(_), _) => Status::Stable,
            (None, false) => Status::NoStable,
            (None, true) => Status::Unknown,
        };
        SolveResult::new(self.inst, status, goal.found, None, stats)
    }

    /// All stable matchings in search order, at most `limit` of them.
    pub fn enumerate(&self, limit: Option<usize>) -> Enumeration {
        let start = Instant::now();
        let mut engine = self.engine(start);
        let mut goal = CollectAll {
            limit,
            found: Vec::new(),
            truncated: false,
        };
        engine.run(&mut Domains::new(self.inst, true), &mut goal);
        let stats = Self::stats(&engine, start);
        Enumeration {
            complete: !goal.truncated && !stats.timed_out,
            matchings: goal.found,
            stats,
        }
    }

    /// Stable matching of minimum egalitarian cost.
    pub fn egalitarian(&self) -> SolveResult {
        let start = Instant::now();
        let mut engine = self.engine(start);
        let mut goal = MinCost { best: None };
        engine.run(&mut Domains::new(self.inst, true), &mut goal);
        let stats = Self::stats(&engine, start);
        match goal.best {
            Some((cost, m)) => {
                SolveResult::new(self.inst, Status::Optimal, Some(m), Some(cost), stats)
            }
            None => self.nothing(stats),
        }
    }

    /// Stable matching with a lexicographically maximal profile.
    ///
    /// Runs one branch-and-bound per rank: stage `k` maximises the number of
    /// agents matched at rank `k` among stable matchings that reach the
    /// optimal counts of all earlier stages.
    pub fn rank_maximal(&self) -> SolveResult {
        let start = Instant::now();
        let mut engine = self.engine(start);
        let max_rank = self
            .inst
            .agents()
            .map(|x| self.inst.prefs(x).group_count())
            .max()
            .unwrap_or(0);
        let mut targets = Vec::new();
        let mut current: Option<Matching> = None;
        for stage in 1..=max_rank.max(1) {
            let mut goal = RankStage {
                stage,
                targets: targets.clone(),
                best: None,
            };
            engine.run(&mut Domains::new(self.inst, true), &mut goal);
            match goal.best {
                Some((count, m)) => {
                    targets.push(count);
                    current = Some(m);
                }
                None => break,
            }
            if engine.timed_out {
                break;
            }
        }
        let stats = Self::stats(&engine, start);
        match current {
            Some(m) => {
                let status = Status::Optimal;
                SolveResult::new(self.inst, status, Some(m), None, stats)
            }
            None => self.nothing(stats),
        }
    }

    /// Matching (not necessarily stable) with the fewest blocking pairs.
    pub fn almost_stable(&self) -> SolveResult {
        let start = Instant::now();
        let first = self.decision();
        if let Some(m) = first.matching {
            let stats = Stats {
                elapsed: start.elapsed(),
                ..first.stats
            };
            return SolveResult::new(self.inst, Status::Optimal, Some(m), Some(0), stats);
        }
        let mut engine = self.engine(start);
        engine.nodes = first.stats.nodes;
        if first.stats.timed_out {
            engine.timed_out = true;
            return self.nothing(Self::stats(&engine, start));
        }
        // no stable matching exists, so one blocking pair is the best possible
        let mut goal = MinBlocking {
            best: None,
            floor: 1,
        };
        engine.run(&mut Domains::new(self.inst, false), &mut goal);
        let stats = Self::stats(&engine, start);
        match goal.best {
            Some((count, m)) => {
                SolveResult::new(self.inst, Status::Optimal, Some(m), Some(count), stats)
            }
            None => self.nothing(stats),
        }
    }

    fn nothing(&self, stats: Stats) -> SolveResult {
        let status = if stats.timed_out {
            Status::Unknown
        } else {
            Status::NoStable
        };
        SolveResult::new(self.inst, status, None, None, stats)
    }

    /// Dispatches on `mode`; `All` reports the first matching and the count as objective.
    pub fn solve(&self, mode: Mode) -> SolveResult {
        match mode {
            Mode::Decision => self.decision(),
            Mode::Egalitarian => self.egalitarian(),
            Mode::RankMaximal => self.rank_maximal(),
            Mode::Almost => self.almost_stable(),
            Mode::All => {
                let e = self.enumerate(None);
                let status = match (e.matchings.is_empty(), e.stats.timed_out) {
                    (false, _) => Status::Stable,
                    (true, false) => Status::NoStable,
                    (true, true) => Status::Unknown,
                };
                let count = e.matchings.len() as u64;
                let first = e.matchings.into_iter().next();
                SolveResult::new(self.inst, status, first, Some(count), e.stats)
            }
        }
    }
}

// A timed-out optimisation still reports its incumbent; `stats.timed_out`
// tells the caller that optimality was not proven.

pub fn solve_decision(inst: &Instance) -> SolveResult {
    Solver::new(inst).decision()
}

pub fn enumerate_all(inst: &Instance, limit: Option<usize>) -> Vec<Matching> {
    Solver::new(inst).enumerate(limit).matchings
}

pub fn solve_egalitarian(inst: &Instance) -> SolveResult {
    Solver::new(inst).egalitarian()
}

pub fn solve_rank_maximal(inst: &Instance) -> SolveResult {
    Solver::new(inst).rank_maximal()
}

pub fn solve_almost_stable(inst: &Instance) -> SolveResult {
    Solver::new(inst).almost_stable()
}

#[cfg(test)]
mod tests;
