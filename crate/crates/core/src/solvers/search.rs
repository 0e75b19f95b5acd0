//! Depth-first search over partner domains with trail-based undo.
//!
//! Every agent `x` has a domain `D(x)` of possible partners: its mutually
//! acceptable agents ordered by rank (ties broken by id) followed by `x`
//! itself, which stands for staying single. Domains are kept symmetric
//! (`y ∈ D(x)` iff `x ∈ D(y)`), and an agent whose domain shrinks to a single
//! partner forces that partner's domain down to it as well.
//!
//! With stability propagation on, whenever the best partner still available
//! to `x` has rank `r`, every `w` that `x` ranks strictly better than `r` would
//! block with `x` unless `w` ends up with a partner it likes at least as much
//! as `x`. So everything `w` ranks strictly worse than `x`, including being
//! single, is removed from `D(w)`. The same holds for the best candidate
//! itself when no other live candidate is tied with it. Once every domain is a
//! singleton, no blocking pair can remain.
//!
//! The branching agent is the lowest id with more than one candidate;
//! candidates are tried in domain order, single last.

use std::collections::VecDeque;
use std::time::Instant;

use crate::instance::{AgentId, Instance};
use crate::matching::Matching;

pub(crate) struct Domains<'a> {
    pub inst: &'a Instance,
    n: usize,
    cands: Vec<Vec<usize>>,
    ranks: Vec<Vec<u32>>,
    live: Vec<bool>,
    size: Vec<u32>,
    trail: Vec<(u32, u32)>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    stability: bool,
}

impl<'a> Domains<'a> {
    pub fn new(inst: &'a Instance, stability: bool) -> Self {
        let n = inst.len();
        let rt = inst.rank_table();
        let mut cands = Vec::with_capacity(n);
        let mut ranks = Vec::with_capacity(n);
        let mut live = vec![false; n * n];
        let mut size = vec![0u32; n];
        for x in inst.agents() {
            let mut c: Vec<usize> = inst.mutual_partners(x).map(AgentId::index).collect();
            c.sort_by_key(|&y| (rt.partner_rank(x, AgentId(y)), y));
            c.push(x.0);
            let r: Vec<u32> = c.iter().map(|&y| rt.partner_rank(x, AgentId(y))).collect();
            for &y in &c {
                live[x.0 * n + y] = true;
            }
            size[x.0] = c.len() as u32;
            cands.push(c);
            ranks.push(r);
        }
        Domains {
            inst,
            n,
            cands,
            ranks,
            live,
            size,
            trail: Vec::new(),
            queue: VecDeque::new(),
            queued: vec![false; n],
            stability,
        }
    }

    #[inline]
    pub fn is_live(&self, x: usize, y: usize) -> bool {
        self.live[x * self.n + y]
    }

    pub fn candidates(&self, x: usize) -> &[usize] {
        &self.cands[x]
    }

    pub fn candidate_ranks(&self, x: usize) -> &[u32] {
        &self.ranks[x]
    }

    /// Index into `candidates(x)` of the best live candidate.
    #[inline]
    pub fn best(&self, x: usize) -> Option<usize> {
        self.cands[x].iter().position(|&y| self.is_live(x, y))
    }

    pub fn best_rank(&self, x: usize) -> u32 {
        self.best(x).map_or(u32::MAX, |k| self.ranks[x][k])
    }

    /// Partner of `x` if its domain is a singleton.
    pub fn fixed(&self, x: usize) -> Option<usize> {
        if self.size[x] == 1 {
            self.best(x).map(|k| self.cands[x][k])
        } else {
            None
        }
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (x, y) = self.trail.pop().expect("trail above mark");
            self.live[x as usize * self.n + y as usize] = true;
            self.size[x as usize] += 1;
        }
    }

    fn enqueue(&mut self, x: usize) {
        if !self.queued[x] {
            self.queued[x] = true;
            self.queue.push_back(x);
        }
    }

    fn remove_one(&mut self, x: usize, y: usize) {
        let i = x * self.n + y;
        if self.live[i] {
            self.live[i] = false;
            self.size[x] -= 1;
            self.trail.push((x as u32, y as u32));
            self.enqueue(x);
        }
    }

    /// Removes `y` from `D(x)` and, symmetrically, `x` from `D(y)`.
    fn remove(&mut self, x: usize, y: usize) {
        self.remove_one(x, y);
        if x != y {
            self.remove_one(y, x);
        }
    }

    pub fn enqueue_all(&mut self) {
        for x in 0..self.n {
            self.enqueue(x);
        }
    }

    /// Restricts `D(x)` to `{y}`.
    pub fn assign(&mut self, x: usize, y: usize) {
        for k in 0..self.cands[x].len() {
            let v = self.cands[x][k];
            if v != y {
                self.remove(x, v);
            }
        }
    }

    /// Runs propagation to a fixpoint. Returns `false` on a wipe-out.
    pub fn propagate(&mut self) -> bool {
        while let Some(x) = self.queue.pop_front() {
            self.queued[x] = false;
            let Some(bk) = self.best(x) else {
                return self.fail();
            };
            let b = self.cands[x][bk];
            let rb = self.ranks[x][bk];

            if self.stability {
                // A best candidate with no live tie is covered too: either x
                // gets it, or x ends strictly worse off and it would block.
                let sole_best = b != x
                    && self.cands[x][bk + 1..]
                        .iter()
                        .zip(&self.ranks[x][bk + 1..])
                        .take_while(|&(_, &r)| r == rb)
                        .all(|(&v, _)| !self.is_live(x, v));
                let end = if sole_best { bk + 1 } else { bk };
                for k in 0..end {
                    if k < bk && self.ranks[x][k] >= rb {
                        continue;
                    }
                    let w = self.cands[x][k];
                    if !self.cut_below(w, x) {
                        return self.fail();
                    }
                }
            }

            if self.size[x] == 1 && b != x {
                for j in 0..self.cands[b].len() {
                    let v = self.cands[b][j];
                    if v != x {
                        self.remove(b, v);
                    }
                }
                if self.size[b] == 0 {
                    return self.fail();
                }
            }
        }
        true
    }

    /// Removes from `D(w)` everything `w` likes strictly less than `x`,
    /// including being single. Returns `false` on a wipe-out.
    fn cut_below(&mut self, w: usize, x: usize) -> bool {
        let threshold = self
            .inst
            .rank_table()
            .rank(AgentId(w), AgentId(x))
            .expect("mutual");
        for j in (0..self.cands[w].len()).rev() {
            if self.ranks[w][j] <= threshold {
                break;
            }
            let v = self.cands[w][j];
            self.remove(w, v);
        }
        self.size[w] > 0
    }

    fn fail(&mut self) -> bool {
        for x in self.queue.drain(..) {
            self.queued[x] = false;
        }
        false
    }

    /// Lowest-id agent whose partner is still open.
    pub fn branching_agent(&self) -> Option<usize> {
        (0..self.n).find(|&x| self.size[x] > 1)
    }

    /// Matching read off fully fixed domains.
    pub fn matching(&self) -> Matching {
        Matching::from_partners(
            (0..self.n)
                .map(|x| AgentId(self.fixed(x).expect("all domains fixed")))
                .collect(),
        )
    }
}

pub(crate) enum Flow {
    Continue,
    Stop,
}

/// Mode-specific bounding and leaf handling.
pub(crate) trait Goal {
    /// True when no completion of the current node can be accepted.
    fn prune(&self, dom: &Domains) -> bool;
    fn leaf(&mut self, dom: &Domains, m: Matching) -> Flow;
}

pub(crate) struct Engine {
    pub deadline: Option<Instant>,
    pub nodes: u64,
    pub timed_out: bool,
}

impl Engine {
    pub fn new(deadline: Option<Instant>) -> Self {
        Engine {
            deadline,
            nodes: 0,
            timed_out: false,
        }
    }

    /// Propagates the root node and searches below it.
    pub fn run<G: Goal>(&mut self, dom: &mut Domains, goal: &mut G) {
        dom.enqueue_all();
        if dom.propagate() {
            self.dfs(dom, goal);
        }
    }

    fn dfs<G: Goal>(&mut self, dom: &mut Domains, goal: &mut G) -> Flow {
        self.nodes += 1;
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                self.timed_out = true;
                return Flow::Stop;
            }
        }
        if goal.prune(dom) {
            return Flow::Continue;
        }
        let Some(x) = dom.branching_agent() else {
            let m = dom.matching();
            return goal.leaf(dom, m);
        };
        let options: Vec<usize> = dom
            .candidates(x)
            .iter()
            .copied()
            .filter(|&y| dom.is_live(x, y))
            .collect();
        for y in options {
            let mark = dom.mark();
            dom.assign(x, y);
            if dom.propagate() {
                if let Flow::Stop = self.dfs(dom, goal) {
                    dom.undo(mark);
                    return Flow::Stop;
                }
            }
            dom.undo(mark);
        }
        Flow::Continue
    }
}
