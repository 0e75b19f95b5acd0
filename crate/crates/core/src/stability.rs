//! Blocking pairs and weak stability.
//!
//! A pair `{x, y}` blocks a matching `M` when the two agents are mutually
//! acceptable, are not matched together, and each of them is either single or
//! strictly prefers the other to its partner. Under ties only strict
//! preference counts, which is exactly weak stability.

use std::fmt;

use crate::instance::{AgentId, Instance};
use crate::matching::Matching;

/// Unordered pair stored with `x < y`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockingPair {
    pub x: AgentId,
    pub y: AgentId,
}

impl BlockingPair {
    pub fn new(a: AgentId, b: AgentId) -> Self {
        debug_assert_ne!(a, b);
        if a < b {
            BlockingPair { x: a, y: b }
        } else {
            BlockingPair { x: b, y: a }
        }
    }
}

impl fmt::Display for BlockingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.x.0, self.y.0)
    }
}

/// `x` is single in `m` or strictly prefers `y` to its partner.
#[inline]
fn would_leave_for(inst: &Instance, m: &Matching, x: AgentId, y: AgentId) -> bool {
    let p = m.partner(x);
    if p == x {
        return true;
    }
    let rt = inst.rank_table();
    match (rt.rank(x, y), rt.rank(x, p)) {
        (Some(ry), Some(rp)) => ry < rp,
        _ => false,
    }
}

pub fn blocks(inst: &Instance, m: &Matching, x: AgentId, y: AgentId) -> bool {
    x != y
        && m.partner(x) != y
        && inst.mutually_acceptable(x, y)
        && would_leave_for(inst, m, x, y)
        && would_leave_for(inst, m, y, x)
}

/// All blocking pairs of `m`, sorted.
pub fn blocking_pairs(inst: &Instance, m: &Matching) -> Vec<BlockingPair> {
    let mut out = Vec::new();
    for x in inst.agents() {
        for y in inst.prefs(x).iter() {
            if x < y && blocks(inst, m, x, y) {
                out.push(BlockingPair { x, y });
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn count_blocking_pairs(inst: &Instance, m: &Matching) -> usize {
    inst.agents()
        .map(|x| {
            inst.prefs(x)
                .iter()
                .filter(|&y| x < y && blocks(inst, m, x, y))
                .count()
        })
        .sum()
}

pub fn is_stable(inst: &Instance, m: &Matching) -> bool {
    inst.agents().all(|x| {
        inst.prefs(x)
            .iter()
            .all(|y| !(x < y && blocks(inst, m, x, y)))
    })
}

/// Blocking pairs derived rule by rule from a transitively closed preference
/// relation, with the four single/like cases kept separate.
///
/// This is a second, independent route to [`blocking_pairs`]; it is cubic in
/// the number of agents and meant for cross-checking.
pub mod rules {
    use super::BlockingPair;
    use crate::instance::{AgentId, Instance};
    use crate::matching::Matching;

    /// `prefer[x][y][z]`: `x` strictly prefers `y` to `z`, with `z == x`
    /// standing for being single.
    pub struct PreferRelation {
        n: usize,
        prefer: Vec<bool>,
    }

    impl PreferRelation {
        pub fn new(inst: &Instance) -> Self {
            let n = inst.len();
            let mut direct = vec![false; n * n * n];
            let at = |x: usize, y: usize, z: usize| (x * n + y) * n + z;
            for x in inst.agents() {
                let groups = inst.prefs(x).groups();
                for pair in groups.windows(2) {
                    for y in &pair[0] {
                        for z in &pair[1] {
                            direct[at(x.0, y.0, z.0)] = true;
                        }
                    }
                }
                for y in inst.prefs(x).iter() {
                    direct[at(x.0, y.0, x.0)] = true;
                }
            }
            // prefer(x,y,z) <- prefer2(x,y,z)
            // prefer(x,y,z) <- prefer2(x,y,w), prefer(x,w,z)
            let mut prefer = direct.clone();
            for x in 0..n {
                loop {
                    let mut changed = false;
                    for y in 0..n {
                        for w in 0..n {
                            if !direct[at(x, y, w)] {
                                continue;
                            }
                            for z in 0..n {
                                if prefer[at(x, w, z)] && !prefer[at(x, y, z)] {
                                    prefer[at(x, y, z)] = true;
                                    changed = true;
                                }
                            }
                        }
                    }
                    if !changed {
                        break;
                    }
                }
            }
            PreferRelation { n, prefer }
        }

        pub fn prefer(&self, x: usize, y: usize, z: usize) -> bool {
            self.prefer[(x * self.n + y) * self.n + z]
        }

        /// `accept(x,y)`: `y` occurs on either side of some preference of `x`.
        pub fn accept(&self, x: usize, y: usize) -> bool {
            (0..self.n).any(|o| self.prefer(x, y, o) || self.prefer(x, o, y))
        }

        pub fn accept2(&self, x: usize, y: usize) -> bool {
            self.accept(x, y) && self.accept(y, x)
        }
    }

    pub fn blocking_pairs(
        inst: &Instance,
        rel: &PreferRelation,
        m: &Matching,
    ) -> Vec<BlockingPair> {
        let n = inst.len();
        let room = |x: usize, y: usize| m.partner(AgentId(x)).0 == y;
        let single = |x: usize| room(x, x);
        // like(x,y) <- room(x,x'), prefer(x,y,x'), x' != y
        let like = |x: usize, y: usize| {
            let partner = m.partner(AgentId(x)).0;
            partner != y && rel.prefer(x, y, partner)
        };
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x == y || !rel.accept2(x, y) || room(x, y) {
                    continue;
                }
                let block = (single(x) && single(y))
                    || (single(x) && like(y, x))
                    || (like(x, y) && single(y))
                    || (like(x, y) && like(y, x));
                if block {
                    out.push(BlockingPair::new(AgentId(x), AgentId(y)));
                }
            }
        }
        // both orientations were derived; keep each unordered pair once
        out.sort_unstable();
        out.dedup();
        out
    }
}
