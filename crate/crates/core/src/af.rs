//! Argumentation-framework view of an instance.
//!
//! Arguments are the mutually acceptable pairs `{a, b}`. Argument `A` attacks
//! argument `B` when they share an agent `s` and `s` strictly prefers its
//! partner in `A` to its partner in `B`. For strict lists the stable
//! extensions of this framework are exactly the stable matchings: conflict-free
//! sets are matchings, and an argument outside the set is attacked iff the pair
//! does not block. Under ties, tied partners do not attack each other, so the
//! correspondence is not guaranteed.

use crate::error::{Error, Result};
use crate::instance::{AgentId, Instance};
use crate::matching::Matching;

pub const DEFAULT_ARG_LIMIT: usize = 2000;

pub type Argument = (AgentId, AgentId);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArgFramework {
    names: Vec<String>,
    args: Vec<Argument>,
    // attackers[j]: sorted indices of arguments attacking j
    attackers: Vec<Vec<usize>>,
    // targets[i]: sorted indices of arguments attacked by i
    targets: Vec<Vec<usize>>,
}

impl ArgFramework {
    /// Canonical pairs `(a, b)` with `a < b`, sorted.
    pub fn args(&self) -> &[Argument] {
        &self.args
    }

    pub fn len(&self) -> usize {
        self.args.len()
    }

    pub fn is_empty(&self) -> bool {
        self.args.is_empty()
    }

    pub fn attack_count(&self) -> usize {
        self.attackers.iter().map(Vec::len).sum()
    }

    pub fn attackers(&self, j: usize) -> &[usize] {
        &self.attackers[j]
    }

    pub fn targets(&self, i: usize) -> &[usize] {
        &self.targets[i]
    }

    pub fn attacks(&self, i: usize, j: usize) -> bool {
        self.attackers[j].binary_search(&i).is_ok()
    }

    /// All attacks as `(attacker, target)` index pairs, sorted.
    pub fn attack_pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .targets
            .iter()
            .enumerate()
            .flat_map(|(i, ts)| ts.iter().map(move |&j| (i, j)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn index_of(&self, a: AgentId, b: AgentId) -> Option<usize> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.args.binary_search(&key).ok()
    }

    fn arg_name(&self, i: usize) -> String {
        let (a, b) = self.args[i];
        format!("in({},{})", self.names[a.0], self.names[b.0])
    }
}

pub fn build_af(inst: &Instance) -> ArgFramework {
    let rt = inst.rank_table();
    let mut args = Vec::new();
    for x in inst.agents() {
        for y in inst.mutual_partners(x) {
            if x < y {
                args.push((x, y));
            }
        }
    }
    args.sort_unstable();

    let mut by_agent: Vec<Vec<usize>> = vec![Vec::new(); inst.len()];
    for (i, &(a, b)) in args.iter().enumerate() {
        by_agent[a.0].push(i);
        by_agent[b.0].push(i);
    }
    let other = |i: usize, s: AgentId| {
        let (a, b) = args[i];
        if a == s {
            b
        } else {
            a
        }
    };
    let mut attackers = vec![Vec::new(); args.len()];
    let mut targets = vec![Vec::new(); args.len()];
    for s in inst.agents() {
        for &i in &by_agent[s.0] {
            let ri = rt.rank(s, other(i, s)).expect("mutual");
            for &j in &by_agent[s.0] {
                if i != j && ri < rt.rank(s, other(j, s)).expect("mutual") {
                    attackers[j].push(i);
                    targets[i].push(j);
                }
            }
        }
    }
    for v in attackers.iter_mut().chain(targets.iter_mut()) {
        v.sort_unstable();
    }
    ArgFramework {
        names: inst.names().to_vec(),
        args,
        attackers,
        targets,
    }
}

#[derive(Copy, Clone, PartialEq, Eq)]
enum Label {
    Undec,
    In,
    Out,
}

struct Labelling<'a> {
    af: &'a ArgFramework,
    labels: Vec<Label>,
    trail: Vec<usize>,
    limit: Option<usize>,
    found: Vec<Vec<usize>>,
}

impl Labelling<'_> {
    fn set(&mut self, i: usize, l: Label) {
        self.labels[i] = l;
        self.trail.push(i);
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let i = self.trail.pop().expect("trail");
            self.labels[i] = Label::Undec;
        }
    }

    /// An `Out` argument needs some attacker that is `In` or may still become `In`.
    fn can_be_defeated(&self, j: usize) -> bool {
        self.af.attackers[j]
            .iter()
            .any(|&a| self.labels[a] != Label::Out)
    }

    /// Checks every `Out` argument whose support changed since `mark`.
    fn consistent_since(&self, mark: usize) -> bool {
        self.trail[mark..].iter().all(|&c| {
            self.labels[c] != Label::Out
                || (self.can_be_defeated(c)
                    && self.af.targets[c]
                        .iter()
                        .all(|&t| self.labels[t] != Label::Out || self.can_be_defeated(t)))
        })
    }

    fn search(&mut self, from: usize) -> bool {
        let Some(i) = (from..self.labels.len()).find(|&i| self.labels[i] == Label::Undec) else {
            if self.limit.is_some_and(|l| self.found.len() >= l) {
                return false;
            }
            let ext = (0..self.labels.len())
                .filter(|&i| self.labels[i] == Label::In)
                .collect();
            self.found.push(ext);
            return true;
        };

        // in: everything adjacent goes out
        let mark = self.trail.len();
        self.set(i, Label::In);
        let neighbours: Vec<usize> = self.af.attackers[i]
            .iter()
            .chain(&self.af.targets[i])
            .copied()
            .collect();
        let mut ok = true;
        for j in neighbours {
            match self.labels[j] {
                Label::In => ok = false,
                Label::Undec => self.set(j, Label::Out),
                Label::Out => {}
            }
        }
        if ok && self.consistent_since(mark) && !self.search(i + 1) {
            self.undo(mark);
            return false;
        }
        self.undo(mark);

        let mark = self.trail.len();
        self.set(i, Label::Out);
        if self.consistent_since(mark) && !self.search(i + 1) {
            self.undo(mark);
            return false;
        }
        self.undo(mark);
        true
    }
}

/// Stable extensions: conflict-free sets attacking every argument outside
/// them. Returned as sorted argument indices, in search order.
pub fn stable_extensions(af: &ArgFramework, limit: Option<usize>) -> Result<Vec<Vec<usize>>> {
    stable_extensions_with_guard(af, limit, DEFAULT_ARG_LIMIT)
}

pub fn stable_extensions_with_guard(
    af: &ArgFramework,
    limit: Option<usize>,
    max_args: usize,
) -> Result<Vec<Vec<usize>>> {
    if af.len() > max_args {
        return Err(Error::TooLarge {
            what: "argumentation framework",
            size: af.len(),
            limit: max_args,
        });
    }
    let mut l = Labelling {
        af,
        labels: vec![Label::Undec; af.len()],
        trail: Vec::new(),
        limit,
        found: Vec::new(),
    };
    l.search(0);
    Ok(l.found)
}

pub fn is_conflict_free(af: &ArgFramework, ext: &[usize]) -> bool {
    ext.iter().all(|&i| ext.iter().all(|&j| !af.attacks(i, j)))
}

/// Every argument outside `ext` is attacked by some member.
pub fn is_dominating(af: &ArgFramework, ext: &[usize]) -> bool {
    (0..af.len())
        .filter(|j| ext.binary_search(j).is_err())
        .all(|j| af.attackers(j).iter().any(|a| ext.binary_search(a).is_ok()))
}

/// Pairs up the agents of each argument in `ext`; everyone else is single.
pub fn extension_to_matching(
    inst: &Instance,
    af: &ArgFramework,
    ext: &[usize],
) -> Result<Matching> {
    let pairs = ext.iter().map(|&i| af.args[i]);
    Matching::from_pairs(inst.len(), pairs).map_err(|_| {
        Error::InvalidMatching("an agent occurs in two arguments of the extension".into())
    })
}

/// One rule per argument, `in(a,b) :- not in(x1,y1), ..., not in(xm,ym).`,
/// with attackers in canonical order; unattacked arguments become facts.
pub fn emit_logic_program(af: &ArgFramework) -> String {
    let mut out = String::new();
    for j in 0..af.len() {
        out.push_str(&af.arg_name(j));
        if !af.attackers[j].is_empty() {
            out.push_str(" :- ");
            let body: Vec<String> = af.attackers[j]
                .iter()
                .map(|&i| format!("not {}", af.arg_name(i)))
                .collect();
            out.push_str(&body.join(", "));
        }
        out.push_str(".\n");
    }
    out
}
