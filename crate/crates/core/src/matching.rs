//! Matchings and the matching file format (`x y` per line, `x x` for singles).

use std::fmt;

use crate::error::{Error, Result};
use crate::instance::{AgentId, Instance};

/// Total map from agents to agents; `partner(x) == x` means single.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matching {
    partner: Vec<AgentId>,
}

impl Matching {
    pub fn all_single(n: usize) -> Self {
        Matching {
            partner: (0..n).map(AgentId).collect(),
        }
    }

    /// Raw partner vector. Not checked; see [`Matching::is_involution`] and
    /// [`validate_matching`].
    pub fn from_partners(partner: Vec<AgentId>) -> Self {
        Matching { partner }
    }

    /// Builds a matching from pairs; `(x, x)` marks `x` single and unlisted
    /// agents are single. Fails when an agent occurs in two different pairs.
    pub fn from_pairs(
        n: usize,
        pairs: impl IntoIterator<Item = (AgentId, AgentId)>,
    ) -> Result<Self> {
        let mut partner: Vec<Option<AgentId>> = vec![None; n];
        for (x, y) in pairs {
            if x.0 >= n || y.0 >= n {
                return Err(Error::InvalidMatching(format!(
                    "agent index out of range in pair ({x}, {y})"
                )));
            }
            for (a, b) in [(x, y), (y, x)] {
                match partner[a.0] {
                    Some(existing) if existing != b => {
                        return Err(Error::InvalidMatching(format!(
                            "agent {a} assigned to both {existing} and {b}"
                        )))
                    }
                    _ => partner[a.0] = Some(b),
                }
            }
        }
        Ok(Matching {
            partner: partner
                .into_iter()
                .enumerate()
                .map(|(i, p)| p.unwrap_or(AgentId(i)))
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.partner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }

    #[inline]
    pub fn partner(&self, x: AgentId) -> AgentId {
        self.partner[x.0]
    }

    #[inline]
    pub fn is_single(&self, x: AgentId) -> bool {
        self.partner[x.0] == x
    }

    pub fn partners(&self) -> &[AgentId] {
        &self.partner
    }

    /// Matched pairs with `x < y`, ordered by `x`.
    pub fn pairs(&self) -> impl Iterator<Item = (AgentId, AgentId)> + '_ {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(x, y)| x < y.0)
            .map(|(x, &y)| (AgentId(x), y))
    }

    pub fn singles(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(x, y)| x == y.0)
            .map(|(x, _)| AgentId(x))
    }

    pub fn is_involution(&self) -> bool {
        self.partner
            .iter()
            .enumerate()
            .all(|(x, y)| self.partner.get(y.0).is_some_and(|z| z.0 == x))
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for (x, y) in self.pairs() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{{{}, {}}}", x.0, y.0)?;
        }
        for x in self.singles() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{{{}}}", x.0)?;
        }
        write!(f, "}}")
    }
}

/// True iff `m` covers exactly the agents of `inst`, is an involution and
/// pairs only mutually acceptable agents.
pub fn validate_matching(inst: &Instance, m: &Matching) -> bool {
    m.len() == inst.len()
        && m.is_involution()
        && m.pairs().all(|(x, y)| inst.mutually_acceptable(x, y))
}

/// Parses `x y` lines by agent name. `%` starts a comment, and `key: value`
/// lines (as printed by the solver) are ignored. Agents not mentioned are single.
pub fn parse_matching(inst: &Instance, text: &str) -> Result<Matching> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('%').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens[0].ends_with(':') {
            continue;
        }
        let [x, y] = tokens[..] else {
            return Err(Error::Syntax {
                line,
                message: "expected two agent names".into(),
            });
        };
        let lookup = |name: &str| {
            inst.id(name).ok_or_else(|| Error::UnknownAgent {
                line,
                name: name.to_string(),
            })
        };
        pairs.push((lookup(x)?, lookup(y)?));
    }
    Matching::from_pairs(inst.len(), pairs)
}

/// Pairs in canonical order, then singles as `x x`.
pub fn matching_to_text(inst: &Instance, m: &Matching) -> String {
    let mut out = String::new();
    for (x, y) in m.pairs() {
        out.push_str(&format!("{} {}\n", inst.name(x), inst.name(y)));
    }
    for x in m.singles() {
        out.push_str(&format!("{0} {0}\n", inst.name(x)));
    }
    out
}
