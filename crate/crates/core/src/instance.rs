//! Roommates instances: agents, preference lists with ties, and ranks.
//!
//! Preference lists are stored as ordered tie-groups. An agent is indifferent
//! between members of the same group and strictly prefers every member of an
//! earlier group to every member of a later one. Acceptability is kept exactly
//! as declared, so `y` may appear in the list of `x` without `x` appearing in
//! the list of `y`; only mutually acceptable pairs can ever be matched.
//!
//! # File format
//!
//! ```text
//! % comment
//! a: b (c d) e
//! b: a
//! c:
//! ```
//!
//! Every agent has a header line `name:` followed by its list. A parenthesised
//! group is a tie-group. Names are `[A-Za-z0-9_]+`, and every name used in a
//! list must also have its own header line.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Dense agent index, `0..n` in header order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub usize);

impl AgentId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// One agent's ordered list of tie-groups.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PreferenceList {
    groups: Vec<Vec<AgentId>>,
}

impl PreferenceList {
    pub fn new(groups: Vec<Vec<AgentId>>) -> Self {
        PreferenceList { groups }
    }

    /// Strict list, one agent per group.
    pub fn strict(order: impl IntoIterator<Item = AgentId>) -> Self {
        PreferenceList {
            groups: order.into_iter().map(|a| vec![a]).collect(),
        }
    }

    pub fn groups(&self) -> &[Vec<AgentId>] {
        &self.groups
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Number of acceptable agents.
    pub fn len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn is_strict(&self) -> bool {
        self.groups.iter().all(|g| g.len() == 1)
    }

    /// Acceptable agents in list order.
    pub fn iter(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.groups.iter().flatten().copied()
    }

    pub(crate) fn groups_mut(&mut self) -> &mut Vec<Vec<AgentId>> {
        &mut self.groups
    }
}

/// Provenance of a generated instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Metadata {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub tie_ops: usize,
}

impl Metadata {
    /// Completeness degree as a percentage, `p * 100`.
    pub fn completeness(&self) -> f64 {
        self.p * 100.0
    }
}

/// Ranks derived from the preference lists.
///
/// Members of tie-group `k` (1-based) share rank `k`; for strict lists that
/// is simply the list position. The single rank is `group_count + 1`, the
/// smallest value worse than every acceptable partner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankTable {
    n: usize,
    // n * n, 0 means "not acceptable"
    rank: Vec<u32>,
    single: Vec<u32>,
}

impl RankTable {
    fn build(prefs: &[PreferenceList]) -> Self {
        let n = prefs.len();
        let mut rank = vec![0u32; n * n];
        let mut single = vec![1u32; n];
        for (x, list) in prefs.iter().enumerate() {
            for (k, group) in list.groups().iter().enumerate() {
                for y in group {
                    rank[x * n + y.0] = k as u32 + 1;
                }
            }
            single[x] = list.group_count() as u32 + 1;
        }
        RankTable { n, rank, single }
    }

    /// Rank of `y` in the list of `x`, or `None` when `y` is not acceptable to `x`.
    #[inline]
    pub fn rank(&self, x: AgentId, y: AgentId) -> Option<u32> {
        match self.rank[x.0 * self.n + y.0] {
            0 => None,
            r => Some(r),
        }
    }

    #[inline]
    pub fn single_rank(&self, x: AgentId) -> u32 {
        self.single[x.0]
    }

    /// Rank of `x`'s partner `y`, counting `y == x` as single.
    ///
    /// Panics if `y` is neither `x` nor acceptable to `x`.
    #[inline]
    pub fn partner_rank(&self, x: AgentId, y: AgentId) -> u32 {
        if x == y {
            self.single[x.0]
        } else {
            self.rank(x, y).expect("partner must be acceptable")
        }
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    names: Vec<String>,
    index: HashMap<String, AgentId>,
    prefs: Vec<PreferenceList>,
    ranks: RankTable,
    metadata: Option<Metadata>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.prefs == other.prefs && self.metadata == other.metadata
    }
}

impl Instance {
    /// Builds an instance, checking that every list is a set of other agents
    /// partitioned into non-empty groups.
    pub fn new(names: Vec<String>, prefs: Vec<PreferenceList>) -> Result<Self> {
        if names.len() != prefs.len() {
            return Err(Error::InvalidPreferences(format!(
                "{} names but {} preference lists",
                names.len(),
                prefs.len()
            )));
        }
        let n = names.len();
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if !is_valid_name(name) {
                return Err(Error::InvalidPreferences(format!(
                    "bad agent name `{name}`"
                )));
            }
            if index.insert(name.clone(), AgentId(i)).is_some() {
                return Err(Error::InvalidPreferences(format!(
                    "duplicate agent name `{name}`"
                )));
            }
        }
        let mut seen = vec![usize::MAX; n];
        for (x, list) in prefs.iter().enumerate() {
            for group in list.groups() {
                if group.is_empty() {
                    return Err(Error::InvalidPreferences(format!(
                        "empty tie-group in the list of `{}`",
                        names[x]
                    )));
                }
                for &y in group {
                    if y.0 >= n {
                        return Err(Error::InvalidPreferences(format!(
                            "agent index {} out of range in the list of `{}`",
                            y.0, names[x]
                        )));
                    }
                    if y.0 == x {
                        return Err(Error::InvalidPreferences(format!(
                            "`{}` lists itself",
                            names[x]
                        )));
                    }
                    if seen[y.0] == x {
                        return Err(Error::InvalidPreferences(format!(
                            "`{}` appears twice in the list of `{}`",
                            names[y.0], names[x]
                        )));
                    }
                    seen[y.0] = x;
                }
            }
        }
        let ranks = RankTable::build(&prefs);
        Ok(Instance {
            names,
            index,
            prefs,
            ranks,
            metadata: None,
        })
    }

    /// Instance with generated names `a`, `b`, ..., `z`, `a1`, ... and strict lists.
    pub fn from_strict_lists(lists: Vec<Vec<usize>>) -> Result<Self> {
        let names = default_names(lists.len());
        let prefs = lists
            .into_iter()
            .map(|l| PreferenceList::strict(l.into_iter().map(AgentId)))
            .collect();
        Instance::new(names, prefs)
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    pub fn metadata(&self) -> Option<&Metadata> {
        self.metadata.as_ref()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> + Clone {
        (0..self.names.len()).map(AgentId)
    }

    pub fn name(&self, x: AgentId) -> &str {
        &self.names[x.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Option<AgentId> {
        self.index.get(name).copied()
    }

    pub fn prefs(&self, x: AgentId) -> &PreferenceList {
        &self.prefs[x.0]
    }

    pub fn rank_table(&self) -> &RankTable {
        &self.ranks
    }

    /// `y ∈ A_x`.
    #[inline]
    pub fn accepts(&self, x: AgentId, y: AgentId) -> bool {
        x != y && self.ranks.rank(x, y).is_some()
    }

    #[inline]
    pub fn mutually_acceptable(&self, x: AgentId, y: AgentId) -> bool {
        self.accepts(x, y) && self.accepts(y, x)
    }

    /// Agents mutually acceptable with `x`, in the order of `x`'s list.
    pub fn mutual_partners(&self, x: AgentId) -> impl Iterator<Item = AgentId> + '_ {
        self.prefs[x.0].iter().filter(move |&y| self.accepts(y, x))
    }

    pub fn is_strict(&self) -> bool {
        self.prefs.iter().all(PreferenceList::is_strict)
    }

    /// Whether `x` strictly prefers `y` to `z`. Being single (`z == x`) is
    /// the least preferred outcome.
    pub fn prefers(&self, x: AgentId, y: AgentId, z: AgentId) -> Result<bool> {
        let ry = self
            .ranks
            .rank(x, y)
            .ok_or_else(|| self.not_acceptable(x, y))?;
        if z == x {
            return Ok(true);
        }
        let rz = self
            .ranks
            .rank(x, z)
            .ok_or_else(|| self.not_acceptable(x, z))?;
        Ok(ry < rz)
    }

    /// Whether `y` and `z` are distinct members of the same tie-group of `x`.
    pub fn tied(&self, x: AgentId, y: AgentId, z: AgentId) -> bool {
        y != z
            && matches!(
                (self.ranks.rank(x, y), self.ranks.rank(x, z)),
                (Some(a), Some(b)) if a == b
            )
    }

    fn not_acceptable(&self, x: AgentId, y: AgentId) -> Error {
        Error::NotAcceptable {
            owner: self.names[x.0].clone(),
            agent: self
                .names
                .get(y.0)
                .cloned()
                .unwrap_or_else(|| y.to_string()),
        }
    }

    pub(crate) fn into_parts(self) -> (Vec<String>, Vec<PreferenceList>, Option<Metadata>) {
        (self.names, self.prefs, self.metadata)
    }

    /// Serializes to the instance file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(m) = &self.metadata {
            out.push_str(&format!(
                "% meta: n={} p={} seed={} tie_ops={} completeness={}\n",
                m.n,
                m.p,
                m.seed,
                m.tie_ops,
                m.completeness()
            ));
        }
        for (x, list) in self.prefs.iter().enumerate() {
            out.push_str(&self.names[x]);
            out.push(':');
            for group in list.groups() {
                out.push(' ');
                if group.len() == 1 {
                    out.push_str(&self.names[group[0].0]);
                } else {
                    out.push('(');
                    let members: Vec<&str> =
                        group.iter().map(|a| self.names[a.0].as_str()).collect();
                    out.push_str(&members.join(" "));
                    out.push(')');
                }
            }
            out.push('\n');
        }
        out
    }
}

impl std::str::FromStr for Instance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_instance(s)
    }
}

pub(crate) fn is_valid_name(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// `a`..`z`, then `a1`..`z1`, and so on.
pub fn default_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            let letter = (b'a' + (i % 26) as u8) as char;
            match i / 26 {
                0 => letter.to_string(),
                k => format!("{letter}{k}"),
            }
        })
        .collect()
}

enum Entry<'a> {
    Single(&'a str),
    Group(Vec<&'a str>),
}

fn tokenize_entries(body: &str, line: usize) -> Result<Vec<Entry<'_>>> {
    let syntax = |message: String| Error::Syntax { line, message };
    let mut entries = Vec::new();
    let mut group: Option<Vec<&str>> = None;
    let bytes = body.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'(' {
            if group.is_some() {
                return Err(syntax("nested `(`".into()));
            }
            group = Some(Vec::new());
            i += 1;
        } else if c == b')' {
            match group.take() {
                None => return Err(syntax("unmatched `)`".into())),
                Some(g) if g.is_empty() => return Err(syntax("empty tie-group".into())),
                Some(g) => entries.push(Entry::Group(g)),
            }
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let name = &body[start..i];
            match group.as_mut() {
                Some(g) => g.push(name),
                None => entries.push(Entry::Single(name)),
            }
        } else {
            let ch = body[i..].chars().next().unwrap_or('?');
            return Err(syntax(format!("unexpected character `{ch}`")));
        }
    }
    if group.is_some() {
        return Err(syntax("unclosed `(`".into()));
    }
    Ok(entries)
}

fn parse_meta(comment: &str) -> Option<Metadata> {
    let rest = comment.trim().strip_prefix("meta:")?;
    let mut n = None;
    let mut p = None;
    let mut seed = None;
    let mut tie_ops = 0;
    for kv in rest.split_whitespace() {
        let (k, v) = kv.split_once('=')?;
        match k {
            "n" => n = v.parse().ok(),
            "p" => p = v.parse().ok(),
            "seed" => seed = v.parse().ok(),
            "tie_ops" => tie_ops = v.parse().ok()?,
            _ => {}
        }
    }
    Some(Metadata {
        n: n?,
        p: p?,
        seed: seed?,
        tie_ops,
    })
}

/// Parses the instance file format. Agent ids follow header order.
pub fn parse_instance(text: &str) -> Result<Instance> {
    struct Line<'a> {
        number: usize,
        name: &'a str,
        body: &'a str,
    }

    let mut lines = Vec::new();
    let mut metadata = None;
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let (content, comment) = match raw.find('%') {
            Some(pos) => (&raw[..pos], Some(&raw[pos + 1..])),
            None => (raw, None),
        };
        if metadata.is_none() {
            metadata = comment.and_then(parse_meta);
        }
        if content.trim().is_empty() {
            continue;
        }
        let (head, body) = content.split_once(':').ok_or_else(|| Error::Syntax {
            line: number,
            message: "expected `name:`".into(),
        })?;
        let name = head.trim();
        if !is_valid_name(name) {
            return Err(Error::Syntax {
                line: number,
                message: format!("invalid agent name `{name}`"),
            });
        }
        lines.push(Line { number, name, body });
    }

    let mut index: HashMap<&str, AgentId> = HashMap::with_capacity(lines.len());
    for (i, l) in lines.iter().enumerate() {
        if index.insert(l.name, AgentId(i)).is_some() {
            return Err(Error::DuplicateHeader {
                line: l.number,
                name: l.name.to_string(),
            });
        }
    }

    let n = lines.len();
    let mut prefs = Vec::with_capacity(n);
    let mut seen = vec![usize::MAX; n];
    for (x, l) in lines.iter().enumerate() {
        let mut groups = Vec::new();
        for entry in tokenize_entries(l.body, l.number)? {
            let members = match entry {
                Entry::Single(s) => vec![s],
                Entry::Group(g) => g,
            };
            let mut group = Vec::with_capacity(members.len());
            for name in members {
                let y = *index.get(name).ok_or_else(|| Error::UnknownAgent {
                    line: l.number,
                    name: name.to_string(),
                })?;
                if y.0 == x {
                    return Err(Error::SelfReference {
                        line: l.number,
                        agent: name.to_string(),
                    });
                }
                if seen[y.0] == x {
                    return Err(Error::DuplicateAgent {
                        line: l.number,
                        owner: l.name.to_string(),
                        agent: name.to_string(),
                    });
                }
                seen[y.0] = x;
                group.push(y);
            }
            groups.push(group);
        }
        prefs.push(PreferenceList::new(groups));
    }

    let names = lines.iter().map(|l| l.name.to_string()).collect();
    let inst = Instance::new(names, prefs)?;
    Ok(match metadata {
        Some(m) => inst.with_metadata(m),
        None => inst,
    })
}
