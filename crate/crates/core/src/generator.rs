//! Random SRI instances on an Erdős-Rényi acceptability graph, and tie injection.
//!
//! All randomness comes from ChaCha8 seeded with the 64-bit seed. Streams are
//! split as follows so that fixtures stay reproducible across platforms:
//!
//! * `generate_sri`: stream 0 draws the edges (pairs `i < j` in lexicographic
//!   order), stream `1 + x` shuffles the list of agent `x`.
//! * `add_ties`: tie operation `k` (0-based) draws from stream `k`.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{default_names, AgentId, Instance, Metadata, PreferenceList};

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    /// Edge probability; the completeness degree is `p * 100`.
    pub p: f64,
    pub seed: u64,
    /// Tie operations as a percentage of `n`.
    pub tie_pct: f64,
    /// Also insert `x` into the list of `y` when tying `y` into the list of `x`.
    pub symmetric_ties: bool,
}

impl GenConfig {
    pub fn new(n: usize, p: f64, seed: u64) -> Self {
        GenConfig {
            n,
            p,
            seed,
            tie_pct: 0.0,
            symmetric_ties: false,
        }
    }

    pub fn with_ties(mut self, tie_pct: f64) -> Self {
        self.tie_pct = tie_pct;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidConfig(format!(
                "p = {} is outside [0, 1]",
                self.p
            )));
        }
        if !(self.tie_pct >= 0.0 && self.tie_pct.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tie percentage {} is negative",
                self.tie_pct
            )));
        }
        Ok(())
    }

    /// `round(tie_pct * n / 100)`.
    pub fn tie_count(&self) -> usize {
        (self.tie_pct * self.n as f64 / 100.0).round() as usize
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Strict instance whose acceptability graph is `G(n, p)` and whose lists are
/// uniformly random permutations of each agent's neighbours.
pub fn generate_sri(cfg: &GenConfig) -> Result<Instance> {
    cfg.validate()?;
    let n = cfg.n;
    let mut neighbours: Vec<Vec<AgentId>> = vec![Vec::new(); n];
    let mut edges = rng(cfg.seed, 0);
    for i in 0..n {
        for j in i + 1..n {
            if edges.random_bool(cfg.p) {
                neighbours[i].push(AgentId(j));
                neighbours[j].push(AgentId(i));
            }
        }
    }
    let prefs = neighbours
        .into_iter()
        .enumerate()
        .map(|(x, mut list)| {
            list.shuffle(&mut rng(cfg.seed, 1 + x as u64));
            PreferenceList::strict(list)
        })
        .collect();
    let inst = Instance::new(default_names(n), prefs)?;
    Ok(inst.with_metadata(Metadata {
        n,
        p: cfg.p,
        seed: cfg.seed,
        tie_ops: 0,
    }))
}

/// [`generate_sri`] followed by `cfg.tie_count()` tie operations seeded with `cfg.seed`.
pub fn generate(cfg: &GenConfig) -> Result<TieOutcome> {
    let inst = generate_sri(cfg)?;
    let opts = TieOptions {
        symmetric: cfg.symmetric_ties,
    };
    Ok(add_ties(&inst, cfg.tie_count(), cfg.seed, opts))
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct TieOptions {
    pub symmetric: bool,
}

#[derive(Clone, Debug)]
pub struct TieOutcome {
    pub instance: Instance,
    pub applied: usize,
    pub skipped: usize,
    /// Set when operations were requested but none could be applied.
    pub warning: bool,
}

/// Performs `tie_count` tie operations.
///
/// Each operation draws an agent `x` uniformly (with replacement across
/// operations), picks `y` uniformly among agents that neither accept `x` nor
/// are accepted by `x`, picks `z` uniformly among agents mutually acceptable
/// with `x`, and adds `y` to the tie-group of `z` in the list of `x`. If the
/// drawn `x` has no candidate `y` or `z`, `x` is redrawn up to `n` times before
/// the operation is counted as skipped.
pub fn add_ties(inst: &Instance, tie_count: usize, seed: u64, opts: TieOptions) -> TieOutcome {
    let n = inst.len();
    let mut lists: Vec<PreferenceList> = inst.agents().map(|x| inst.prefs(x).clone()).collect();
    let mut accepted = vec![false; n * n];
    for (x, list) in lists.iter().enumerate() {
        for y in list.iter() {
            accepted[x * n + y.0] = true;
        }
    }

    let mut applied = 0;
    let mut skipped = 0;
    for op in 0..tie_count {
        let mut rng = rng(seed, op as u64);
        let mut done = false;
        for _ in 0..n {
            let x = rng.random_range(0..n);
            let unrelated: Vec<usize> = (0..n)
                .filter(|&y| y != x && !accepted[x * n + y] && !accepted[y * n + x])
                .collect();
            let mutual: Vec<usize> = (0..n)
                .filter(|&z| z != x && accepted[x * n + z] && accepted[z * n + x])
                .collect();
            let (Some(&y), Some(&z)) = (unrelated.choose(&mut rng), mutual.choose(&mut rng)) else {
                continue;
            };
            let groups = lists[x].groups_mut();
            let g = groups
                .iter()
                .position(|g| g.contains(&AgentId(z)))
                .expect("z is in the list of x");
            groups[g].push(AgentId(y));
            accepted[x * n + y] = true;

            if opts.symmetric {
                let groups = lists[y].groups_mut();
                if groups.is_empty() {
                    groups.push(vec![AgentId(x)]);
                } else {
                    let g = rng.random_range(0..groups.len());
                    groups[g].push(AgentId(x));
                }
                accepted[y * n + x] = true;
            }
            done = true;
            break;
        }
        if done {
            applied += 1;
        } else {
            skipped += 1;
        }
    }

    if applied == 0 {
        return TieOutcome {
            instance: inst.clone(),
            applied,
            skipped,
            warning: tie_count > 0,
        };
    }
    let (names, _, metadata) = inst.clone().into_parts();
    let mut out = Instance::new(names, lists).expect("tie operations keep lists valid");
    if let Some(mut m) = metadata {
        m.tie_ops += applied;
        out = out.with_metadata(m);
    }
    TieOutcome {
        instance: out,
        applied,
        skipped,
        warning: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    fn total_len(inst: &Instance) -> usize {
        inst.agents().map(|x| inst.prefs(x).len()).sum()
    }

    fn symmetric(inst: &Instance) -> bool {
        inst.agents()
            .all(|x| inst.prefs(x).iter().all(|y| inst.accepts(y, x)))
    }

    #[test]
    fn complete_graph() {
        let inst = generate_sri(&GenConfig::new(4, 1.0, 3)).unwrap();
        for x in inst.agents() {
            assert_eq!(inst.prefs(x).len(), 3);
            assert!(inst.prefs(x).is_strict());
        }
    }

    #[test]
    fn empty_graph() {
        let inst = generate_sri(&GenConfig::new(10, 0.0, 3)).unwrap();
        assert!(inst.agents().all(|x| inst.prefs(x).is_empty()));
    }

    #[test]
    fn reproducible_and_symmetric() {
        let cfg = GenConfig::new(30, 0.4, 77);
        let a = generate_sri(&cfg).unwrap();
        let b = generate_sri(&cfg).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        assert!(symmetric(&a));
        let c = generate_sri(&GenConfig::new(30, 0.4, 78)).unwrap();
        assert_ne!(a.to_text(), c.to_text());
    }

    #[test]
    fn metadata_records_completeness() {
        let inst = generate_sri(&GenConfig::new(5, 0.25, 1)).unwrap();
        let m = inst.metadata().unwrap();
        assert_eq!(m.completeness(), 25.0);
        assert_eq!(m.seed, 1);
    }

    #[test]
    fn invalid_configs() {
        assert!(generate_sri(&GenConfig::new(0, 0.5, 1)).is_err());
        assert!(generate_sri(&GenConfig::new(5, 1.5, 1)).is_err());
        assert!(GenConfig::new(5, 0.5, 1)
            .with_ties(-1.0)
            .validate()
            .is_err());
    }

    #[test]
    fn tie_count_rounds() {
        assert_eq!(GenConfig::new(20, 0.25, 0).with_ties(25.0).tie_count(), 5);
        assert_eq!(GenConfig::new(10, 0.25, 0).with_ties(25.0).tie_count(), 3);
        assert_eq!(GenConfig::new(10, 0.25, 0).tie_count(), 0);
    }

    #[test]
    fn complete_instance_admits_no_ties() {
        let inst = generate_sri(&GenConfig::new(6, 1.0, 5)).unwrap();
        let out = add_ties(&inst, 3, 9, TieOptions::default());
        assert!(out.warning);
        assert_eq!(out.applied, 0);
        assert_eq!(out.skipped, 3);
        assert_eq!(out.instance, inst);
    }

    #[test]
    fn zero_ties_is_identity() {
        let inst = generate_sri(&GenConfig::new(12, 0.3, 5)).unwrap();
        let out = add_ties(&inst, 0, 9, TieOptions::default());
        assert!(!out.warning);
        assert_eq!(out.instance, inst);
    }

    #[test]
    fn one_tie_on_sri8() {
        let sri8 = "a: c e f g d h\nb: d f h c g\nc: a b f h e d\nd: h g e a b c\n\
                    e: g c b d a f\nf: e a g c h b\ng: f h d b c\nh: b d a e f\n";
        let inst = parse_instance(sri8).unwrap();
        let out = add_ties(&inst, 1, 2024, TieOptions::default());
        assert_eq!(out.applied, 1);
        assert_eq!(total_len(&out.instance), total_len(&inst) + 1);
        let changed: Vec<AgentId> = inst
            .agents()
            .filter(|&x| inst.prefs(x) != out.instance.prefs(x))
            .collect();
        assert_eq!(changed.len(), 1);
        let x = changed[0];
        let before = inst.prefs(x);
        let after = out.instance.prefs(x);
        assert_eq!(after.group_count(), before.group_count());
        let new: Vec<AgentId> = after.iter().filter(|y| !inst.accepts(x, *y)).collect();
        assert_eq!(new.len(), 1);
        // the new agent shares its group with exactly one former member
        let g = after.groups().iter().find(|g| g.contains(&new[0])).unwrap();
        assert_eq!(g.len(), 2);
        assert!(!out.instance.mutually_acceptable(x, new[0]));
    }

    #[test]
    fn symmetric_ties_create_mutual_pairs() {
        let inst = generate_sri(&GenConfig::new(20, 0.25, 11)).unwrap();
        let out = add_ties(&inst, 5, 3, TieOptions { symmetric: true });
        assert!(out.applied > 0);
        assert_eq!(total_len(&out.instance), total_len(&inst) + 2 * out.applied);
        assert!(symmetric(&out.instance));
    }

    #[test]
    fn ties_are_reproducible() {
        let cfg = GenConfig::new(20, 0.25, 8).with_ties(50.0);
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.instance.to_text(), b.instance.to_text());
        assert_eq!(a.applied + a.skipped, 10);
        assert_eq!(a.instance.metadata().unwrap().tie_ops, a.applied);
    }
}
