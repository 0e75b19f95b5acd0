//! Exhaustive reference answers for small instances.
//!
//! Enumerates every matching over mutually acceptable pairs and evaluates each
//! one directly with the pairwise blocking predicate. Nothing here shares code
//! with the search engine.

use std::time::Instant;

use super::{egalitarian_cost, Mode, Profile, SolveResult, Stats, Status};
use crate::error::{Error, Result};
use crate::instance::{AgentId, Instance};
use crate::matching::Matching;
use crate::stability;

pub const ORACLE_MAX_AGENTS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Result(SolveResult),
    All(Vec<Matching>),
}

impl OracleOutcome {
    pub fn into_result(self) -> Option<SolveResult> {
        match self {
            OracleOutcome::Result(r) => Some(r),
            OracleOutcome::All(_) => None,
        }
    }

    pub fn into_all(self) -> Option<Vec<Matching>> {
        match self {
            OracleOutcome::All(v) => Some(v),
            OracleOutcome::Result(_) => None,
        }
    }
}

/// Every valid matching of `inst`.
pub fn all_matchings(inst: &Instance) -> Vec<Matching> {
    fn rec(inst: &Instance, partner: &mut Vec<Option<usize>>, out: &mut Vec<Matching>) {
        let Some(x) = partner.iter().position(Option::is_none) else {
            out.push(Matching::from_partners(
                partner
                    .iter()
                    .map(|p| AgentId(p.expect("assigned")))
                    .collect(),
            ));
            return;
        };
        partner[x] = Some(x);
        rec(inst, partner, out);
        for y in x + 1..partner.len() {
            if partner[y].is_none() && inst.mutually_acceptable(AgentId(x), AgentId(y)) {
                partner[x] = Some(y);
                partner[y] = Some(x);
                rec(inst, partner, out);
                partner[y] = None;
            }
        }
        partner[x] = None;
    }
    let mut out = Vec::new();
    rec(inst, &mut vec![None; inst.len()], &mut out);
    out
}

pub fn brute_force_oracle(inst: &Instance, mode: Mode) -> Result<OracleOutcome> {
    if inst.len() > ORACLE_MAX_AGENTS {
        return Err(Error::TooLarge {
            what: "oracle instance",
            size: inst.len(),
            limit: ORACLE_MAX_AGENTS,
        });
    }
    let start = Instant::now();
    let everything = all_matchings(inst);
    let nodes = everything.len() as u64;
    let stable: Vec<Matching> = everything
        .iter()
        .filter(|m| stability::blocking_pairs(inst, m).is_empty())
        .cloned()
        .collect();
    let stats = || Stats {
        nodes,
        elapsed: start.elapsed(),
        timed_out: false,
    };
    let done = |status, m: Option<Matching>, objective| {
        let profile = m.as_ref().map(|m| Profile::of(inst, m));
        OracleOutcome::Result(SolveResult {
            status,
            matching: m,
            objective,
            profile,
            stats: stats(),
        })
    };

    Ok(match mode {
        Mode::All => OracleOutcome::All(stable),
        Mode::Decision => match stable.into_iter().next() {
            Some(m) => done(Status::Stable, Some(m), None),
            None => done(Status::NoStable, None, None),
        },
        Mode::Egalitarian => {
            match stable
                .into_iter()
                .map(|m| (egalitarian_cost(inst, &m), m))
                .min_by_key(|(c, _)| *c)
            {
                Some((c, m)) => done(Status::Optimal, Some(m), Some(c)),
                None => done(Status::NoStable, None, None),
            }
        }
        Mode::RankMaximal => {
            // keep the best count at rank 1, then among those the best at rank 2, ...
            let mut pool: Vec<(Profile, Matching)> = stable
                .into_iter()
                .map(|m| (Profile::of(inst, &m), m))
                .collect();
            let max_rank = inst.len().saturating_sub(1).max(1);
            for r in 1..=max_rank {
                let best = pool.iter().map(|(p, _)| p.at(r)).max();
                if let Some(best) = best {
                    pool.retain(|(p, _)| p.at(r) == best);
                }
            }
            match pool.into_iter().next() {
                Some((_, m)) => done(Status::Optimal, Some(m), None),
                None => done(Status::NoStable, None, None),
            }
        }
        Mode::Almost => {
            let best = everything
                .into_iter()
                .map(|m| (stability::blocking_pairs(inst, &m).len() as u64, m))
                .min_by_key(|(c, _)| *c)
                .expect("the all-single matching always exists");
            done(Status::Optimal, Some(best.1), Some(best.0))
        }
    })
}
