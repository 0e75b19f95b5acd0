use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;
use crate::fixtures::{SRI4, SRI7, SRI8};
use crate::generator::{generate, GenConfig};
use crate::instance::parse_instance;
use crate::matching::{parse_matching, validate_matching};

fn m(inst: &Instance, text: &str) -> Matching {
    parse_matching(inst, text).unwrap()
}

fn set(ms: Vec<Matching>) -> BTreeSet<Matching> {
    ms.into_iter().collect()
}

#[test]
fn sri7_decision_and_enumeration() {
    let inst = parse_instance(SRI7).unwrap();
    let expected = m(&inst, "a b\nc d\nf g\ne e\n");
    let r = solve_decision(&inst);
    assert_eq!(r.status, Status::Stable);
    assert_eq!(r.matching.as_ref(), Some(&expected));
    assert_eq!(enumerate_all(&inst, None), vec![expected]);
}

#[test]
fn sri4_has_no_stable_matching() {
    let inst = parse_instance(SRI4).unwrap();
    let r = solve_decision(&inst);
    assert_eq!(r.status, Status::NoStable);
    assert!(r.matching.is_none());
    assert!(enumerate_all(&inst, None).is_empty());
    assert_eq!(solve_egalitarian(&inst).status, Status::NoStable);
    assert_eq!(solve_rank_maximal(&inst).status, Status::NoStable);
}

#[test]
fn sri8_two_stable_matchings() {
    let inst = parse_instance(SRI8).unwrap();
    let m1 = m(&inst, "a c\nb h\nd e\nf g\n");
    let m2 = m(&inst, "a c\nb h\nd g\ne f\n");
    assert_eq!(set(enumerate_all(&inst, None)), set(vec![m1, m2]));
    assert_eq!(enumerate_all(&inst, Some(1)).len(), 1);
}

#[test]
fn sri8_costs_and_profiles_by_hand() {
    let inst = parse_instance(SRI8).unwrap();
    let m1 = m(&inst, "a c\nb h\nd e\nf g\n");
    let m2 = m(&inst, "a c\nb h\nd g\ne f\n");
    // a1 c1 b3 h1 d3 e4 f3 g1
    assert_eq!(egalitarian_cost(&inst, &m1), 17);
    // a1 c1 b3 h1 d2 g3 e6 f1
    assert_eq!(egalitarian_cost(&inst, &m2), 18);
    assert_eq!(Profile::of(&inst, &m1).counts(), &[4, 0, 3, 1]);
    assert_eq!(Profile::of(&inst, &m2).counts(), &[4, 1, 2, 0, 0, 1]);
    assert!(Profile::of(&inst, &m2) > Profile::of(&inst, &m1));
}

#[test]
fn sri8_optima_match_oracle() {
    let inst = parse_instance(SRI8).unwrap();
    let m1 = m(&inst, "a c\nb h\nd e\nf g\n");
    let m2 = m(&inst, "a c\nb h\nd g\ne f\n");

    let oracle = brute_force_oracle(&inst, Mode::Egalitarian)
        .unwrap()
        .into_result()
        .unwrap();
    assert_eq!(oracle.objective, Some(17));
    let egal = solve_egalitarian(&inst);
    assert_eq!(egal.status, Status::Optimal);
    assert_eq!(egal.objective, Some(17));
    assert_eq!(egal.matching, Some(m1));

    let oracle = brute_force_oracle(&inst, Mode::RankMaximal)
        .unwrap()
        .into_result()
        .unwrap();
    assert_eq!(oracle.matching.as_ref(), Some(&m2));
    let rm = solve_rank_maximal(&inst);
    assert_eq!(rm.status, Status::Optimal);
    assert_eq!(rm.matching, Some(m2));
}

#[test]
fn sri4_almost_stable_is_one() {
    let inst = parse_instance(SRI4).unwrap();
    let oracle = brute_force_oracle(&inst, Mode::Almost)
        .unwrap()
        .into_result()
        .unwrap();
    assert_eq!(oracle.objective, Some(1));
    let r = solve_almost_stable(&inst);
    assert_eq!(r.status, Status::Optimal);
    assert_eq!(r.objective, Some(1));
    let got = r.matching.unwrap();
    assert!(validate_matching(&inst, &got));
    assert_eq!(stability::blocking_pairs(&inst, &got).len(), 1);
}

#[test]
fn sri7_optimisers_agree_on_unique_matching() {
    let inst = parse_instance(SRI7).unwrap();
    let unique = m(&inst, "a b\nc d\nf g\n");
    assert_eq!(solve_egalitarian(&inst).matching.as_ref(), Some(&unique));
    assert_eq!(solve_rank_maximal(&inst).matching.as_ref(), Some(&unique));
    let almost = solve_almost_stable(&inst);
    assert_eq!(almost.objective, Some(0));
    assert_eq!(almost.matching, Some(unique));
}

#[test]
fn two_agents_listing_each_other() {
    let inst = parse_instance("a: b\nb: a\n").unwrap();
    let pair = m(&inst, "a b\n");
    assert_eq!(solve_decision(&inst).matching.as_ref(), Some(&pair));
    assert_eq!(solve_almost_stable(&inst).objective, Some(0));
    assert_eq!(solve_egalitarian(&inst).objective, Some(2));
}

#[test]
fn empty_instance_everyone_single() {
    let inst = parse_instance("a:\nb:\nc:\n").unwrap();
    let r = solve_decision(&inst);
    assert_eq!(r.status, Status::Stable);
    assert_eq!(r.matching, Some(Matching::all_single(3)));
    assert_eq!(solve_egalitarian(&inst).objective, Some(3));
    assert_eq!(solve_rank_maximal(&inst).profile, Some(Profile::default()));
}

#[test]
fn brute_force_guard() {
    let big = generate(&GenConfig::new(ORACLE_MAX_AGENTS + 1, 0.5, 1))
        .unwrap()
        .instance;
    assert!(matches!(
        brute_force_oracle(&big, Mode::All),
        Err(Error::TooLarge { .. })
    ));
}

#[test]
fn brute_force_fixture_answers() {
    let sri8 = parse_instance(SRI8).unwrap();
    let all = brute_force_oracle(&sri8, Mode::All)
        .unwrap()
        .into_all()
        .unwrap();
    assert_eq!(all.len(), 2);
    let sri4 = parse_instance(SRI4).unwrap();
    let r = brute_force_oracle(&sri4, Mode::Decision)
        .unwrap()
        .into_result()
        .unwrap();
    assert_eq!(r.status, Status::NoStable);
}

#[test]
fn timeout_reports_unknown() {
    let inst = parse_instance(SRI8).unwrap();
    let r = Solver::new(&inst).with_timeout(Duration::ZERO).decision();
    assert!(r.stats.timed_out);
    assert_eq!(r.status, Status::Unknown);
}

#[test]
fn ties_can_create_stability() {
    // sri4 with c indifferent between a and b removes the cycle around {b, c}
    let inst = parse_instance("a: b c d\nb: c a d\nc: (a b) d\nd: a b c\n").unwrap();
    let all = enumerate_all(&inst, None);
    let oracle = brute_force_oracle(&inst, Mode::All)
        .unwrap()
        .into_all()
        .unwrap();
    assert_eq!(set(all), set(oracle));
}

#[test]
fn profile_ordering() {
    let a = Profile::from_counts(vec![4, 1, 2, 0]);
    let b = Profile::from_counts(vec![4, 0, 3, 1]);
    assert!(a > b);
    assert_eq!(a.counts(), &[4, 1, 2]);
    assert_eq!(
        Profile::from_counts(vec![1, 0]),
        Profile::from_counts(vec![1])
    );
    assert_eq!(a.matched(), 7);
}

#[test]
fn mode_names_round_trip() {
    for mode in Mode::ALL {
        assert_eq!(mode.as_str().parse::<Mode>().unwrap(), mode);
    }
    assert!("fast".parse::<Mode>().is_err());
}

fn random_instance() -> impl Strategy<Value = Instance> {
    (
        1usize..=8,
        prop::sample::select(vec![0.25, 0.5, 1.0]),
        any::<u64>(),
        prop::bool::ANY,
    )
        .prop_map(|(n, p, seed, ties)| {
            let cfg = GenConfig::new(n, p, seed).with_ties(if ties { 50.0 } else { 0.0 });
            generate(&cfg).unwrap().instance
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn enumeration_matches_oracle(inst in random_instance()) {
        let got = enumerate_all(&inst, None);
        for mm in &got {
            prop_assert!(validate_matching(&inst, mm));
            prop_assert!(stability::is_stable(&inst, mm));
        }
        let unique = set(got.clone());
        prop_assert_eq!(unique.len(), got.len());
        let oracle = brute_force_oracle(&inst, Mode::All).unwrap().into_all().unwrap();
        prop_assert_eq!(unique, set(oracle));
    }

    #[test]
    fn optimisers_match_oracle(inst in random_instance()) {
        let egal = solve_egalitarian(&inst);
        let o = brute_force_oracle(&inst, Mode::Egalitarian).unwrap().into_result().unwrap();
        prop_assert_eq!(egal.status, o.status);
        prop_assert_eq!(egal.objective, o.objective);

        let rm = solve_rank_maximal(&inst);
        let o = brute_force_oracle(&inst, Mode::RankMaximal).unwrap().into_result().unwrap();
        prop_assert_eq!(rm.status, o.status);
        prop_assert_eq!(rm.profile, o.profile);

        let almost = solve_almost_stable(&inst);
        let o = brute_force_oracle(&inst, Mode::Almost).unwrap().into_result().unwrap();
        prop_assert_eq!(almost.objective, o.objective);
        let am = almost.matching.unwrap();
        prop_assert!(validate_matching(&inst, &am));
        prop_assert_eq!(stability::blocking_pairs(&inst, &am).len() as u64, almost.objective.unwrap());

        let decision = solve_decision(&inst);
        prop_assert_eq!(decision.status == Status::Stable, almost.objective == Some(0));
    }

    #[test]
    fn optima_dominate_every_stable_matching(inst in random_instance()) {
        let all = enumerate_all(&inst, None);
        if let Some(cost) = solve_egalitarian(&inst).objective {
            prop_assert!(all.iter().all(|mm| cost <= egalitarian_cost(&inst, mm)));
        }
        if let Some(best) = solve_rank_maximal(&inst).profile {
            prop_assert!(all.iter().all(|mm| best >= Profile::of(&inst, mm)));
        }
    }

    #[test]
    fn deterministic(inst in random_instance()) {
        prop_assert_eq!(solve_egalitarian(&inst).matching, solve_egalitarian(&inst).matching);
        prop_assert_eq!(enumerate_all(&inst, None), enumerate_all(&inst, None));
    }
}
