use electctl_core::elections::{Ballot, CandidateSet, Profile, VotingRule};
use electctl_core::generate::{candidate_ids, random_approval_profile, random_ranked_profile};
use electctl_core::oracle::{enumerate_bipartitions, enumerate_equipartitions, enumerate_k_partitions, oracle_solve, DEFAULT_BUDGET};
use electctl_core::two_stage::{ControlInstance, Problem, TieRule};
use electctl_core::winners;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One-stage winners among `cands` over the ballots `voters`, computed from
/// the raw ballots.
fn reference_winners(rule: VotingRule, profile: &Profile, cands: &[usize], voters: &[usize]) -> Vec<usize> {
    if cands.is_empty() {
        return vec![];
    }
    let ballots: Vec<&Ballot> = voters.iter().map(|&v| &profile.ballots()[v]).collect();
    let argmax = |score: &dyn Fn(usize) -> usize| {
        let best = cands.iter().map(|&c| score(c)).max().unwrap();
        cands.iter().copied().filter(|&c| score(c) == best).collect()
    };
    match rule {
        VotingRule::Plurality => argmax(&|c| {
            ballots
                .iter()
                .filter(|b| match b {
                    Ballot::Ranking(o) => o.iter().find(|x| cands.contains(x)) == Some(&c),
                    _ => false,
                })
                .count()
        }),
        VotingRule::Approval => argmax(&|c| {
            ballots
                .iter()
                .filter(|b| matches!(b, Ballot::Approval(f) if f[c]))
                .count()
        }),
        VotingRule::Condorcet | VotingRule::WeakCondorcet => {
            let above = |a: usize, b: usize| {
                ballots
                    .iter()
                    .filter(|bl| match bl {
                        Ballot::Ranking(o) => {
                            o.iter().position(|&x| x == a) < o.iter().position(|&x| x == b)
                        }
                        _ => false,
                    })
                    .count() as i64
            };
            let strict = rule == VotingRule::Condorcet;
            cands
                .iter()
                .copied()
                .filter(|&a| {
                    cands.iter().all(|&b| {
                        let m = above(a, b) - above(b, a);
                        a == b || m > 0 || (!strict && m == 0)
                    })
                })
                .collect()
        }
        VotingRule::SystemE => unreachable!("not covered by the reference"),
    }
}

fn survivors(tie: TieRule, won: Vec<usize>) -> Vec<usize> {
    match tie {
        TieRule::Promote => won,
        TieRule::Eliminate if won.len() == 1 => won,
        TieRule::Eliminate => vec![],
    }
}

fn final_unique(rule: VotingRule, profile: &Profile, mut finalists: Vec<usize>, p: usize) -> bool {
    finalists.sort_unstable();
    finalists.dedup();
    let all: Vec<usize> = (0..profile.len()).collect();
    reference_winners(rule, profile, &finalists, &all) == vec![p]
}

fn reference_voter_control(rule: VotingRule, tie: TieRule, profile: &Profile, p: usize, parts: &[Vec<usize>]) -> bool {
    let all: Vec<usize> = (0..profile.candidates().len()).collect();
    let finalists = parts
        .iter()
        .flat_map(|part| survivors(tie, reference_winners(rule, profile, &all, part)))
        .collect();
    final_unique(rule, profile, finalists, p)
}

fn reference_candidate_control(rule: VotingRule, tie: TieRule, profile: &Profile, p: usize, c1: &[usize], c2: &[usize]) -> bool {
    let all: Vec<usize> = (0..profile.len()).collect();
    let mut finalists = survivors(tie, reference_winners(rule, profile, c1, &all));
    finalists.extend(survivors(tie, reference_winners(rule, profile, c2, &all)));
    final_unique(rule, profile, finalists, p)
}

fn random_instance(rng: &mut ChaCha8Rng, rule: VotingRule) -> (Profile, usize, TieRule) {
    let m = rng.gen_range(1..=4);
    let cands = CandidateSet::from_ids(&candidate_ids(m)).unwrap();
    let n = rng.gen_range(0..=7);
    let prof = if rule == VotingRule::Approval {
        random_approval_profile(rng, &cands, n, 0.5)
    } else {
        random_ranked_profile(rng, &cands, n)
    };
    let tie = if rng.gen_bool(0.5) { TieRule::Eliminate } else { TieRule::Promote };
    (prof, rng.gen_range(0..m), tie)
}

const RULES: [VotingRule; 4] = [VotingRule::Plurality, VotingRule::Approval, VotingRule::Condorcet, VotingRule::WeakCondorcet];

fn build(rule: VotingRule, prof: &Profile, p: usize, problem: Problem, tie: TieRule, k: usize) -> ControlInstance {
    let id = prof.candidates().get(p).unwrap().id.clone();
    ControlInstance::builder(rule, prof.clone(), &id, problem).tie(tie).parts(k).build().unwrap()
}

#[test]
fn oracle_matches_reference_on_voter_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for i in 0..400 {
        let rule = RULES[i % 4];
        let (prof, p, tie) = random_instance(&mut rng, rule);
        let n = prof.len();
        let classic = enumerate_bipartitions(n).any(|(a, b)| reference_voter_control(rule, tie, &prof, p, &[a, b]));
        let equi = enumerate_equipartitions(n).any(|(a, b)| reference_voter_control(rule, tie, &prof, p, &[a, b]));
        let three = enumerate_k_partitions(n, 3).any(|parts| reference_voter_control(rule, tie, &prof, p, &parts));
        for (problem, k, expect) in [(Problem::Ccpv, 2, classic), (Problem::Ccepv, 2, equi), (Problem::Ccpkv, 3, three)] {
            let d = oracle_solve(&build(rule, &prof, p, problem, tie, k), DEFAULT_BUDGET).unwrap();
            assert_eq!(d.is_yes(), expect, "#{i} {rule} {problem:?} {tie:?}");
        }
    }
}

#[test]
fn oracle_matches_reference_on_candidate_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for i in 0..400 {
        let rule = RULES[i % 4];
        let (prof, p, tie) = random_instance(&mut rng, rule);
        let m = prof.candidates().len();
        let classic = enumerate_bipartitions(m).any(|(a, b)| reference_candidate_control(rule, tie, &prof, p, &a, &b));
        let equi = enumerate_equipartitions(m).any(|(a, b)| reference_candidate_control(rule, tie, &prof, p, &a, &b));
        for (problem, expect) in [(Problem::Ccrpc, classic), (Problem::Ccrepc, equi)] {
            let d = oracle_solve(&build(rule, &prof, p, problem, tie, 2), DEFAULT_BUDGET).unwrap();
            assert_eq!(d.is_yes(), expect, "#{i} {rule} {problem:?} {tie:?}");
        }
    }
}

#[test]
fn yes_on_equipartition_implies_yes_on_partition() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for i in 0..300 {
        let rule = RULES[i % 4];
        let (prof, p, tie) = random_instance(&mut rng, rule);
        let equi = oracle_solve(&build(rule, &prof, p, Problem::Ccepv, tie, 2), DEFAULT_BUDGET).unwrap();
        let classic = oracle_solve(&build(rule, &prof, p, Problem::Ccpv, tie, 2), DEFAULT_BUDGET).unwrap();
        assert!(!equi.is_yes() || classic.is_yes(), "#{i}");
    }
}

fn relabel(prof: &Profile, perm: &[usize]) -> Profile {
    let cands = CandidateSet::from_ids(&perm.iter().map(|&i| prof.candidates().get(i).unwrap().id.clone()).collect::<Vec<_>>()).unwrap();
    let mut inverse = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inverse[old] = new;
    }
    let ballots = prof
        .ballots()
        .iter()
        .map(|b| match b {
            Ballot::Ranking(o) => Ballot::Ranking(o.iter().map(|&c| inverse[c]).collect()),
            Ballot::Approval(f) => Ballot::Approval(perm.iter().map(|&old| f[old]).collect()),
        })
        .collect();
    Profile::new(cands, prof.kind(), ballots).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn winners_do_not_depend_on_candidate_order(seed in any::<u64>(), rule_ix in 0usize..4, m in 1usize..=5, n in 0usize..=8) {
        let rule = RULES[rule_ix];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cands = CandidateSet::from_ids(&candidate_ids(m)).unwrap();
        let prof = if rule == VotingRule::Approval {
            random_approval_profile(&mut rng, &cands, n, 0.5)
        } else {
            random_ranked_profile(&mut rng, &cands, n)
        };
        let mut perm: Vec<usize> = (0..m).collect();
        perm.reverse();
        perm.rotate_left(seed as usize % m);
        let mut a: Vec<String> = winners(rule, &prof).unwrap().ids().iter().map(|s| s.to_string()).collect();
        let mut b: Vec<String> = winners(rule, &relabel(&prof, &perm)).unwrap().ids().iter().map(|s| s.to_string()).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn winners_match_reference(seed in any::<u64>(), rule_ix in 0usize..4, m in 1usize..=5, n in 0usize..=8) {
        let rule = RULES[rule_ix];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cands = CandidateSet::from_ids(&candidate_ids(m)).unwrap();
        let prof = if rule == VotingRule::Approval {
            random_approval_profile(&mut rng, &cands, n, 0.5)
        } else {
            random_ranked_profile(&mut rng, &cands, n)
        };
        let all: Vec<usize> = (0..m).collect();
        let voters: Vec<usize> = (0..n).collect();
        let expect: Vec<String> = reference_winners(rule, &prof, &all, &voters).iter().map(|&c| prof.candidates().get(c).unwrap().id.clone()).collect();
        let got: Vec<String> = winners(rule, &prof).unwrap().ids().iter().map(|s| s.to_string()).collect();
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn condorcet_winner_is_unique(seed in any::<u64>(), m in 1usize..=6, n in 0usize..=9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cands = CandidateSet::from_ids(&candidate_ids(m)).unwrap();
        let prof = random_ranked_profile(&mut rng, &cands, n);
        let strict = winners(VotingRule::Condorcet, &prof).unwrap();
        prop_assert!(strict.len() <= 1);
        let weak = winners(VotingRule::WeakCondorcet, &prof).unwrap();
        prop_assert!(strict.iter().all(|c| weak.contains(&c.id)));
    }
}
