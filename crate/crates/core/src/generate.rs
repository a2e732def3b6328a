//! Instance generators: exhaustive multiset profiles and seeded random
//! profiles.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::elections::{Ballot, BallotKind, CandidateSet, Profile};

/// Candidate ids `p, a, b, c, ...` (then `c4`, `c5`, ... beyond the alphabet).
pub fn candidate_ids(m: usize) -> Vec<String> {
    const NAMES: &str = "abcdefghijklmnoqrstuvwxyz";
    (0..m)
        .map(|i| match i {
            0 => "p".to_string(),
            i if i <= NAMES.len() => NAMES[i - 1..i].to_string(),
            i => format!("c{i}"),
        })
        .collect()
}

/// Every multiset of `n` rankings over `candidates`, each as a profile whose
/// ballots are sorted by ranking in lexicographic permutation order.
pub fn all_ranked_profiles(candidates: &CandidateSet, n: usize) -> Vec<Profile> {
    let orders: Vec<Vec<usize>> = (0..candidates.len()).permutations(candidates.len()).collect();
    (0..orders.len())
        .combinations_with_replacement(n)
        .map(|pick| {
            let ballots = pick.iter().map(|&o| Ballot::Ranking(orders[o].clone())).collect();
            Profile::new(candidates.clone(), BallotKind::Ranking, ballots).expect("permutations are valid")
        })
        .collect()
}

pub fn random_ranked_profile<R: Rng>(rng: &mut R, candidates: &CandidateSet, n: usize) -> Profile {
    let ballots = (0..n)
        .map(|_| {
            let mut order: Vec<usize> = (0..candidates.len()).collect();
            order.shuffle(rng);
            Ballot::Ranking(order)
        })
        .collect();
    Profile::new(candidates.clone(), BallotKind::Ranking, ballots).expect("permutations are valid")
}

/// Each voter approves each candidate independently with probability `density`.
pub fn random_approval_profile<R: Rng>(rng: &mut R, candidates: &CandidateSet, n: usize, density: f64) -> Profile {
    let ballots = (0..n)
        .map(|_| Ballot::Approval((0..candidates.len()).map(|_| rng.gen_bool(density)).collect()))
        .collect();
    Profile::new(candidates.clone(), BallotKind::Approval, ballots).expect("width matches")
}
