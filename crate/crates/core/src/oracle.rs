//! Exhaustive ground-truth solver for every control family.
//!
//! Witnesses are enumerated in a fixed order and replayed with the two-stage
//! semantics; the first accepted witness is returned. Instances whose witness
//! space exceeds the budget are reported as [`OracleError::BudgetExceeded`],
//! never as "no".

use itertools::Itertools;
use thiserror::Error;

use crate::two_stage::{
    replay_with, selection_winners, ControlInstance, Decision, Evaluator, Problem, SolveStats,
    TieRule, Witness,
};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("witness space of {estimate} exceeds budget {budget}")]
    BudgetExceeded { estimate: u128, budget: u64 },
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

/// Number of unordered balanced bipartitions of `n` items.
pub fn equipartition_count(n: usize) -> u128 {
    if n % 2 == 1 {
        binomial(n, n / 2)
    } else if n == 0 {
        1
    } else {
        binomial(n, n / 2) / 2
    }
}

fn stirling2_upto(n: usize, k: usize) -> u128 {
    // S(i, j) row by row
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u128; k + 1];
        for j in 1..=k {
            next[j] = row[j - 1].saturating_add((j as u128).saturating_mul(row[j]));
        }
        row = next;
    }
    row.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

fn pow2(n: usize) -> u128 {
    if n >= 127 {
        u128::MAX
    } else {
        1u128 << n
    }
}

/// Size of the witness space the oracle would enumerate for `instance`.
pub fn witness_space(instance: &ControlInstance) -> u128 {
    let voters = instance.profile().len();
    let cands = instance.profile().candidates().len();
    let groups = instance.groups().map_or(0, |g| g.len());
    match instance.problem() {
        Problem::Ccpv => pow2(voters.saturating_sub(1)),
        Problem::Ccepv => equipartition_count(voters),
        Problem::Ccrpc => pow2(cands.saturating_sub(1)),
        Problem::Ccrepc => equipartition_count(cands),
        Problem::Ccpkv => stirling2_upto(voters, instance.parts().unwrap_or(2)),
        Problem::Ccpvg => pow2(groups.saturating_sub(1)),
        Problem::Ccdvg | Problem::Ccavg => pow2(groups),
    }
}

/// Unordered bipartitions of `0..n`; the part holding item 0 comes first.
/// For `n == 0` the single split `(∅, ∅)` is produced.
pub fn enumerate_bipartitions(n: usize) -> impl Iterator<Item = (Vec<usize>, Vec<usize>)> {
    let free = n.saturating_sub(1);
    (0..(1u64 << free)).map(move |mask| split_by_mask(n, mask))
}

fn split_by_mask(n: usize, mask: u64) -> (Vec<usize>, Vec<usize>) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    if n > 0 {
        a.push(0);
    }
    for i in 1..n {
        if mask >> (i - 1) & 1 == 1 {
            b.push(i);
        } else {
            a.push(i);
        }
    }
    (a, b)
}

/// Unordered bipartitions of `0..n` whose part sizes differ by at most one.
/// The part holding item 0 comes first; for odd `n` it takes the larger size
/// first, then the smaller.
pub fn enumerate_equipartitions(n: usize) -> Box<dyn Iterator<Item = (Vec<usize>, Vec<usize>)>> {
    if n == 0 {
        return Box::new(std::iter::once((Vec::new(), Vec::new())));
    }
    let hi = n - n / 2;
    let mut sizes = vec![hi];
    if n % 2 == 1 && n > 1 {
        sizes.push(n / 2);
    }
    Box::new(sizes.into_iter().flat_map(move |size| {
        (1..n).combinations(size - 1).map(move |rest| {
            let mut first = Vec::with_capacity(size);
            first.push(0);
            first.extend(rest);
            let second = (1..n).filter(|i| !first.contains(i)).collect();
            (first, second)
        })
    }))
}

/// Partitions of `0..n` into exactly `k` labelled parts, one representative
/// per part permutation: parts are ordered by their least element, with empty
/// parts last. Generated as restricted growth strings.
pub fn enumerate_k_partitions(n: usize, k: usize) -> impl Iterator<Item = Vec<Vec<usize>>> {
    KPartitions::new(n, k)
}

struct KPartitions {
    n: usize,
    k: usize,
    labels: Vec<usize>,
    done: bool,
}

impl KPartitions {
    fn new(n: usize, k: usize) -> Self {
        KPartitions {
            n,
            k,
            labels: vec![0; n],
            done: k == 0 && n > 0,
        }
    }

    fn advance(&mut self) -> bool {
        // next restricted growth string with values < k
        for i in (1..self.n).rev() {
            let prefix_max = self.labels[..i].iter().copied().max().unwrap_or(0);
            if self.labels[i] <= prefix_max && self.labels[i] + 1 < self.k {
                self.labels[i] += 1;
                for l in &mut self.labels[i + 1..] {
                    *l = 0;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for KPartitions {
    type Item = Vec<Vec<usize>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut parts = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            parts[l].push(i);
        }
        self.done = !self.advance();
        Some(parts)
    }
}

pub fn oracle_solve(instance: &ControlInstance, budget: u64) -> Result<Decision, OracleError> {
    let estimate = witness_space(instance);
    if estimate > budget as u128 {
        return Err(OracleError::BudgetExceeded { estimate, budget });
    }
    let eval = Evaluator::new(instance.rule(), instance.profile()).expect("validated instance");
    let mut stats = SolveStats::default();
    let p = instance.distinguished();
    let voters = instance.profile().len();
    let cands = instance.profile().candidates().len();
    let tie = instance.tie().unwrap_or(TieRule::Eliminate);

    let try_voters = |parts: Vec<Vec<usize>>, stats: &mut SolveStats| -> Option<Witness> {
        stats.partitions_enumerated += 1;
        (eval.voter_partition(tie, &parts).winners == [p]).then_some(Witness::VoterPartition(parts))
    };

    let found = match instance.problem() {
        Problem::Ccpv => enumerate_bipartitions(voters).find_map(|(a, b)| try_voters(vec![a, b], &mut stats)),
        Problem::Ccepv => enumerate_equipartitions(voters).find_map(|(a, b)| try_voters(vec![a, b], &mut stats)),
        Problem::Ccpkv => {
            let k = instance.parts().expect("validated k");
            enumerate_k_partitions(voters, k).find_map(|parts| try_voters(parts, &mut stats))
        }
        Problem::Ccpvg => {
            let groups = instance.groups().expect("validated groups");
            enumerate_bipartitions(groups.len()).find_map(|(ga, gb)| {
                let expand = |gs: &[usize]| -> Vec<usize> {
                    let mut v: Vec<usize> = gs.iter().flat_map(|&g| groups.members(g).iter().copied()).collect();
                    v.sort_unstable();
                    v
                };
                try_voters(vec![expand(&ga), expand(&gb)], &mut stats)
            })
        }
        Problem::Ccrpc | Problem::Ccrepc => {
            let splits: Box<dyn Iterator<Item = (Vec<usize>, Vec<usize>)>> = if instance.problem() == Problem::Ccrpc {
                Box::new(enumerate_bipartitions(cands))
            } else {
                enumerate_equipartitions(cands)
            };
            splits.into_iter().find_map(|(c1, c2)| {
                stats.partitions_enumerated += 1;
                (eval.candidate_partition(tie, &c1, &c2).winners == [p])
                    .then_some(Witness::CandidatePartition(c1, c2))
            })
        }
        Problem::Ccdvg | Problem::Ccavg => {
            let groups = instance.groups().expect("validated groups");
            let limit = instance.limit().expect("validated limit");
            let g = groups.len();
            (0..pow2(g) as u64).find_map(|mask| {
                let chosen: Vec<bool> = (0..g).map(|i| mask >> i & 1 == 1).collect();
                let size: usize = (0..g).filter(|&i| chosen[i]).map(|i| groups.members(i).len()).sum();
                if size > limit {
                    return None;
                }
                stats.partitions_enumerated += 1;
                (selection_winners(instance, &chosen) == [p]).then(|| {
                    Witness::GroupSelection(
                        (0..g).filter(|&i| chosen[i]).map(|i| groups.labels()[i].clone()).collect(),
                    )
                })
            })
        }
    };

    Ok(match found {
        Some(w) => {
            debug_assert!(replay_with(&eval, instance, &w).map(|r| r.accepted()).unwrap_or(false));
            Decision::yes(w, stats)
        }
        None => Decision::no(stats),
    })
}
