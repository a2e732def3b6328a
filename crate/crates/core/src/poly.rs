//! Polynomial-time decision procedures.
//!
//! Every solver returns a [`Decision`] whose witness, when present, is
//! accepted by [`crate::two_stage::verify_witness`].

use std::collections::HashMap;

use itertools::Itertools;
use thiserror::Error;

use crate::elections::{score_plurality, Profile, VotingRule};
use crate::two_stage::{
    ControlInstance, Decision, Evaluator, Problem, SolveStats, TieRule, Witness,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error(
        "no polynomial solver for {rule}-{problem}-{tie}; available: {}",
        available_solvers().join(", ")
    )]
    Unsupported {
        problem: Problem,
        rule: VotingRule,
        tie: String,
    },
}

/// Problem/rule/tie combinations with a polynomial solver.
pub const SOLVERS: [(Problem, VotingRule, TieRule); 4] = [
    (Problem::Ccepv, VotingRule::Plurality, TieRule::Eliminate),
    (Problem::Ccpkv, VotingRule::Plurality, TieRule::Eliminate),
    (Problem::Ccrpc, VotingRule::WeakCondorcet, TieRule::Promote),
    (Problem::Ccepv, VotingRule::SystemE, TieRule::Promote),
];

pub fn available_solvers() -> Vec<String> {
    SOLVERS
        .iter()
        .map(|(p, r, t)| format!("{r}-{p}-{t}"))
        .collect()
}

fn require(instance: &ControlInstance, problem: Problem, rule: VotingRule, tie: TieRule) -> Result<(), SolverError> {
    if instance.problem() == problem && instance.rule() == rule && instance.tie() == Some(tie) {
        Ok(())
    } else {
        Err(SolverError::Unsupported {
            problem: instance.problem(),
            rule: instance.rule(),
            tie: instance.tie().map_or("-".to_string(), |t| t.to_string()),
        })
    }
}

/// Dispatches to the polynomial solver for the instance's combination.
pub fn solve(instance: &ControlInstance) -> Result<Decision, SolverError> {
    match (instance.problem(), instance.rule(), instance.tie()) {
        (Problem::Ccepv, VotingRule::Plurality, Some(TieRule::Eliminate)) => {
            solve_plurality_ccepv_te(instance)
        }
        (Problem::Ccpkv, VotingRule::Plurality, Some(TieRule::Eliminate)) => {
            solve_plurality_ccpkv_te(instance)
        }
        (Problem::Ccrpc, VotingRule::WeakCondorcet, Some(TieRule::Promote)) => {
            solve_weakcondorcet_ccrpc_tp(instance)
        }
        (Problem::Ccepv, VotingRule::SystemE, Some(TieRule::Promote)) => {
            solve_system_e_ccepv_tp(instance)
        }
        _ => Err(SolverError::Unsupported {
            problem: instance.problem(),
            rule: instance.rule(),
            tie: instance.tie().map_or("-".to_string(), |t| t.to_string()),
        }),
    }
}

/// Ballot indices grouped by top choice, in index order.
fn ballots_by_top(profile: &Profile) -> Vec<Vec<usize>> {
    let mut by_top = vec![Vec::new(); profile.candidates().len()];
    let all = vec![true; profile.candidates().len()];
    for i in 0..profile.len() {
        if let Some(top) = profile.top_among(i, &all) {
            by_top[top].push(i);
        }
    }
    by_top
}

/// Turns per-part top-choice counts `counts[h][part]` into ballot index sets.
fn realize(by_top: &[Vec<usize>], counts: &[Vec<usize>], parts: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); parts];
    for (h, row) in counts.iter().enumerate() {
        let mut pool = by_top[h].iter().copied();
        for (part, &n) in row.iter().enumerate() {
            out[part].extend(pool.by_ref().take(n));
        }
    }
    for part in &mut out {
        part.sort_unstable();
    }
    out
}

/// First-part allocation search shared by the three equipartition cases.
///
/// `first[h]` holds the number of `h`-topped ballots placed in the first
/// part; `floor[h]` is the least count allowed for `h` after moves. Votes of
/// the candidates in `movable` are moved one at a time (candidates in order)
/// into the second part until the split is balanced.
fn rebalance(first: &mut [usize], floor: &[usize], movable: &[usize], total: usize) -> bool {
    let lo = total / 2;
    let hi = total - lo;
    let mut size: usize = first.iter().sum();
    if size < lo {
        return false;
    }
    while size > hi {
        match movable.iter().find(|&&d| first[d] > floor[d]) {
            Some(&d) => {
                first[d] -= 1;
                size -= 1;
            }
            None => return false,
        }
    }
    true
}

/// Plurality-CCEPV-TE.
///
/// The distinguished candidate p wins by equipartition iff some equipartition
/// makes p the unique winner of the first part while the second part
/// (1) has a unique winner c that p beats head-to-head,
/// (2) has p among its winners, or
/// (3) has at least two winners.
/// Each condition is searched over the scores of the key candidates: the
/// first part is filled greedily with every other candidate's ballots up to
/// p's score minus one, then ballots are moved to the second part while its
/// condition still holds, until the parts are balanced.
pub fn solve_plurality_ccepv_te(instance: &ControlInstance) -> Result<Decision, SolverError> {
    require(instance, Problem::Ccepv, VotingRule::Plurality, TieRule::Eliminate)?;
    let profile = instance.profile();
    let p = instance.distinguished();
    let m = profile.candidates().len();
    let n = profile.len();
    let score = score_plurality(profile).expect("ranking profile");
    let by_top = ballots_by_top(profile);
    let eval = Evaluator::new(VotingRule::Plurality, profile).expect("ranking profile");
    let mut stats = SolveStats::default();

    let found = |first: Vec<usize>, stats: SolveStats| {
        let counts: Vec<Vec<usize>> = (0..m).map(|h| vec![first[h], score[h] - first[h]]).collect();
        Decision::yes(Witness::VoterPartition(realize(&by_top, &counts, 2)), stats)
    };
    let others = |skip: &[usize]| -> Vec<usize> { (0..m).filter(|h| !skip.contains(h)).collect() };

    // Case 1: unique second-part winner c, beaten by p in the final.
    for c in others(&[p]) {
        if eval.winners_all_voters(&[p, c]) != [p] {
            continue;
        }
        let rest = others(&[p, c]);
        for kp in 0..=score[p] {
            for kc in 0..=score[c] {
                stats.cases_examined += 1;
                let mut first = vec![0; m];
                first[p] = kp;
                first[c] = score[c] - kc;
                // p unique in the first part, c unique in the second
                if kp <= first[c] || kc <= score[p] - kp {
                    continue;
                }
                let mut floor = vec![0; m];
                let mut ok = true;
                for &d in &rest {
                    first[d] = score[d].min(kp - 1);
                    floor[d] = score[d].saturating_sub(kc - 1);
                    ok &= first[d] >= floor[d];
                }
                if ok && rebalance(&mut first, &floor, &rest, n) {
                    return Ok(found(first, stats));
                }
            }
        }
    }

    // Case 2: p among the second part's winners.
    let rest = others(&[p]);
    let start = if rest.is_empty() { 0 } else { 1 };
    for kp in start..=score[p] {
        stats.cases_examined += 1;
        let mut first = vec![0; m];
        first[p] = kp;
        let p_second = score[p] - kp;
        let mut floor = vec![0; m];
        let mut ok = true;
        for &d in &rest {
            first[d] = score[d].min(kp - 1);
            floor[d] = score[d].saturating_sub(p_second);
            ok &= first[d] >= floor[d];
        }
        if ok && rebalance(&mut first, &floor, &rest, n) {
            return Ok(found(first, stats));
        }
    }

    // Case 3: two candidates other than p tie for the second part's top.
    for (c, c2) in others(&[p]).into_iter().tuple_combinations() {
        let rest = others(&[p, c, c2]);
        for kp in 0..=score[p] {
            for kc in 0..=score[c].min(score[c2]) {
                stats.cases_examined += 1;
                let mut first = vec![0; m];
                first[p] = kp;
                first[c] = score[c] - kc;
                first[c2] = score[c2] - kc;
                if kp <= first[c] || kp <= first[c2] || score[p] - kp > kc {
                    continue;
                }
                let mut floor = vec![0; m];
                let mut ok = true;
                for &d in &rest {
                    first[d] = score[d].min(kp - 1);
                    floor[d] = score[d].saturating_sub(kc);
                    ok &= first[d] >= floor[d];
                }
                if ok && rebalance(&mut first, &floor, &rest, n) {
                    return Ok(found(first, stats));
                }
            }
        }
    }

    Ok(Decision::no(stats))
}

/// Guessed stage-one outcome of one part of a k-partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PartGuess {
    /// `who` is the unique winner with `score` top-choice votes.
    Wins { who: usize, score: usize },
    /// `a` and `b` (possibly with others) tie for the top with `score` votes.
    Tie { a: usize, b: usize, score: usize },
}

impl PartGuess {
    fn exact(&self, h: usize) -> Option<usize> {
        match *self {
            PartGuess::Wins { who, score } if who == h => Some(score),
            PartGuess::Tie { a, b, score } if a == h || b == h => Some(score),
            _ => None,
        }
    }

    fn cap(&self) -> usize {
        match *self {
            PartGuess::Wins { score, .. } => score - 1,
            PartGuess::Tie { score, .. } => score,
        }
    }
}

/// Plurality-CCPkV-TE for the instance's fixed number of parts k.
///
/// Stage-one plurality outcomes only depend on each part's top-choice
/// counts, and the final round only on the finalist set. Part 1 is p's
/// part, won uniquely with some score; each other part is either won
/// uniquely by a guessed candidate with a guessed score or eliminated by a
/// guessed tied pair at a guessed score. For every guess (other parts taken
/// as a multiset) the final round is checked directly and the count matrix is
/// checked per candidate: the exact entries must fit the candidate's score
/// and the remainder must fit under the caps of the remaining parts.
pub fn solve_plurality_ccpkv_te(instance: &ControlInstance) -> Result<Decision, SolverError> {
    require(instance, Problem::Ccpkv, VotingRule::Plurality, TieRule::Eliminate)?;
    let k = instance.parts().expect("validated k");
    let profile = instance.profile();
    let p = instance.distinguished();
    let m = profile.candidates().len();
    let score = score_plurality(profile).expect("ranking profile");
    let by_top = ballots_by_top(profile);
    let eval = Evaluator::new(VotingRule::Plurality, profile).expect("ranking profile");
    let mut stats = SolveStats::default();

    if m == 1 {
        stats.cases_examined = 1;
        let mut parts = vec![Vec::new(); k];
        parts[0] = (0..profile.len()).collect();
        return Ok(Decision::yes(Witness::VoterPartition(parts), stats));
    }

    let mut guesses = Vec::new();
    for (who, &top) in score.iter().enumerate() {
        for s in 1..=top {
            guesses.push(PartGuess::Wins { who, score: s });
        }
    }
    for (a, b) in (0..m).tuple_combinations() {
        for s in 0..=score[a].min(score[b]) {
            guesses.push(PartGuess::Tie { a, b, score: s });
        }
    }

    let mut final_ok: HashMap<Vec<usize>, bool> = HashMap::new();
    for s1 in 1..=score[p] {
        let first = PartGuess::Wins { who: p, score: s1 };
        for rest in (0..guesses.len()).combinations_with_replacement(k - 1) {
            stats.cases_examined += 1;
            let parts: Vec<PartGuess> = std::iter::once(first)
                .chain(rest.iter().map(|&g| guesses[g]))
                .collect();

            let mut finalists: Vec<usize> = parts
                .iter()
                .filter_map(|g| match *g {
                    PartGuess::Wins { who, .. } => Some(who),
                    PartGuess::Tie { .. } => None,
                })
                .collect();
            finalists.sort_unstable();
            finalists.dedup();
            let wins = *final_ok
                .entry(finalists)
                .or_insert_with_key(|f| eval.winners_all_voters(f) == [p]);
            if !wins {
                continue;
            }

            if let Some(counts) = fill_counts(&parts, &score) {
                let witness = realize(&by_top, &counts, k);
                return Ok(Decision::yes(Witness::VoterPartition(witness), stats));
            }
        }
    }
    Ok(Decision::no(stats))
}

/// Per-candidate feasibility of a guessed k-partition. Returns the count
/// matrix `counts[h][part]` with remainders placed greedily in part order.
fn fill_counts(parts: &[PartGuess], score: &[usize]) -> Option<Vec<Vec<usize>>> {
    let mut counts = Vec::with_capacity(score.len());
    for (h, &total) in score.iter().enumerate() {
        let mut row = vec![0; parts.len()];
        let mut placed = 0;
        for (i, g) in parts.iter().enumerate() {
            if let Some(s) = g.exact(h) {
                row[i] = s;
                placed += s;
            }
        }
        let mut left = total.checked_sub(placed)?;
        for (i, g) in parts.iter().enumerate() {
            if g.exact(h).is_none() {
                let take = left.min(g.cap());
                row[i] = take;
                left -= take;
            }
        }
        if left > 0 {
            return None;
        }
        counts.push(row);
    }
    Some(counts)
}

/// weakCondorcet-CCRPC-TP: p can be made the unique winner iff the partition
/// ({p}, C − {p}) does it.
pub fn solve_weakcondorcet_ccrpc_tp(instance: &ControlInstance) -> Result<Decision, SolverError> {
    require(instance, Problem::Ccrpc, VotingRule::WeakCondorcet, TieRule::Promote)?;
    let p = instance.distinguished();
    let eval = Evaluator::new(VotingRule::WeakCondorcet, instance.profile()).expect("ranking profile");
    let rest: Vec<usize> = (0..instance.profile().candidates().len())
        .filter(|&c| c != p)
        .collect();
    let stats = SolveStats {
        cases_examined: 1,
        partitions_enumerated: 1,
    };
    let outcome = eval.candidate_partition(TieRule::Promote, &[p], &rest);
    if outcome.winners == [p] {
        Ok(Decision::yes(Witness::CandidatePartition(vec![p], rest), stats))
    } else {
        Ok(Decision::no(stats))
    }
}

/// System-E-CCEPV-TP. Special candidates never reach the runoff unless all
/// four are present, and then exactly `|V1| mod 4` and `|V2| mod 4` do;
/// balanced part sizes never yield the pairs {0,2} or {1,3} the runoff needs,
/// so the runoff never has a winner.
pub fn solve_system_e_ccepv_tp(instance: &ControlInstance) -> Result<Decision, SolverError> {
    require(instance, Problem::Ccepv, VotingRule::SystemE, TieRule::Promote)?;
    Ok(Decision::no(SolveStats::default()))
}
