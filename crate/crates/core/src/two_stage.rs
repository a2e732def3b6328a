//! Control instances, witnesses and the two-stage election semantics.
//!
//! In every partition problem each part holds a subelection; its winners
//! survive to the final round according to the [`TieRule`], and the final
//! round runs the same voting rule over the survivors with all voters. The
//! distinguished candidate must be the sole final winner. Tie handling is
//! applied to subelections only, never to the final round.

use std::fmt;

use thiserror::Error;

use crate::elections::{winner_positions, ElectionError, MarginTable, Profile, VotingRule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error(transparent)]
    Election(#[from] ElectionError),
    #[error("{problem} needs a tie rule")]
    MissingTieRule { problem: Problem },
    #[error("{problem} needs parameter `{param}`")]
    MissingParameter { problem: Problem, param: &'static str },
    #[error("number of parts must be at least 2, got {0}")]
    TooFewParts(usize),
    #[error("group labels cover {labels} ballots but there are {ballots}")]
    GroupCount { labels: usize, ballots: usize },
    #[error("adder pool does not match the election: {0}")]
    PoolMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TwoStageError {
    #[error(transparent)]
    Election(#[from] ElectionError),
    #[error("ballot index {0} out of range")]
    BallotOutOfRange(usize),
    #[error("ballot index {0} appears in more than one part")]
    OverlappingParts(usize),
    #[error("ballot index {0} is in no part")]
    UncoveredBallot(usize),
    #[error("candidate position {0} out of range")]
    CandidateOutOfRange(usize),
    #[error("candidate position {0} is in both parts")]
    OverlappingCandidates(usize),
    #[error("candidate position {0} is in neither part")]
    UncoveredCandidate(usize),
    #[error("{witness} witness does not fit problem {problem}")]
    WitnessMismatch {
        witness: &'static str,
        problem: Problem,
    },
}

/// Subelection tie handling: ties-eliminate (TE) promotes a subelection's
/// winner only if it is unique; ties-promote (TP) promotes every winner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TieRule {
    Eliminate,
    Promote,
}

impl TieRule {
    pub fn name(self) -> &'static str {
        match self {
            TieRule::Eliminate => "TE",
            TieRule::Promote => "TP",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_uppercase().as_str() {
            "TE" => Some(TieRule::Eliminate),
            "TP" => Some(TieRule::Promote),
            _ => None,
        }
    }

    pub fn survivors(self, winners: &[usize]) -> &[usize] {
        match self {
            TieRule::Promote => winners,
            TieRule::Eliminate if winners.len() == 1 => winners,
            TieRule::Eliminate => &[],
        }
    }
}

impl fmt::Display for TieRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Constructive control problem families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Problem {
    /// Partition of voters.
    Ccpv,
    /// Equipartition of voters.
    Ccepv,
    /// Runoff partition of candidates.
    Ccrpc,
    /// Runoff equipartition of candidates.
    Ccrepc,
    /// Partition of voters into a fixed number of parts.
    Ccpkv,
    /// Partition of voter groups.
    Ccpvg,
    /// Deleting voter groups.
    Ccdvg,
    /// Adding voter groups.
    Ccavg,
}

impl Problem {
    pub const ALL: [Problem; 8] = [
        Problem::Ccpv,
        Problem::Ccepv,
        Problem::Ccrpc,
        Problem::Ccrepc,
        Problem::Ccpkv,
        Problem::Ccpvg,
        Problem::Ccdvg,
        Problem::Ccavg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Ccpv => "CCPV",
            Problem::Ccepv => "CCEPV",
            Problem::Ccrpc => "CCRPC",
            Problem::Ccrepc => "CCREPC",
            Problem::Ccpkv => "CCPkV",
            Problem::Ccpvg => "CCPVG",
            Problem::Ccdvg => "CCDVG",
            Problem::Ccavg => "CCAVG",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(name))
    }

    /// Two-stage problems carry a tie rule; group deletion/addition do not.
    pub fn is_partition(self) -> bool {
        !matches!(self, Problem::Ccdvg | Problem::Ccavg)
    }

    pub fn uses_groups(self) -> bool {
        matches!(self, Problem::Ccpvg | Problem::Ccdvg | Problem::Ccavg)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Labelled voter groups. Every ballot carries exactly one label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Groups {
    ballot_labels: Vec<String>,
    labels: Vec<String>,
    members: Vec<Vec<usize>>,
}

impl Groups {
    pub fn new(ballot_labels: Vec<String>) -> Self {
        let mut labels: Vec<String> = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        for (i, l) in ballot_labels.iter().enumerate() {
            match labels.iter().position(|x| x == l) {
                Some(g) => members[g].push(i),
                None => {
                    labels.push(l.clone());
                    members.push(vec![i]);
                }
            }
        }
        Groups {
            ballot_labels,
            labels,
            members,
        }
    }

    /// One group per ballot, labelled by ballot index.
    pub fn singletons(ballots: usize) -> Self {
        Groups::new((0..ballots).map(|i| format!("g{i}")).collect())
    }

    /// Distinct labels in order of first appearance.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn ballot_labels(&self) -> &[String] {
        &self.ballot_labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn members(&self, group: usize) -> &[usize] {
        &self.members[group]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlInstance {
    rule: VotingRule,
    profile: Profile,
    distinguished: usize,
    problem: Problem,
    tie: Option<TieRule>,
    parts: Option<usize>,
    limit: Option<usize>,
    groups: Option<Groups>,
    pool: Option<Profile>,
}

impl ControlInstance {
    pub fn builder(
        rule: VotingRule,
        profile: Profile,
        distinguished: &str,
        problem: Problem,
    ) -> InstanceBuilder {
        InstanceBuilder {
            rule,
            profile,
            distinguished: distinguished.to_string(),
            problem,
            tie: None,
            parts: None,
            limit: None,
            groups: None,
            pool: None,
        }
    }

    pub fn rule(&self) -> VotingRule {
        self.rule
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// Position of the distinguished candidate.
    pub fn distinguished(&self) -> usize {
        self.distinguished
    }

    pub fn distinguished_id(&self) -> &str {
        &self.profile.candidates().get(self.distinguished).unwrap().id
    }

    pub fn problem(&self) -> Problem {
        self.problem
    }

    pub fn tie(&self) -> Option<TieRule> {
        self.tie
    }

    pub fn parts(&self) -> Option<usize> {
        self.parts
    }

    pub fn limit(&self) -> Option<usize> {
        self.limit
    }

    pub fn groups(&self) -> Option<&Groups> {
        self.groups.as_ref()
    }

    pub fn pool(&self) -> Option<&Profile> {
        self.pool.as_ref()
    }

    /// A copy of this instance posed as a different problem family, keeping
    /// the election and tie rule.
    pub fn with_problem(&self, problem: Problem, parts: Option<usize>) -> Result<Self, InstanceError> {
        let mut b = ControlInstance::builder(self.rule, self.profile.clone(), self.distinguished_id(), problem);
        b.tie = self.tie;
        b.parts = parts;
        b.limit = self.limit;
        b.groups = self.groups.as_ref().map(|g| g.ballot_labels().to_vec());
        b.pool = self.pool.clone();
        b.build()
    }
}

#[derive(Debug, Clone)]
pub struct InstanceBuilder {
    rule: VotingRule,
    profile: Profile,
    distinguished: String,
    problem: Problem,
    tie: Option<TieRule>,
    parts: Option<usize>,
    limit: Option<usize>,
    groups: Option<Vec<String>>,
    pool: Option<Profile>,
}

impl InstanceBuilder {
    pub fn tie(mut self, tie: TieRule) -> Self {
        self.tie = Some(tie);
        self
    }

    pub fn parts(mut self, k: usize) -> Self {
        self.parts = Some(k);
        self
    }

    pub fn limit(mut self, limit: usize) -> Self {
        self.limit = Some(limit);
        self
    }

    pub fn groups<S: Into<String>>(mut self, labels: impl IntoIterator<Item = S>) -> Self {
        self.groups = Some(labels.into_iter().map(Into::into).collect());
        self
    }

    pub fn pool(mut self, pool: Profile) -> Self {
        self.pool = Some(pool);
        self
    }

    pub fn build(self) -> Result<ControlInstance, InstanceError> {
        let problem = self.problem;
        self.rule.check(&self.profile)?;
        let distinguished = self.profile.candidates().resolve(&self.distinguished)?;
        let missing = |param| InstanceError::MissingParameter { problem, param };

        let tie = if problem.is_partition() {
            Some(self.tie.ok_or(InstanceError::MissingTieRule { problem })?)
        } else {
            None
        };
        let parts = match problem {
            Problem::Ccpkv => {
                let k = self.parts.ok_or_else(|| missing("k"))?;
                if k < 2 {
                    return Err(InstanceError::TooFewParts(k));
                }
                Some(k)
            }
            _ => None,
        };
        let limit = match problem {
            Problem::Ccdvg | Problem::Ccavg => Some(self.limit.ok_or_else(|| missing("limit"))?),
            _ => None,
        };
        let pool = match problem {
            Problem::Ccavg => {
                let pool = self.pool.ok_or_else(|| missing("pool"))?;
                if pool.candidates() != self.profile.candidates() {
                    return Err(InstanceError::PoolMismatch("different candidates".into()));
                }
                if pool.kind() != self.profile.kind() {
                    return Err(InstanceError::PoolMismatch("different ballot kind".into()));
                }
                Some(pool)
            }
            _ => None,
        };
        let groups = if problem.uses_groups() {
            let labels = self.groups.ok_or_else(|| missing("groups"))?;
            let ballots = match &pool {
                Some(w) => w.len(),
                None => self.profile.len(),
            };
            if labels.len() != ballots {
                return Err(InstanceError::GroupCount {
                    labels: labels.len(),
                    ballots,
                });
            }
            Some(Groups::new(labels))
        } else {
            None
        };
        Ok(ControlInstance {
            rule: self.rule,
            profile: self.profile,
            distinguished,
            problem,
            tie,
            parts,
            limit,
            groups,
            pool,
        })
    }
}

/// Certificate of a "yes" answer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Witness {
    /// Ballot indices of each part.
    VoterPartition(Vec<Vec<usize>>),
    /// Candidate positions of the two parts.
    CandidatePartition(Vec<usize>, Vec<usize>),
    /// Labels of the groups deleted (CCDVG) or added (CCAVG).
    GroupSelection(Vec<String>),
}

impl Witness {
    pub fn shape(&self) -> &'static str {
        match self {
            Witness::VoterPartition(_) => "voter-partition",
            Witness::CandidatePartition(..) => "candidate-partition",
            Witness::GroupSelection(_) => "group-selection",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveStats {
    /// Solver cases (score/candidate guesses) examined.
    pub cases_examined: u64,
    /// Candidate witnesses checked against the defining predicate.
    pub partitions_enumerated: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub answer: Answer,
    /// Present exactly when the answer is yes.
    pub witness: Option<Witness>,
    pub stats: SolveStats,
}

impl Decision {
    pub fn yes(witness: Witness, stats: SolveStats) -> Self {
        Decision {
            answer: Answer::Yes,
            witness: Some(witness),
            stats,
        }
    }

    pub fn no(stats: SolveStats) -> Self {
        Decision {
            answer: Answer::No,
            witness: None,
            stats,
        }
    }

    pub fn is_yes(&self) -> bool {
        self.answer == Answer::Yes
    }
}

/// Winner evaluation over sub-elections of one profile. Pairwise margins over
/// the full electorate are computed once, so candidate-partition replays cost
/// only a scan of the margin table.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    rule: VotingRule,
    profile: &'a Profile,
    all_voters: Vec<usize>,
    margins: Option<MarginTable>,
}

/// Finalists and final winners of a two-stage election.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub finalists: Vec<usize>,
    pub winners: Vec<usize>,
}

impl<'a> Evaluator<'a> {
    pub fn new(rule: VotingRule, profile: &'a Profile) -> Result<Self, ElectionError> {
        rule.check(profile)?;
        let all_voters: Vec<usize> = (0..profile.len()).collect();
        let margins = matches!(rule, VotingRule::Condorcet | VotingRule::WeakCondorcet)
            .then(|| MarginTable::new(profile, &all_voters));
        Ok(Evaluator {
            rule,
            profile,
            all_voters,
            margins,
        })
    }

    pub fn profile(&self) -> &Profile {
        self.profile
    }

    pub fn winners(&self, cands: &[usize], voters: &[usize]) -> Vec<usize> {
        winner_positions(self.rule, self.profile, cands, voters)
    }

    /// Winners among `cands` with every voter taking part.
    pub fn winners_all_voters(&self, cands: &[usize]) -> Vec<usize> {
        match &self.margins {
            Some(table) if !cands.is_empty() => {
                table.condorcet_winners(cands, self.rule == VotingRule::Condorcet)
            }
            _ => self.winners(cands, &self.all_voters),
        }
    }

    fn final_round(&self, mut finalists: Vec<usize>) -> Outcome {
        finalists.sort_unstable();
        finalists.dedup();
        let winners = self.winners_all_voters(&finalists);
        Outcome { finalists, winners }
    }

    /// Assumes `parts` is a valid partition of the ballot indices.
    pub fn voter_partition(&self, tie: TieRule, parts: &[Vec<usize>]) -> Outcome {
        let cands: Vec<usize> = (0..self.profile.candidates().len()).collect();
        let mut finalists = Vec::new();
        for part in parts {
            let won = self.winners(&cands, part);
            finalists.extend_from_slice(tie.survivors(&won));
        }
        self.final_round(finalists)
    }

    /// Assumes `(c1, c2)` is a valid partition of the candidate positions.
    pub fn candidate_partition(&self, tie: TieRule, c1: &[usize], c2: &[usize]) -> Outcome {
        let mut finalists = Vec::new();
        for part in [c1, c2] {
            let won = self.winners_all_voters(part);
            finalists.extend_from_slice(tie.survivors(&won));
        }
        self.final_round(finalists)
    }
}

pub fn check_voter_partition(ballots: usize, parts: &[Vec<usize>]) -> Result<(), TwoStageError> {
    let mut seen = vec![false; ballots];
    for part in parts {
        for &i in part {
            let slot = seen.get_mut(i).ok_or(TwoStageError::BallotOutOfRange(i))?;
            if std::mem::replace(slot, true) {
                return Err(TwoStageError::OverlappingParts(i));
            }
        }
    }
    match seen.iter().position(|s| !s) {
        Some(i) => Err(TwoStageError::UncoveredBallot(i)),
        None => Ok(()),
    }
}

pub fn check_candidate_partition(
    candidates: usize,
    c1: &[usize],
    c2: &[usize],
) -> Result<(), TwoStageError> {
    let mut seen = vec![false; candidates];
    for &c in c1.iter().chain(c2) {
        let slot = seen.get_mut(c).ok_or(TwoStageError::CandidateOutOfRange(c))?;
        if std::mem::replace(slot, true) {
            return Err(TwoStageError::OverlappingCandidates(c));
        }
    }
    match seen.iter().position(|s| !s) {
        Some(c) => Err(TwoStageError::UncoveredCandidate(c)),
        None => Ok(()),
    }
}

/// Union of the tie-filtered winners of each part `(C, V_i)`.
pub fn finalists_voter_partition(
    rule: VotingRule,
    tie: TieRule,
    profile: &Profile,
    parts: &[Vec<usize>],
) -> Result<Vec<usize>, TwoStageError> {
    check_voter_partition(profile.len(), parts)?;
    Ok(Evaluator::new(rule, profile)?.voter_partition(tie, parts).finalists)
}

/// Winners of the final round over the finalists of a voter partition.
pub fn run_two_stage_voter_partition(
    rule: VotingRule,
    tie: TieRule,
    profile: &Profile,
    parts: &[Vec<usize>],
) -> Result<Vec<usize>, TwoStageError> {
    check_voter_partition(profile.len(), parts)?;
    Ok(Evaluator::new(rule, profile)?.voter_partition(tie, parts).winners)
}

/// Winners of the final round after subelections `(C1, V)` and `(C2, V)`.
pub fn run_two_stage_candidate_partition(
    rule: VotingRule,
    tie: TieRule,
    profile: &Profile,
    c1: &[usize],
    c2: &[usize],
) -> Result<Vec<usize>, TwoStageError> {
    check_candidate_partition(profile.candidates().len(), c1, c2)?;
    Ok(Evaluator::new(rule, profile)?.candidate_partition(tie, c1, c2).winners)
}

/// Result of replaying a witness against an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    /// First structural side condition the witness breaks, if any.
    pub violation: Option<String>,
    /// Finalists of the two-stage election (partition problems only).
    pub finalists: Option<Vec<usize>>,
    /// Final winners.
    pub winners: Vec<usize>,
    distinguished: usize,
}

impl Replay {
    pub fn accepted(&self) -> bool {
        self.violation.is_none() && self.winners == [self.distinguished]
    }
}

fn balanced(a: usize, b: usize) -> bool {
    a.abs_diff(b) <= 1
}

pub fn replay(instance: &ControlInstance, witness: &Witness) -> Result<Replay, TwoStageError> {
    let eval = Evaluator::new(instance.rule, &instance.profile)?;
    replay_with(&eval, instance, witness)
}

/// [`replay`] reusing an evaluator built for `instance`.
pub fn replay_with(
    eval: &Evaluator<'_>,
    instance: &ControlInstance,
    witness: &Witness,
) -> Result<Replay, TwoStageError> {
    let problem = instance.problem;
    let mismatch = || TwoStageError::WitnessMismatch {
        witness: witness.shape(),
        problem,
    };
    let mut out = Replay {
        violation: None,
        finalists: None,
        winners: Vec::new(),
        distinguished: instance.distinguished,
    };
    let reject = |mut out: Replay, why: String| {
        out.violation = Some(why);
        Ok(out)
    };
    let profile = &instance.profile;

    match (problem, witness) {
        (
            Problem::Ccpv | Problem::Ccepv | Problem::Ccpkv | Problem::Ccpvg,
            Witness::VoterPartition(parts),
        ) => {
            let expected = instance.parts.unwrap_or(2);
            if parts.len() != expected {
                return reject(out, format!("expected {expected} parts, got {}", parts.len()));
            }
            if let Err(e) = check_voter_partition(profile.len(), parts) {
                return reject(out, e.to_string());
            }
            if problem == Problem::Ccepv && !balanced(parts[0].len(), parts[1].len()) {
                return reject(
                    out,
                    format!("part sizes {} and {} differ by more than one", parts[0].len(), parts[1].len()),
                );
            }
            if let Some(groups) = instance.groups.as_ref().filter(|_| problem == Problem::Ccpvg) {
                let mut side = vec![0usize; profile.len()];
                for (s, part) in parts.iter().enumerate() {
                    for &i in part {
                        side[i] = s;
                    }
                }
                for g in 0..groups.len() {
                    let m = groups.members(g);
                    if m.iter().any(|&i| side[i] != side[m[0]]) {
                        return reject(out, format!("group `{}` is split", groups.labels()[g]));
                    }
                }
            }
            let outcome = eval.voter_partition(instance.tie.ok_or_else(mismatch)?, parts);
            out.finalists = Some(outcome.finalists);
            out.winners = outcome.winners;
        }
        (Problem::Ccrpc | Problem::Ccrepc, Witness::CandidatePartition(c1, c2)) => {
            if let Err(e) = check_candidate_partition(profile.candidates().len(), c1, c2) {
                return reject(out, e.to_string());
            }
            if problem == Problem::Ccrepc && !balanced(c1.len(), c2.len()) {
                return reject(
                    out,
                    format!("part sizes {} and {} differ by more than one", c1.len(), c2.len()),
                );
            }
            let outcome = eval.candidate_partition(instance.tie.ok_or_else(mismatch)?, c1, c2);
            out.finalists = Some(outcome.finalists);
            out.winners = outcome.winners;
        }
        (Problem::Ccdvg | Problem::Ccavg, Witness::GroupSelection(labels)) => {
            let groups = instance.groups.as_ref().ok_or_else(mismatch)?;
            let mut chosen = vec![false; groups.len()];
            for l in labels {
                match groups.position(l) {
                    Some(g) if !chosen[g] => chosen[g] = true,
                    Some(_) => return reject(out, format!("group `{l}` selected twice")),
                    None => return reject(out, format!("unknown group `{l}`")),
                }
            }
            let size: usize = (0..groups.len())
                .filter(|&g| chosen[g])
                .map(|g| groups.members(g).len())
                .sum();
            let limit = instance.limit.unwrap_or(0);
            if size > limit {
                return reject(out, format!("selection holds {size} voters, limit is {limit}"));
            }
            out.winners = selection_winners(instance, &chosen);
        }
        _ => return Err(mismatch()),
    }
    Ok(out)
}

/// One-stage winners after deleting (CCDVG) or adding (CCAVG) the chosen
/// groups.
pub(crate) fn selection_winners(instance: &ControlInstance, chosen: &[bool]) -> Vec<usize> {
    let groups = instance.groups.as_ref().expect("group problem");
    let all: Vec<usize> = (0..instance.profile.candidates().len()).collect();
    match instance.problem {
        Problem::Ccdvg => {
            let mut deleted = vec![false; instance.profile.len()];
            for g in (0..groups.len()).filter(|&g| chosen[g]) {
                for &i in groups.members(g) {
                    deleted[i] = true;
                }
            }
            let kept: Vec<usize> = (0..deleted.len()).filter(|&i| !deleted[i]).collect();
            winner_positions(instance.rule, &instance.profile, &all, &kept)
        }
        Problem::Ccavg => {
            let pool = instance.pool.as_ref().expect("adder pool");
            let mut added = Vec::new();
            for g in (0..groups.len()).filter(|&g| chosen[g]) {
                added.extend_from_slice(groups.members(g));
            }
            added.sort_unstable();
            let merged = instance.profile.concat(&pool.with_ballots(&added));
            let voters: Vec<usize> = (0..merged.len()).collect();
            winner_positions(instance.rule, &merged, &all, &voters)
        }
        _ => unreachable!("selection witnesses only apply to group deletion/addition"),
    }
}

/// True iff the witness satisfies every structural side condition of the
/// instance's problem and makes the distinguished candidate the sole winner.
pub fn verify_witness(instance: &ControlInstance, witness: &Witness) -> Result<bool, TwoStageError> {
    Ok(replay(instance, witness)?.accepted())
}
