//! Candidates, ballots and profiles, plus single-stage winner determination
//! for plurality, approval, Condorcet, weakCondorcet and the artificial
//! system E.
//!
//! Candidates are addressed by their position in the profile's
//! [`CandidateSet`]. Ranking ballots store candidate positions from most to
//! least preferred; approval ballots store one flag per candidate position.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElectionError {
    #[error("duplicate candidate id `{0}`")]
    DuplicateCandidate(String),
    #[error("special index {0} assigned to more than one candidate")]
    DuplicateSpecial(u8),
    #[error("special index {0} out of range (expected 0..=3)")]
    SpecialOutOfRange(u8),
    #[error("unknown candidate `{0}`")]
    UnknownCandidate(String),
    #[error("candidate subset is empty")]
    EmptySubset,
    #[error("ballot {index} is malformed: {reason}")]
    MalformedBallot { index: usize, reason: String },
    #[error("rule {rule} needs {expected} ballots, profile holds {found} ballots")]
    BallotKind {
        rule: VotingRule,
        expected: BallotKind,
        found: BallotKind,
    },
    #[error("majority margin of a candidate against itself")]
    SameCandidate,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Candidate {
    pub id: String,
    /// Tag used only by system E: marks the candidate as one of the special
    /// candidates 0, 1, 2 or 3.
    pub special: Option<u8>,
}

impl Candidate {
    pub fn new(id: impl Into<String>) -> Self {
        Candidate {
            id: id.into(),
            special: None,
        }
    }

    pub fn special(id: impl Into<String>, index: u8) -> Self {
        Candidate {
            id: id.into(),
            special: Some(index),
        }
    }
}

/// Ordered collection of candidates with unique ids and unique special tags.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CandidateSet {
    members: Vec<Candidate>,
}

impl CandidateSet {
    pub fn new(members: Vec<Candidate>) -> Result<Self, ElectionError> {
        let mut ids = HashSet::new();
        let mut specials = [false; 4];
        for c in &members {
            if !ids.insert(c.id.as_str()) {
                return Err(ElectionError::DuplicateCandidate(c.id.clone()));
            }
            if let Some(s) = c.special {
                let slot = specials
                    .get_mut(s as usize)
                    .ok_or(ElectionError::SpecialOutOfRange(s))?;
                if *slot {
                    return Err(ElectionError::DuplicateSpecial(s));
                }
                *slot = true;
            }
        }
        Ok(CandidateSet { members })
    }

    /// Plain candidates (no special tags) from a list of ids.
    pub fn from_ids<S: AsRef<str>>(ids: &[S]) -> Result<Self, ElectionError> {
        CandidateSet::new(ids.iter().map(|s| Candidate::new(s.as_ref())).collect())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Candidate> {
        self.members.iter()
    }

    pub fn get(&self, index: usize) -> Option<&Candidate> {
        self.members.get(index)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.members.iter().position(|c| c.id == id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index_of(id).is_some()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.members.iter().map(|c| c.id.as_str()).collect()
    }

    pub fn special_position(&self, special: u8) -> Option<usize> {
        self.members.iter().position(|c| c.special == Some(special))
    }

    /// Candidates at the given positions, in the order given.
    pub fn select(&self, positions: &[usize]) -> CandidateSet {
        CandidateSet {
            members: positions.iter().map(|&i| self.members[i].clone()).collect(),
        }
    }

    pub fn resolve(&self, id: &str) -> Result<usize, ElectionError> {
        self.index_of(id)
            .ok_or_else(|| ElectionError::UnknownCandidate(id.to_string()))
    }
}

impl fmt::Display for CandidateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.ids().join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BallotKind {
    Ranking,
    Approval,
}

impl fmt::Display for BallotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BallotKind::Ranking => f.write_str("ranking"),
            BallotKind::Approval => f.write_str("approval"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ballot {
    /// Candidate positions, most preferred first.
    Ranking(Vec<usize>),
    /// One approval flag per candidate position.
    Approval(Vec<bool>),
}

impl Ballot {
    pub fn kind(&self) -> BallotKind {
        match self {
            Ballot::Ranking(_) => BallotKind::Ranking,
            Ballot::Approval(_) => BallotKind::Approval,
        }
    }

    fn check(&self, index: usize, candidates: usize) -> Result<(), ElectionError> {
        let bad = |reason: String| ElectionError::MalformedBallot { index, reason };
        match self {
            Ballot::Ranking(order) => {
                if order.len() != candidates {
                    return Err(bad(format!(
                        "ranks {} candidates, expected {candidates}",
                        order.len()
                    )));
                }
                let mut seen = vec![false; candidates];
                for &c in order {
                    if c >= candidates || std::mem::replace(&mut seen[c], true) {
                        return Err(bad(format!("candidate position {c} invalid or repeated")));
                    }
                }
                Ok(())
            }
            Ballot::Approval(flags) if flags.len() != candidates => Err(bad(format!(
                "approval vector has length {}, expected {candidates}",
                flags.len()
            ))),
            Ballot::Approval(_) => Ok(()),
        }
    }
}

/// A multiset of homogeneous ballots over a candidate set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    candidates: CandidateSet,
    kind: BallotKind,
    ballots: Vec<Ballot>,
}

impl Profile {
    pub fn new(
        candidates: CandidateSet,
        kind: BallotKind,
        ballots: Vec<Ballot>,
    ) -> Result<Self, ElectionError> {
        for (i, b) in ballots.iter().enumerate() {
            if b.kind() != kind {
                return Err(ElectionError::MalformedBallot {
                    index: i,
                    reason: format!("{} ballot in a {kind} profile", b.kind()),
                });
            }
            b.check(i, candidates.len())?;
        }
        Ok(Profile {
            candidates,
            kind,
            ballots,
        })
    }

    /// Ranking profile from `(multiplicity, ranking-by-id)` rows.
    pub fn ranked<S: AsRef<str>>(
        candidates: CandidateSet,
        rows: &[(usize, &[S])],
    ) -> Result<Self, ElectionError> {
        let mut ballots = Vec::new();
        for (count, ranking) in rows {
            let order = ranking
                .iter()
                .map(|id| candidates.resolve(id.as_ref()))
                .collect::<Result<Vec<_>, _>>()?;
            ballots.extend(std::iter::repeat_n(Ballot::Ranking(order), *count));
        }
        Profile::new(candidates, BallotKind::Ranking, ballots)
    }

    /// Approval profile from `(multiplicity, approved-ids)` rows.
    pub fn approvals<S: AsRef<str>>(
        candidates: CandidateSet,
        rows: &[(usize, &[S])],
    ) -> Result<Self, ElectionError> {
        let mut ballots = Vec::new();
        for (count, approved) in rows {
            let mut flags = vec![false; candidates.len()];
            for id in approved.iter() {
                flags[candidates.resolve(id.as_ref())?] = true;
            }
            ballots.extend(std::iter::repeat_n(Ballot::Approval(flags), *count));
        }
        Profile::new(candidates, BallotKind::Approval, ballots)
    }

    pub fn candidates(&self) -> &CandidateSet {
        &self.candidates
    }

    pub fn kind(&self) -> BallotKind {
        self.kind
    }

    pub fn ballots(&self) -> &[Ballot] {
        &self.ballots
    }

    pub fn len(&self) -> usize {
        self.ballots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ballots.is_empty()
    }

    /// Same candidates, ballots at the given indices (repeats allowed).
    pub fn with_ballots(&self, indices: &[usize]) -> Profile {
        Profile {
            candidates: self.candidates.clone(),
            kind: self.kind,
            ballots: indices.iter().map(|&i| self.ballots[i].clone()).collect(),
        }
    }

    /// This profile's ballots followed by `other`'s. Candidates must match.
    pub fn concat(&self, other: &Profile) -> Profile {
        debug_assert_eq!(self.candidates, other.candidates);
        let mut ballots = self.ballots.clone();
        ballots.extend(other.ballots.iter().cloned());
        Profile {
            candidates: self.candidates.clone(),
            kind: self.kind,
            ballots,
        }
    }

    /// Top choice of a ranking ballot among the candidates flagged in `mask`.
    pub(crate) fn top_among(&self, ballot: usize, mask: &[bool]) -> Option<usize> {
        match &self.ballots[ballot] {
            Ballot::Ranking(order) => order.iter().copied().find(|&c| mask[c]),
            Ballot::Approval(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VotingRule {
    Plurality,
    Approval,
    Condorcet,
    WeakCondorcet,
    SystemE,
}

impl VotingRule {
    pub const ALL: [VotingRule; 5] = [
        VotingRule::Plurality,
        VotingRule::Approval,
        VotingRule::Condorcet,
        VotingRule::WeakCondorcet,
        VotingRule::SystemE,
    ];

    pub fn ballot_kind(self) -> BallotKind {
        match self {
            VotingRule::Approval | VotingRule::SystemE => BallotKind::Approval,
            _ => BallotKind::Ranking,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VotingRule::Plurality => "plurality",
            VotingRule::Approval => "approval",
            VotingRule::Condorcet => "condorcet",
            VotingRule::WeakCondorcet => "weakcondorcet",
            VotingRule::SystemE => "system-e",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        VotingRule::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(name))
    }

    pub(crate) fn check(self, profile: &Profile) -> Result<(), ElectionError> {
        if self.ballot_kind() != profile.kind() {
            return Err(ElectionError::BallotKind {
                rule: self,
                expected: self.ballot_kind(),
                found: profile.kind(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for VotingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Projects the profile onto `subset`, keeping the original candidate order.
pub fn restrict_profile(profile: &Profile, subset: &CandidateSet) -> Result<Profile, ElectionError> {
    if subset.is_empty() {
        return Err(ElectionError::EmptySubset);
    }
    let mut keep = vec![false; profile.candidates.len()];
    for c in subset.iter() {
        keep[profile.candidates.resolve(&c.id)?] = true;
    }
    let positions: Vec<usize> = (0..keep.len()).filter(|&i| keep[i]).collect();
    let mut renumber = vec![usize::MAX; keep.len()];
    for (new, &old) in positions.iter().enumerate() {
        renumber[old] = new;
    }
    let ballots = profile
        .ballots
        .iter()
        .map(|b| match b {
            Ballot::Ranking(order) => Ballot::Ranking(
                order
                    .iter()
                    .filter(|&&c| keep[c])
                    .map(|&c| renumber[c])
                    .collect(),
            ),
            Ballot::Approval(flags) => {
                Ballot::Approval(positions.iter().map(|&c| flags[c]).collect())
            }
        })
        .collect();
    Ok(Profile {
        candidates: profile.candidates.select(&positions),
        kind: profile.kind,
        ballots,
    })
}

/// Number of ballots ranking each candidate first, indexed by position.
pub fn score_plurality(profile: &Profile) -> Result<Vec<usize>, ElectionError> {
    VotingRule::Plurality.check(profile)?;
    let mut scores = vec![0; profile.candidates.len()];
    for b in &profile.ballots {
        if let Ballot::Ranking(order) = b {
            if let Some(&top) = order.first() {
                scores[top] += 1;
            }
        }
    }
    Ok(scores)
}

/// Number of ballots approving each candidate, indexed by position.
pub fn score_approval(profile: &Profile) -> Result<Vec<usize>, ElectionError> {
    VotingRule::Approval.check(profile)?;
    let mut scores = vec![0; profile.candidates.len()];
    for b in &profile.ballots {
        if let Ballot::Approval(flags) = b {
            for (s, &f) in scores.iter_mut().zip(flags) {
                *s += f as usize;
            }
        }
    }
    Ok(scores)
}

pub fn winners(rule: VotingRule, profile: &Profile) -> Result<CandidateSet, ElectionError> {
    rule.check(profile)?;
    let all: Vec<usize> = (0..profile.candidates.len()).collect();
    let voters: Vec<usize> = (0..profile.len()).collect();
    let won = winner_positions(rule, profile, &all, &voters);
    Ok(profile.candidates.select(&won))
}

/// (#ballots with `a` above `b`) − (#ballots with `b` above `a`).
pub fn majority_margin(profile: &Profile, a: &str, b: &str) -> Result<i64, ElectionError> {
    VotingRule::Condorcet.check(profile)?;
    let a = profile.candidates.resolve(a)?;
    let b = profile.candidates.resolve(b)?;
    if a == b {
        return Err(ElectionError::SameCandidate);
    }
    let voters: Vec<usize> = (0..profile.len()).collect();
    Ok(pairwise_margin(profile, &voters, a, b))
}

pub(crate) fn pairwise_margin(profile: &Profile, voters: &[usize], a: usize, b: usize) -> i64 {
    let mut margin = 0;
    for &v in voters {
        if let Ballot::Ranking(order) = &profile.ballots[v] {
            for &c in order {
                if c == a {
                    margin += 1;
                    break;
                }
                if c == b {
                    margin -= 1;
                    break;
                }
            }
        }
    }
    margin
}

/// Antisymmetric matrix of pairwise majority margins over a set of voters.
#[derive(Debug, Clone)]
pub struct MarginTable {
    size: usize,
    margins: Vec<i64>,
    voters: usize,
}

impl MarginTable {
    pub fn new(profile: &Profile, voters: &[usize]) -> Self {
        let size = profile.candidates.len();
        let mut margins = vec![0i64; size * size];
        let mut rank = vec![0usize; size];
        for &v in voters {
            if let Ballot::Ranking(order) = &profile.ballots[v] {
                for (r, &c) in order.iter().enumerate() {
                    rank[c] = r;
                }
                for a in 0..size {
                    for b in (a + 1)..size {
                        let d = if rank[a] < rank[b] { 1 } else { -1 };
                        margins[a * size + b] += d;
                        margins[b * size + a] -= d;
                    }
                }
            }
        }
        MarginTable {
            size,
            margins,
            voters: voters.len(),
        }
    }

    pub fn margin(&self, a: usize, b: usize) -> i64 {
        self.margins[a * self.size + b]
    }

    pub fn voters(&self) -> usize {
        self.voters
    }

    /// Condorcet (`strict`) or weakCondorcet winners among `cands`.
    pub fn condorcet_winners(&self, cands: &[usize], strict: bool) -> Vec<usize> {
        cands
            .iter()
            .copied()
            .filter(|&c| {
                cands.iter().all(|&d| {
                    d == c || {
                        let m = self.margin(c, d);
                        if strict {
                            m > 0
                        } else {
                            m >= 0
                        }
                    }
                })
            })
            .collect()
    }
}

/// Winners among the candidate positions `cands`, counting only the ballots
/// at `voters`. The ballot kind must already match the rule.
pub(crate) fn winner_positions(
    rule: VotingRule,
    profile: &Profile,
    cands: &[usize],
    voters: &[usize],
) -> Vec<usize> {
    if cands.is_empty() {
        return Vec::new();
    }
    match rule {
        VotingRule::Plurality => {
            let mut mask = vec![false; profile.candidates.len()];
            for &c in cands {
                mask[c] = true;
            }
            let mut scores = vec![0usize; profile.candidates.len()];
            for &v in voters {
                if let Some(top) = profile.top_among(v, &mask) {
                    scores[top] += 1;
                }
            }
            argmax(cands, &scores)
        }
        VotingRule::Approval => approval_winners(profile, cands, voters),
        VotingRule::Condorcet | VotingRule::WeakCondorcet => {
            // Beating "strictly more than half" with no ties possible per ballot
            // is equivalent to a positive margin; "at least half" to a
            // nonnegative one.
            let strict = rule == VotingRule::Condorcet;
            cands
                .iter()
                .copied()
                .filter(|&c| {
                    cands.iter().all(|&d| {
                        d == c || {
                            let m = pairwise_margin(profile, voters, c, d);
                            if strict {
                                m > 0
                            } else {
                                m >= 0
                            }
                        }
                    })
                })
                .collect()
        }
        VotingRule::SystemE => system_e_winners(profile, cands, voters),
    }
}

fn approval_winners(profile: &Profile, cands: &[usize], voters: &[usize]) -> Vec<usize> {
    let mut scores = vec![0usize; profile.candidates.len()];
    for &v in voters {
        if let Ballot::Approval(flags) = &profile.ballots[v] {
            for &c in cands {
                scores[c] += flags[c] as usize;
            }
        }
    }
    argmax(cands, &scores)
}

fn argmax(cands: &[usize], scores: &[usize]) -> Vec<usize> {
    let best = cands.iter().map(|&c| scores[c]).max().unwrap_or(0);
    cands.iter().copied().filter(|&c| scores[c] == best).collect()
}

/// System E:
/// * at most four candidates whose special members are exactly {0,2} or
///   {1,3}: the approval winners among the non-special candidates;
/// * at most four candidates otherwise: nobody;
/// * more than four candidates including all of 0..=3: the special candidate
///   numbered `#voters mod 4`, plus the unique approval winner among the
///   non-special candidates if there is one;
/// * more than four candidates missing a special one: nobody.
fn system_e_winners(profile: &Profile, cands: &[usize], voters: &[usize]) -> Vec<usize> {
    let all = profile.candidates();
    let mut present = [false; 4];
    let mut plain = Vec::new();
    for &c in cands {
        match all.get(c).and_then(|x| x.special) {
            Some(s) => present[s as usize] = true,
            None => plain.push(c),
        }
    }
    if cands.len() <= 4 {
        let pair_02 = present == [true, false, true, false];
        let pair_13 = present == [false, true, false, true];
        if (pair_02 || pair_13) && !plain.is_empty() {
            return approval_winners(profile, &plain, voters);
        }
        return Vec::new();
    }
    if present != [true; 4] {
        return Vec::new();
    }
    let residue = (voters.len() % 4) as u8;
    let mut won: Vec<usize> = cands
        .iter()
        .copied()
        .filter(|&c| all.get(c).and_then(|x| x.special) == Some(residue))
        .collect();
    let approval = approval_winners(profile, &plain, voters);
    if approval.len() == 1 {
        won.push(approval[0]);
    }
    won.sort_unstable();
    won
}
