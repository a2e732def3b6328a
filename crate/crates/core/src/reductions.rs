//! Hardness-reduction constructors, McGarvey profile synthesis and small
//! brute-force solvers for the source problems.

use std::collections::BTreeMap;

use itertools::Itertools;
use thiserror::Error;

use crate::elections::{Ballot, BallotKind, Candidate, CandidateSet, ElectionError, Profile, VotingRule};
use crate::two_stage::{replay, ControlInstance, InstanceError, Problem, TieRule, TwoStageError, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Election(#[from] ElectionError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    TwoStage(#[from] TwoStageError),
    #[error("invalid X3C instance: {0}")]
    InvalidX3c(String),
    #[error("graph is not cubic: {0}")]
    NotCubic(String),
    #[error("cover size {k} must lie in 1..={n}")]
    InvalidCoverSize { k: usize, n: usize },
    #[error("a strict pairwise contest needs at least 3 candidates, got {0}")]
    TooFewCandidates(usize),
    #[error("source instance must be approval-CCPV-TE, got {0}")]
    WrongSource(String),
    #[error("source instance already has special candidates")]
    SpecialCandidates,
    #[error("instance size {size} exceeds brute-force limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("witness does not make the distinguished candidate the sole winner")]
    NotAWitness,
}

/// Exact Cover by 3-Sets: a base set `0..3m` and a collection of triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X3cInstance {
    m: usize,
    sets: Vec<[usize; 3]>,
}

impl X3cInstance {
    /// Requires `m > 1`, triples of distinct elements below `3m`, and more
    /// than `m + 1` triples.
    pub fn new(m: usize, sets: Vec<[usize; 3]>) -> Result<Self, ReductionError> {
        let bad = |s: String| Err(ReductionError::InvalidX3c(s));
        if m <= 1 {
            return bad(format!("m must exceed 1, got {m}"));
        }
        if sets.len() <= m + 1 {
            return bad(format!("need more than m+1 = {} sets, got {}", m + 1, sets.len()));
        }
        for (i, s) in sets.iter().enumerate() {
            if s.iter().any(|&b| b >= 3 * m) || s[0] == s[1] || s[1] == s[2] || s[0] == s[2] {
                return bad(format!("set {i} = {s:?} is not a 3-subset of 0..{}", 3 * m));
            }
        }
        Ok(X3cInstance { m, sets })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn base_size(&self) -> usize {
        3 * self.m
    }

    pub fn sets(&self) -> &[[usize; 3]] {
        &self.sets
    }

    /// Whether the chosen set indices cover every base element exactly once.
    pub fn is_exact_cover(&self, chosen: &[usize]) -> bool {
        let mut hits = vec![0usize; self.base_size()];
        for &i in chosen {
            for &b in &self.sets[i] {
                hits[b] += 1;
            }
        }
        hits.iter().all(|&h| h == 1)
    }
}

/// A 3-regular graph together with a target cover size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicVertexCover {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    k: usize,
}

impl CubicVertexCover {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>, k: usize) -> Result<Self, ReductionError> {
        let mut degree = vec![0usize; vertices];
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &edges {
            if u >= vertices || v >= vertices {
                return Err(ReductionError::NotCubic(format!("edge ({u},{v}) leaves 0..{vertices}")));
            }
            if u == v {
                return Err(ReductionError::NotCubic(format!("self-loop at {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(ReductionError::NotCubic(format!("repeated edge ({u},{v})")));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        if let Some(v) = degree.iter().position(|&d| d != 3) {
            return Err(ReductionError::NotCubic(format!("vertex {v} has degree {}", degree[v])));
        }
        if vertices == 0 {
            return Err(ReductionError::NotCubic("empty graph".into()));
        }
        if k == 0 || k > vertices {
            return Err(ReductionError::InvalidCoverSize { k, n: vertices });
        }
        Ok(CubicVertexCover { vertices, edges, k })
    }

    pub fn complete4(k: usize) -> Result<Self, ReductionError> {
        CubicVertexCover::new(4, (0..4).tuple_combinations().collect(), k)
    }

    pub fn complete_bipartite33(k: usize) -> Result<Self, ReductionError> {
        let edges = (0..3).cartesian_product(3..6).collect();
        CubicVertexCover::new(6, edges, k)
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_cover(&self, vertices: &[usize]) -> bool {
        self.edges
            .iter()
            .all(|(u, v)| vertices.contains(u) || vertices.contains(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairOutcome {
    FirstBeats,
    SecondBeats,
    Tie,
}

/// Prescribed head-to-head results. Pairs not set explicitly are ties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajoritySpec {
    candidates: CandidateSet,
    strict: BTreeMap<(usize, usize), PairOutcome>,
}

impl MajoritySpec {
    pub fn new(candidates: CandidateSet) -> Self {
        MajoritySpec {
            candidates,
            strict: BTreeMap::new(),
        }
    }

    pub fn candidates(&self) -> &CandidateSet {
        &self.candidates
    }

    /// Records that `winner` defeats `loser` (positions in the candidate set).
    pub fn set_beats(&mut self, winner: usize, loser: usize) {
        assert_ne!(winner, loser);
        let outcome = if winner < loser {
            PairOutcome::FirstBeats
        } else {
            PairOutcome::SecondBeats
        };
        self.strict.insert((winner.min(loser), winner.max(loser)), outcome);
    }

    pub fn outcome(&self, a: usize, b: usize) -> PairOutcome {
        let flip = a > b;
        match (self.strict.get(&(a.min(b), a.max(b))), flip) {
            (None, _) | (Some(PairOutcome::Tie), _) => PairOutcome::Tie,
            (Some(&o), false) => o,
            (Some(PairOutcome::FirstBeats), true) => PairOutcome::SecondBeats,
            (Some(PairOutcome::SecondBeats), true) => PairOutcome::FirstBeats,
        }
    }

    /// Strict contests as `(winner, loser)`, ordered by pair.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        self.strict
            .iter()
            .filter_map(|(&(a, b), o)| match o {
                PairOutcome::FirstBeats => Some((a, b)),
                PairOutcome::SecondBeats => Some((b, a)),
                PairOutcome::Tie => None,
            })
            .collect()
    }
}

/// McGarvey's construction: two ballots per strict contest `w` beats `l`,
/// namely `w > l > rest` and `reverse(rest) > w > l`, where `rest` is the
/// remaining candidates in candidate-set order. Every strict contest ends
/// with margin +2 and every other contest with margin 0.
pub fn mcgarvey_profile(spec: &MajoritySpec) -> Result<Profile, ReductionError> {
    let m = spec.candidates.len();
    let pairs = spec.strict_pairs();
    if !pairs.is_empty() && m < 3 {
        return Err(ReductionError::TooFewCandidates(m));
    }
    let mut ballots = Vec::with_capacity(2 * pairs.len());
    for (w, l) in pairs {
        let rest: Vec<usize> = (0..m).filter(|&c| c != w && c != l).collect();
        let mut top = vec![w, l];
        top.extend(&rest);
        let mut bottom: Vec<usize> = rest.iter().rev().copied().collect();
        bottom.extend([w, l]);
        ballots.push(Ballot::Ranking(top));
        ballots.push(Ballot::Ranking(bottom));
    }
    Ok(Profile::new(spec.candidates.clone(), BallotKind::Ranking, ballots)?)
}

/// weakCondorcet-CCREPC-TP instance built from a cubic vertex-cover
/// instance, with the candidate roles needed to map witnesses back.
#[derive(Debug, Clone)]
pub struct VcReduction {
    pub instance: ControlInstance,
    pub graph: CubicVertexCover,
    /// Candidate position of each graph vertex.
    pub vertex_candidates: Vec<usize>,
    /// Candidate position of each graph edge.
    pub edge_candidates: Vec<usize>,
    /// Candidate positions of the padding candidates.
    pub padding: Vec<usize>,
}

/// Candidates `{p} ∪ V ∪ E ∪ D` with `|D| = n/2 + 2k − 1`; every edge beats
/// p, p beats every vertex and padding candidate, both endpoints of an edge
/// beat it, and all other contests tie.
pub fn cubic_vc_to_weakcondorcet_ccrepc_tp(g: &CubicVertexCover) -> Result<VcReduction, ReductionError> {
    let n = g.vertices;
    let pad = n / 2 + 2 * g.k - 1;
    let mut members = vec![Candidate::new("p")];
    members.extend((0..n).map(|v| Candidate::new(format!("v{v}"))));
    members.extend(g.edges.iter().map(|(u, v)| Candidate::new(format!("e{u}-{v}"))));
    members.extend((1..=pad).map(|i| Candidate::new(format!("d{i}"))));
    let candidates = CandidateSet::new(members)?;

    let vertex_candidates: Vec<usize> = (1..=n).collect();
    let edge_candidates: Vec<usize> = (n + 1..n + 1 + g.edges.len()).collect();
    let padding: Vec<usize> = (n + 1 + g.edges.len()..candidates.len()).collect();

    let mut spec = MajoritySpec::new(candidates);
    for &e in &edge_candidates {
        spec.set_beats(e, 0);
    }
    for &c in vertex_candidates.iter().chain(&padding) {
        spec.set_beats(0, c);
    }
    for (&e, &(u, v)) in edge_candidates.iter().zip(&g.edges) {
        spec.set_beats(vertex_candidates[u], e);
        spec.set_beats(vertex_candidates[v], e);
    }
    let profile = mcgarvey_profile(&spec)?;
    let instance = ControlInstance::builder(VotingRule::WeakCondorcet, profile, "p", Problem::Ccrepc)
        .tie(TieRule::Promote)
        .build()?;
    Ok(VcReduction {
        instance,
        graph: g.clone(),
        vertex_candidates,
        edge_candidates,
        padding,
    })
}

impl VcReduction {
    /// The partition `({p} ∪ D ∪ (V − cover), E ∪ cover)`.
    pub fn forward_witness(&self, cover: &[usize]) -> Witness {
        let mut first = vec![0];
        first.extend(&self.padding);
        let mut second = self.edge_candidates.clone();
        for (v, &c) in self.vertex_candidates.iter().enumerate() {
            if cover.contains(&v) {
                second.push(c);
            } else {
                first.push(c);
            }
        }
        first.sort_unstable();
        second.sort_unstable();
        Witness::CandidatePartition(first, second)
    }

    /// Graph vertices placed opposite p by an accepted witness; these form a
    /// vertex cover of size at most k.
    pub fn pull_back_vc_witness(&self, witness: &Witness) -> Result<Vec<usize>, ReductionError> {
        if !replay(&self.instance, witness)?.accepted() {
            return Err(ReductionError::NotAWitness);
        }
        let Witness::CandidatePartition(c1, c2) = witness else {
            return Err(ReductionError::NotAWitness);
        };
        let other = if c1.contains(&0) { c2 } else { c1 };
        Ok(self
            .vertex_candidates
            .iter()
            .enumerate()
            .filter(|(_, c)| other.contains(c))
            .map(|(v, _)| v)
            .collect())
    }
}

/// Plurality scores the X3C reduction must produce, keyed by candidate id.
pub fn x3c_expected_scores(x: &X3cInstance) -> BTreeMap<String, usize> {
    let (m, n) = (x.m, x.sets.len());
    let mut scores = BTreeMap::new();
    scores.insert("p".to_string(), 2 * (n + m));
    scores.insert("c".to_string(), 2 * (n + m) + 2);
    scores.insert("d".to_string(), 2 * (n + m) + 1);
    scores.insert("e".to_string(), 2 * n + m - 1);
    for j in 1..=x.base_size() {
        scores.insert(format!("b{j}"), 2 * n);
    }
    scores
}

/// Group label of the triple `i` (0-based) in the X3C reduction.
pub fn x3c_group_label(i: usize) -> String {
    format!("G{}", i + 1)
}

/// Plurality-CCPVG-TE instance over `{p, c, d, e} ∪ B` with `n + 3` groups:
/// one six-ballot group per triple, the balancing group `GB`, and the
/// groups `Gc` and `Gd` of `2(n+m)+1` ballots each. Unordered candidate sets
/// inside a ballot are listed by candidate id.
pub fn x3c_to_plurality_ccpvg_te(x: &X3cInstance) -> Result<ControlInstance, ReductionError> {
    let (m, n) = (x.m, x.sets.len());
    let mut members: Vec<Candidate> = ["p", "c", "d", "e"].into_iter().map(Candidate::new).collect();
    members.extend((1..=x.base_size()).map(|j| Candidate::new(format!("b{j}"))));
    let candidates = CandidateSet::new(members)?;
    let (p, c, d, e) = (0, 1, 2, 3);
    let b = |j: usize| 4 + j;

    let mut by_id: Vec<usize> = (0..candidates.len()).collect();
    by_id.sort_by(|&u, &v| candidates.get(u).unwrap().id.cmp(&candidates.get(v).unwrap().id));
    // p > C − {p}
    let mut p_order = vec![p];
    p_order.extend(by_id.iter().copied().filter(|&y| y != p));
    let p_first = Ballot::Ranking(p_order);
    // top > C − {top, p} > p
    let p_last = |top: usize| {
        let mut order = vec![top];
        order.extend(by_id.iter().copied().filter(|&y| y != top && y != p));
        order.push(p);
        Ballot::Ranking(order)
    };

    let mut ballots = Vec::new();
    let mut labels = Vec::new();
    let mut push = |ballot: Ballot, count: usize, label: &str| {
        for _ in 0..count {
            ballots.push(ballot.clone());
            labels.push(label.to_string());
        }
    };
    for (i, set) in x.sets.iter().enumerate() {
        let label = x3c_group_label(i);
        push(p_first.clone(), 2, &label);
        for &j in set {
            push(p_last(b(j)), 1, &label);
        }
        push(p_last(e), 1, &label);
    }
    for j in 0..x.base_size() {
        let occurrences = x.sets.iter().filter(|s| s.contains(&j)).count();
        push(p_last(b(j)), 2 * n - occurrences, "GB");
    }
    push(p_first.clone(), 2 * m, "GB");
    push(p_last(e), n + m - 1, "GB");
    push(p_last(c), 1, "GB");
    push(p_last(c), 2 * (n + m) + 1, "Gc");
    push(p_last(d), 2 * (n + m) + 1, "Gd");

    let profile = Profile::new(candidates, BallotKind::Ranking, ballots)?;
    Ok(ControlInstance::builder(VotingRule::Plurality, profile, "p", Problem::Ccpvg)
        .tie(TieRule::Eliminate)
        .groups(labels)
        .build()?)
}

/// Voter partition putting the groups of the chosen triples together with
/// `Gc` and `Gd` on one side and everything else on the other.
pub fn x3c_forward_witness(instance: &ControlInstance, cover: &[usize]) -> Witness {
    let groups = instance.groups().expect("group instance");
    let mut second_labels: Vec<String> = cover.iter().map(|&i| x3c_group_label(i)).collect();
    second_labels.extend(["Gc".to_string(), "Gd".to_string()]);
    let mut first = Vec::new();
    let mut second = Vec::new();
    for (i, l) in groups.ballot_labels().iter().enumerate() {
        if second_labels.contains(l) {
            second.push(i);
        } else {
            first.push(i);
        }
    }
    Witness::VoterPartition(vec![first, second])
}

/// System E partition instance: adds the special candidates 0..=3 (approved
/// by nobody) and one empty ballot if the electorate is odd, two if even.
pub fn approval_ccpv_te_to_e_ccpv_tp(src: &ControlInstance) -> Result<ControlInstance, ReductionError> {
    if src.rule() != VotingRule::Approval || src.problem() != Problem::Ccpv || src.tie() != Some(TieRule::Eliminate) {
        return Err(ReductionError::WrongSource(format!(
            "{}-{}-{}",
            src.rule(),
            src.problem(),
            src.tie().map_or("-".into(), |t| t.to_string())
        )));
    }
    let profile = src.profile();
    if profile.candidates().iter().any(|c| c.special.is_some()) {
        return Err(ReductionError::SpecialCandidates);
    }
    let mut members: Vec<Candidate> = profile.candidates().iter().cloned().collect();
    members.extend((0..4u8).map(|s| Candidate::special(s.to_string(), s)));
    let candidates = CandidateSet::new(members)?;
    let width = candidates.len();
    let mut ballots: Vec<Ballot> = profile
        .ballots()
        .iter()
        .map(|b| match b {
            Ballot::Approval(flags) => {
                let mut f = flags.clone();
                f.resize(width, false);
                Ballot::Approval(f)
            }
            other => other.clone(),
        })
        .collect();
    let extra = if profile.len().is_multiple_of(2) { 2 } else { 1 };
    ballots.extend(std::iter::repeat_n(Ballot::Approval(vec![false; width]), extra));
    let target = Profile::new(candidates, BallotKind::Approval, ballots)?;
    Ok(ControlInstance::builder(VotingRule::SystemE, target, src.distinguished_id(), Problem::Ccpv)
        .tie(TieRule::Promote)
        .build()?)
}

pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Decides X3C by trying every m-subset of the triples.
pub fn solve_x3c_bruteforce(x: &X3cInstance) -> Result<bool, ReductionError> {
    Ok(find_x3c_cover(x)?.is_some())
}

/// First exact cover (as triple indices) in lexicographic subset order.
pub fn find_x3c_cover(x: &X3cInstance) -> Result<Option<Vec<usize>>, ReductionError> {
    if x.sets.len() > BRUTE_FORCE_LIMIT {
        return Err(ReductionError::TooLarge {
            size: x.sets.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    Ok((0..x.sets.len())
        .combinations(x.m)
        .find(|chosen| x.is_exact_cover(chosen)))
}

/// Decides whether the graph has a vertex cover of size `k`.
pub fn solve_vc_bruteforce(g: &CubicVertexCover, k: usize) -> Result<bool, ReductionError> {
    if g.vertices > BRUTE_FORCE_LIMIT {
        return Err(ReductionError::TooLarge {
            size: g.vertices,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if k > g.vertices {
        return Ok(false);
    }
    Ok((0..g.vertices).combinations(k).any(|s| g.is_cover(&s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elections::{majority_margin, score_plurality};

    #[test]
    fn mcgarvey_single_strict_pair() {
        let cands = CandidateSet::from_ids(&["a", "b", "c"]).unwrap();
        let mut spec = MajoritySpec::new(cands);
        spec.set_beats(0, 1);
        let prof = mcgarvey_profile(&spec).unwrap();
        assert_eq!(prof.len(), 2);
        assert_eq!(majority_margin(&prof, "a", "b").unwrap(), 2);
        assert_eq!(majority_margin(&prof, "a", "c").unwrap(), 0);
        assert_eq!(majority_margin(&prof, "b", "c").unwrap(), 0);
    }

    #[test]
    fn mcgarvey_edge_cases() {
        let cands = CandidateSet::from_ids(&["a", "b", "c"]).unwrap();
        let prof = mcgarvey_profile(&MajoritySpec::new(cands)).unwrap();
        assert!(prof.is_empty());

        let two = CandidateSet::from_ids(&["a", "b"]).unwrap();
        let mut spec = MajoritySpec::new(two);
        spec.set_beats(1, 0);
        assert_eq!(mcgarvey_profile(&spec), Err(ReductionError::TooFewCandidates(2)));
    }

    #[test]
    fn majority_spec_orientation() {
        let cands = CandidateSet::from_ids(&["a", "b", "c"]).unwrap();
        let mut spec = MajoritySpec::new(cands);
        spec.set_beats(2, 0);
        assert_eq!(spec.outcome(2, 0), PairOutcome::FirstBeats);
        assert_eq!(spec.outcome(0, 2), PairOutcome::SecondBeats);
        assert_eq!(spec.outcome(0, 1), PairOutcome::Tie);
        assert_eq!(spec.strict_pairs(), vec![(2, 0)]);
    }

    #[test]
    fn cubic_validation() {
        assert!(CubicVertexCover::complete4(3).is_ok());
        assert!(CubicVertexCover::complete_bipartite33(3).is_ok());
        assert!(matches!(
            CubicVertexCover::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)], 2),
            Err(ReductionError::NotCubic(_))
        ));
        assert!(matches!(
            CubicVertexCover::new(4, vec![(0, 1), (0, 1)], 2),
            Err(ReductionError::NotCubic(_))
        ));
        assert_eq!(
            CubicVertexCover::complete4(5),
            Err(ReductionError::InvalidCoverSize { k: 5, n: 4 })
        );
    }

    #[test]
    fn k4_reduction_size() {
        let g = CubicVertexCover::complete4(3).unwrap();
        let red = cubic_vc_to_weakcondorcet_ccrepc_tp(&g).unwrap();
        let prof = red.instance.profile();
        assert_eq!(prof.candidates().len(), 18);
        assert_eq!(red.padding.len(), 7);
        // 2·(|E| + |V ∪ D| + 2|E|)
        assert_eq!(prof.len(), 2 * (6 + 11 + 12));
        assert_eq!(majority_margin(prof, "e0-1", "p").unwrap(), 2);
        assert_eq!(majority_margin(prof, "p", "v0").unwrap(), 2);
        assert_eq!(majority_margin(prof, "p", "d3").unwrap(), 2);
        assert_eq!(majority_margin(prof, "v1", "e0-1").unwrap(), 2);
        assert_eq!(majority_margin(prof, "v2", "e0-1").unwrap(), 0);
        assert_eq!(majority_margin(prof, "d1", "v2").unwrap(), 0);
    }

    #[test]
    fn k4_forward_witness_pulls_back_to_cover() {
        let g = CubicVertexCover::complete4(3).unwrap();
        let red = cubic_vc_to_weakcondorcet_ccrepc_tp(&g).unwrap();
        let w = red.forward_witness(&[0, 1, 2]);
        let Witness::CandidatePartition(c1, c2) = &w else { unreachable!() };
        assert_eq!((c1.len(), c2.len()), (9, 9));
        assert_eq!(red.pull_back_vc_witness(&w).unwrap(), vec![0, 1, 2]);

        // {0,1} is not a cover: the uncovered edge 2-3 reaches the runoff.
        let bad = red.forward_witness(&[0, 1]);
        assert_eq!(red.pull_back_vc_witness(&bad), Err(ReductionError::NotAWitness));
    }

    #[test]
    fn vc_bruteforce() {
        let k4 = CubicVertexCover::complete4(3).unwrap();
        assert!(!solve_vc_bruteforce(&k4, 2).unwrap());
        assert!(solve_vc_bruteforce(&k4, 3).unwrap());
        let k33 = CubicVertexCover::complete_bipartite33(3).unwrap();
        assert!(!solve_vc_bruteforce(&k33, 2).unwrap());
        assert!(solve_vc_bruteforce(&k33, 3).unwrap());
    }

    #[test]
    fn x3c_validation() {
        let sets = vec![[0, 1, 2], [3, 4, 5], [0, 3, 4], [1, 2, 5]];
        assert!(X3cInstance::new(2, sets.clone()).is_ok());
        assert!(X3cInstance::new(1, sets.clone()).is_err());
        assert!(X3cInstance::new(2, sets[..3].to_vec()).is_err());
        assert!(X3cInstance::new(2, vec![[0, 1, 6], [3, 4, 5], [0, 3, 4], [1, 2, 5]]).is_err());
        assert!(X3cInstance::new(2, vec![[0, 0, 1], [3, 4, 5], [0, 3, 4], [1, 2, 5]]).is_err());
    }

    #[test]
    fn x3c_bruteforce_small() {
        let yes = X3cInstance::new(2, vec![[0, 1, 2], [3, 4, 5], [0, 3, 4], [1, 2, 5]]).unwrap();
        assert!(solve_x3c_bruteforce(&yes).unwrap());
        assert_eq!(find_x3c_cover(&yes).unwrap(), Some(vec![0, 1]));
        let no = X3cInstance::new(2, vec![[0, 1, 2], [0, 3, 4], [1, 3, 5], [2, 4, 5]]).unwrap();
        assert!(!solve_x3c_bruteforce(&no).unwrap());
    }

    #[test]
    fn x3c_reduction_shape_and_scores() {
        let x = X3cInstance::new(2, vec![[0, 1, 2], [3, 4, 5], [0, 3, 4], [1, 2, 5]]).unwrap();
        let inst = x3c_to_plurality_ccpvg_te(&x).unwrap();
        assert_eq!(inst.groups().unwrap().len(), 7);
        let scores = score_plurality(inst.profile()).unwrap();
        let expected = x3c_expected_scores(&x);
        for (pos, c) in inst.profile().candidates().iter().enumerate() {
            assert_eq!(scores[pos], expected[&c.id], "{}", c.id);
        }
        // bracketed sets are resolved by id: p > b1 > b2 > ... > e
        let Ballot::Ranking(first) = &inst.profile().ballots()[0] else { unreachable!() };
        let ids: Vec<&str> = first.iter().map(|&i| inst.profile().candidates().get(i).unwrap().id.as_str()).collect();
        assert_eq!(ids, vec!["p", "b1", "b2", "b3", "b4", "b5", "b6", "c", "d", "e"]);
    }

    #[test]
    fn x3c_forward_witness_verifies() {
        let x = X3cInstance::new(2, vec![[0, 1, 2], [3, 4, 5], [0, 3, 4], [1, 2, 5]]).unwrap();
        let inst = x3c_to_plurality_ccpvg_te(&x).unwrap();
        let w = x3c_forward_witness(&inst, &[0, 1]);
        assert!(crate::two_stage::verify_witness(&inst, &w).unwrap());
    }

    #[test]
    fn approval_to_e_parity() {
        for (n, expect) in [(4usize, 6usize), (5, 6), (0, 2), (1, 2)] {
            let cands = CandidateSet::from_ids(&["p", "a", "b"]).unwrap();
            let prof = Profile::approvals(cands, &[(n, &["p"][..])]).unwrap();
            let src = ControlInstance::builder(VotingRule::Approval, prof, "p", Problem::Ccpv)
                .tie(TieRule::Eliminate)
                .build()
                .unwrap();
            let tgt = approval_ccpv_te_to_e_ccpv_tp(&src).unwrap();
            assert_eq!(tgt.profile().len(), expect, "n={n}");
            assert_eq!(tgt.profile().candidates().len(), 7);
            assert_eq!(tgt.rule(), VotingRule::SystemE);
            assert_eq!(tgt.tie(), Some(TieRule::Promote));
        }
    }

    #[test]
    fn approval_to_e_rejects_bad_sources() {
        let cands = CandidateSet::new(vec![Candidate::new("p"), Candidate::special("z", 1)]).unwrap();
        let prof = Profile::approvals::<&str>(cands.clone(), &[]).unwrap();
        let src = ControlInstance::builder(VotingRule::Approval, prof.clone(), "p", Problem::Ccpv)
            .tie(TieRule::Eliminate)
            .build()
            .unwrap();
        assert_eq!(approval_ccpv_te_to_e_ccpv_tp(&src).unwrap_err(), ReductionError::SpecialCandidates);
        let tp = ControlInstance::builder(VotingRule::Approval, prof, "p", Problem::Ccpv)
            .tie(TieRule::Promote)
            .build()
            .unwrap();
        assert!(matches!(approval_ccpv_te_to_e_ccpv_tp(&tp), Err(ReductionError::WrongSource(_))));
    }
}
