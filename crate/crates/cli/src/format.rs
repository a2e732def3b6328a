//! On-disk documents: instance files, witness files, result records and the
//! source files accepted by `reduce`.

use anyhow::{anyhow, bail, ensure, Context, Result};
use electctl_core::elections::{Ballot, BallotKind, Candidate, CandidateSet, Profile, VotingRule};
use electctl_core::reductions::{CubicVertexCover, X3cInstance};
use electctl_core::two_stage::{ControlInstance, Decision, Problem, TieRule, Witness};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const INSTANCE_FORMAT: &str = "electctl/1";
pub const X3C_FORMAT: &str = "electctl-x3c/1";
pub const GRAPH_FORMAT: &str = "electctl-graph/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub rule: String,
    pub problem: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie: Option<String>,
    pub distinguished: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<usize>,
    pub candidates: Vec<CandidateEntry>,
    pub ballots: Vec<BallotEntry>,
    /// Ballots that may be added (CCAVG only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool: Option<Vec<BallotEntry>>,
}

/// Where a generated instance came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub generator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_digest: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special: Option<u8>,
}

/// One ballot: either a full ranking of candidate ids or a `0`/`1` string
/// over the candidate list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallotEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranking: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approvals: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

fn ballots_to_profile(cands: &CandidateSet, kind: BallotKind, entries: &[BallotEntry]) -> Result<Profile> {
    let ballots = entries
        .iter()
        .enumerate()
        .map(|(i, e)| match (kind, &e.ranking, &e.approvals) {
            (BallotKind::Ranking, Some(ids), None) => Ok(Ballot::Ranking(
                ids.iter().map(|id| cands.resolve(id)).collect::<Result<_, _>>()?,
            )),
            (BallotKind::Approval, None, Some(bits)) => {
                let flags = bits
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        other => Err(anyhow!("ballot {i}: approval string has '{other}'")),
                    })
                    .collect::<Result<_>>()?;
                Ok(Ballot::Approval(flags))
            }
            (BallotKind::Ranking, _, _) => Err(anyhow!("ballot {i}: expected exactly a \"ranking\"")),
            (BallotKind::Approval, _, _) => Err(anyhow!("ballot {i}: expected exactly an \"approvals\" string")),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Profile::new(cands.clone(), kind, ballots)?)
}

fn profile_to_ballots(profile: &Profile, groups: Option<&[String]>) -> Vec<BallotEntry> {
    let cands = profile.candidates();
    profile
        .ballots()
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let (ranking, approvals) = match b {
                Ballot::Ranking(order) => {
                    (Some(order.iter().map(|&c| cands.get(c).unwrap().id.clone()).collect()), None)
                }
                Ballot::Approval(flags) => {
                    (None, Some(flags.iter().map(|&f| if f { '1' } else { '0' }).collect()))
                }
            };
            BallotEntry { ranking, approvals, group: groups.map(|g| g[i].clone()) }
        })
        .collect()
}

fn group_labels(entries: &[BallotEntry]) -> Result<Vec<String>> {
    entries
        .iter()
        .enumerate()
        .map(|(i, e)| e.group.clone().ok_or_else(|| anyhow!("ballot {i}: missing group label")))
        .collect()
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<ControlInstance> {
        ensure!(self.format == INSTANCE_FORMAT, "unsupported format {:?}, expected {INSTANCE_FORMAT:?}", self.format);
        let rule = VotingRule::from_name(&self.rule).ok_or_else(|| anyhow!("unknown rule {:?}", self.rule))?;
        let problem = Problem::from_name(&self.problem).ok_or_else(|| anyhow!("unknown problem {:?}", self.problem))?;
        let stray = |name: &str, present: bool, wanted: bool| -> Result<()> {
            ensure!(!present || wanted, "{name} is not a parameter of {}", problem.name());
            Ok(())
        };
        stray("tie", self.tie.is_some(), problem.is_partition())?;
        stray("k", self.k.is_some(), problem == Problem::Ccpkv)?;
        stray("limit", self.limit.is_some(), matches!(problem, Problem::Ccdvg | Problem::Ccavg))?;
        stray("pool", self.pool.is_some(), problem == Problem::Ccavg)?;

        let cands = CandidateSet::new(
            self.candidates
                .iter()
                .map(|c| Candidate { id: c.id.clone(), special: c.special })
                .collect(),
        )?;
        let kind = rule.ballot_kind();
        let profile = ballots_to_profile(&cands, kind, &self.ballots).context("ballots")?;
        let mut b = ControlInstance::builder(rule, profile, &self.distinguished, problem);
        if let Some(t) = &self.tie {
            b = b.tie(TieRule::from_name(t).ok_or_else(|| anyhow!("unknown tie rule {t:?}"))?);
        }
        if let Some(k) = self.k {
            b = b.parts(k);
        }
        if let Some(l) = self.limit {
            b = b.limit(l);
        }
        if let Some(pool) = &self.pool {
            b = b.pool(ballots_to_profile(&cands, kind, pool).context("pool")?);
            b = b.groups(group_labels(pool)?);
        } else if problem.uses_groups() {
            b = b.groups(group_labels(&self.ballots)?);
        }
        Ok(b.build()?)
    }

    pub fn from_instance(inst: &ControlInstance, provenance: Option<Provenance>) -> Self {
        let labels = inst.groups().map(|g| g.ballot_labels());
        let (ballot_groups, pool) = match inst.pool() {
            Some(w) => (None, Some(profile_to_ballots(w, labels))),
            None => (labels, None),
        };
        InstanceFile {
            format: INSTANCE_FORMAT.to_string(),
            provenance,
            rule: inst.rule().name().to_string(),
            problem: inst.problem().name().to_string(),
            tie: inst.tie().map(|t| t.name().to_string()),
            distinguished: inst.distinguished_id().to_string(),
            k: inst.parts(),
            limit: inst.limit(),
            candidates: inst
                .profile()
                .candidates()
                .iter()
                .map(|c| CandidateEntry { id: c.id.clone(), special: c.special })
                .collect(),
            ballots: profile_to_ballots(inst.profile(), ballot_groups),
            pool,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).with_context(|| format!("parsing {what}"))
}

pub fn read_instance(path: &std::path::Path) -> Result<ControlInstance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_json::<InstanceFile>(&text, "instance file")?.to_instance()
}

/// SHA-256 of the canonical serialization, provenance excluded.
pub fn instance_digest(inst: &ControlInstance) -> String {
    hex::encode(Sha256::digest(InstanceFile::from_instance(inst, None).to_json().as_bytes()))
}

/// Witness document; candidates and groups are named by id, ballots by
/// zero-based index in file order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WitnessDoc {
    VoterPartition(Vec<Vec<usize>>),
    CandidatePartition(Vec<Vec<String>>),
    GroupSelection(Vec<String>),
}

impl WitnessDoc {
    pub fn from_witness(inst: &ControlInstance, w: &Witness) -> Self {
        let ids = |side: &[usize]| {
            side.iter()
                .map(|&c| inst.profile().candidates().get(c).unwrap().id.clone())
                .collect()
        };
        match w {
            Witness::VoterPartition(parts) => WitnessDoc::VoterPartition(parts.clone()),
            Witness::CandidatePartition(a, b) => WitnessDoc::CandidatePartition(vec![ids(a), ids(b)]),
            Witness::GroupSelection(labels) => WitnessDoc::GroupSelection(labels.clone()),
        }
    }

    pub fn to_witness(&self, inst: &ControlInstance) -> Result<Witness> {
        let cands = inst.profile().candidates();
        Ok(match self {
            WitnessDoc::VoterPartition(parts) => Witness::VoterPartition(parts.clone()),
            WitnessDoc::CandidatePartition(sides) => {
                let [a, b] = sides.as_slice() else {
                    bail!("candidate partition needs exactly two sides, got {}", sides.len());
                };
                let pos = |side: &[String]| side.iter().map(|id| cands.resolve(id)).collect::<Result<Vec<_>, _>>();
                Witness::CandidatePartition(pos(a)?, pos(b)?)
            }
            WitnessDoc::GroupSelection(labels) => Witness::GroupSelection(labels.clone()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsDoc {
    pub cases_examined: u64,
    pub partitions_enumerated: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRecord {
    pub instance_digest: String,
    pub solver: String,
    /// `yes`, `no` or `unknown`.
    pub answer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
    pub stats: StatsDoc,
    pub wall_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ResultRecord {
    pub fn from_decision(inst: &ControlInstance, solver: &str, d: &Decision, wall_ms: f64) -> Self {
        ResultRecord {
            instance_digest: instance_digest(inst),
            solver: solver.to_string(),
            answer: d.answer.to_string(),
            witness: d.witness.as_ref().map(|w| WitnessDoc::from_witness(inst, w)),
            stats: StatsDoc {
                cases_examined: d.stats.cases_examined,
                partitions_enumerated: d.stats.partitions_enumerated,
            },
            wall_ms,
            note: None,
        }
    }
}

/// A witness file may hold a bare witness or a whole result record.
pub fn parse_witness(text: &str) -> Result<WitnessDoc> {
    if let Ok(w) = serde_json::from_str::<WitnessDoc>(text) {
        return Ok(w);
    }
    let record: ResultRecord = parse_json(text, "witness file")?;
    record.witness.ok_or_else(|| anyhow!("result record has no witness (answer {})", record.answer))
}

/// Exact cover source: elements are numbered 1..=3m to match `b1..b3m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct X3cFile {
    pub format: String,
    pub m: usize,
    pub sets: Vec<[usize; 3]>,
}

impl X3cFile {
    pub fn to_x3c(&self) -> Result<X3cInstance> {
        ensure!(self.format == X3C_FORMAT, "unsupported format {:?}, expected {X3C_FORMAT:?}", self.format);
        let sets = self
            .sets
            .iter()
            .map(|s| {
                ensure!(s.iter().all(|&b| b >= 1), "elements are numbered from 1");
                Ok([s[0] - 1, s[1] - 1, s[2] - 1])
            })
            .collect::<Result<_>>()?;
        Ok(X3cInstance::new(self.m, sets)?)
    }
}

/// Cubic graph source: vertices are numbered 0..n to match `v0..`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub format: String,
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub k: usize,
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<CubicVertexCover> {
        ensure!(self.format == GRAPH_FORMAT, "unsupported format {:?}, expected {GRAPH_FORMAT:?}", self.format);
        Ok(CubicVertexCover::new(self.vertices, self.edges.iter().map(|e| (e[0], e[1])).collect(), self.k)?)
    }
}
