//! The `solve`, `verify`, `reduce`, `sweep` and `gen` commands. Each returns
//! the process exit status; errors map to status 3 in `main`.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use electctl_core::elections::{Candidate, CandidateSet, Profile, VotingRule};
use electctl_core::generate::{all_ranked_profiles, candidate_ids, random_approval_profile, random_ranked_profile};
use electctl_core::oracle::{oracle_solve, OracleError};
use electctl_core::poly;
use electctl_core::reductions::{approval_ccpv_te_to_e_ccpv_tp, cubic_vc_to_weakcondorcet_ccrepc_tp, x3c_to_plurality_ccpvg_te};
use electctl_core::two_stage::{replay, ControlInstance, Decision, Problem, TieRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::format::{
    instance_digest, parse_json, parse_witness, read_instance, GraphFile, InstanceFile, Provenance, ResultRecord,
    StatsDoc, X3cFile, GRAPH_FORMAT, X3C_FORMAT,
};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Solver {
    Poly,
    Oracle,
}

impl Solver {
    fn name(self) -> &'static str {
        match self {
            Solver::Poly => "poly",
            Solver::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Writes to `out` if given, else to `stdout`.
fn emit(out: Option<&Path>, stdout: &mut dyn Write, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn run_solver(inst: &ControlInstance, solver: Solver, budget: u64) -> Result<Result<Decision, OracleError>> {
    Ok(match solver {
        Solver::Poly => Ok(poly::solve(inst)?),
        Solver::Oracle => oracle_solve(inst, budget),
    })
}

fn record_csv(r: &ResultRecord) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["instance_digest", "solver", "answer", "witness", "cases_examined", "partitions_enumerated", "wall_ms"])?;
    let witness = r.witness.as_ref().map(serde_json::to_string).transpose()?.unwrap_or_default();
    w.write_record([
        r.instance_digest.as_str(),
        &r.solver,
        &r.answer,
        &witness,
        &r.stats.cases_examined.to_string(),
        &r.stats.partitions_enumerated.to_string(),
        &format!("{:.3}", r.wall_ms),
    ])?;
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn solve(
    file: &Path,
    solver: Solver,
    budget: u64,
    format: OutputFormat,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<i32> {
    let inst = read_instance(file)?;
    let start = Instant::now();
    let result = run_solver(&inst, solver, budget)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let (record, code) = match result {
        Ok(d) => {
            let code = if d.is_yes() { EXIT_YES } else { EXIT_NO };
            (ResultRecord::from_decision(&inst, solver.name(), &d, wall_ms), code)
        }
        Err(e) => (
            ResultRecord {
                instance_digest: instance_digest(&inst),
                solver: solver.name().to_string(),
                answer: "unknown".to_string(),
                witness: None,
                stats: StatsDoc::default(),
                wall_ms,
                note: Some(e.to_string()),
            },
            EXIT_UNKNOWN,
        ),
    };
    let text = match format {
        OutputFormat::Json => serde_json::to_string_pretty(&record)? + "\n",
        OutputFormat::Csv => record_csv(&record)?,
    };
    emit(out, stdout, &text)?;
    Ok(code)
}

fn id_list(inst: &ControlInstance, positions: &[usize]) -> String {
    let ids: Vec<&str> = positions
        .iter()
        .map(|&c| inst.profile().candidates().get(c).unwrap().id.as_str())
        .collect();
    format!("{{{}}}", ids.join(", "))
}

pub fn verify(instance: &Path, witness: &Path, stdout: &mut dyn Write) -> Result<i32> {
    let inst = read_instance(instance)?;
    let text = std::fs::read_to_string(witness).with_context(|| format!("reading {}", witness.display()))?;
    let w = parse_witness(&text)?.to_witness(&inst)?;
    let r = replay(&inst, &w)?;
    if let Some(f) = &r.finalists {
        writeln!(stdout, "finalists: {}", id_list(&inst, f))?;
    }
    writeln!(stdout, "winners: {}", id_list(&inst, &r.winners))?;
    if let Some(v) = &r.violation {
        writeln!(stdout, "violation: {v}")?;
    }
    let accepted = r.accepted();
    writeln!(stdout, "{}", if accepted { "accepted" } else { "rejected" })?;
    Ok(if accepted { EXIT_YES } else { EXIT_NO })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReductionKind {
    /// Exact cover by 3-sets to Plurality-CCPVG-TE.
    X3c,
    /// Cubic vertex cover to weakCondorcet-CCREPC-TP.
    Cvc,
    /// Approval-CCPV-TE to SystemE-CCPV-TP.
    ApprovalE,
}

impl ReductionKind {
    fn name(self) -> &'static str {
        match self {
            ReductionKind::X3c => "x3c",
            ReductionKind::Cvc => "cvc",
            ReductionKind::ApprovalE => "approval-e",
        }
    }
}

pub fn reduce(kind: ReductionKind, source: &Path, out: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(source).with_context(|| format!("reading {}", source.display()))?;
    let inst = match kind {
        ReductionKind::X3c => x3c_to_plurality_ccpvg_te(&parse_json::<X3cFile>(&text, "X3C file")?.to_x3c()?)?,
        ReductionKind::Cvc => cubic_vc_to_weakcondorcet_ccrepc_tp(&parse_json::<GraphFile>(&text, "graph file")?.to_graph()?)?.instance,
        ReductionKind::ApprovalE => approval_ccpv_te_to_e_ccpv_tp(&parse_json::<InstanceFile>(&text, "instance file")?.to_instance()?)?,
    };
    let provenance = Provenance {
        generator: format!("reduce {}", kind.name()),
        source_digest: Some(hex::encode(Sha256::digest(text.as_bytes()))),
        seed: None,
    };
    emit(out, stdout, &InstanceFile::from_instance(&inst, Some(provenance)).to_json())?;
    Ok(EXIT_YES)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    /// Plurality-CCEPV-TE.
    Ccepv,
    /// Plurality-CCPkV-TE.
    Ccpkv,
    /// weakCondorcet-CCRPC-TP.
    Rpc,
    /// SystemE-CCEPV-TP.
    SystemE,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Ccepv => "ccepv",
            Family::Ccpkv => "ccpkv",
            Family::Rpc => "rpc",
            Family::SystemE => "system-e",
        }
    }

    fn signature(self) -> (VotingRule, Problem, TieRule) {
        match self {
            Family::Ccepv => (VotingRule::Plurality, Problem::Ccepv, TieRule::Eliminate),
            Family::Ccpkv => (VotingRule::Plurality, Problem::Ccpkv, TieRule::Eliminate),
            Family::Rpc => (VotingRule::WeakCondorcet, Problem::Ccrpc, TieRule::Promote),
            Family::SystemE => (VotingRule::SystemE, Problem::Ccepv, TieRule::Promote),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub family: Family,
    pub candidates: usize,
    pub voters: usize,
    pub k: usize,
    /// Number of seeded instances; 0 enumerates every profile.
    pub count: usize,
    pub seed: u64,
    pub budget: u64,
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub instance_digest: String,
    pub problem: String,
    pub rule: String,
    pub tie: String,
    pub answer_poly: String,
    pub answer_oracle: String,
    pub agree: String,
    pub ms_poly: f64,
    pub ms_oracle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub family: String,
    pub rule: String,
    pub problem: String,
    pub tie: String,
    pub candidates: usize,
    pub voters: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub mode: String,
    pub seed: Option<u64>,
    pub instances: usize,
    pub agree: usize,
    pub disagree: usize,
    pub unknown: usize,
    pub agreement_rate: f64,
    pub counterexamples: Vec<String>,
}

pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
    pub counterexamples: Vec<(String, InstanceFile)>,
}

fn system_e_candidates(plain: usize) -> CandidateSet {
    let mut members: Vec<Candidate> = (0..4u8).map(|s| Candidate::special(s.to_string(), s)).collect();
    members.extend(candidate_ids(plain).into_iter().map(Candidate::new));
    CandidateSet::new(members).expect("distinct ids")
}

fn sweep_instances(cfg: &SweepConfig) -> Result<Vec<ControlInstance>> {
    let (rule, problem, tie) = cfg.family.signature();
    let build = |profile: Profile, p: &str| {
        let mut b = ControlInstance::builder(rule, profile, p, problem).tie(tie);
        if problem == Problem::Ccpkv {
            b = b.parts(cfg.k);
        }
        b.build()
    };
    if cfg.candidates == 0 {
        bail!("at least one candidate is required");
    }
    let mut out = Vec::new();
    if cfg.count == 0 {
        if cfg.family == Family::SystemE {
            bail!("the system-e family has no exhaustive mode; pass --count");
        }
        let cands = CandidateSet::from_ids(&candidate_ids(cfg.candidates))?;
        for profile in all_ranked_profiles(&cands, cfg.voters) {
            for p in cands.ids() {
                out.push(build(profile.clone(), p)?);
            }
        }
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.count {
        let (profile, cands) = if cfg.family == Family::SystemE {
            let cands = system_e_candidates(cfg.candidates);
            (random_approval_profile(&mut rng, &cands, cfg.voters, 0.5), cands)
        } else {
            let cands = CandidateSet::from_ids(&candidate_ids(cfg.candidates))?;
            (random_ranked_profile(&mut rng, &cands, cfg.voters), cands)
        };
        let p = cands.get(rng.gen_range(0..cands.len())).unwrap().id.clone();
        out.push(build(profile, &p)?);
    }
    Ok(out)
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    let (rule, problem, tie) = cfg.family.signature();
    let mut rows = Vec::new();
    let mut counterexamples = Vec::new();
    for inst in sweep_instances(cfg)? {
        let t = Instant::now();
        let poly_answer = poly::solve(&inst)?.answer.to_string();
        let ms_poly = t.elapsed().as_secs_f64() * 1e3;
        let t = Instant::now();
        let oracle_answer = match oracle_solve(&inst, cfg.budget) {
            Ok(d) => d.answer.to_string(),
            Err(OracleError::BudgetExceeded { .. }) => "unknown".to_string(),
        };
        let ms_oracle = t.elapsed().as_secs_f64() * 1e3;
        let agree = match oracle_answer.as_str() {
            "unknown" => "unknown",
            a if a == poly_answer => "true",
            _ => "false",
        };
        let digest = instance_digest(&inst);
        if agree == "false" {
            counterexamples.push((digest.clone(), InstanceFile::from_instance(&inst, None)));
        }
        rows.push(SweepRow {
            instance_digest: digest,
            problem: problem.name().to_string(),
            rule: rule.name().to_string(),
            tie: tie.name().to_string(),
            answer_poly: poly_answer,
            answer_oracle: oracle_answer,
            agree: agree.to_string(),
            ms_poly: if cfg.timings { ms_poly } else { 0.0 },
            ms_oracle: if cfg.timings { ms_oracle } else { 0.0 },
        });
    }
    rows.sort_by(|a, b| a.instance_digest.cmp(&b.instance_digest));
    counterexamples.sort_by(|a, b| a.0.cmp(&b.0));
    counterexamples.dedup_by(|a, b| a.0 == b.0);

    let count = |s: &str| rows.iter().filter(|r| r.agree == s).count();
    let (agree, disagree, unknown) = (count("true"), count("false"), count("unknown"));
    let summary = SweepSummary {
        family: cfg.family.name().to_string(),
        rule: rule.name().to_string(),
        problem: problem.name().to_string(),
        tie: tie.name().to_string(),
        candidates: cfg.candidates,
        voters: cfg.voters,
        k: (problem == Problem::Ccpkv).then_some(cfg.k),
        mode: if cfg.count == 0 { "exhaustive" } else { "seeded" }.to_string(),
        seed: (cfg.count > 0).then_some(cfg.seed),
        instances: rows.len(),
        agree,
        disagree,
        unknown,
        agreement_rate: if agree + disagree == 0 { 1.0 } else { agree as f64 / (agree + disagree) as f64 },
        counterexamples: counterexamples.iter().map(|(d, _)| d.clone()).collect(),
    };
    Ok(SweepReport { rows, summary, counterexamples })
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["instance_digest", "problem", "rule", "tie", "answer_poly", "answer_oracle", "agree", "ms_poly", "ms_oracle"])?;
    for r in rows {
        w.write_record([
            r.instance_digest.as_str(),
            &r.problem,
            &r.rule,
            &r.tie,
            &r.answer_poly,
            &r.answer_oracle,
            &r.agree,
            &format!("{:.3}", r.ms_poly),
            &format!("{:.3}", r.ms_oracle),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// With `out`, writes `report.csv`, `summary.json` and
/// `counterexamples/<digest>.json` there; otherwise prints the report in
/// `format`.
pub fn sweep(cfg: &SweepConfig, format: OutputFormat, out: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    let report = run_sweep(cfg)?;
    let csv = sweep_csv(&report.rows)?;
    let summary = serde_json::to_string_pretty(&report.summary)? + "\n";
    match out {
        Some(dir) => {
            let examples = dir.join("counterexamples");
            std::fs::create_dir_all(&examples).with_context(|| format!("creating {}", examples.display()))?;
            std::fs::write(dir.join("report.csv"), &csv)?;
            std::fs::write(dir.join("summary.json"), &summary)?;
            for (digest, file) in &report.counterexamples {
                std::fs::write(examples.join(format!("{digest}.json")), file.to_json())?;
            }
            stdout.write_all(summary.as_bytes())?;
        }
        None => stdout.write_all(match format {
            OutputFormat::Csv => csv.as_bytes(),
            OutputFormat::Json => summary.as_bytes(),
        })?,
    }
    let s = &report.summary;
    Ok(if s.disagree > 0 {
        EXIT_NO
    } else if s.unknown > 0 {
        EXIT_UNKNOWN
    } else {
        EXIT_YES
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// The three-candidate, fourteen-voter Plurality-CCEPV-TE example.
    WorkedExample,
    /// A small exact cover source file for `reduce x3c`.
    X3c,
    /// The complete graph on four vertices with k = 3, for `reduce cvc`.
    K4,
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub rule: VotingRule,
    pub problem: Problem,
    pub tie: TieRule,
    pub candidates: usize,
    pub voters: usize,
    pub k: usize,
    pub limit: usize,
    pub groups: usize,
    pub pool: usize,
    pub density: f64,
    pub seed: u64,
}

pub fn generate_instance(cfg: &GenConfig) -> Result<ControlInstance> {
    if cfg.candidates == 0 {
        bail!("at least one candidate is required");
    }
    if cfg.problem.uses_groups() && cfg.groups == 0 {
        bail!("{} needs at least one group", cfg.problem.name());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cands = if cfg.rule == VotingRule::SystemE {
        system_e_candidates(cfg.candidates)
    } else {
        CandidateSet::from_ids(&candidate_ids(cfg.candidates))?
    };
    let profile_of = |n: usize, rng: &mut ChaCha8Rng| match cfg.rule.ballot_kind() {
        electctl_core::BallotKind::Ranking => random_ranked_profile(rng, &cands, n),
        electctl_core::BallotKind::Approval => random_approval_profile(rng, &cands, n, cfg.density),
    };
    let profile = profile_of(cfg.voters, &mut rng);
    let labels = |n: usize, rng: &mut ChaCha8Rng| -> Vec<String> {
        (0..n).map(|_| format!("g{}", rng.gen_range(1..=cfg.groups))).collect()
    };
    let mut b = ControlInstance::builder(cfg.rule, profile, "p", cfg.problem)
        .tie(cfg.tie)
        .parts(cfg.k)
        .limit(cfg.limit);
    match cfg.problem {
        Problem::Ccavg => {
            let pool = profile_of(cfg.pool, &mut rng);
            b = b.groups(labels(cfg.pool, &mut rng)).pool(pool);
        }
        Problem::Ccpvg | Problem::Ccdvg => b = b.groups(labels(cfg.voters, &mut rng)),
        _ => {}
    }
    Ok(b.build()?)
}

fn worked_example() -> ControlInstance {
    let cands = CandidateSet::from_ids(&["p", "a", "b"]).unwrap();
    let profile = Profile::ranked(
        cands,
        &[(5, &["p", "a", "b"][..]), (6, &["a", "b", "p"][..]), (3, &["b", "a", "p"][..])],
    )
    .unwrap();
    ControlInstance::builder(VotingRule::Plurality, profile, "p", Problem::Ccepv)
        .tie(TieRule::Eliminate)
        .build()
        .unwrap()
}

pub fn gen(cfg: Option<&GenConfig>, preset: Option<Preset>, out: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    let text = match (preset, cfg) {
        (Some(Preset::WorkedExample), _) => InstanceFile::from_instance(
            &worked_example(),
            Some(Provenance { generator: "gen worked-example".into(), source_digest: None, seed: None }),
        )
        .to_json(),
        (Some(Preset::X3c), _) => {
            let file = X3cFile { format: X3C_FORMAT.into(), m: 2, sets: vec![[1, 2, 3], [4, 5, 6], [1, 4, 5], [2, 3, 6]] };
            serde_json::to_string_pretty(&file)? + "\n"
        }
        (Some(Preset::K4), _) => {
            let edges = vec![[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];
            serde_json::to_string_pretty(&GraphFile { format: GRAPH_FORMAT.into(), vertices: 4, edges, k: 3 })? + "\n"
        }
        (None, Some(cfg)) => InstanceFile::from_instance(
            &generate_instance(cfg)?,
            Some(Provenance { generator: "gen".into(), source_digest: None, seed: Some(cfg.seed) }),
        )
        .to_json(),
        (None, None) => bail!("nothing to generate"),
    };
    emit(out, stdout, &text)?;
    Ok(EXIT_YES)
}
