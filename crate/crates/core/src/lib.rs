//! Constructive election control by partition: equipartition, k-partition,
//! and partition/deletion/addition of voter groups.
//!
//! * [`elections`] – candidates, ballots, profiles and single-stage winners.
//! * [`two_stage`] – control instances, witnesses and two-stage semantics.
//! * [`poly`] – polynomial-time decision procedures.
//! * [`oracle`] – exhaustive solver for every control family.
//! * [`reductions`] – hardness reductions and McGarvey profiles.
//! * [`generate`] – exhaustive and seeded instance generators.

pub mod elections;
pub mod generate;
pub mod oracle;
pub mod poly;
pub mod reductions;
pub mod two_stage;

pub use elections::{
    majority_margin, restrict_profile, score_approval, score_plurality, winners, Ballot, BallotKind,
    Candidate, CandidateSet, ElectionError, Profile, VotingRule,
};
pub use oracle::{oracle_solve, OracleError, DEFAULT_BUDGET};
pub use two_stage::{
    verify_witness, Answer, ControlInstance, Decision, Problem, SolveStats, TieRule, Witness,
};
