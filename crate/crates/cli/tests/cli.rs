use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use electctl_cli::commands::{generate_instance, GenConfig};
use electctl_cli::format::{parse_json, InstanceFile};
use electctl_core::{Problem, TieRule, VotingRule};
use tempfile::TempDir;

fn electctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_electctl")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn worked_example(dir: &TempDir) -> PathBuf {
    let file = path(dir, "worked.json");
    assert_eq!(code(&electctl(&["gen", "--preset", "worked-example", "--out", s(&file)])), 0);
    file
}

#[test]
fn worked_example_poly_and_oracle_say_yes() {
    let dir = TempDir::new().unwrap();
    let file = worked_example(&dir);
    let poly = electctl(&["solve", s(&file)]);
    assert_eq!(code(&poly), 0);
    let oracle = electctl(&["solve", s(&file), "--solver", "oracle"]);
    assert_eq!(code(&oracle), 0);
    let p: serde_json::Value = serde_json::from_str(&stdout(&poly)).unwrap();
    let o: serde_json::Value = serde_json::from_str(&stdout(&oracle)).unwrap();
    assert_eq!(p["answer"], "yes");
    assert_eq!(p["answer"], o["answer"]);
    assert_eq!(p["instance_digest"], o["instance_digest"]);
}

#[test]
fn result_record_verifies() {
    let dir = TempDir::new().unwrap();
    let file = worked_example(&dir);
    let record = path(&dir, "record.json");
    assert_eq!(code(&electctl(&["solve", s(&file), "--out", s(&record)])), 0);
    let v = electctl(&["verify", s(&file), s(&record)]);
    assert_eq!(code(&v), 0);
    let text = stdout(&v);
    assert!(text.contains("finalists: {p}"), "{text}");
    assert!(text.contains("winners: {p}"), "{text}");
}

#[test]
fn verify_rejects_losing_and_malformed_partitions() {
    let dir = TempDir::new().unwrap();
    let file = worked_example(&dir);
    // the five p ballots with two b ballots on the first side
    let losing = path(&dir, "losing.json");
    std::fs::write(&losing, r#"{"voter_partition": [[0,1,2,3,4,11,12],[5,6,7,8,9,10,13]]}"#).unwrap();
    let v = electctl(&["verify", s(&file), s(&losing)]);
    assert_eq!(code(&v), 1);
    assert!(stdout(&v).contains("rejected"));

    let overlapping = path(&dir, "overlap.json");
    std::fs::write(&overlapping, r#"{"voter_partition": [[0,1,2,3,4,5,6],[6,7,8,9,10,11,12,13]]}"#).unwrap();
    assert_eq!(code(&electctl(&["verify", s(&file), s(&overlapping)])), 1);

    let wrong_shape = path(&dir, "shape.json");
    std::fs::write(&wrong_shape, r#"{"group_selection": ["g1"]}"#).unwrap();
    assert_eq!(code(&electctl(&["verify", s(&file), s(&wrong_shape)])), 3);
}

#[test]
fn csv_output_has_header_and_row() {
    let dir = TempDir::new().unwrap();
    let file = worked_example(&dir);
    let o = electctl(&["solve", s(&file), "--format", "csv"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("instance_digest,solver,answer"));
    assert!(lines[1].contains(",poly,yes,"));
}

#[test]
fn k_of_one_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(worked_example(&dir)).unwrap();
    let mut file: InstanceFile = parse_json(&text, "worked").unwrap();
    file.problem = "CCPkV".into();
    file.k = Some(1);
    let bad = path(&dir, "k1.json");
    std::fs::write(&bad, file.to_json()).unwrap();
    let o = electctl(&["solve", s(&bad), "--solver", "oracle"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least 2"));
}

#[test]
fn unsupported_poly_combination_lists_solvers() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "cond.json");
    let o = electctl(&["gen", "--rule", "condorcet", "--problem", "CCPV", "--out", s(&file)]);
    assert_eq!(code(&o), 0);
    let o = electctl(&["solve", s(&file)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("plurality-CCEPV-TE"));
    assert!(matches!(code(&electctl(&["solve", s(&file), "--solver", "oracle"])), 0 | 1));
}

#[test]
fn budget_exceeded_is_unknown() {
    let dir = TempDir::new().unwrap();
    let file = worked_example(&dir);
    let o = electctl(&["solve", s(&file), "--solver", "oracle", "--budget", "5"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("\"unknown\""));
}

#[test]
fn parse_error_exits_3() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "junk.json");
    std::fs::write(&file, "{ not json").unwrap();
    assert_eq!(code(&electctl(&["solve", s(&file)])), 3);
    assert_eq!(code(&electctl(&["solve", s(&path(&dir, "missing.json"))])), 3);
}

fn reduced(dir: &TempDir, kind: &str, source: &str) -> serde_json::Value {
    let src = path(dir, "source.json");
    std::fs::write(&src, source).unwrap();
    let o = electctl(&["reduce", kind, s(&src)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn reduce_cubic_vertex_cover_k4() {
    let dir = TempDir::new().unwrap();
    let v = reduced(
        &dir,
        "cvc",
        r#"{"format":"electctl-graph/1","vertices":4,"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]],"k":3}"#,
    );
    assert_eq!(v["candidates"].as_array().unwrap().len(), 18);
    assert_eq!(v["problem"], "CCREPC");
    assert_eq!(v["tie"], "TP");
    assert_eq!(v["provenance"]["generator"], "reduce cvc");
}

#[test]
fn reduce_x3c_has_n_plus_3_groups() {
    let dir = TempDir::new().unwrap();
    let v = reduced(&dir, "x3c", r#"{"format":"electctl-x3c/1","m":2,"sets":[[1,2,3],[4,5,6],[1,4,5],[2,3,6]]}"#);
    let groups: std::collections::BTreeSet<&str> =
        v["ballots"].as_array().unwrap().iter().map(|b| b["group"].as_str().unwrap()).collect();
    assert_eq!(groups.len(), 7);
    assert_eq!(v["problem"], "CCPVG");
}

#[test]
fn reduce_approval_to_system_e() {
    let dir = TempDir::new().unwrap();
    let src = path(&dir, "approval.json");
    let o = electctl(&["gen", "--rule", "approval", "--voters", "3", "--seed", "4", "--out", s(&src)]);
    assert_eq!(code(&o), 0);
    let o = electctl(&["reduce", "approval-e", s(&src)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rule"], "system-e");
    assert_eq!(v["ballots"].as_array().unwrap().len(), 4);
}

#[test]
fn malformed_graph_rejected() {
    let dir = TempDir::new().unwrap();
    let src = path(&dir, "graph.json");
    std::fs::write(&src, r#"{"format":"electctl-graph/1","vertices":4,"edges":[[0,1],[1,2],[2,3]],"k":2}"#).unwrap();
    assert_eq!(code(&electctl(&["reduce", "cvc", s(&src)])), 3);
}

#[test]
fn sweep_csv_is_reproducible() {
    let args = ["sweep", "--family", "rpc", "--candidates", "4", "--voters", "5", "--count", "500", "--seed", "7"];
    let a = electctl(&args);
    let b = electctl(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with(
        "instance_digest,problem,rule,tie,answer_poly,answer_oracle,agree,ms_poly,ms_oracle\n"
    ));
    assert_eq!(text.lines().count(), 501);
    let digests: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert!(digests.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn sweep_writes_report_directory() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "report");
    let o = electctl(&["sweep", "--family", "ccpkv", "--k", "3", "--voters", "5", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["instances"], 756);
    assert_eq!(summary["agreement_rate"], 1.0);
    assert!(out.join("report.csv").exists());
    assert_eq!(std::fs::read_dir(out.join("counterexamples")).unwrap().count(), 0);
}

#[test]
fn sweep_ccepv_exhaustive_agrees() {
    let o = electctl(&["sweep", "--family", "ccepv", "--voters", "6", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["instances"], 1386);
    assert_eq!(v["disagree"], 0);
}

#[test]
fn sweep_system_e_needs_count() {
    assert_eq!(code(&electctl(&["sweep", "--family", "system-e"])), 3);
    let o = electctl(&["sweep", "--family", "system-e", "--candidates", "2", "--voters", "4", "--count", "50", "--format", "json"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn instance_files_round_trip() {
    let mut n = 0;
    for rule in VotingRule::ALL {
        for problem in Problem::ALL {
            for seed in 0..3 {
                let cfg = GenConfig {
                    rule,
                    problem,
                    tie: if seed % 2 == 0 { TieRule::Eliminate } else { TieRule::Promote },
                    candidates: 3,
                    voters: 5,
                    k: 3,
                    limit: 2,
                    groups: 3,
                    pool: 4,
                    density: 0.5,
                    seed,
                };
                let inst = generate_instance(&cfg).unwrap();
                let text = InstanceFile::from_instance(&inst, None).to_json();
                let parsed: InstanceFile = parse_json(&text, "generated").unwrap();
                let back = parsed.to_instance().unwrap();
                assert_eq!(back, inst);
                assert_eq!(InstanceFile::from_instance(&back, None).to_json(), text);
                n += 1;
            }
        }
    }
    assert_eq!(n, 5 * 8 * 3);
}

#[test]
fn gen_is_seeded() {
    let a = electctl(&["gen", "--problem", "CCAVG", "--seed", "9"]);
    let b = electctl(&["gen", "--problem", "CCAVG", "--seed", "9"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, electctl(&["gen", "--problem", "CCAVG", "--seed", "10"]).stdout);
}
