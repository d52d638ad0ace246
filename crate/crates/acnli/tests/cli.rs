mod common;

use std::collections::BTreeSet;
use std::fs;

use acnli::manifest::{sha256_file, RunManifest};
use acnli_core::harness::{GenerationOutcome, OutcomeStatus};
use acnli_core::pairgen::{Label, NliInstance};
use common::{fixture, read, run, write_case};
use serde_json::json;
use tempfile::tempdir;

#[test]
fn validate_all_valid_directory() {
    let out = tempdir().unwrap();
    let code = run(&["validate", &fixture("cases"), "--out", out.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let lines = read(out.path().join("validation.jsonl"));
    assert_eq!(lines.lines().count(), 8);
    assert!(lines.lines().all(|l| l.contains("\"status\":\"valid\"")));
    assert_eq!(
        read(out.path().join("error_summary.csv")),
        "Metric,Count\nNumber of error files,0\nTotal files,8\n"
    );
}

#[test]
fn validate_reports_each_bad_file() {
    let out = tempdir().unwrap();
    let pattern = format!("{}/*.json", fixture("invalid"));
    let code = run(&["validate", &fixture("cases"), &pattern, "--out", out.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    let report = read(out.path().join("validation.jsonl"));
    let status_of = |name: &str| {
        let line = report.lines().find(|l| l.contains(name)).expect("one line per file");
        serde_json::from_str::<serde_json::Value>(line).unwrap()["status"].as_str().unwrap().to_string()
    };
    assert_eq!(status_of("gpt4o__R7__0"), "malformed_json");
    assert_eq!(status_of("gpt4o__R7__1"), "schema_violation");
    assert_eq!(status_of("gpt4o__R7__2"), "invalid");
    assert_eq!(report.lines().count(), 11);
}

#[test]
fn validate_counts_errors_over_a_large_corpus() {
    let dir = tempdir().unwrap();
    let out = tempdir().unwrap();
    // 587 failures spread over the three failure kinds, 363 valid files
    for i in 0..950u32 {
        let model = format!("m{}", i % 13);
        let path = dir.path().join(format!("{model}__R{}__{i}.json", i % 20));
        let body = match i {
            0..=362 => common::case_doc(&format!("R{}", i % 20), [1, 1, 1, 0, 1], &i.to_string()).to_string(),
            363..=562 => "{\"main_claim\": ".to_string(),
            563..=762 => json!({"claims": []}).to_string(),
            _ => common::schema_invalid_reply(""),
        };
        fs::write(path, body).unwrap();
    }
    let code = run(&["validate", dir.path().to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(
        read(out.path().join("error_summary.csv")),
        "Metric,Count\nNumber of error files,587\nTotal files,950\n"
    );
}

#[test]
fn validate_writes_canonical_copies() {
    let out = tempdir().unwrap();
    let code = run(&["validate", &fixture("cases"), "--write-canonical", "--out", out.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let name = "phi-4__R3__1.json";
    let original: serde_json::Value = serde_json::from_str(&read(common::fixtures().join("cases").join(name))).unwrap();
    let canonical: serde_json::Value = serde_json::from_str(&read(out.path().join("canonical").join(name))).unwrap();
    assert_eq!(original, canonical);
}

#[test]
fn metrics_on_duplicated_file_are_zero() {
    let dir = tempdir().unwrap();
    let out = tempdir().unwrap();
    let a = write_case(dir.path(), "m", "R1", 0, [1, 2, 3, 1, 4]);
    fs::copy(&a, dir.path().join("m__R1__1.json")).unwrap();
    let code = run(&["metrics", dir.path().to_str().unwrap(), "--scope", "intra", "--out", out.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let rows = common::csv_rows(&read(out.path().join("agreement.csv")));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][..5], ["intra", "m", "m", "R1", "1"]);
    for cell in &rows[0][5..10] {
        assert_eq!(cell, "0.000000");
    }
    assert_eq!(rows[0][10], "0.000000");
    assert_eq!(rows[0][11], "true");
}

#[test]
fn metrics_inter_scope_fills_one_cell_pair() {
    let out = tempdir().unwrap();
    let code = run(&["metrics", &fixture("cases"), "--scope", "inter", "--out", out.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let matrix = read(out.path().join("ged_matrix.csv"));
    let rows = common::csv_rows(&matrix);
    assert_eq!(matrix.lines().next(), Some("model,gpt4o,phi-4"));
    assert_eq!(rows[0][0], "gpt4o");
    assert_eq!(rows[0][1], "");
    assert_eq!(rows[1][2], "");
    assert!(!rows[0][2].is_empty());
    assert_eq!(rows[0][2], rows[1][1]);
}

#[test]
fn metrics_flat_table_matches_golden() {
    let out = tempdir().unwrap();
    let code = run(&["metrics", &fixture("cases"), "--out", out.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(read(out.path().join("flat_table.csv")), read(fixture("golden/flat_table.csv")));
}

#[test]
fn metrics_small_group_is_an_error_unless_skipped() {
    let dir = tempdir().unwrap();
    let out = tempdir().unwrap();
    write_case(dir.path(), "m", "R1", 0, [1, 1, 1, 0, 1]);
    write_case(dir.path(), "m", "R1", 1, [1, 1, 1, 0, 2]);
    write_case(dir.path(), "m", "R2", 0, [1, 1, 1, 0, 1]);
    let d = dir.path().to_str().unwrap();
    let o = out.path().to_str().unwrap();
    assert_eq!(run(&["metrics", d, "--scope", "intra", "--out", o]), 2);
    assert_eq!(run(&["metrics", d, "--scope", "intra", "--skip-small-groups", "--out", o]), 0);
}

#[test]
fn metrics_rejects_invalid_inputs() {
    let out = tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    let bad = fixture("invalid/gpt4o__R7__0.json");
    assert_eq!(run(&["metrics", &fixture("cases"), &bad, "--out", o]), 1);
    assert_eq!(run(&["metrics", &fixture("cases"), &bad, "--skip-invalid", "--out", o]), 0);
}

#[test]
fn pairgen_path_fixture_matches_golden() {
    let out = tempdir().unwrap();
    let code = run(&["pairgen", &fixture("pairgen"), "--rate", "0", "--out", out.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(read(out.path().join("dataset.jsonl")), read(fixture("golden/path_dataset.jsonl")));
    assert_eq!(read(out.path().join("hop_counts.csv")), read(fixture("golden/path_hop_counts.csv")));
}

fn split_file(dir: &std::path::Path, train: &[&str], test: &[&str]) -> String {
    let p = dir.join("split.json");
    fs::write(&p, json!({"train": train, "test": test}).to_string()).unwrap();
    p.display().to_string()
}

#[test]
fn pairgen_split_has_no_leakage_and_reruns_identically() {
    let work = tempdir().unwrap();
    let split = split_file(work.path(), &["R18"], &["R3"]);
    let out = work.path().join("out");
    let args = [
        "pairgen",
        &fixture("cases"),
        "--split",
        &split,
        "--rate",
        "0.3",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(run(&args), 0);
    let names = ["train.jsonl", "test.jsonl", "hop_counts.csv", "manifest.json"];
    let first: Vec<Vec<u8>> = names.iter().map(|n| fs::read(out.join(n)).unwrap()).collect();

    let train: Vec<NliInstance> = acnli::jsonl::read(&out.join("train.jsonl")).unwrap();
    let test: Vec<NliInstance> = acnli::jsonl::read(&out.join("test.jsonl")).unwrap();
    assert!(train.iter().all(|i| i.requirement_id == "R18"));
    assert!(test.iter().all(|i| i.requirement_id == "R3"));
    let texts = |xs: &[NliInstance]| -> BTreeSet<String> {
        xs.iter()
            .flat_map(|i| [i.premise.clone(), i.hypothesis.clone()].into_iter().chain(i.intermediate_texts.clone()))
            .collect()
    };
    assert!(texts(&train).is_disjoint(&texts(&test)));

    assert_eq!(run(&args), 0);
    let second: Vec<Vec<u8>> = names.iter().map(|n| fs::read(out.join(n)).unwrap()).collect();
    assert_eq!(first, second);
}

#[test]
fn pairgen_unknown_requirement_is_reported() {
    let work = tempdir().unwrap();
    let split = split_file(work.path(), &["R18"], &["R99"]);
    let out = work.path().join("out");
    assert_eq!(run(&["pairgen", &fixture("cases"), "--split", &split, "--out", out.to_str().unwrap()]), 2);
}

#[test]
fn pairgen_gdpr_inputs() {
    let work = tempdir().unwrap();
    let reqs = work.path().join("reqs.jsonl");
    let dpa = work.path().join("dpa.jsonl");
    fs::write(
        &reqs,
        "{\"id\":\"R1\",\"text\":\"Processors act only on documented instructions.\"}\n{\"id\":\"R2\",\"text\":\"Personal data breaches are notified.\"}\n",
    )
    .unwrap();
    fs::write(
        &dpa,
        "{\"id\":\"s1\",\"text\":\"The processor follows written instructions.\",\"gold\":[\"R1\"]}\n{\"id\":\"s2\",\"text\":\"Breaches are reported within 48 hours.\",\"gold\":[\"R2\"]}\n",
    )
    .unwrap();
    let out = work.path().join("out");
    let code = run(&[
        "pairgen",
        "--gdpr-requirements",
        reqs.to_str().unwrap(),
        "--gdpr-dpa",
        dpa.to_str().unwrap(),
        "--rate",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let data: Vec<NliInstance> = acnli::jsonl::read(&out.join("dataset.jsonl")).unwrap();
    assert_eq!(data.iter().filter(|i| i.label == Label::Entailment).count(), 2);
    assert_eq!(data.iter().filter(|i| i.label == Label::NotEntailment).count(), 2);
}

fn dataset(dir: &std::path::Path) -> String {
    let out = dir.join("pairs");
    assert_eq!(run(&["pairgen", &fixture("cases"), "--rate", "0.05", "--out", out.to_str().unwrap()]), 0);
    out.join("dataset.jsonl").display().to_string()
}

#[test]
fn faithfulness_constant_scorer_is_all_zero() {
    let work = tempdir().unwrap();
    let data = dataset(work.path());
    let cfg = work.path().join("run.toml");
    fs::write(&cfg, "[faithfulness.scorer]\nkind = \"constant\"\nentailment = 0.7\n").unwrap();
    let out = work.path().join("out");
    let code = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "faithfulness",
        "--dataset",
        &data,
        "--n-perm",
        "200",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let records: Vec<serde_json::Value> = acnli::jsonl::read(&out.join("records.jsonl")).unwrap();
    assert!(!records.is_empty());
    for r in &records {
        assert_eq!(r["aopc_compr"].as_f64(), Some(0.0));
        assert_eq!(r["aopc_suff"].as_f64(), Some(0.0));
    }
    let table = read(out.join("faithfulness_table.csv"));
    assert!(table.starts_with(
        "Model,Explainer,Compr Overall,Compr Correct,Compr Incorrect,Suff Overall,Suff Correct,Suff Incorrect\n"
    ));
    assert!(table.contains("constant,occlusion,.000(.00)"));
}

#[test]
fn faithfulness_with_given_rankings() {
    let work = tempdir().unwrap();
    let data = dataset(work.path());
    let instances: Vec<NliInstance> = acnli::jsonl::read(std::path::Path::new(&data)).unwrap();
    let rankings: Vec<serde_json::Value> = instances
        .iter()
        .map(|i| {
            let tokens: Vec<&str> = i.hypothesis.split_whitespace().collect();
            let scores: Vec<f64> = (0..tokens.len()).map(|k| -(k as f64)).collect();
            json!({"instance_id": i.id, "method": "left_to_right", "tokens": tokens, "scores": scores})
        })
        .collect();
    let rpath = work.path().join("rankings.jsonl");
    acnli::jsonl::write(&rpath, &rankings).unwrap();
    let out = work.path().join("out");
    let o = out.to_str().unwrap();
    let args = ["faithfulness", "--dataset", &data, "--rankings", rpath.to_str().unwrap(), "--n-perm", "500", "--out", o];
    assert_eq!(run(&args), 0);
    let first = read(out.join("records.jsonl"));
    assert_eq!(first.lines().count(), instances.len());
    assert_eq!(run(&args), 0);
    assert_eq!(read(out.join("records.jsonl")), first);

    // a ranking set that misses one instance is rejected
    acnli::jsonl::write(&rpath, &rankings[1..]).unwrap();
    assert_eq!(run(&args), 2);
}

#[test]
fn faithfulness_offline_forbids_external_scorer() {
    let work = tempdir().unwrap();
    let data = dataset(work.path());
    let out = work.path().join("out");
    let code = run(&[
        "--offline",
        "faithfulness",
        "--dataset",
        &data,
        "--scorer-endpoint",
        "http://127.0.0.1:9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn faithfulness_unreachable_scorer_is_an_external_failure() {
    let work = tempdir().unwrap();
    let data = dataset(work.path());
    let out = work.path().join("out");
    let code = run(&["faithfulness", "--dataset", &data, "--scorer-endpoint", "http://127.0.0.1:9", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 3);
}

struct GenerateRun {
    _dir: tempfile::TempDir,
    out: std::path::PathBuf,
    code: i32,
}

fn generate_with(fixtures: serde_json::Value, n_reqs: usize, models: &[&str], extra: &[&str]) -> GenerateRun {
    let dir = tempdir().unwrap();
    let reqs = dir.path().join("reqs.json");
    fs::write(&reqs, common::requirements_json(n_reqs)).unwrap();
    let mock = dir.path().join("mock.json");
    fs::write(&mock, fixtures.to_string()).unwrap();
    let out = dir.path().join("out");
    let mut args = vec![
        "generate".to_string(),
        "--requirements".into(),
        reqs.display().to_string(),
        "--mock".into(),
        mock.display().to_string(),
        "--out".into(),
        out.display().to_string(),
    ];
    for m in models {
        args.push("--model".into());
        args.push(m.to_string());
    }
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let code = run(&refs);
    GenerateRun { _dir: dir, out, code }
}

#[test]
fn generate_three_of_five_valid() {
    let replies = json!({"replies": {"m": [
        common::valid_reply("R1"),
        common::prose_reply(),
        common::valid_reply("R1"),
        "{\"main_claim\": {",
        common::valid_reply("R1"),
    ]}});
    let g = generate_with(replies, 1, &["m"], &["--offline"]);
    assert_eq!(g.code, 0);
    assert_eq!(read(g.out.join("success_table.csv")), "Model,Err Cnt,Success %\nm,2,60%\n");
    let outcomes: Vec<GenerationOutcome> = acnli::jsonl::read(&g.out.join("outcomes.jsonl")).unwrap();
    let statuses: Vec<OutcomeStatus> = outcomes.iter().map(|o| o.status).collect();
    use OutcomeStatus::*;
    assert_eq!(statuses, [ValidJsonCase, MalformedJson, ValidJsonCase, MalformedJson, ValidJsonCase]);
    assert_eq!(fs::read_dir(g.out.join("raw")).unwrap().count(), 5);
    assert!(g.out.join("raw/m__R1__0.json").exists());
}

#[test]
fn generate_five_calls_over_twenty_requirements() {
    let replies = json!({"replies": {
        "a": [common::valid_reply("")],
        "b/R3": [common::schema_invalid_reply("R3")],
        "b": [common::valid_reply("")],
    }});
    let g = generate_with(replies.clone(), 20, &["a", "b"], &["--n-calls", "5", "--concurrency", "8"]);
    assert_eq!(g.code, 0);
    let outcomes: Vec<GenerationOutcome> = acnli::jsonl::read(&g.out.join("outcomes.jsonl")).unwrap();
    assert_eq!(outcomes.iter().filter(|o| o.model_name == "a").count(), 100);
    assert_eq!(outcomes.iter().filter(|o| o.model_name == "b").count(), 100);
    let table = read(g.out.join("success_table.csv"));
    assert_eq!(table, "Model,Err Cnt,Success %\na,0,100%\nb,5,95%\n");
    let again = generate_with(replies, 20, &["a", "b"], &["--n-calls", "5", "--concurrency", "1"]);
    assert_eq!(read(again.out.join("success_table.csv")), table);
    assert_eq!(read(again.out.join("outcomes.jsonl")), read(g.out.join("outcomes.jsonl")));
    assert_eq!(
        read(g.out.join("status_counts.csv")),
        "status,count\nvalid_json_case,195\nmalformed_json,0\nschema_invalid,5\ntransport_error,0\n"
    );
}

#[test]
fn generate_repair_round_fixes_failures() {
    let replies = json!({"replies": {
        "weak": [common::prose_reply()],
        "fixer": [common::valid_reply("")],
    }});
    let g = generate_with(replies, 2, &["weak"], &["--n-calls", "2", "--repair-model", "fixer"]);
    assert_eq!(g.code, 0);
    assert_eq!(read(g.out.join("success_table.csv")), "Model,Err Cnt,Success %\nweak,0,100%\n");
}

#[test]
fn generate_offline_forbids_network() {
    let dir = tempdir().unwrap();
    let reqs = dir.path().join("reqs.json");
    fs::write(&reqs, common::requirements_json(1)).unwrap();
    let out = dir.path().join("out");
    let code = run(&[
        "--offline",
        "generate",
        "--requirements",
        reqs.to_str().unwrap(),
        "--model",
        "m",
        "--endpoint",
        "http://127.0.0.1:9/chat",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn generate_unreachable_endpoint_records_transport_errors() {
    let dir = tempdir().unwrap();
    let reqs = dir.path().join("reqs.json");
    fs::write(&reqs, common::requirements_json(2)).unwrap();
    let out = dir.path().join("out");
    let code = run(&[
        "generate",
        "--requirements",
        reqs.to_str().unwrap(),
        "--model",
        "m",
        "--n-calls",
        "2",
        "--endpoint",
        "http://127.0.0.1:9/chat",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
    let outcomes: Vec<GenerationOutcome> = acnli::jsonl::read(&out.join("outcomes.jsonl")).unwrap();
    assert_eq!(outcomes.len(), 4);
    assert!(outcomes.iter().all(|o| o.status == OutcomeStatus::TransportError));
}

#[test]
fn manifest_records_seed_config_and_digests() {
    let out = tempdir().unwrap();
    assert_eq!(run(&["validate", &fixture("cases"), "--seed", "42", "--out", out.path().to_str().unwrap()]), 0);
    let m: RunManifest = serde_json::from_str(&read(out.path().join("manifest.json"))).unwrap();
    assert_eq!(m.command, "validate");
    assert_eq!(m.seed, 42);
    assert!(m.config.contains("seed = 42"));
    assert_eq!(m.inputs.len(), 8);
    for d in m.inputs.iter().chain(&m.outputs) {
        assert_eq!(d.sha256, sha256_file(std::path::Path::new(&d.path)).unwrap());
    }
    let outputs: BTreeSet<&str> = m.outputs.iter().map(|d| d.path.rsplit('/').next().unwrap()).collect();
    assert!(outputs.contains("validation.jsonl") && outputs.contains("error_summary.csv"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[]), 2);
    assert_eq!(run(&["frobnicate"]), 2);
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "sed = 1\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "validate", &fixture("cases")]), 2);
    assert_eq!(run(&["validate", "/definitely/not/here/*.json"]), 2);
    assert_eq!(run(&["--help"]), 0);
}

#[test]
fn binary_reports_exit_codes() {
    let out = tempdir().unwrap();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_acnli"))
        .args(["validate", &fixture("invalid"), "--out", out.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&status.stdout).contains("3 error files of 3 total"));
}
