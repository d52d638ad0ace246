//! Helpers shared by the integration test targets.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture(rel: &str) -> String {
    fixtures().join(rel).display().to_string()
}

/// Runs the command line in-process and returns its exit code.
pub fn run(args: &[&str]) -> i32 {
    acnli::cli::main_with_args(std::iter::once("acnli").chain(args.iter().copied()))
}

pub fn read(path: impl AsRef<Path>) -> String {
    fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

const TYPES: [&str; 5] = ["MainClaim", "SubClaim", "ArgumentClaim", "ArgumentSubClaim", "Evidence"];

/// Case document with `counts[t]` nodes of each type (MainClaim count is
/// ignored: always one root). SubClaims hang off the root, ArgumentClaims off
/// the first SubClaim, ArgumentSubClaims off the first ArgumentClaim and
/// Evidence off the deepest first node. Texts are unique per `tag`. An empty
/// `requirement` leaves the field out.
pub fn case_doc(requirement: &str, counts: [usize; 5], tag: &str) -> Value {
    let mut next = 0;
    let mut mk = |t: usize, k: usize| {
        next += 1;
        json!({"id": format!("n{}", next - 1), "type": TYPES[t], "text": format!("{} {k} of {tag}", TYPES[t]), "children": []})
    };
    let mut root = mk(0, 1);
    let mut levels: Vec<Vec<Value>> = (1..5).map(|t| (0..counts[t]).map(|k| mk(t, k + 1)).collect()).collect();
    // attach bottom-up: each level goes under the first node of the nearest
    // nonempty level above it
    for t in (0..4).rev() {
        let kids = std::mem::take(&mut levels[t]);
        if kids.is_empty() {
            continue;
        }
        match (0..t).rev().find(|&p| !levels[p].is_empty()) {
            Some(p) => levels[p][0]["children"].as_array_mut().unwrap().extend(kids),
            None => root["children"].as_array_mut().unwrap().extend(kids),
        }
    }
    if requirement.is_empty() {
        json!({"main_claim": root})
    } else {
        json!({"requirement_id": requirement, "main_claim": root})
    }
}

pub fn write_case(dir: &Path, model: &str, requirement: &str, run: u32, counts: [usize; 5]) -> PathBuf {
    let path = dir.join(format!("{model}__{requirement}__{run}.json"));
    let doc = case_doc(requirement, counts, &format!("{model}/{requirement}/{run}"));
    fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    path
}

/// A reply wrapped in a code fence with prose around it.
pub fn valid_reply(requirement: &str) -> String {
    let doc = case_doc(requirement, [1, 1, 1, 0, 2], requirement);
    format!("Here is the assurance case:\n```json\n{}\n```\nLet me know if you need changes.", doc)
}

/// Parses as JSON but has no Evidence node.
pub fn schema_invalid_reply(requirement: &str) -> String {
    case_doc(requirement, [1, 2, 0, 0, 0], requirement).to_string()
}

/// The template copied back without any JSON object.
pub fn prose_reply() -> String {
    "An assurance case in the Claim-Argument-Evidence format starts with a MainClaim, \
     followed by SubClaims, ArgumentClaims and Evidence."
        .to_string()
}

pub fn requirements_json(n: usize) -> String {
    let reqs: Vec<Value> = (1..=n)
        .map(|i| {
            json!({
                "id": format!("R{i}"),
                "name": format!("Requirement {i}"),
                "description": format!("The controller shall satisfy obligation {i}."),
                "rationale": format!("Obligation {i} follows from the data protection agreement."),
            })
        })
        .collect();
    serde_json::to_string_pretty(&reqs).unwrap()
}

/// Rows of a CSV body after the header, as string vectors.
pub fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}
