//! Helpers shared by the CLI test targets.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(sub)
}

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supertree-tw"))
        .args(args)
        .current_dir(dir("fixtures"))
        .env_remove("SUPERTREE_TW_LOG")
        .output()
        .expect("binary runs")
}

fn mask_json(v: &mut Value) {
    match v {
        Value::Object(map) => {
            if let Some(t) = map.get_mut("timings") {
                *t = Value::String("<masked>".into());
            }
            map.values_mut().for_each(mask_json);
        }
        Value::Array(items) => items.iter_mut().for_each(mask_json),
        _ => {}
    }
}

/// Replaces wall-clock numbers so reports compare byte for byte.
pub fn mask(stdout: &str) -> String {
    if let Ok(mut v) = serde_json::from_str::<Value>(stdout) {
        mask_json(&mut v);
        return serde_json::to_string_pretty(&v).unwrap() + "\n";
    }
    stdout
        .lines()
        .map(|l| if l.starts_with("timings:") { "timings: <masked>" } else { l })
        .map(|l| format!("{l}\n"))
        .collect()
}

pub fn render(out: &Output) -> String {
    format!(
        "exit: {}\n--- stdout\n{}--- stderr\n{}",
        out.status.code().unwrap_or(-1),
        mask(&String::from_utf8_lossy(&out.stdout)),
        String::from_utf8_lossy(&out.stderr)
    )
}

pub const CASES: &[(&str, &[&str], i32)] = &[
    ("check_single", &["check", "single.nwk"], 0),
    ("check_restrictions", &["check", "restrictions.nwk"], 0),
    ("check_conflict", &["check", "conflict.nwk"], 2),
    ("check_conflict_oracle", &["check", "--oracle", "conflict.nwk"], 1),
    ("check_conflict_oracle_json", &["check", "--json", "--oracle", "conflict.nwk"], 1),
    ("check_chain_cleans_to_tw2", &["check", "--oracle", "chain.nwk"], 0),
    ("check_inner_edge_json", &["check", "--json", "inner_edge.nwk"], 0),
    ("check_leaf_inner", &["check", "leaf_inner.nwk"], 0),
    ("check_two_files", &["check", "theta.nwk", "extra.nwk"], 0),
    ("check_per_file", &["check", "--per-file", "single.nwk", "conflict.nwk", "inner_edge.nwk"], 2),
    ("check_per_file_json", &["check", "--json", "--per-file", "single.nwk", "conflict.nwk"], 2),
    ("check_missing", &["check", "missing.nwk"], 66),
    ("check_broken", &["check", "broken.nwk"], 65),
    ("check_nonbinary", &["check", "nonbinary.nwk"], 65),
    ("check_no_args", &["check"], 64),
    ("unknown_command", &["frobnicate"], 64),
    ("supertree_theta", &["supertree", "theta.nwk"], 0),
    ("supertree_conflict", &["supertree", "conflict.nwk"], 2),
    ("tw_single", &["tw", "single.nwk"], 0),
    ("tw_conflict", &["tw", "conflict.nwk"], 0),
    ("tw_conflict_json", &["tw", "--json", "conflict.nwk"], 0),
    ("tw_chain_cleaned", &["tw", "--cleaned", "chain.nwk"], 0),
    ("faces_theta", &["faces", "theta.nwk"], 0),
    ("faces_inner_edge_cleaned", &["faces", "--cleaned", "inner_edge.nwk"], 0),
    ("faces_conflict", &["faces", "conflict.nwk"], 2),
    ("gen_compatible_5", &["gen", "compatible_tw3", "5"], 0),
    ("gen_incompatible_4", &["gen", "incompatible_tw3", "4", "--seed", "7"], 0),
    ("gen_conflicting", &["gen", "conflicting_quartets"], 0),
    ("gen_bad_kind", &["gen", "tw4", "3"], 64),
    ("gen_small_k", &["gen", "compatible_tw3", "2"], 64),
    ("oracle_conflict", &["oracle", "conflict.nwk"], 1),
    ("oracle_theta", &["oracle", "theta.nwk"], 0),
    ("oracle_too_many_taxa", &["oracle", "inner_edge.nwk"], 2),
    ("dot_theta", &["dot", "theta.nwk"], 0),
    ("dot_theta_faces", &["dot", "--faces", "theta.nwk"], 0),
    ("dot_conflict_faces", &["dot", "--faces", "conflict.nwk"], 65),
];

pub const KEYS: [&str; 6] = ["verdict", "supertree", "tw2", "k4_witness", "case_trace", "timings"];

/// Checks one report against the documented schema.
pub fn validate(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("report is not an object")?;
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort();
    let mut want = KEYS.to_vec();
    want.sort();
    if keys != want {
        return Err(format!("keys {keys:?}"));
    }
    let verdict = obj["verdict"].as_str().ok_or("verdict is not a string")?;
    if !["compatible", "incompatible", "not_applicable"].contains(&verdict) {
        return Err(format!("verdict `{verdict}`"));
    }
    if !obj["tw2"].is_boolean() {
        return Err("tw2 is not a boolean".into());
    }
    match (verdict, &obj["supertree"]) {
        ("compatible", Value::String(_)) => {}
        ("compatible", _) => return Err("compatible without supertree".into()),
        (_, Value::Null) => {}
        _ => return Err("supertree on a non-compatible verdict".into()),
    }
    match &obj["k4_witness"] {
        Value::Null if verdict == "not_applicable" => return Err("not_applicable without witness".into()),
        Value::Null => {}
        Value::Array(sets) if sets.len() == 4 && sets.iter().all(|s| s.as_array().is_some_and(|s| !s.is_empty())) => {}
        other => return Err(format!("k4_witness {other}")),
    }
    for step in obj["case_trace"].as_array().ok_or("case_trace is not an array")? {
        let s = step.as_object().ok_or("trace step is not an object")?;
        let case = s.get("case").and_then(Value::as_str).ok_or("step without case")?;
        if !["CaseII_leaf_inner", "CaseIII_taxon_on_path", "CaseIII_edge"].contains(&case) {
            return Err(format!("case `{case}`"));
        }
        if !s.get("depth").is_some_and(Value::is_u64) || !s.get("separator").is_some_and(Value::is_array) {
            return Err("malformed trace step".into());
        }
    }
    let timings = obj["timings"].as_object().ok_or("timings is not an object")?;
    if !timings.values().all(Value::is_number) {
        return Err("non-numeric timing".into());
    }
    Ok(())
}


/// Runs every golden case; returns one message per mismatch.
pub fn golden_failures(update: bool) -> Vec<String> {
    let mut failures = Vec::new();
    for &(name, args, code) in CASES {
        let out = run(args);
        let got = render(&out);
        let path = dir("golden").join(format!("{name}.txt"));
        if update {
            fs::write(&path, &got).unwrap();
        }
        let want = fs::read_to_string(&path).unwrap_or_default();
        if out.status.code() != Some(code) {
            failures.push(format!("{name}: exit {:?}, want {code}", out.status.code()));
        }
        if got != want {
            failures.push(format!("{name}: output differs from {}\n{got}", path.display()));
        }
    }
    failures
}
