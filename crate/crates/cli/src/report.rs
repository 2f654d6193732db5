use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use supertree_tw::algo::{CaseStep, Incompatibility, Outcome, SupertreeResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Compatible,
    Incompatible,
    NotApplicable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Compatible => "compatible",
            Verdict::Incompatible => "incompatible",
            Verdict::NotApplicable => "not_applicable",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Compatible => 0,
            Verdict::Incompatible => 1,
            Verdict::NotApplicable => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceEntry {
    pub depth: usize,
    pub case: &'static str,
    pub separator: Vec<String>,
}

impl From<&CaseStep> for TraceEntry {
    fn from(s: &CaseStep) -> Self {
        TraceEntry {
            depth: s.depth,
            case: s.case.as_str(),
            separator: s.separator.clone(),
        }
    }
}

/// The machine interface of `check`. Keys are frozen.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub verdict: Verdict,
    pub supertree: Option<String>,
    pub tw2: bool,
    pub k4_witness: Option<Vec<Vec<String>>>,
    pub case_trace: Vec<TraceEntry>,
    pub timings: BTreeMap<String, f64>,
    #[serde(skip)]
    pub reason: Option<String>,
}

impl RunReport {
    pub fn from_result(r: &SupertreeResult) -> Self {
        let (verdict, supertree, k4_witness, reason) = match &r.outcome {
            Outcome::Supertree(s) => (Verdict::Compatible, Some(s.to_newick()), None, None),
            Outcome::NotApplicable(na) => (
                Verdict::NotApplicable,
                None,
                Some(na.branch_names.to_vec()),
                Some("display graph has a K4 minor".to_string()),
            ),
            Outcome::Incompatible(why) => (Verdict::Incompatible, None, None, Some(describe(why))),
        };
        RunReport {
            verdict,
            supertree,
            tw2: r.tw2,
            k4_witness,
            case_trace: r.trace.iter().map(TraceEntry::from).collect(),
            timings: BTreeMap::new(),
            reason,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "verdict: {}", self.verdict.as_str()).unwrap();
        if let Some(why) = &self.reason {
            writeln!(out, "reason: {why}").unwrap();
        }
        writeln!(out, "supertree: {}", self.supertree.as_deref().unwrap_or("none")).unwrap();
        writeln!(out, "tw<=2: {}", self.tw2).unwrap();
        writeln!(out, "k4_witness: {}", witness_text(self.k4_witness.as_deref())).unwrap();
        writeln!(out, "case_trace: {} steps", self.case_trace.len()).unwrap();
        for s in &self.case_trace {
            writeln!(out, "  depth {} {} [{}]", s.depth, s.case, s.separator.join(", ")).unwrap();
        }
        writeln!(out, "{}", timings_line(&self.timings)).unwrap();
        out
    }
}

pub fn describe(why: &Incompatibility) -> String {
    match why {
        Incompatibility::Quartets { trees, conflict } => format!(
            "trees {} and {} induce conflicting quartets {} and {}",
            trees.0, trees.1, conflict.first, conflict.second
        ),
        Incompatibility::Exhaustive { taxa } => format!("no binary tree on {taxa} taxa displays every input"),
    }
}

pub fn witness_text(w: Option<&[Vec<String>]>) -> String {
    match w {
        None => "none".to_string(),
        Some(sets) => sets
            .iter()
            .map(|s| format!("{{{}}}", s.join(", ")))
            .collect::<Vec<_>>()
            .join(" "),
    }
}

pub fn timings_line(t: &BTreeMap<String, f64>) -> String {
    let parts: Vec<String> = t.iter().map(|(k, v)| format!("{k}={v:.3}ms")).collect();
    format!("timings: {}", parts.join(" "))
}

/// Wall-clock phases in milliseconds.
#[derive(Clone, Default)]
pub struct Clock {
    pub phases: BTreeMap<String, f64>,
}

impl Clock {
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        *self.phases.entry(phase.to_string()).or_default() += ms;
        out
    }
}
