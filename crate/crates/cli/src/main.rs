mod dot;
mod report;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use supertree_tw::algo::{supertree_tw2, two_tree_conflict, classify_case, Incompatibility, Outcome, SupertreeResult};
use supertree_tw::dgraph::{build_display, cleanup, DisplayGraph};
use supertree_tw::families::{generate, witness_supertree, FamilyKind, FamilySpec};
use supertree_tw::oracle::{brute_force_compatible, exact_treewidth, MAX_ENUM_TAXA, MAX_TW_VERTICES};
use supertree_tw::phylo::parse_newick_file;
use supertree_tw::planar::{dual_adjacency, embed, face_labels, faces, minimally_adjacent_faces};
use supertree_tw::tw2::{is_tw_le_2, k4_witness};
use supertree_tw::{Error, Exec, PhyloTree, Taxon};

use report::{timings_line, witness_text, Clock, RunReport, Verdict};

const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;
const EX_NOINPUT: u8 = 66;
const EX_SOFTWARE: u8 = 70;

/// Supertrees for unrooted binary trees with a treewidth-2 display graph.
#[derive(Parser)]
#[command(name = "supertree-tw", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide compatibility and print a report
    Check(CheckArgs),
    /// Print only the supertree
    Supertree(Inputs),
    /// Treewidth <= 2 test with a K4 witness on failure
    Tw(TwArgs),
    /// Face census, dual labels and the selected face pair
    Faces(GraphArgs),
    /// Write a generated instance family
    Gen(GenArgs),
    /// Brute-force compatibility and exact treewidth for small inputs
    Oracle(Inputs),
    /// Display graph in DOT
    Dot(DotArgs),
}

#[derive(Args)]
struct Inputs {
    /// Newick files, one tree per line; all files form one instance
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    #[arg(short = 'o', value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    json: bool,
    /// Settle inputs the construction does not cover with an exact test
    #[arg(long)]
    oracle: bool,
    /// Treat each file as its own instance
    #[arg(long)]
    per_file: bool,
}

#[derive(Args)]
struct TwArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    json: bool,
    /// Test the cleaned display graph
    #[arg(long)]
    cleaned: bool,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    cleaned: bool,
}

#[derive(Args)]
struct DotArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    cleaned: bool,
    /// Label edges with their faces and dual labels
    #[arg(long)]
    faces: bool,
}

#[derive(Args)]
struct GenArgs {
    /// compatible_tw3, incompatible_tw3 or conflicting_quartets
    kind: String,
    /// Number of trees
    #[arg(default_value_t = 3)]
    k: usize,
    #[arg(short = 'o', value_name = "PATH")]
    output: Option<PathBuf>,
    /// Reserved; the generators are deterministic
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Usage(String),
    NoInput(String),
    Data(String),
    Software(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EX_USAGE,
            Failure::NoInput(_) => EX_NOINPUT,
            Failure::Data(_) => EX_DATAERR,
            Failure::Software(_) => EX_SOFTWARE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::NoInput(m) | Failure::Data(m) | Failure::Software(m) => m,
        }
    }
}

fn lib_err(context: &str, e: Error) -> Failure {
    let msg = if context.is_empty() { e.to_string() } else { format!("{context}: {e}") };
    match e {
        Error::Internal(_) => Failure::Software(msg),
        _ => Failure::Data(msg),
    }
}

type Run = Result<u8, Failure>;

fn main() -> ExitCode {
    let env = env_logger::Env::new().filter_or("SUPERTREE_TW_LOG", "warn");
    env_logger::Builder::from_env(env).format_timestamp(None).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EX_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Check(a) => cmd_check(&a),
        Command::Supertree(a) => cmd_supertree(&a),
        Command::Tw(a) => cmd_tw(&a),
        Command::Faces(a) => cmd_faces(&a),
        Command::Gen(a) => cmd_gen(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Dot(a) => cmd_dot(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<PhyloTree>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::NoInput(format!("{}: {e}", path.display())))?;
    let trees = parse_newick_file(&text).map_err(|e| lib_err(&path.display().to_string(), e))?;
    if trees.is_empty() {
        return Err(Failure::Data(format!("{}: no trees", path.display())));
    }
    Ok(trees)
}

fn read_all(paths: &[PathBuf]) -> Result<Vec<PhyloTree>, Failure> {
    let mut out = Vec::new();
    for p in paths {
        out.extend(read_file(p)?);
    }
    Ok(out)
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::NoInput(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Software(format!("stdout: {e}"))),
    }
}

fn taxon_count(trees: &[PhyloTree]) -> usize {
    trees.iter().flat_map(|t| t.taxa()).collect::<BTreeSet<&Taxon>>().len()
}

/// Tries to settle a result the construction left open. Two trees are decided
/// by their quartets; small instances by exhaustive search.
fn settle(r: &mut SupertreeResult, trees: &[PhyloTree]) -> Result<(), Error> {
    if !matches!(r.outcome, Outcome::NotApplicable(_)) {
        return Ok(());
    }
    if let [t1, t2] = trees {
        if let Some(conflict) = two_tree_conflict(t1, t2)? {
            r.outcome = Outcome::Incompatible(Incompatibility::Quartets { trees: (0, 1), conflict });
            return Ok(());
        }
    }
    let n = taxon_count(trees);
    if n > MAX_ENUM_TAXA {
        log::info!("oracle skipped: {n} taxa exceed the ceiling of {MAX_ENUM_TAXA}");
        return Ok(());
    }
    r.outcome = match brute_force_compatible(trees)? {
        Some(s) => Outcome::Supertree(s),
        None => Outcome::Incompatible(Incompatibility::Exhaustive { taxa: n }),
    };
    Ok(())
}

fn run_instance(trees: &[PhyloTree], oracle: bool, mut clock: Clock) -> Result<RunReport, Error> {
    let mut r = clock.time("solve", || supertree_tw2(trees))?;
    if oracle {
        clock.time("oracle", || settle(&mut r, trees))?;
    }
    let mut report = RunReport::from_result(&r);
    if report.verdict == Verdict::Incompatible {
        // keep the minor that ruled out the construction
        let d = build_display(trees)?;
        if let Ok(w) = k4_witness(&d.to_graph()) {
            report.k4_witness = Some(
                w.branch_sets
                    .iter()
                    .map(|s| s.iter().map(|&v| d.vertex_name(v)).collect())
                    .collect(),
            );
        }
    }
    report.timings = clock.phases;
    Ok(report)
}

fn cmd_check(a: &CheckArgs) -> Run {
    let groups: Vec<(String, Result<Vec<PhyloTree>, Failure>, Clock)> = if a.per_file {
        a.inputs
            .paths
            .iter()
            .map(|p| {
                let mut clock = Clock::default();
                let trees = clock.time("parse", || read_file(p));
                (p.display().to_string(), trees, clock)
            })
            .collect()
    } else {
        let mut clock = Clock::default();
        let trees = clock.time("parse", || read_all(&a.inputs.paths));
        vec![(String::new(), trees, clock)]
    };
    let mut jobs = Vec::new();
    for (name, trees, clock) in groups {
        jobs.push((name, trees?, clock));
    }
    let reports = Exec::default().map(&jobs, |(name, trees, clock)| {
        run_instance(trees, a.oracle, clock.clone()).map_err(|e| lib_err(name, e))
    });
    let reports: Vec<RunReport> = reports.into_iter().collect::<Result<_, _>>()?;

    let text = if a.json {
        let value = if a.per_file {
            serde_json::to_string_pretty(&reports)
        } else {
            serde_json::to_string_pretty(&reports[0])
        };
        value.map_err(|e| Failure::Software(e.to_string()))? + "\n"
    } else if a.per_file {
        jobs.iter()
            .zip(&reports)
            .map(|((name, _, _), r)| format!("== {name} ==\n{}", r.to_text()))
            .collect()
    } else {
        reports[0].to_text()
    };
    emit(a.inputs.output.as_deref(), &text)?;
    Ok(reports.iter().map(|r| r.verdict.exit_code()).max().unwrap_or(0))
}

fn cmd_supertree(a: &Inputs) -> Run {
    let trees = read_all(&a.paths)?;
    let r = supertree_tw2(&trees).map_err(|e| lib_err("", e))?;
    let report = RunReport::from_result(&r);
    match &report.supertree {
        Some(s) => emit(a.output.as_deref(), &format!("{s}\n"))?,
        None => eprintln!(
            "no supertree: {}",
            report.reason.as_deref().unwrap_or(report.verdict.as_str())
        ),
    }
    Ok(report.verdict.exit_code())
}

fn display_graph(trees: &[PhyloTree], cleaned: bool) -> Result<DisplayGraph, Failure> {
    let d = build_display(trees).map_err(|e| lib_err("", e))?;
    Ok(if cleaned { cleanup(&d).0 } else { d })
}

fn cmd_tw(a: &TwArgs) -> Run {
    let trees = read_all(&a.inputs.paths)?;
    let d = display_graph(&trees, a.cleaned)?;
    let mut clock = Clock::default();
    let g = d.to_graph();
    let (ok, _) = clock.time("tw2", || is_tw_le_2(&g));
    let witness = if ok {
        None
    } else {
        let w = clock.time("witness", || k4_witness(&g)).map_err(|e| lib_err("", e))?;
        Some(
            w.branch_sets
                .iter()
                .map(|s| s.iter().map(|&v| d.vertex_name(v)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        )
    };
    let text = if a.json {
        let v = serde_json::json!({
            "tw2": ok,
            "k4_witness": witness,
            "timings": clock.phases,
        });
        serde_json::to_string_pretty(&v).map_err(|e| Failure::Software(e.to_string()))? + "\n"
    } else {
        format!(
            "vertices: {}\nedges: {}\ntw<=2: {ok}\nk4_witness: {}\n{}\n",
            d.vertex_count(),
            d.edge_count(),
            witness_text(witness.as_deref()),
            timings_line(&clock.phases)
        )
    };
    emit(a.inputs.output.as_deref(), &text)?;
    Ok(0)
}

fn cmd_faces(a: &GraphArgs) -> Run {
    let trees = read_all(&a.inputs.paths)?;
    let d = display_graph(&trees, a.cleaned)?;
    let g = d.to_graph();
    let (ok, trace) = is_tw_le_2(&g);
    if !ok {
        eprintln!("display graph has treewidth above 2; no planar embedding is built");
        return Ok(2);
    }
    let rot = embed(&g, &trace).map_err(|e| lib_err("", e))?;
    let fs = faces(&rot);
    let labels = face_labels(&fs, &dual_adjacency(&fs));
    let mut out = String::new();
    let label = |l: usize| if l == usize::MAX { "-".to_string() } else { l.to_string() };
    writeln!(out, "vertices: {}", g.vertex_count()).unwrap();
    writeln!(out, "edges: {}", g.edge_count()).unwrap();
    writeln!(out, "components: {}", g.components().len()).unwrap();
    writeln!(out, "faces: {}", fs.len()).unwrap();
    for (i, f) in fs.iter().enumerate() {
        let walk: Vec<String> = f.boundary.iter().map(|&(v, _)| d.vertex_name(v)).collect();
        let outer = if f.is_outer { " outer" } else { "" };
        writeln!(out, "  f{i}{outer} label={} len={}: {}", label(labels[i]), f.len(), walk.join(" ")).unwrap();
    }
    match minimally_adjacent_faces(&rot, &g) {
        Ok(pair) => {
            let path: Vec<String> = pair.path.vertices().into_iter().map(|v| d.vertex_name(v)).collect();
            writeln!(
                out,
                "pair: f{} f{} labels {} {} rank {}",
                pair.f1,
                pair.f2,
                label(pair.labels[pair.f1]),
                label(pair.labels[pair.f2]),
                pair.rank
            )
            .unwrap();
            writeln!(out, "shared path: {}", path.join(" - ")).unwrap();
            match classify_case(&pair.path, &d) {
                Ok(case) => writeln!(out, "case: {case}").unwrap(),
                Err(e) => writeln!(out, "case: none ({e})").unwrap(),
            }
        }
        Err(e) => writeln!(out, "pair: none ({e})").unwrap(),
    }
    emit(a.inputs.output.as_deref(), &out)?;
    Ok(0)
}

fn cmd_gen(a: &GenArgs) -> Run {
    let kind: FamilyKind = a.kind.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let spec = FamilySpec::new(kind, a.k).map_err(|e| Failure::Usage(e.to_string()))?;
    if a.seed.is_some() {
        log::info!("--seed has no effect: the generators are deterministic");
    }
    let trees = generate(&spec).map_err(|e| lib_err("", e))?;
    let mut out = String::new();
    writeln!(out, "# kind: {kind}").unwrap();
    writeln!(out, "# k: {}", trees.len()).unwrap();
    match kind {
        FamilyKind::CompatibleTw3 => {
            let w = witness_supertree(&spec).map_err(|e| lib_err("", e))?;
            writeln!(out, "# expected: treewidth 3, compatible").unwrap();
            writeln!(out, "# witness: {w}").unwrap();
        }
        FamilyKind::IncompatibleTw3 => {
            writeln!(out, "# expected: treewidth 3, incompatible (trees 1-3 admit no supertree)").unwrap();
        }
        FamilyKind::ConflictingQuartets => {
            writeln!(out, "# expected: treewidth 3, incompatible (conflicting quartets)").unwrap();
        }
    }
    for t in &trees {
        writeln!(out, "{t}").unwrap();
    }
    emit(a.output.as_deref(), &out)?;
    Ok(0)
}

fn cmd_oracle(a: &Inputs) -> Run {
    let trees = read_all(&a.paths)?;
    let n = taxon_count(&trees);
    let mut out = String::new();
    let mut clock = Clock::default();
    writeln!(out, "taxa: {n}").unwrap();
    let code = if n > MAX_ENUM_TAXA {
        writeln!(out, "brute_force: skipped ({n} taxa > {MAX_ENUM_TAXA})").unwrap();
        2
    } else {
        match clock.time("brute_force", || brute_force_compatible(&trees)).map_err(|e| lib_err("", e))? {
            Some(s) => {
                writeln!(out, "brute_force: compatible {s}").unwrap();
                0
            }
            None => {
                writeln!(out, "brute_force: incompatible").unwrap();
                1
            }
        }
    };
    let g = build_display(&trees).map_err(|e| lib_err("", e))?.to_graph();
    if g.vertex_count() > MAX_TW_VERTICES {
        writeln!(out, "treewidth: skipped ({} vertices > {MAX_TW_VERTICES})", g.vertex_count()).unwrap();
    } else {
        let tw = clock.time("treewidth", || exact_treewidth(&g)).map_err(|e| lib_err("", e))?;
        writeln!(out, "treewidth: {tw}").unwrap();
    }
    writeln!(out, "{}", timings_line(&clock.phases)).unwrap();
    emit(a.output.as_deref(), &out)?;
    Ok(code)
}

fn cmd_dot(a: &DotArgs) -> Run {
    let trees = read_all(&a.inputs.paths)?;
    let d = display_graph(&trees, a.cleaned)?;
    let text = if a.faces {
        let g = d.to_graph();
        let (ok, trace) = is_tw_le_2(&g);
        if !ok {
            return Err(Failure::Data("--faces needs a display graph of treewidth at most 2".into()));
        }
        let rot = embed(&g, &trace).map_err(|e| lib_err("", e))?;
        let fs = faces(&rot);
        let labels = face_labels(&fs, &dual_adjacency(&fs));
        dot::render(&d, Some(dot::FaceAnnotation { faces: &fs, labels: &labels }))
    } else {
        dot::render(&d, None)
    };
    emit(a.inputs.output.as_deref(), &text)?;
    Ok(0)
}
