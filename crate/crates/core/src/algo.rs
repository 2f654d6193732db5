//! Two-tree compatibility and the recursive supertree construction for tree
//! sets whose cleaned display graph has treewidth at most 2.
//!
//! Each recursion level cleans the display graph, splits it into components,
//! embeds every component, picks two minimally adjacent bounded faces and cuts
//! along the separator formed by the ends of their shared path. Three shapes
//! of that path occur (see [`CaseLabel`]); each yields strictly smaller
//! instances whose supertrees are glued back together. Every returned tree is
//! checked with [`PhyloTree::displays`] against the trees it must display.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::dgraph::{build_display, cleanup, components, CleanupEvent, DisplayGraph, VertexKind};
use crate::error::{internal, Error, Result};
use crate::exec::Exec;
use crate::graph::Graph;
use crate::phylo::{PhyloTree, Quartet, RawTree, Taxon};
use crate::planar::{embed, minimally_adjacent_faces, SharedBoundaryPath};
use crate::tw2::{is_tw_le_2, k4_witness, K4Witness};

/// Two quartets on the same four taxa that disagree, one from each tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuartetConflict {
    pub first: Quartet,
    pub second: Quartet,
}

/// The first conflicting quartet pair of two binary trees restricted to their
/// common taxa, or `None` when they are compatible.
pub fn two_tree_conflict(t1: &PhyloTree, t2: &PhyloTree) -> Result<Option<QuartetConflict>> {
    for (index, t) in [t1, t2].into_iter().enumerate() {
        if !t.is_binary() {
            return Err(Error::NotBinary { index });
        }
    }
    let common: BTreeSet<Taxon> = t1.taxon_set().intersection(&t2.taxon_set()).cloned().collect();
    if common.len() <= 3 {
        return Ok(None);
    }
    let q1 = t1.restrict(&common)?.quartets()?;
    let q2 = t2.restrict(&common)?.quartets()?;
    let Some(first) = q1.difference(&q2).next() else {
        return Ok(None);
    };
    let taxa = first.taxa();
    let second = q2
        .iter()
        .find(|q| q.taxa() == taxa)
        .ok_or_else(|| internal("restricted binary tree misses a quartet"))?;
    Ok(Some(QuartetConflict {
        first: first.clone(),
        second: second.clone(),
    }))
}

/// Whether two binary trees are compatible, by comparing the quartets of
/// their restrictions to the common taxa.
pub fn two_tree_compatible(t1: &PhyloTree, t2: &PhyloTree) -> Result<bool> {
    Ok(two_tree_conflict(t1, t2)?.is_none())
}

/// Treewidth test on the display graph of the two trees restricted to their
/// common taxa. Agrees with [`two_tree_compatible`].
pub fn theorem1_check(t1: &PhyloTree, t2: &PhyloTree) -> Result<bool> {
    let common: BTreeSet<Taxon> = t1.taxon_set().intersection(&t2.taxon_set()).cloned().collect();
    if common.is_empty() {
        return Ok(true);
    }
    let d = build_display(&[t1.restrict(&common)?, t2.restrict(&common)?])?;
    Ok(is_tw_le_2(&d.to_graph()).0)
}

/// Shape of the shared boundary path `u..v` of the chosen face pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseLabel {
    /// One end is a taxon, the other an inner vertex; the path is one edge.
    CaseIILeafInner,
    /// Both ends are inner vertices of different trees, with one taxon between.
    CaseIIITaxonOnPath,
    /// Both ends are inner vertices of one tree, joined by an edge.
    CaseIIIEdge,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 3] = [
        CaseLabel::CaseIILeafInner,
        CaseLabel::CaseIIITaxonOnPath,
        CaseLabel::CaseIIIEdge,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::CaseIILeafInner => "CaseII_leaf_inner",
            CaseLabel::CaseIIITaxonOnPath => "CaseIII_taxon_on_path",
            CaseLabel::CaseIIIEdge => "CaseIII_edge",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies a shared boundary path of a cleaned display graph.
pub fn classify_case(p: &SharedBoundaryPath, d: &DisplayGraph) -> Result<CaseLabel> {
    let (u_taxon, v_taxon) = (d.is_taxon(p.u), d.is_taxon(p.v));
    if p.interior.iter().any(|&x| !d.is_taxon(x)) {
        return Err(internal("inner tree vertex inside a shared boundary path"));
    }
    if p.interior.len() > 1 {
        return Err(internal("more than one taxon inside a shared boundary path"));
    }
    match (u_taxon, v_taxon, p.interior.len()) {
        (true, true, _) => Err(internal("shared boundary path joins two taxa")),
        (true, false, 0) | (false, true, 0) => Ok(CaseLabel::CaseIILeafInner),
        (true, false, _) | (false, true, _) => Err(internal("taxon-ended shared path is not a single edge")),
        (false, false, 1) => Ok(CaseLabel::CaseIIITaxonOnPath),
        (false, false, _) => Ok(CaseLabel::CaseIIIEdge),
    }
}

/// Separator of one recursion step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatorInfo {
    pub u: usize,
    pub v: usize,
    pub t: Option<usize>,
    pub x1: BTreeSet<Taxon>,
    pub x2: BTreeSet<Taxon>,
}

/// One recursion step as recorded in the case trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseStep {
    pub depth: usize,
    pub case: CaseLabel,
    /// Names of the separator vertices (see [`DisplayGraph::vertex_name`]).
    pub separator: Vec<String>,
    pub x1: usize,
    pub x2: usize,
    /// Dual-graph labels of the chosen faces.
    pub face_labels: (usize, usize),
    /// Position of the chosen pair among face-pair candidates.
    pub face_rank: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub case_counts: [usize; 3],
    pub components: usize,
    pub face_fallbacks: usize,
    pub reinserted: usize,
    pub max_depth: usize,
}

impl SolveStats {
    pub fn count(&self, case: CaseLabel) -> usize {
        self.case_counts[case as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Incompatibility {
    Quartets { trees: (usize, usize), conflict: QuartetConflict },
    /// No tree on the taxa displays every input.
    Exhaustive { taxa: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotApplicable {
    pub witness: K4Witness,
    /// Branch sets by display-graph vertex name.
    pub branch_names: [Vec<String>; 4],
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Supertree(PhyloTree),
    Incompatible(Incompatibility),
    NotApplicable(Box<NotApplicable>),
}

#[derive(Clone, Debug)]
pub struct SupertreeResult {
    pub outcome: Outcome,
    /// Whether the cleaned display graph has treewidth at most 2.
    pub tw2: bool,
    pub trace: Vec<CaseStep>,
    pub stats: SolveStats,
}

impl SupertreeResult {
    pub fn supertree(&self) -> Option<&PhyloTree> {
        match &self.outcome {
            Outcome::Supertree(s) => Some(s),
            _ => None,
        }
    }
}

/// Builds a supertree when the cleaned display graph of `trees` has treewidth
/// at most 2, and reports a K4 minor of the display graph otherwise.
pub fn supertree_tw2(trees: &[PhyloTree]) -> Result<SupertreeResult> {
    if trees.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(index) = trees.iter().position(|t| !t.is_binary()) {
        return Err(Error::NotBinary { index });
    }
    let d = build_display(trees)?;
    let (cleaned, _) = cleanup(&d);
    if !is_tw_le_2(&cleaned.to_graph()).0 {
        let witness = k4_witness(&d.to_graph())?;
        let branch_names = witness
            .branch_sets
            .clone()
            .map(|set| set.into_iter().map(|v| d.vertex_name(v)).collect());
        return Ok(SupertreeResult {
            outcome: Outcome::NotApplicable(Box::new(NotApplicable { witness, branch_names })),
            tw2: false,
            trace: Vec::new(),
            stats: SolveStats::default(),
        });
    }
    let taxa: BTreeSet<Taxon> = trees.iter().flat_map(|t| t.taxa().cloned()).collect();
    let mut solver = Solver::new(&taxa);
    let s = solver.solve(trees, &taxa, 0)?;
    gate(&s, trees, &taxa)?;
    Ok(SupertreeResult {
        outcome: Outcome::Supertree(s),
        tw2: true,
        trace: solver.trace,
        stats: solver.stats,
    })
}

/// [`supertree_tw2`] over many instances; results keep input order.
pub fn supertree_batch(instances: &[Vec<PhyloTree>], exec: Exec) -> Vec<Result<SupertreeResult>> {
    exec.map(instances, |trees| supertree_tw2(trees))
}

fn gate(s: &PhyloTree, trees: &[PhyloTree], taxa: &BTreeSet<Taxon>) -> Result<()> {
    if &s.taxon_set() != taxa {
        return Err(internal("supertree has the wrong taxon set"));
    }
    for (i, t) in trees.iter().enumerate() {
        if !s.displays(t)? {
            return Err(internal(format!("supertree {s} does not display input tree {i} ({t})")));
        }
    }
    Ok(())
}

/// Whether every tree restricted to `x1 ∪ x2` has an edge separating its `x1`
/// taxa from its `x2` taxa. Trees missing either side pass trivially.
pub fn split_respected(trees: &[PhyloTree], x1: &BTreeSet<Taxon>, x2: &BTreeSet<Taxon>) -> bool {
    trees.iter().all(|t| {
        let a: BTreeSet<Taxon> = t.taxa().filter(|x| x1.contains(*x)).cloned().collect();
        let b: BTreeSet<Taxon> = t.taxa().filter(|x| x2.contains(*x)).cloned().collect();
        if a.is_empty() || b.is_empty() {
            return true;
        }
        let Ok(r) = t.restrict(a.union(&b)) else {
            return false;
        };
        r.edges()
            .iter()
            .any(|&(p, q)| {
                let side = r.branch_taxa(p, q);
                side == a || side == b
            })
    })
}

/// Replaces the taxa of `t` lying in `side` by the single leaf `label`. The
/// replaced taxa must form one side of a split of `t`.
pub fn contract_metataxon(t: &PhyloTree, side: &BTreeSet<Taxon>, label: Taxon) -> Result<PhyloTree> {
    let inside: BTreeSet<Taxon> = t.taxa().filter(|x| side.contains(*x)).cloned().collect();
    let Some(rep) = inside.first().cloned() else {
        return Ok(t.clone());
    };
    if inside.len() == t.taxon_count() {
        return Ok(PhyloTree::leaf(label));
    }
    if t.contains(label.as_str()) {
        return Err(Error::DuplicateTaxon(label.to_string()));
    }
    let clade = t.edges().iter().any(|&(p, q)| {
        t.branch_taxa(p, q) == inside || t.branch_taxa(q, p) == inside
    });
    if !clade {
        return Err(Error::Contract(format!(
            "taxa to contract into `{label}` do not form one side of a split"
        )));
    }
    let keep: Vec<Taxon> = t
        .taxa()
        .filter(|x| !inside.contains(*x) || **x == rep)
        .cloned()
        .collect();
    t.restrict(&keep)?.relabel(rep.as_str(), label)
}

/// Subdivides the edge of `s` separating `x1` from `x2` and hangs `leaf` from
/// the new vertex.
pub fn attach_on_split_edge(
    s: &PhyloTree,
    leaf: Taxon,
    x1: &BTreeSet<Taxon>,
    x2: &BTreeSet<Taxon>,
) -> Result<PhyloTree> {
    if s.contains(leaf.as_str()) {
        return Err(Error::DuplicateTaxon(leaf.to_string()));
    }
    let taxa = s.taxon_set();
    if !x1.is_disjoint(x2) || x1.union(x2).cloned().collect::<BTreeSet<_>>() != taxa {
        return Err(Error::Contract("split sides must partition the tree's taxa".into()));
    }
    let edge = s
        .edges()
        .into_iter()
        .find(|&(p, q)| {
            let side = s.branch_taxa(p, q);
            &side == x1 || &side == x2
        })
        .ok_or_else(|| Error::Contract("no edge induces the requested split".into()))?;
    let mut raw = RawTree::from_tree(s);
    raw.subdivide_and_pend(edge.0, edge.1, leaf);
    raw.finish()
}

fn union_raw(s1: &PhyloTree, s2: &PhyloTree) -> (RawTree, usize) {
    let mut raw = RawTree::from_tree(s1);
    let offset = s1.vertex_count();
    for v in 0..s2.vertex_count() {
        raw.add_vertex(s2.label(v).cloned());
    }
    for (a, b) in s2.edges() {
        raw.add_edge(a + offset, b + offset);
    }
    (raw, offset)
}

fn port_vertex(s: &PhyloTree, port: &Taxon) -> Result<usize> {
    s.leaf_vertex(port.as_str())
        .ok_or_else(|| Error::UnknownTaxon(port.to_string()))
}

/// Joins two trees through their placeholder leaves: both ports are deleted
/// and their former neighbours are joined by an edge.
pub fn glue_at_edge_image(s1: &PhyloTree, s2: &PhyloTree, port1: &Taxon, port2: &Taxon) -> Result<PhyloTree> {
    let (p1, p2) = (port_vertex(s1, port1)?, port_vertex(s2, port2)?);
    if s1.degree(p1) != 1 || s2.degree(p2) != 1 {
        return Err(Error::Contract("a port must be a leaf of a tree with another taxon".into()));
    }
    let (n1, n2) = (s1.neighbors(p1)[0], s2.neighbors(p2)[0]);
    let (mut raw, offset) = union_raw(s1, s2);
    raw.remove_vertex(p1);
    raw.remove_vertex(p2 + offset);
    raw.add_edge(n1, n2 + offset);
    raw.finish()
}

/// Where a cut tree was severed, as seen from one side: `port` hangs at the
/// cut, `toward` lies in the branch that stays with the first cut end and
/// `away` in the branch that stays with the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutPort {
    pub port: Taxon,
    pub toward: Taxon,
    pub away: Taxon,
}

/// Glues two trees so that the images of a cut edge coincide: in each tree
/// the edge leaving the junction of port, `toward` and `away` in the direction
/// of `toward` is cut, and the two `toward` halves and two `away` halves are
/// each joined to one end of a new edge. Ports are deleted.
pub fn glue_cut_images(s1: &PhyloTree, s2: &PhyloTree, c1: &CutPort, c2: &CutPort) -> Result<PhyloTree> {
    let cut = |s: &PhyloTree, c: &CutPort| -> Result<(usize, usize, usize)> {
        let p = port_vertex(s, &c.port)?;
        let a = port_vertex(s, &c.toward)?;
        let b = port_vertex(s, &c.away)?;
        let to_a = s.path(p, a);
        let to_b = s.path(p, b);
        let common = to_a.iter().zip(&to_b).take_while(|(x, y)| x == y).count();
        if common == 0 || common >= to_a.len() {
            return Err(Error::Contract("port, toward and away taxa must be distinct".into()));
        }
        Ok((p, to_a[common - 1], to_a[common]))
    };
    let (p1, m1, x1) = cut(s1, c1)?;
    let (p2, m2, x2) = cut(s2, c2)?;
    let (mut raw, offset) = union_raw(s1, s2);
    let (p2, m2, x2) = (p2 + offset, m2 + offset, x2 + offset);
    raw.remove_edge(m1, x1);
    raw.remove_edge(m2, x2);
    let near = raw.add_vertex(None);
    let far = raw.add_vertex(None);
    raw.add_edge(near, x1);
    raw.add_edge(near, x2);
    raw.add_edge(far, m1);
    raw.add_edge(far, m2);
    raw.add_edge(near, far);
    raw.remove_vertex(p1);
    raw.remove_vertex(p2);
    raw.finish()
}

/// Adds `x` on the lowest edge of `s`, or builds the one- or two-taxon tree.
fn insert_anywhere(s: Option<PhyloTree>, x: Taxon) -> Result<PhyloTree> {
    let Some(s) = s else {
        return Ok(PhyloTree::leaf(x));
    };
    let mut raw = RawTree::from_tree(&s);
    match s.edges().first() {
        Some(&(a, b)) => {
            raw.subdivide_and_pend(a, b, x);
        }
        None => {
            let leaf = raw.add_vertex(Some(x));
            raw.add_edge(0, leaf);
        }
    }
    raw.finish()
}

/// Adds `x` to `s` so that `s` keeps displaying `t` restricted to the taxa it
/// shares with `s` plus `x`, given that it displays that restriction without `x`.
fn insert_respecting(s: Option<PhyloTree>, x: Taxon, t: &PhyloTree) -> Result<PhyloTree> {
    let Some(s) = s else {
        return Ok(PhyloTree::leaf(x));
    };
    let shared: BTreeSet<Taxon> = t
        .taxa()
        .filter(|y| s.contains(y.as_str()) || **y == x)
        .cloned()
        .collect();
    if shared.len() <= 3 {
        return insert_anywhere(Some(s), x);
    }
    let tp = t.restrict(&shared)?;
    let xv = tp.leaf_vertex(x.as_str()).expect("restricted to include x");
    let w = tp.neighbors(xv)[0];
    let y = *tp.neighbors(w).iter().find(|&&n| n != xv).expect("binary");
    let one = tp.branch_taxa(w, y);
    let rest: BTreeSet<Taxon> = shared.iter().filter(|z| **z != x && !one.contains(*z)).cloned().collect();
    let edge = s.edges().into_iter().find(|&(a, b)| {
        let side: BTreeSet<Taxon> = s.branch_taxa(a, b).intersection(&shared).cloned().collect();
        side == one || side == rest
    });
    let Some((a, b)) = edge else {
        return Err(internal(format!("no edge of {s} matches the attachment of `{x}` in {tp}")));
    };
    let mut raw = RawTree::from_tree(&s);
    raw.subdivide_and_pend(a, b, x);
    raw.finish()
}

struct Solver {
    reserved: BTreeSet<String>,
    counter: usize,
    depth_limit: usize,
    trace: Vec<CaseStep>,
    stats: SolveStats,
}

impl Solver {
    fn new(taxa: &BTreeSet<Taxon>) -> Self {
        Solver {
            reserved: taxa.iter().map(|t| t.to_string()).collect(),
            counter: 0,
            depth_limit: taxa.len() + 1,
            trace: Vec::new(),
            stats: SolveStats::default(),
        }
    }

    fn fresh(&mut self, prefix: &str) -> Taxon {
        loop {
            self.counter += 1;
            let name = format!("{prefix}{}", self.counter);
            if self.reserved.insert(name.clone()) {
                return Taxon::new(&name).expect("nonempty");
            }
        }
    }

    /// A supertree on exactly `taxa` displaying every tree in `trees`.
    fn solve(&mut self, trees: &[PhyloTree], taxa: &BTreeSet<Taxon>, depth: usize) -> Result<PhyloTree> {
        if depth > self.depth_limit {
            return Err(internal("recursion depth exceeded the taxon count"));
        }
        self.stats.max_depth = self.stats.max_depth.max(depth);
        if taxa.len() <= 3 {
            let s = PhyloTree::small(taxa)?;
            gate(&s, trees, taxa)?;
            return Ok(s);
        }
        let mut s: Option<PhyloTree> = None;
        let mut events = Vec::new();
        if !trees.is_empty() {
            let d = build_display(trees)?;
            let (cleaned, ctrace) = cleanup(&d);
            events = ctrace.events;
            for comp in components(&cleaned) {
                let comp_trees: Vec<PhyloTree> = comp
                    .tree_indices()
                    .into_iter()
                    .map(|i| trees[i].restrict(comp.tree_taxa(i)))
                    .collect::<Result<_>>()?;
                let sub = build_display(&comp_trees)?;
                let (again, trace) = cleanup(&sub);
                if !trace.events.is_empty() || again.vertex_count() != comp.vertex_count() {
                    return Err(internal("component of a cleaned display graph is not clean"));
                }
                let part = self.solve_component(&comp_trees, &sub, depth)?;
                s = Some(match s {
                    None => part,
                    Some(acc) => self.join(acc, part)?,
                });
            }
        }
        for ev in events.into_iter().rev() {
            if let CleanupEvent::RemovedTaxon { label, tree, .. } = ev {
                self.stats.reinserted += 1;
                s = Some(match tree {
                    Some(i) => insert_respecting(s, label, &trees[i])?,
                    None => insert_anywhere(s, label)?,
                });
            }
        }
        for x in taxa {
            if !s.as_ref().is_some_and(|t| t.contains(x.as_str())) {
                s = Some(insert_anywhere(s, x.clone())?);
            }
        }
        let s = s.ok_or(Error::EmptyTaxa)?;
        gate(&s, trees, taxa)?;
        Ok(s)
    }

    fn join(&mut self, a: PhyloTree, b: PhyloTree) -> Result<PhyloTree> {
        let pa = self.fresh("__join");
        let pb = self.fresh("__join");
        let a = insert_anywhere(Some(a), pa.clone())?;
        let b = insert_anywhere(Some(b), pb.clone())?;
        glue_at_edge_image(&a, &b, &pa, &pb)
    }

    /// `trees` are exactly the trees of the clean, connected display graph `d`.
    fn solve_component(&mut self, trees: &[PhyloTree], d: &DisplayGraph, depth: usize) -> Result<PhyloTree> {
        self.stats.components += 1;
        let taxa = d.taxa();
        let g = d.to_graph();
        let (ok, rtrace) = is_tw_le_2(&g);
        if !ok {
            return Err(internal("component lost treewidth 2 during recursion"));
        }
        let rot = embed(&g, &rtrace)?;
        let pair = minimally_adjacent_faces(&rot, &g)?;
        let case = classify_case(&pair.path, d)?;
        if pair.rank > 0 {
            self.stats.face_fallbacks += 1;
        }
        let path = &pair.path;
        let (t, s_vertex) = match case {
            CaseLabel::CaseIILeafInner => {
                let s = if d.is_taxon(path.u) { path.u } else { path.v };
                (None, Some(s))
            }
            CaseLabel::CaseIIITaxonOnPath => (Some(path.interior[0]), Some(path.interior[0])),
            CaseLabel::CaseIIIEdge => (None, None),
        };
        let mut sep = vec![path.u, path.v];
        sep.extend(t);
        let f1 = pair.faces[pair.f1].vertices();
        let f2 = pair.faces[pair.f2].vertices();
        let (x1, x2) = separate(d, &g, &sep, &f1, &f2, s_vertex)?;
        let info = SeparatorInfo {
            u: path.u,
            v: path.v,
            t,
            x1,
            x2,
        };
        self.stats.case_counts[case as usize] += 1;
        self.trace.push(CaseStep {
            depth,
            case,
            separator: sep.iter().map(|&v| d.vertex_name(v)).collect(),
            x1: info.x1.len(),
            x2: info.x2.len(),
            face_labels: (pair.labels[pair.f1], pair.labels[pair.f2]),
            face_rank: pair.rank,
        });
        let s = match (case, s_vertex) {
            (CaseLabel::CaseIIIEdge, _) => self.cut_edge(trees, d, &info, depth)?,
            (_, Some(sv)) => {
                let removed = d.taxon(sv).expect("taxon").clone();
                self.remove_and_split(trees, &removed, &info, depth)?
            }
            _ => unreachable!("every non-edge case removes a taxon"),
        };
        gate(&s, trees, &taxa)?;
        Ok(s)
    }

    /// Removes taxon `removed`, solves both meta-taxon contractions, joins them
    /// and puts `removed` back on the edge between the two sides. Each side sees
    /// the other side together with `removed` as one meta-taxon, so the
    /// position of `removed` relative to that side survives the contraction.
    fn remove_and_split(
        &mut self,
        trees: &[PhyloTree],
        removed: &Taxon,
        info: &SeparatorInfo,
        depth: usize,
    ) -> Result<PhyloTree> {
        if !split_respected(trees, &info.x1, &info.x2) {
            return Err(internal("input trees do not respect the separator split"));
        }
        let w1 = self.fresh("__meta");
        let w2 = self.fresh("__meta");
        let side = |keep: &BTreeSet<Taxon>, other: &BTreeSet<Taxon>, label: &Taxon| -> Result<Vec<PhyloTree>> {
            let mut contract = other.clone();
            contract.insert(removed.clone());
            let mut out = Vec::new();
            for t in trees {
                if t.taxa().any(|x| keep.contains(x)) {
                    out.push(contract_metataxon(t, &contract, label.clone())?);
                }
            }
            Ok(out)
        };
        let star = side(&info.x1, &info.x2, &w2)?;
        let star2 = side(&info.x2, &info.x1, &w1)?;
        let mut taxa1 = info.x1.clone();
        taxa1.insert(w2.clone());
        let mut taxa2 = info.x2.clone();
        taxa2.insert(w1.clone());
        let s1 = self.solve(&star, &taxa1, depth + 1)?;
        let s2 = self.solve(&star2, &taxa2, depth + 1)?;
        let joined = glue_at_edge_image(&s1, &s2, &w2, &w1)?;
        attach_on_split_edge(&joined, removed.clone(), &info.x1, &info.x2)
    }

    /// Cuts the tree owning edge `u-v` into an `x1` part and an `x2` part,
    /// solves both sides and glues them so the cut edge reappears.
    fn cut_edge(&mut self, trees: &[PhyloTree], d: &DisplayGraph, info: &SeparatorInfo, depth: usize) -> Result<PhyloTree> {
        if info.x1.len() < 2 || info.x2.len() < 2 {
            return Err(internal("cut-edge separator with a side of fewer than two taxa"));
        }
        let node = |v: usize| match d.vertex(v).kind {
            VertexKind::Internal { tree, node } => Ok((tree, node)),
            VertexKind::Taxon(_) => Err(internal("cut edge ends at a taxon")),
        };
        let (tu, nu) = node(info.u)?;
        let (tv, nv) = node(info.v)?;
        if tu != tv {
            return Err(internal("cut edge ends lie in different trees"));
        }
        let tree = &trees[tu];
        let sides = |a: usize, b: usize| -> Result<(BTreeSet<Taxon>, BTreeSet<Taxon>)> {
            let mut first = None;
            let mut second = None;
            for &w in tree.neighbors(a).iter().filter(|&&w| w != b) {
                let branch = tree.branch_taxa(a, w);
                if branch.is_subset(&info.x1) {
                    first = Some(branch);
                } else if branch.is_subset(&info.x2) {
                    second = Some(branch);
                }
            }
            match (first, second) {
                (Some(f), Some(s)) => Ok((f, s)),
                _ => Err(internal("cut edge end does not straddle the separator")),
            }
        };
        let (a1, a2) = sides(nu, nv)?;
        let (b1, b2) = sides(nv, nu)?;
        let p1 = self.fresh("__cut");
        let p2 = self.fresh("__cut");
        let half = |contract: &BTreeSet<Taxon>, keep: BTreeSet<Taxon>, port: &Taxon| -> Result<PhyloTree> {
            let c = contract_metataxon(tree, contract, port.clone())?;
            let mut keep = keep;
            keep.insert(port.clone());
            c.restrict(&keep)
        };
        let t1 = half(&a2, a1.union(&b1).cloned().collect(), &p1)?;
        let t2 = half(&a1, a2.union(&b2).cloned().collect(), &p2)?;
        let mut inst1 = vec![t1];
        let mut inst2 = vec![t2];
        for (i, t) in trees.iter().enumerate() {
            if i == tu {
                continue;
            }
            let ts = t.taxon_set();
            if ts.is_subset(&info.x1) {
                inst1.push(t.clone());
            } else if ts.is_subset(&info.x2) {
                inst2.push(t.clone());
            } else {
                return Err(internal("a tree other than the cut tree spans the separator"));
            }
        }
        let mut taxa1 = info.x1.clone();
        taxa1.insert(p1.clone());
        let mut taxa2 = info.x2.clone();
        taxa2.insert(p2.clone());
        let s1 = self.solve(&inst1, &taxa1, depth + 1)?;
        let s2 = self.solve(&inst2, &taxa2, depth + 1)?;
        let rep = |s: &BTreeSet<Taxon>| s.first().cloned().expect("nonempty branch");
        glue_cut_images(
            &s1,
            &s2,
            &CutPort {
                port: p1,
                toward: rep(&a1),
                away: rep(&b1),
            },
            &CutPort {
                port: p2,
                toward: rep(&a2),
                away: rep(&b2),
            },
        )
    }
}

/// Taxa reachable from the first face's boundary once the separator is gone,
/// and the remaining taxa other than the removed one.
fn separate(
    d: &DisplayGraph,
    g: &Graph,
    sep: &[usize],
    f1: &BTreeSet<usize>,
    f2: &BTreeSet<usize>,
    removed: Option<usize>,
) -> Result<(BTreeSet<Taxon>, BTreeSet<Taxon>)> {
    let mut seen = vec![false; g.vertex_count()];
    for &v in sep {
        seen[v] = true;
    }
    let mut queue: VecDeque<usize> = f1.iter().copied().filter(|&v| !seen[v]).collect();
    for &v in &queue {
        seen[v] = true;
    }
    let mut reached = BTreeSet::new();
    while let Some(v) = queue.pop_front() {
        reached.insert(v);
        for w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    if f2.iter().any(|v| !sep.contains(v) && reached.contains(v)) {
        return Err(internal("separator does not split the two faces"));
    }
    let x1: BTreeSet<Taxon> = reached.iter().filter_map(|&v| d.taxon(v).cloned()).collect();
    let x2: BTreeSet<Taxon> = (0..d.vertex_count())
        .filter(|&v| Some(v) != removed && !reached.contains(&v))
        .filter_map(|v| d.taxon(v).cloned())
        .collect();
    if x1.is_empty() || x2.is_empty() {
        return Err(internal("separator leaves a side without taxa"));
    }
    Ok((x1, x2))
}
