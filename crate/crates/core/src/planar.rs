//! Planar embeddings of treewidth-2 graphs, faces, and face-pair selection.
//!
//! The embedding is rebuilt from a successful [`ReductionTrace`] by undoing its
//! steps in reverse, so no general planarity test is needed.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{internal, Error, Result};
use crate::graph::{EdgeId, Graph};
use crate::tw2::{ReductionTrace, Step};

/// Cyclic order of incident edges around every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    rotation: Vec<Vec<EdgeId>>,
    edges: Vec<(usize, usize)>,
}

impl RotationSystem {
    pub fn rotation(&self, v: usize) -> &[EdgeId] {
        &self.rotation[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.rotation.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn endpoints(&self, e: EdgeId) -> (usize, usize) {
        self.edges[e]
    }

    fn components(&self) -> usize {
        Graph::from_edges(self.rotation.len(), &self.edges).components().len()
    }

    /// `V - E + F == 1 + C`, where edgeless components count as one face each.
    pub fn satisfies_euler(&self) -> bool {
        let isolated = (0..self.rotation.len()).filter(|&v| self.rotation[v].is_empty()).count();
        let f = faces(self).len() + isolated;
        let (v, e) = (self.rotation.len() as i64, self.edges.len() as i64);
        v - e + f as i64 == 1 + self.components() as i64
    }
}

/// Builds a rotation system of `g` by replaying `trace` backwards.
pub fn embed(g: &Graph, trace: &ReductionTrace) -> Result<RotationSystem> {
    if g.has_parallel_edges() {
        return Err(Error::Contract("embedding needs a simple graph".into()));
    }
    if trace.steps.len() != g.vertex_count() || trace.replay(g)? != 0 {
        return Err(Error::TraceMismatch("trace does not empty the graph".into()));
    }
    let mut rot: Vec<Vec<EdgeId>> = vec![Vec::new(); g.vertex_count()];
    let position = |list: &[EdgeId], e: EdgeId| -> Result<usize> {
        list.iter()
            .position(|&x| x == e)
            .ok_or_else(|| internal(format!("edge {e} missing from rotation during replay")))
    };
    for step in trace.steps.iter().rev() {
        match *step {
            Step::DropIsolated { .. } => {}
            Step::DropPendant { v, neighbor, edge } => {
                rot[v] = vec![edge];
                let r = &mut rot[neighbor];
                let at = r.len().min(1);
                r.insert(at, edge);
            }
            Step::BypassDegree2 {
                v,
                a,
                b,
                edge_a,
                edge_b,
                result_edge,
                merged,
            } => {
                let ia = position(&rot[a], result_edge)?;
                let ib = position(&rot[b], result_edge)?;
                if merged {
                    rot[a].insert(ia + 1, edge_a);
                    rot[b].insert(ib, edge_b);
                } else {
                    rot[a][ia] = edge_a;
                    rot[b][ib] = edge_b;
                }
                rot[v] = vec![edge_a, edge_b];
            }
        }
    }
    for (v, r) in rot.iter().enumerate() {
        let have: BTreeSet<EdgeId> = r.iter().copied().collect();
        let want: BTreeSet<EdgeId> = g.incident(v).iter().map(|&(_, e)| e).collect();
        if have != want || have.len() != r.len() {
            return Err(internal(format!("replayed rotation at vertex {v} does not match its edges")));
        }
    }
    let rs = RotationSystem {
        rotation: rot,
        edges: g.edges().to_vec(),
    };
    if !rs.satisfies_euler() {
        return Err(internal("replayed embedding violates Euler's formula"));
    }
    Ok(rs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    /// Closed walk as `(vertex, edge leaving it)` pairs.
    pub boundary: Vec<(usize, EdgeId)>,
    pub is_outer: bool,
}

impl Face {
    pub fn vertices(&self) -> BTreeSet<usize> {
        self.boundary.iter().map(|&(v, _)| v).collect()
    }

    pub fn edges(&self) -> BTreeSet<EdgeId> {
        self.boundary.iter().map(|&(_, e)| e).collect()
    }

    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }
}

/// Faces by dart traversal, numbered in discovery order (vertex id, then
/// rotation order). The longest face is outer; ties go to the face holding the
/// smallest vertex. Edgeless vertices form no face.
pub fn faces(r: &RotationSystem) -> Vec<Face> {
    let pos: Vec<HashMap<EdgeId, usize>> = r
        .rotation
        .iter()
        .map(|list| list.iter().enumerate().map(|(i, &e)| (e, i)).collect())
        .collect();
    let dart = |from: usize, e: EdgeId| 2 * e + usize::from(r.edges[e].0 != from);
    let mut used = vec![false; 2 * r.edges.len()];
    let mut out = Vec::new();
    for v in 0..r.rotation.len() {
        for &e in &r.rotation[v] {
            if used[dart(v, e)] {
                continue;
            }
            let mut boundary = Vec::new();
            let (mut x, mut edge) = (v, e);
            while !used[dart(x, edge)] {
                used[dart(x, edge)] = true;
                boundary.push((x, edge));
                let (a, b) = r.edges[edge];
                let y = if a == x { b } else { a };
                let list = &r.rotation[y];
                let next = list[(pos[y][&edge] + 1) % list.len()];
                (x, edge) = (y, next);
            }
            out.push(Face {
                boundary,
                is_outer: false,
            });
        }
    }
    let outer = (0..out.len()).min_by_key(|&i| {
        let f: &Face = &out[i];
        (std::cmp::Reverse(f.len()), f.boundary.iter().map(|&(v, _)| v).min())
    });
    if let Some(i) = outer {
        out[i].is_outer = true;
    }
    out
}

/// Faces sharing at least one edge.
pub fn dual_adjacency(faces: &[Face]) -> Vec<BTreeSet<usize>> {
    let mut sides: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
    for (i, f) in faces.iter().enumerate() {
        for e in f.edges() {
            sides.entry(e).or_default().push(i);
        }
    }
    let mut adj = vec![BTreeSet::new(); faces.len()];
    for fs in sides.values() {
        if let [x, y] = fs[..] {
            adj[x].insert(y);
            adj[y].insert(x);
        }
    }
    adj
}

/// Dual-graph distance of every face from the outer face. Faces the outer face
/// cannot reach get `usize::MAX`.
pub fn face_labels(faces: &[Face], adjacency: &[BTreeSet<usize>]) -> Vec<usize> {
    let mut label = vec![usize::MAX; faces.len()];
    let mut queue = VecDeque::new();
    if let Some(o) = faces.iter().position(|f| f.is_outer) {
        label[o] = 0;
        queue.push_back(o);
    }
    while let Some(f) = queue.pop_front() {
        for &g in &adjacency[f] {
            if label[g] == usize::MAX {
                label[g] = label[f] + 1;
                queue.push_back(g);
            }
        }
    }
    label
}

/// The common boundary of a minimally adjacent face pair, oriented from the
/// smaller endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharedBoundaryPath {
    pub u: usize,
    pub v: usize,
    pub interior: Vec<usize>,
    pub edges: Vec<EdgeId>,
}

impl SharedBoundaryPath {
    pub fn vertices(&self) -> Vec<usize> {
        let mut out = vec![self.u];
        out.extend(&self.interior);
        out.push(self.v);
        out
    }
}

/// Checks minimal adjacency of two faces: they share an edge, their common
/// boundary is a single path, its interior vertices have degree 2 and its
/// endpoints degree at least 3.
pub fn verify_minimal_pair(g: &Graph, f1: &Face, f2: &Face) -> Option<SharedBoundaryPath> {
    let shared_edges: BTreeSet<EdgeId> = f1.edges().intersection(&f2.edges()).copied().collect();
    if shared_edges.is_empty() {
        return None;
    }
    let shared_vertices: BTreeSet<usize> = f1.vertices().intersection(&f2.vertices()).copied().collect();
    let mut deg: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
    for &e in &shared_edges {
        let (a, b) = g.endpoints(e);
        deg.entry(a).or_default().push(e);
        deg.entry(b).or_default().push(e);
    }
    if deg.keys().copied().collect::<BTreeSet<_>>() != shared_vertices {
        return None;
    }
    if deg.len() != shared_edges.len() + 1 || deg.values().any(|es| es.len() > 2) {
        return None;
    }
    let ends: Vec<usize> = deg.iter().filter(|(_, es)| es.len() == 1).map(|(&v, _)| v).collect();
    let [u, v] = ends[..] else { return None };
    let mut interior = Vec::new();
    let mut edges = Vec::new();
    let (mut cur, mut via) = (u, deg[&u][0]);
    loop {
        edges.push(via);
        let (a, b) = g.endpoints(via);
        cur = if a == cur { b } else { a };
        if cur == v {
            break;
        }
        interior.push(cur);
        via = *deg[&cur].iter().find(|&&e| e != via)?;
    }
    if edges.len() != shared_edges.len() {
        return None;
    }
    if g.degree(u) < 3 || g.degree(v) < 3 || interior.iter().any(|&x| g.degree(x) != 2) {
        return None;
    }
    Some(SharedBoundaryPath { u, v, interior, edges })
}

#[derive(Clone, Debug)]
pub struct FacePair {
    pub faces: Vec<Face>,
    pub labels: Vec<usize>,
    pub f1: usize,
    pub f2: usize,
    pub path: SharedBoundaryPath,
    /// Position of the chosen pair among the candidates tried; 0 unless an
    /// earlier candidate failed verification.
    pub rank: usize,
}

/// Selects two minimally adjacent bounded faces. `F1` carries the largest
/// label `k`; `F2` is adjacent to it with the largest label found next to any
/// label-`k` face. Candidates go in lexicographic `(F1, F2)` order and the
/// first that passes [`verify_minimal_pair`] wins; if none does, all other
/// adjacent bounded pairs are tried in the same order.
pub fn minimally_adjacent_faces(r: &RotationSystem, g: &Graph) -> Result<FacePair> {
    if r.components() != 1 {
        return Err(Error::Contract("face pair selection needs a connected graph".into()));
    }
    let faces = faces(r);
    let adjacency = dual_adjacency(&faces);
    let labels = face_labels(&faces, &adjacency);
    let k = labels.iter().copied().max().unwrap_or(0);
    if k == 0 {
        return Err(Error::NoFacePair("the embedding has no bounded face".into()));
    }
    let top: Vec<usize> = (0..faces.len()).filter(|&f| labels[f] == k).collect();
    let m = top
        .iter()
        .flat_map(|&f| adjacency[f].iter().map(|&g| labels[g]))
        .max()
        .unwrap_or(0);
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    if m > 0 {
        for &f in &top {
            for &h in &adjacency[f] {
                if labels[h] == m {
                    candidates.push((f, h));
                }
            }
        }
    }
    let preferred = candidates.len();
    for f in 0..faces.len() {
        for &h in &adjacency[f] {
            if labels[f] > 0 && labels[h] > 0 && !candidates.contains(&(f, h)) {
                candidates.push((f, h));
            }
        }
    }
    for (rank, &(f1, f2)) in candidates.iter().enumerate() {
        if let Some(path) = verify_minimal_pair(g, &faces[f1], &faces[f2]) {
            if rank >= preferred {
                log::warn!("face pair selection fell back to a non-rule candidate ({f1}, {f2})");
            }
            return Ok(FacePair {
                faces,
                labels,
                f1,
                f2,
                path,
                rank,
            });
        }
    }
    Err(Error::NoFacePair(format!(
        "{} candidate pairs, none minimally adjacent",
        candidates.len()
    )))
}
