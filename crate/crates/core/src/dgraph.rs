//! Display graphs: the union of a tree set with equal taxa identified.
//!
//! Vertex ids are dense. Taxa come first, in label order, followed by the
//! internal vertices of tree 0, tree 1, and so on. Tree indices always refer to
//! positions in the original input list, also after cleanup and component
//! extraction, so callers can map vertices back to their trees.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::phylo::{PhyloTree, Taxon};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VertexKind {
    Taxon(Taxon),
    /// `node` is the vertex id inside the tree it came from.
    Internal { tree: usize, node: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub kind: VertexKind,
    /// Trees the vertex belongs to.
    pub trees: BTreeSet<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub tree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisplayGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl DisplayGraph {
    fn from_parts(vertices: Vec<Vertex>, mut edges: Vec<Edge>) -> Self {
        edges.sort_by_key(|e| (e.tree, e.a, e.b));
        let mut adj = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            adj[e.a].push((e.b, i));
            adj[e.b].push((e.a, i));
        }
        DisplayGraph { vertices, edges, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// `(neighbor, edge index)` pairs.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn taxon(&self, v: usize) -> Option<&Taxon> {
        match &self.vertices[v].kind {
            VertexKind::Taxon(t) => Some(t),
            VertexKind::Internal { .. } => None,
        }
    }

    pub fn is_taxon(&self, v: usize) -> bool {
        self.taxon(v).is_some()
    }

    pub fn taxon_vertex(&self, label: &str) -> Option<usize> {
        (0..self.vertices.len()).find(|&v| self.taxon(v).is_some_and(|t| t.as_str() == label))
    }

    pub fn taxa(&self) -> BTreeSet<Taxon> {
        (0..self.vertices.len()).filter_map(|v| self.taxon(v).cloned()).collect()
    }

    /// Tree indices that still own at least one vertex.
    pub fn tree_indices(&self) -> BTreeSet<usize> {
        self.vertices.iter().flat_map(|v| v.trees.iter().copied()).collect()
    }

    /// Taxa of tree `i` present in this graph.
    pub fn tree_taxa(&self, i: usize) -> BTreeSet<Taxon> {
        (0..self.vertices.len())
            .filter(|&v| self.vertices[v].trees.contains(&i))
            .filter_map(|v| self.taxon(v).cloned())
            .collect()
    }

    /// Tree that owns the edge between `a` and `b`, if any.
    pub fn edge_tree(&self, a: usize, b: usize) -> Option<usize> {
        self.adj[a]
            .iter()
            .find(|&&(w, _)| w == b)
            .map(|&(_, e)| self.edges[e].tree)
    }

    /// Human-readable vertex name: the label for taxa, `T<tree>#<id>` otherwise.
    pub fn vertex_name(&self, v: usize) -> String {
        match &self.vertices[v].kind {
            VertexKind::Taxon(t) => t.to_string(),
            VertexKind::Internal { tree, .. } => format!("T{tree}#{v}"),
        }
    }

    /// The underlying graph with identical vertex and edge ids.
    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(
            self.vertices.len(),
            &self.edges.iter().map(|e| (e.a, e.b)).collect::<Vec<_>>(),
        )
    }
}

/// Display graph of `trees`.
pub fn build_display(trees: &[PhyloTree]) -> Result<DisplayGraph> {
    if trees.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut taxon_trees: BTreeMap<Taxon, BTreeSet<usize>> = BTreeMap::new();
    for (i, t) in trees.iter().enumerate() {
        for x in t.taxa() {
            taxon_trees.entry(x.clone()).or_default().insert(i);
        }
    }
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut taxon_id: BTreeMap<Taxon, usize> = BTreeMap::new();
    for (x, owners) in taxon_trees {
        taxon_id.insert(x.clone(), vertices.len());
        vertices.push(Vertex {
            kind: VertexKind::Taxon(x),
            trees: owners,
        });
    }
    let mut edges = Vec::new();
    for (i, t) in trees.iter().enumerate() {
        let mut local = vec![usize::MAX; t.vertex_count()];
        for (v, slot) in local.iter_mut().enumerate() {
            *slot = match t.label(v) {
                Some(x) => taxon_id[x],
                None => {
                    vertices.push(Vertex {
                        kind: VertexKind::Internal { tree: i, node: v },
                        trees: BTreeSet::from([i]),
                    });
                    vertices.len() - 1
                }
            };
        }
        for (a, b) in t.edges() {
            let (a, b) = (local[a], local[b]);
            edges.push(Edge {
                a: a.min(b),
                b: a.max(b),
                tree: i,
            });
        }
    }
    Ok(DisplayGraph::from_parts(vertices, edges))
}

/// One cleanup step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CleanupEvent {
    /// A taxon of degree 1 (owned by `tree`) or degree 0 (`tree == None`) was deleted.
    RemovedTaxon {
        vertex: usize,
        label: Taxon,
        tree: Option<usize>,
    },
    /// An internal vertex of degree 2 was replaced by an edge between its neighbours.
    SuppressedInternal {
        vertex: usize,
        tree: usize,
        joined: (usize, usize),
    },
    /// An internal vertex lost all but at most one neighbour (both taxa of a
    /// cherry were removed) and was deleted.
    PrunedInternal { vertex: usize, tree: usize },
    /// A tree fell below four taxa and was deleted with its internal vertices.
    RemovedSmallTree { tree: usize },
}

/// Ordered cleanup events; vertex ids refer to the graph cleanup was run on.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CleanupTrace {
    pub events: Vec<CleanupEvent>,
}

impl CleanupTrace {
    /// Applies the events to `original` and returns the resulting graph.
    pub fn replay(&self, original: &DisplayGraph) -> Result<DisplayGraph> {
        let mut w = Work::new(original);
        for ev in &self.events {
            match *ev {
                CleanupEvent::RemovedTaxon { vertex, tree, .. } => {
                    let expected = usize::from(tree.is_some());
                    if !w.alive[vertex] || w.adj[vertex].len() != expected {
                        return Err(Error::Contract(format!("cannot remove taxon vertex {vertex}")));
                    }
                    w.remove_taxon(vertex);
                }
                CleanupEvent::PrunedInternal { vertex, .. } => {
                    if !w.alive[vertex] || w.adj[vertex].len() > 1 {
                        return Err(Error::Contract(format!("cannot prune vertex {vertex}")));
                    }
                    w.prune(vertex);
                }
                CleanupEvent::SuppressedInternal { vertex, .. } => {
                    if !w.alive[vertex] || w.adj[vertex].len() != 2 {
                        return Err(Error::Contract(format!("cannot suppress vertex {vertex}")));
                    }
                    w.suppress(vertex);
                }
                CleanupEvent::RemovedSmallTree { tree } => {
                    w.remove_tree(tree);
                }
            }
        }
        Ok(w.compact())
    }
}

/// Worklist discipline for [`cleanup_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CleanupOrder {
    #[default]
    LowestId,
    Fifo,
    Lifo,
}

/// Mutable working copy shared by cleanup and trace replay.
struct Work<'a> {
    src: &'a DisplayGraph,
    adj: Vec<BTreeMap<usize, usize>>,
    alive: Vec<bool>,
    tree_alive: Vec<bool>,
    tree_taxa: Vec<usize>,
    events: Vec<CleanupEvent>,
    touched: Vec<usize>,
}

impl<'a> Work<'a> {
    fn new(src: &'a DisplayGraph) -> Self {
        let tree_count = src.tree_indices().last().map_or(0, |&t| t + 1);
        let mut adj = vec![BTreeMap::new(); src.vertex_count()];
        for e in &src.edges {
            adj[e.a].insert(e.b, e.tree);
            adj[e.b].insert(e.a, e.tree);
        }
        let mut tree_taxa = vec![0; tree_count];
        for v in 0..src.vertex_count() {
            if src.is_taxon(v) {
                for &t in &src.vertices[v].trees {
                    tree_taxa[t] += 1;
                }
            }
        }
        let tree_alive = (0..tree_count)
            .map(|t| src.vertices.iter().any(|v| v.trees.contains(&t)))
            .collect();
        Work {
            src,
            adj,
            alive: vec![true; src.vertex_count()],
            tree_alive,
            tree_taxa,
            events: Vec::new(),
            touched: Vec::new(),
        }
    }

    fn detach(&mut self, a: usize, b: usize) {
        self.adj[a].remove(&b);
        self.adj[b].remove(&a);
    }

    fn remove_taxon(&mut self, v: usize) {
        let label = self.src.taxon(v).expect("taxon vertex").clone();
        let edge = self.adj[v].iter().next().map(|(&n, &t)| (n, t));
        let tree = edge.map(|(_, t)| t);
        if let Some((n, t)) = edge {
            self.detach(v, n);
            self.touched.push(n);
            self.tree_taxa[t] -= 1;
        }
        self.alive[v] = false;
        self.events.push(CleanupEvent::RemovedTaxon { vertex: v, label, tree });
        if let Some(t) = tree {
            if self.tree_alive[t] && self.tree_taxa[t] < 4 {
                self.remove_tree(t);
            }
        }
    }

    fn suppress(&mut self, v: usize) {
        let mut it = self.adj[v].iter();
        let (&a, &tree) = it.next().expect("degree 2");
        let (&b, _) = it.next().expect("degree 2");
        self.detach(v, a);
        self.detach(v, b);
        self.alive[v] = false;
        self.events.push(CleanupEvent::SuppressedInternal {
            vertex: v,
            tree,
            joined: (a, b),
        });
        // A parallel edge here would be a 2-taxon remnant, already deleted by the
        // small-tree rule; keep the existing edge if it ever happens.
        self.adj[a].entry(b).or_insert(tree);
        self.adj[b].entry(a).or_insert(tree);
        self.touched.extend([a, b]);
    }

    fn prune(&mut self, v: usize) {
        let tree = match self.src.vertices[v].kind {
            VertexKind::Internal { tree, .. } => tree,
            VertexKind::Taxon(_) => unreachable!("only internal vertices are pruned"),
        };
        if let Some((&n, _)) = self.adj[v].iter().next() {
            self.detach(v, n);
            self.touched.push(n);
        }
        self.alive[v] = false;
        self.events.push(CleanupEvent::PrunedInternal { vertex: v, tree });
    }

    fn remove_tree(&mut self, t: usize) {
        self.tree_alive[t] = false;
        self.tree_taxa[t] = 0;
        self.events.push(CleanupEvent::RemovedSmallTree { tree: t });
        for v in 0..self.adj.len() {
            if !self.alive[v] {
                continue;
            }
            let owned: Vec<usize> = self.adj[v]
                .iter()
                .filter(|&(_, &tt)| tt == t)
                .map(|(&n, _)| n)
                .collect();
            for n in owned {
                self.detach(v, n);
                self.touched.extend([v, n]);
            }
            if matches!(self.src.vertices[v].kind, VertexKind::Internal { tree, .. } if tree == t) {
                self.alive[v] = false;
            }
        }
    }

    fn wants_work(&self, v: usize) -> bool {
        self.alive[v]
            && match self.src.vertices[v].kind {
                VertexKind::Taxon(_) => self.adj[v].len() <= 1,
                VertexKind::Internal { .. } => self.adj[v].len() <= 2,
            }
    }

    fn compact(&self) -> DisplayGraph {
        let mut index = vec![usize::MAX; self.alive.len()];
        let mut vertices = Vec::new();
        for v in 0..self.alive.len() {
            if !self.alive[v] {
                continue;
            }
            index[v] = vertices.len();
            let src = &self.src.vertices[v];
            let trees = match src.kind {
                VertexKind::Taxon(_) => self.adj[v].values().copied().collect(),
                VertexKind::Internal { .. } => src.trees.clone(),
            };
            vertices.push(Vertex {
                kind: src.kind.clone(),
                trees,
            });
        }
        let mut edges = Vec::new();
        for a in 0..self.alive.len() {
            if !self.alive[a] {
                continue;
            }
            for (&b, &tree) in &self.adj[a] {
                if a < b {
                    edges.push(Edge {
                        a: index[a],
                        b: index[b],
                        tree,
                    });
                }
            }
        }
        DisplayGraph::from_parts(vertices, edges)
    }
}

/// Removes degree-1 taxa, suppresses degree-2 internal vertices, prunes
/// internal vertices left with at most one neighbour and deletes trees with
/// fewer than four taxa until none applies, lowest vertex id first.
pub fn cleanup(d: &DisplayGraph) -> (DisplayGraph, CleanupTrace) {
    cleanup_with(d, CleanupOrder::LowestId)
}

/// [`cleanup`] with an explicit worklist discipline. The fixed point does not
/// depend on the order; the trace does.
pub fn cleanup_with(d: &DisplayGraph, order: CleanupOrder) -> (DisplayGraph, CleanupTrace) {
    let mut w = Work::new(d);
    for t in 0..w.tree_alive.len() {
        if w.tree_alive[t] && w.tree_taxa[t] < 4 {
            w.remove_tree(t);
        }
    }
    w.touched.clear();

    let mut lowest: BTreeSet<usize> = BTreeSet::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let push = |v: usize, lowest: &mut BTreeSet<usize>, queue: &mut VecDeque<usize>| match order {
        CleanupOrder::LowestId => {
            lowest.insert(v);
        }
        CleanupOrder::Fifo | CleanupOrder::Lifo => queue.push_back(v),
    };
    for v in 0..d.vertex_count() {
        push(v, &mut lowest, &mut queue);
    }
    loop {
        let next = match order {
            CleanupOrder::LowestId => lowest.pop_first(),
            CleanupOrder::Fifo => queue.pop_front(),
            CleanupOrder::Lifo => queue.pop_back(),
        };
        let Some(v) = next else { break };
        if !w.wants_work(v) {
            continue;
        }
        if d.is_taxon(v) {
            w.remove_taxon(v);
        } else if w.adj[v].len() == 2 {
            w.suppress(v);
        } else {
            w.prune(v);
        }
        for u in std::mem::take(&mut w.touched) {
            if w.wants_work(u) {
                push(u, &mut lowest, &mut queue);
            }
        }
    }
    let cleaned = w.compact();
    (cleaned, CleanupTrace { events: w.events })
}

/// Connected components, ordered by smallest vertex id, with induced metadata.
pub fn components(d: &DisplayGraph) -> Vec<DisplayGraph> {
    d.to_graph()
        .components()
        .into_iter()
        .map(|members| {
            let mut index = vec![usize::MAX; d.vertex_count()];
            for (i, &v) in members.iter().enumerate() {
                index[v] = i;
            }
            let vertices = members.iter().map(|&v| d.vertices[v].clone()).collect();
            let edges = d
                .edges
                .iter()
                .filter(|e| index[e.a] != usize::MAX)
                .map(|e| Edge {
                    a: index[e.a],
                    b: index[e.b],
                    tree: e.tree,
                })
                .collect();
            DisplayGraph::from_parts(vertices, edges)
        })
        .collect()
}
