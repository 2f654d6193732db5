//! Treewidth <= 2 recognition by series-parallel reduction.
//!
//! A graph has treewidth at most 2 iff repeatedly deleting isolated and
//! pendant vertices and bypassing degree-2 vertices (merging any parallel edge
//! this creates) empties it. On failure the stalled kernel has minimum degree
//! three and contains a K4 minor, which [`k4_witness`] maps back to branch sets
//! of the input graph.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{internal, Error, Result};
use crate::graph::{EdgeId, Graph};

/// One reduction step. Edge ids below the input's edge count are input edges;
/// ids from there on are edges created by earlier bypass steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    DropIsolated {
        v: usize,
    },
    DropPendant {
        v: usize,
        neighbor: usize,
        edge: EdgeId,
    },
    /// `v` with edges `edge_a` to `a` and `edge_b` to `b` is replaced by
    /// `result_edge`. When `merged` is set, `result_edge` already joined `a` and
    /// `b` and absorbs the new connection; otherwise it is a fresh edge.
    BypassDegree2 {
        v: usize,
        a: usize,
        b: usize,
        edge_a: EdgeId,
        edge_b: EdgeId,
        result_edge: EdgeId,
        merged: bool,
    },
}

impl Step {
    pub fn vertex(&self) -> usize {
        match *self {
            Step::DropIsolated { v } | Step::DropPendant { v, .. } | Step::BypassDegree2 { v, .. } => v,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionTrace {
    pub steps: Vec<Step>,
}

impl ReductionTrace {
    /// Applies the steps to `g` in order and checks that each one is legal.
    /// Returns the number of vertices left.
    pub fn replay(&self, g: &Graph) -> Result<usize> {
        let mut s = Scratch::new(g);
        for (i, step) in self.steps.iter().enumerate() {
            let bad = |what: &str| Error::TraceMismatch(format!("step {i}: {what}"));
            let v = step.vertex();
            if v >= s.adj.len() || !s.alive[v] {
                return Err(bad("vertex not present"));
            }
            match *step {
                Step::DropIsolated { .. } => {
                    if !s.adj[v].is_empty() {
                        return Err(bad("vertex is not isolated"));
                    }
                    s.alive[v] = false;
                }
                Step::DropPendant { neighbor, edge, .. } => {
                    if s.adj[v].len() != 1 || s.adj[v].get(&neighbor) != Some(&edge) {
                        return Err(bad("vertex is not pendant on the recorded edge"));
                    }
                    s.unlink(v, neighbor);
                    s.alive[v] = false;
                }
                Step::BypassDegree2 {
                    a,
                    b,
                    edge_a,
                    edge_b,
                    result_edge,
                    merged,
                    ..
                } => {
                    if s.adj[v].len() != 2
                        || s.adj[v].get(&a) != Some(&edge_a)
                        || s.adj[v].get(&b) != Some(&edge_b)
                    {
                        return Err(bad("vertex does not have the recorded two edges"));
                    }
                    let existing = s.adj[a].get(&b).copied();
                    match (merged, existing) {
                        (true, Some(e)) if e == result_edge => {}
                        (false, None) if result_edge == s.next_edge => {}
                        _ => return Err(bad("result edge does not match")),
                    }
                    s.bypass(v, a, b);
                }
            }
        }
        Ok(s.alive.iter().filter(|&&x| x).count())
    }
}

/// Four disjoint vertex sets, each inducing a connected subgraph, pairwise
/// joined by an edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K4Witness {
    pub branch_sets: [BTreeSet<usize>; 4],
}

impl K4Witness {
    pub fn verify(&self, g: &Graph) -> bool {
        let mut owner = vec![usize::MAX; g.vertex_count()];
        for (i, set) in self.branch_sets.iter().enumerate() {
            if set.is_empty() || !g.induces_connected(set) {
                return false;
            }
            for &v in set {
                if v >= owner.len() || owner[v] != usize::MAX {
                    return false;
                }
                owner[v] = i;
            }
        }
        let mut joined = [[false; 4]; 4];
        for &(a, b) in g.edges() {
            let (i, j) = (owner[a], owner[b]);
            if i != usize::MAX && j != usize::MAX && i != j {
                joined[i][j] = true;
                joined[j][i] = true;
            }
        }
        (0..4).all(|i| (0..4).all(|j| i == j || joined[i][j]))
    }
}

struct Scratch {
    adj: Vec<BTreeMap<usize, EdgeId>>,
    alive: Vec<bool>,
    next_edge: EdgeId,
    /// Vertices of the input contracted into each surviving vertex.
    branch: Vec<Vec<usize>>,
}

impl Scratch {
    fn new(g: &Graph) -> Self {
        let n = g.vertex_count();
        let mut adj = vec![BTreeMap::new(); n];
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            // parallel input edges collapse onto the first copy
            adj[a].entry(b).or_insert(e);
            adj[b].entry(a).or_insert(e);
        }
        Scratch {
            adj,
            alive: vec![true; n],
            next_edge: g.edge_count(),
            branch: (0..n).map(|v| vec![v]).collect(),
        }
    }

    fn unlink(&mut self, a: usize, b: usize) {
        self.adj[a].remove(&b);
        self.adj[b].remove(&a);
    }

    /// Returns `(result_edge, merged)`.
    fn bypass(&mut self, v: usize, a: usize, b: usize) -> (EdgeId, bool) {
        self.unlink(v, a);
        self.unlink(v, b);
        self.alive[v] = false;
        let moved = std::mem::take(&mut self.branch[v]);
        self.branch[a].extend(moved);
        if let Some(&e) = self.adj[a].get(&b) {
            (e, true)
        } else {
            let e = self.next_edge;
            self.next_edge += 1;
            self.adj[a].insert(b, e);
            self.adj[b].insert(a, e);
            (e, false)
        }
    }
}

struct Reduced {
    trace: ReductionTrace,
    scratch: Scratch,
}

fn reduce(g: &Graph) -> Reduced {
    let mut s = Scratch::new(g);
    let mut buckets: [BTreeSet<usize>; 3] = Default::default();
    for v in 0..g.vertex_count() {
        if let Some(bucket) = buckets.get_mut(s.adj[v].len()) {
            bucket.insert(v);
        }
    }
    let mut steps = Vec::new();
    loop {
        let Some((d, v)) = (0..3).find_map(|d| buckets[d].first().map(|&v| (d, v))) else {
            break;
        };
        buckets[d].remove(&v);
        let touched: Vec<usize> = s.adj[v].keys().copied().collect();
        for &u in &touched {
            if let Some(bucket) = buckets.get_mut(s.adj[u].len()) {
                bucket.remove(&u);
            }
        }
        match d {
            0 => {
                s.alive[v] = false;
                steps.push(Step::DropIsolated { v });
            }
            1 => {
                let (&neighbor, &edge) = s.adj[v].iter().next().expect("pendant");
                s.unlink(v, neighbor);
                s.alive[v] = false;
                steps.push(Step::DropPendant { v, neighbor, edge });
            }
            _ => {
                let mut it = s.adj[v].iter();
                let (&a, &edge_a) = it.next().expect("degree 2");
                let (&b, &edge_b) = it.next().expect("degree 2");
                let (result_edge, merged) = s.bypass(v, a, b);
                steps.push(Step::BypassDegree2 {
                    v,
                    a,
                    b,
                    edge_a,
                    edge_b,
                    result_edge,
                    merged,
                });
            }
        }
        for &u in &touched {
            if let Some(bucket) = buckets.get_mut(s.adj[u].len()) {
                bucket.insert(u);
            }
        }
    }
    Reduced {
        trace: ReductionTrace { steps },
        scratch: s,
    }
}

/// Whether `g` has treewidth at most 2, with the reduction trace. On `false`
/// the trace stops at a kernel of minimum degree three.
pub fn is_tw_le_2(g: &Graph) -> (bool, ReductionTrace) {
    let r = reduce(g);
    let ok = r.trace.steps.len() == g.vertex_count();
    (ok, r.trace)
}

/// Four branch sets of `g` forming a K4 minor. Fails with
/// [`Error::Reducible`] when `g` has treewidth at most 2.
pub fn k4_witness(g: &Graph) -> Result<K4Witness> {
    let r = reduce(g);
    if r.trace.steps.len() == g.vertex_count() {
        return Err(Error::Reducible);
    }
    let s = &r.scratch;
    let kernel_vertices: Vec<usize> = (0..g.vertex_count()).filter(|&v| s.alive[v]).collect();
    let mut index = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in kernel_vertices.iter().enumerate() {
        index[v] = i;
    }
    let mut kernel_edges = Vec::new();
    for &a in &kernel_vertices {
        for &b in s.adj[a].keys() {
            if a < b {
                kernel_edges.push((index[a], index[b]));
            }
        }
    }

    // Drop every edge whose removal keeps the kernel irreducible; what is left
    // is a subdivided K4.
    let n = kernel_vertices.len();
    let mut keep = vec![true; kernel_edges.len()];
    for i in 0..kernel_edges.len() {
        keep[i] = false;
        let h = subgraph(n, &kernel_edges, &keep);
        if is_tw_le_2(&h).0 {
            keep[i] = true;
        }
    }
    let h = subgraph(n, &kernel_edges, &keep);
    let groups = subdivision_branches(&h)?;

    let mut branch_sets: [BTreeSet<usize>; 4] = Default::default();
    for (k, &grp) in groups.iter().enumerate() {
        if let Some(grp) = grp {
            branch_sets[grp].extend(s.branch[kernel_vertices[k]].iter().copied());
        }
    }
    let w = K4Witness { branch_sets };
    if !w.verify(g) {
        return Err(internal("extracted K4 witness failed verification"));
    }
    Ok(w)
}

fn subgraph(n: usize, edges: &[(usize, usize)], keep: &[bool]) -> Graph {
    let kept: Vec<(usize, usize)> = edges
        .iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|(&e, _)| e)
        .collect();
    Graph::from_edges(n, &kept)
}

/// Assigns each vertex of a K4 subdivision to one of four groups: the four
/// degree-3 vertices seed the groups and path interiors join the group of
/// their lower endpoint. Isolated vertices get `None`.
fn subdivision_branches(h: &Graph) -> Result<Vec<Option<usize>>> {
    let corners: Vec<usize> = (0..h.vertex_count()).filter(|&v| h.degree(v) == 3).collect();
    let valid = corners.len() == 4 && (0..h.vertex_count()).all(|v| matches!(h.degree(v), 0 | 2 | 3));
    if !valid {
        return Err(internal("minimal irreducible kernel is not a subdivided K4"));
    }
    let mut group = vec![None; h.vertex_count()];
    for (i, &c) in corners.iter().enumerate() {
        group[c] = Some(i);
    }
    for (i, &c) in corners.iter().enumerate() {
        for start in h.neighbors(c) {
            let mut path = Vec::new();
            let (mut prev, mut cur) = (c, start);
            while h.degree(cur) == 2 {
                path.push(cur);
                let next = h.neighbors(cur).find(|&w| w != prev).expect("degree 2");
                (prev, cur) = (cur, next);
            }
            if c < cur {
                for v in path {
                    group[v] = Some(i);
                }
            }
        }
    }
    Ok(group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgraph::build_display;
    use crate::phylo::parse_newick;

    fn empties(g: &Graph) -> bool {
        let (ok, trace) = is_tw_le_2(g);
        assert_eq!(trace.replay(g).unwrap(), g.vertex_count() - trace.steps.len());
        ok
    }

    #[test]
    fn trees_and_cycles_reduce() {
        let t = parse_newick("((a,b),(c,(d,e)));").unwrap();
        let g = Graph::from_edges(t.vertex_count(), &t.edges());
        assert!(empties(&g));
        for n in 3..8 {
            assert!(empties(&Graph::cycle(n)));
        }
        assert!(empties(&Graph::new(0)));
        assert!(empties(&Graph::new(3)));
    }

    #[test]
    fn cycle_trace_merges_once() {
        let (_, trace) = is_tw_le_2(&Graph::cycle(4));
        let merges = trace
            .steps
            .iter()
            .filter(|s| matches!(s, Step::BypassDegree2 { merged: true, .. }))
            .count();
        assert_eq!(merges, 1);
    }

    #[test]
    fn every_vertex_appears_once() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]);
        let (ok, trace) = is_tw_le_2(&g);
        assert!(ok);
        let seen: BTreeSet<usize> = trace.steps.iter().map(Step::vertex).collect();
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn k4_is_its_own_witness() {
        let g = Graph::complete(4);
        assert!(!empties(&g));
        let w = k4_witness(&g).unwrap();
        let mut sets: Vec<_> = w.branch_sets.iter().cloned().collect();
        sets.sort();
        assert_eq!(sets, (0..4).map(|v| BTreeSet::from([v])).collect::<Vec<_>>());
    }

    #[test]
    fn conflicting_quartets_have_a_k4_minor() {
        let ts = [
            parse_newick("((a,b),(c,d));").unwrap(),
            parse_newick("((a,c),(b,d));").unwrap(),
        ];
        let d = build_display(&ts).unwrap();
        let g = d.to_graph();
        assert!(!is_tw_le_2(&g).0);
        let w = k4_witness(&g).unwrap();
        assert!(w.verify(&g));
        for set in &w.branch_sets {
            let internals = set.iter().filter(|&&v| !d.is_taxon(v)).count();
            assert_eq!(internals, 1);
        }
    }

    #[test]
    fn witness_on_subdivided_k5() {
        let mut edges = Vec::new();
        let mut next = 5;
        for a in 0..5 {
            for b in a + 1..5 {
                edges.push((a, next));
                edges.push((next, b));
                next += 1;
            }
        }
        let g = Graph::from_edges(next, &edges);
        let w = k4_witness(&g).unwrap();
        assert!(w.verify(&g));
    }

    #[test]
    fn witness_rejected_on_reducible_graph() {
        assert_eq!(k4_witness(&Graph::cycle(5)).unwrap_err(), Error::Reducible);
    }

    #[test]
    fn verifier_rejects_bad_witnesses() {
        let g = Graph::complete(4);
        let bad = K4Witness {
            branch_sets: [
                BTreeSet::from([0]),
                BTreeSet::from([1]),
                BTreeSet::from([2]),
                BTreeSet::from([2, 3]),
            ],
        };
        assert!(!bad.verify(&g));
        let c = Graph::cycle(4);
        let cyc = K4Witness {
            branch_sets: [0, 1, 2, 3].map(|v| BTreeSet::from([v])),
        };
        assert!(!cyc.verify(&c));
    }

    #[test]
    fn tampered_trace_is_rejected() {
        let g = Graph::cycle(5);
        let (_, mut trace) = is_tw_le_2(&g);
        trace.steps.swap(0, 4);
        assert!(trace.replay(&g).is_err());
    }
}
