//! Plain undirected graphs with stable edge ids.
//!
//! This is the common currency of [`crate::tw2`], [`crate::planar`] and
//! [`crate::oracle`]. Parallel edges are representable; self-loops are not.

use std::collections::{BTreeSet, VecDeque};

pub type EdgeId = usize;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<(usize, EdgeId)>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertex_count: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); vertex_count],
            edges: Vec::new(),
        }
    }

    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::new(vertex_count);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Panics on self-loops or out-of-range endpoints.
    pub fn add_edge(&mut self, a: usize, b: usize) -> EdgeId {
        assert!(a != b, "self-loop at vertex {a}");
        assert!(a < self.adj.len() && b < self.adj.len(), "edge endpoint out of range");
        let id = self.edges.len();
        self.edges.push((a, b));
        self.adj[a].push((b, id));
        self.adj[b].push((a, id));
        id
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (usize, usize) {
        self.edges[e]
    }

    /// `(neighbor, edge)` pairs in insertion order.
    pub fn incident(&self, v: usize) -> &[(usize, EdgeId)] {
        &self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(|&(w, _)| w)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].iter().any(|&(w, _)| w == b)
    }

    pub fn has_parallel_edges(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges
            .iter()
            .any(|&(a, b)| !seen.insert((a.min(b), a.max(b))))
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for w in self.neighbors(v) {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Whether `set` induces a connected, nonempty subgraph.
    pub fn induces_connected(&self, set: &BTreeSet<usize>) -> bool {
        let Some(&start) = set.iter().next() else {
            return false;
        };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if set.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == set.len()
    }

    /// Simple graph obtained by contracting edge `e`: the higher endpoint is merged
    /// into the lower one, vertices above it shift down by one, loops and
    /// duplicate edges are dropped.
    pub fn contract_edge(&self, e: EdgeId) -> Graph {
        let (a, b) = self.edges[e];
        let (keep, gone) = (a.min(b), a.max(b));
        let map = |v: usize| {
            let v = if v == gone { keep } else { v };
            if v > gone {
                v - 1
            } else {
                v
            }
        };
        let mut seen = BTreeSet::new();
        let mut g = Graph::new(self.vertex_count() - 1);
        for &(x, y) in &self.edges {
            let (x, y) = (map(x), map(y));
            if x != y && seen.insert((x.min(y), x.max(y))) {
                g.add_edge(x, y);
            }
        }
        g
    }

    pub fn without_edge(&self, e: EdgeId) -> Graph {
        let mut g = Graph::new(self.vertex_count());
        for (i, &(x, y)) in self.edges.iter().enumerate() {
            if i != e {
                g.add_edge(x, y);
            }
        }
        g
    }

    /// Subgraph induced by `keep`, relabelled to `0..keep.len()` in sorted order.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::new(keep.len());
        for &(x, y) in &self.edges {
            if index[x] != usize::MAX && index[y] != usize::MAX {
                g.add_edge(index[x], index[y]);
            }
        }
        g
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for a in 0..n {
            for b in a + 1..n {
                g.add_edge(a, b);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        let mut g = Graph::new(n);
        for v in 0..n {
            g.add_edge(v, (v + 1) % n);
        }
        g
    }
}
