//! Exhaustive ground truth for small instances: enumeration of unrooted
//! binary topologies, brute-force supertree search and exact treewidth.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::Graph;
use crate::phylo::{PhyloTree, Taxon};

/// Largest taxon count accepted by the tree enumeration and brute-force search.
pub const MAX_ENUM_TAXA: usize = 9;
/// Largest vertex count accepted by [`exact_treewidth`].
pub const MAX_TW_VERTICES: usize = 20;

/// `(2n - 5)!!`, the number of unrooted binary trees on `n >= 3` taxa.
pub fn tree_count(n: usize) -> u64 {
    (3..n).map(|i| 2 * i as u64 - 3).product()
}

/// Partial tree in leaf-insertion form: vertices `0..n` are taxa in sorted
/// order, internal vertices follow.
#[derive(Clone, Debug)]
struct Skeleton {
    n: usize,
    edges: Vec<(usize, usize)>,
    next_internal: usize,
}

impl Skeleton {
    fn star(n: usize) -> Self {
        Skeleton {
            n,
            edges: vec![(n, 0), (n, 1), (n, 2)],
            next_internal: n + 1,
        }
    }

    /// Hangs taxon `leaf` from a new vertex on edge `j`.
    fn insert(&mut self, j: usize, leaf: usize) {
        let (a, b) = self.edges[j];
        let mid = self.next_internal;
        self.next_internal += 1;
        self.edges[j] = (a, mid);
        self.edges.push((mid, b));
        self.edges.push((mid, leaf));
    }

    /// Taxon mask on the second endpoint's side of every edge.
    fn split_masks(&self) -> Vec<u32> {
        let v = self.next_internal;
        let mut adj = vec![Vec::new(); v];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        self.edges
            .iter()
            .map(|&(a, b)| {
                let mut mask = 0u32;
                let mut stack = vec![(b, a)];
                while let Some((x, parent)) = stack.pop() {
                    if x < self.n {
                        mask |= 1 << x;
                    }
                    stack.extend(adj[x].iter().filter(|&&y| y != parent).map(|&y| (y, x)));
                }
                mask
            })
            .collect()
    }

    fn to_tree(&self, taxa: &[Taxon]) -> Result<PhyloTree> {
        let labels: Vec<Option<&str>> = (0..self.next_internal)
            .map(|v| taxa.get(v).map(|t| t.as_str()))
            .collect();
        PhyloTree::from_edges(&labels, &self.edges)
    }
}

/// All unrooted binary trees on a taxon set, in leaf-insertion order: taxa are
/// inserted in sorted order and the choice vector advances like an odometer
/// whose last digit turns fastest.
pub struct TreeEnumeration {
    taxa: Vec<Taxon>,
    choices: Vec<usize>,
    done: bool,
}

impl Iterator for TreeEnumeration {
    type Item = PhyloTree;

    fn next(&mut self) -> Option<PhyloTree> {
        if self.done {
            return None;
        }
        let n = self.taxa.len();
        let mut sk = Skeleton::star(n);
        for (i, &c) in self.choices.iter().enumerate() {
            sk.insert(c, i + 3);
        }
        let tree = sk.to_tree(&self.taxa).expect("enumerated skeleton is a valid tree");
        self.done = true;
        for i in (0..self.choices.len()).rev() {
            let limit = 2 * (i + 3) - 3;
            if self.choices[i] + 1 < limit {
                self.choices[i] += 1;
                self.done = false;
                break;
            }
            self.choices[i] = 0;
        }
        Some(tree)
    }
}

fn check_taxa(n: usize) -> Result<()> {
    if n > MAX_ENUM_TAXA {
        return Err(Error::Ceiling {
            what: "taxon",
            actual: n,
            limit: MAX_ENUM_TAXA,
        });
    }
    Ok(())
}

/// Every unrooted binary tree on `taxa` exactly once; needs 3 to 9 taxa.
pub fn enumerate_binary_trees(taxa: &BTreeSet<Taxon>) -> Result<TreeEnumeration> {
    check_taxa(taxa.len())?;
    if taxa.len() < 3 {
        return Err(Error::Contract("tree enumeration needs at least 3 taxa".into()));
    }
    Ok(TreeEnumeration {
        taxa: taxa.iter().cloned().collect(),
        choices: vec![0; taxa.len() - 3],
        done: false,
    })
}

/// An input tree as split masks over the global taxon order.
struct Constraint {
    taxa: u32,
    splits: Vec<u32>,
}

fn canonical(mask: u32, within: u32) -> u32 {
    let low = within & within.wrapping_neg();
    if mask & low != 0 {
        mask
    } else {
        within & !mask
    }
}

fn projected(splits: impl Iterator<Item = u32>, within: u32) -> BTreeSet<u32> {
    splits
        .map(|m| m & within)
        .filter(|&m| m != 0 && m != within)
        .map(|m| canonical(m, within))
        .collect()
}

impl Constraint {
    fn new(t: &PhyloTree, taxa: &[Taxon]) -> Self {
        let bit = |x: &Taxon| 1u32 << taxa.binary_search(x).expect("taxon in union");
        let splits = t
            .edges()
            .into_iter()
            .map(|(a, b)| t.branch_taxa(a, b).iter().map(bit).fold(0, |m, b| m | b))
            .collect();
        Constraint {
            taxa: t.taxa().map(bit).fold(0, |m, b| m | b),
            splits,
        }
    }

    /// Whether a skeleton on the taxa in `prefix` displays this tree's
    /// restriction to `prefix`.
    fn holds(&self, sk_splits: &[u32], prefix: u32) -> bool {
        let q = self.taxa & prefix;
        if q.count_ones() <= 3 {
            return true;
        }
        projected(self.splits.iter().copied(), q) == projected(sk_splits.iter().copied(), q)
    }
}

fn feasible(sk: &Skeleton, constraints: &[Constraint], inserted: usize) -> bool {
    let masks = sk.split_masks();
    let prefix = (1u32 << inserted) - 1;
    constraints.iter().all(|c| c.holds(&masks, prefix))
}

fn search(sk: &Skeleton, next: usize, constraints: &[Constraint]) -> Option<Skeleton> {
    if next == sk.n {
        return Some(sk.clone());
    }
    for j in 0..sk.edges.len() {
        let mut child = sk.clone();
        child.insert(j, next);
        if feasible(&child, constraints, next + 1) {
            if let Some(found) = search(&child, next + 1, constraints) {
                return Some(found);
            }
        }
    }
    None
}

/// The first tree in enumeration order that displays every input, or `None`
/// when the inputs are incompatible. At most 9 taxa in total.
pub fn brute_force_compatible(trees: &[PhyloTree]) -> Result<Option<PhyloTree>> {
    brute_force_compatible_with(trees, Exec::default())
}

/// [`brute_force_compatible`] with an explicit execution mode. The answer does
/// not depend on the mode.
pub fn brute_force_compatible_with(trees: &[PhyloTree], exec: Exec) -> Result<Option<PhyloTree>> {
    let set: BTreeSet<Taxon> = trees.iter().flat_map(|t| t.taxa().cloned()).collect();
    check_taxa(set.len())?;
    if set.is_empty() {
        return Err(Error::EmptyInput);
    }
    if set.len() <= 3 {
        return Ok(Some(PhyloTree::small(&set)?));
    }
    let taxa: Vec<Taxon> = set.into_iter().collect();
    let constraints: Vec<Constraint> = trees.iter().map(|t| Constraint::new(t, &taxa)).collect();
    let n = taxa.len();

    // Split the search at a fixed prefix depth so that workers get whole
    // subtrees; prefixes stay in enumeration order.
    let split_at = n.min(6);
    let mut frontier = vec![Skeleton::star(n)];
    for next in 3..split_at {
        let mut grown = Vec::new();
        for sk in &frontier {
            for j in 0..sk.edges.len() {
                let mut child = sk.clone();
                child.insert(j, next);
                if feasible(&child, &constraints, next + 1) {
                    grown.push(child);
                }
            }
        }
        frontier = grown;
    }
    let found = exec.find_map_first(&frontier, |sk| search(sk, split_at, &constraints));
    found.map(|sk| sk.to_tree(&taxa)).transpose()
}

/// Exact treewidth by dynamic programming over vertex subsets. At most 20
/// vertices; graphs with no edges have treewidth 0.
pub fn exact_treewidth(g: &Graph) -> Result<usize> {
    exact_treewidth_with(g, Exec::default())
}

/// [`exact_treewidth`] with an explicit execution mode; subsets of equal size
/// are evaluated together.
pub fn exact_treewidth_with(g: &Graph, exec: Exec) -> Result<usize> {
    let n = g.vertex_count();
    if n > MAX_TW_VERTICES {
        return Err(Error::Ceiling {
            what: "vertex",
            actual: n,
            limit: MAX_TW_VERTICES,
        });
    }
    if g.edge_count() == 0 {
        return Ok(0);
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).fold(0u32, |m, w| m | 1 << w))
        .collect();
    let full = ((1u64 << n) - 1) as u32;
    // Neighbours outside `s ∪ {v}` of the component of `v` in `s ∪ {v}`.
    let q = |s: u32, v: usize| -> u32 {
        let allowed = s | 1 << v;
        let mut comp = 1u32 << v;
        let mut frontier = comp;
        while frontier != 0 {
            let mut reach = 0u32;
            let mut f = frontier;
            while f != 0 {
                let x = f.trailing_zeros() as usize;
                f &= f - 1;
                reach |= adj[x];
            }
            frontier = reach & allowed & !comp;
            comp |= frontier;
        }
        let mut nb = 0u32;
        let mut c = comp;
        while c != 0 {
            let x = c.trailing_zeros() as usize;
            c &= c - 1;
            nb |= adj[x];
        }
        nb & !allowed & full
    };
    let mut tw = vec![0u8; 1usize << n];
    let mut layers: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
    for s in 1..=full {
        layers[s.count_ones() as usize].push(s);
    }
    for layer in &layers[1..] {
        let values = exec.map(layer, |&s| {
            let mut best = u8::MAX;
            let mut rest = s;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let without = s & !(1 << v);
                let here = q(without, v).count_ones() as u8;
                best = best.min(tw[without as usize].max(here));
            }
            best
        });
        for (&s, value) in layer.iter().zip(values) {
            tw[s as usize] = value;
        }
    }
    Ok(tw[full as usize] as usize)
}

/// Width of a min-fill elimination ordering: an upper bound on treewidth for
/// graphs of any size.
pub fn treewidth_upper_bound(g: &Graph) -> usize {
    let n = g.vertex_count();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).filter(|&w| w != v).collect()).collect();
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut width = 0;
    while !alive.is_empty() {
        let fill = |v: usize, adj: &[BTreeSet<usize>]| {
            let ns: Vec<usize> = adj[v].iter().copied().collect();
            let mut missing = 0;
            for (i, &a) in ns.iter().enumerate() {
                for &b in &ns[i + 1..] {
                    if !adj[a].contains(&b) {
                        missing += 1;
                    }
                }
            }
            missing
        };
        let v = *alive
            .iter()
            .min_by_key(|&&v| (fill(v, &adj), adj[v].len(), v))
            .expect("nonempty");
        let ns: Vec<usize> = adj[v].iter().copied().collect();
        width = width.max(ns.len());
        for (i, &a) in ns.iter().enumerate() {
            adj[a].remove(&v);
            for &b in &ns[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        if let Some(&last) = ns.last() {
            adj[last].remove(&v);
        }
        adj[v].clear();
        alive.remove(&v);
    }
    width
}
