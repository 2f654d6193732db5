//! Unrooted phylogenetic trees.
//!
//! A [`PhyloTree`] is always stored in suppressed form: labels sit exactly on
//! the leaves and no unlabelled vertex has degree 2. Every constructor goes
//! through the same normalisation, so restriction, gluing and Newick parsing all
//! agree on what "the" tree is.

pub(crate) mod bits;
pub mod newick;
mod split;

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use bits::{Bits, TaxonIndex};

pub use newick::{parse_newick, parse_newick_file, write_newick};
pub use split::{Quartet, Split};

/// A leaf label.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Taxon(Arc<str>);

impl Taxon {
    pub fn new(label: &str) -> Result<Self> {
        if label.is_empty() {
            return Err(Error::InvalidTaxon(label.to_string()));
        }
        Ok(Taxon(Arc::from(label)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Taxon {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Taxon {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Taxon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Taxon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// Builds a set of taxa from string labels. Panics on an empty label.
pub fn taxa<I, S>(labels: I) -> BTreeSet<Taxon>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    labels
        .into_iter()
        .map(|s| Taxon::new(s.as_ref()).expect("nonempty taxon label"))
        .collect()
}

/// An unrooted phylogenetic tree with bijectively labelled leaves.
#[derive(Clone)]
pub struct PhyloTree {
    adj: Vec<Vec<usize>>,
    labels: Vec<Option<Taxon>>,
    leaf_of: BTreeMap<Taxon, usize>,
}

impl PhyloTree {
    /// Builds a tree from an arbitrary labelled tree graph and normalises it:
    /// unlabelled leaves are pruned and unlabelled degree-2 vertices suppressed.
    pub fn from_edges(labels: &[Option<&str>], edges: &[(usize, usize)]) -> Result<Self> {
        let mut raw = RawTree::default();
        for label in labels {
            let label = label.map(Taxon::new).transpose()?;
            raw.add_vertex(label);
        }
        for &(a, b) in edges {
            if a >= labels.len() || b >= labels.len() || a == b {
                return Err(Error::InvalidTree(format!("bad edge ({a}, {b})")));
            }
            raw.add_edge(a, b);
        }
        raw.finish()
    }

    /// The tree with a single leaf.
    pub fn leaf(label: Taxon) -> Self {
        let mut raw = RawTree::default();
        raw.add_vertex(Some(label));
        raw.finish().expect("single leaf is a valid tree")
    }

    /// Star tree on up to three taxa, or the path/leaf tree for fewer. This is
    /// the unique tree on `taxa` when `taxa.len() <= 3`.
    pub fn small(taxa: &BTreeSet<Taxon>) -> Result<Self> {
        if taxa.is_empty() || taxa.len() > 3 {
            return Err(Error::Contract(format!(
                "small tree needs 1..=3 taxa, got {}",
                taxa.len()
            )));
        }
        let mut raw = RawTree::default();
        let leaves: Vec<usize> = taxa.iter().map(|t| raw.add_vertex(Some(t.clone()))).collect();
        match leaves.len() {
            1 => {}
            2 => raw.add_edge(leaves[0], leaves[1]),
            _ => {
                let c = raw.add_vertex(None);
                for &l in &leaves {
                    raw.add_edge(c, l);
                }
            }
        }
        raw.finish()
    }

    /// Uniform leaf-insertion random binary tree on `taxa`.
    pub fn random_binary<R: Rng + ?Sized>(taxa: &[Taxon], rng: &mut R) -> Result<Self> {
        let mut order = taxa.to_vec();
        order.shuffle(rng);
        let set: BTreeSet<Taxon> = order.iter().take(3).cloned().collect();
        if set.len() != order.len().min(3) {
            return Err(Error::DuplicateTaxon(format!("{order:?}")));
        }
        let mut raw = RawTree::from_tree(&PhyloTree::small(&set)?);
        let mut edges = raw.edge_list();
        for t in &order[3.min(order.len())..] {
            let (a, b) = edges[rng.gen_range(0..edges.len())];
            let (mid, leaf) = raw.subdivide_and_pend(a, b, t.clone());
            edges.retain(|&e| e != (a, b));
            edges.extend([(a, mid), (mid, b), (mid, leaf)]);
        }
        raw.finish()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.len().saturating_sub(1)
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn label(&self, v: usize) -> Option<&Taxon> {
        self.labels[v].as_ref()
    }

    pub fn leaf_vertex(&self, label: &str) -> Option<usize> {
        self.leaf_of.get(label).copied()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.leaf_of.contains_key(label)
    }

    pub fn taxon_count(&self) -> usize {
        self.leaf_of.len()
    }

    /// Taxa in sorted order.
    pub fn taxa(&self) -> impl Iterator<Item = &Taxon> + '_ {
        self.leaf_of.keys()
    }

    pub fn taxon_set(&self) -> BTreeSet<Taxon> {
        self.leaf_of.keys().cloned().collect()
    }

    /// `(vertex, label)` for every leaf, by label.
    pub fn leaves(&self) -> impl Iterator<Item = (usize, &Taxon)> + '_ {
        self.leaf_of.iter().map(|(t, &v)| (v, t))
    }

    /// Every internal vertex has degree exactly 3.
    pub fn is_binary(&self) -> bool {
        self.labels
            .iter()
            .zip(&self.adj)
            .all(|(l, ns)| l.is_some() || ns.len() == 3)
    }

    /// `T|X'`: the minimal subtree spanning `keep`, suppressed.
    pub fn restrict<I, S>(&self, keep: I) -> Result<PhyloTree>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut wanted = BTreeSet::new();
        for s in keep {
            let s = s.as_ref();
            let v = self
                .leaf_vertex(s)
                .ok_or_else(|| Error::UnknownTaxon(s.to_string()))?;
            wanted.insert(v);
        }
        if wanted.is_empty() {
            return Err(Error::EmptyTaxa);
        }
        let mut raw = RawTree::from_tree(self);
        for (v, _) in self.leaves() {
            if !wanted.contains(&v) {
                raw.labels[v] = None;
            }
        }
        raw.finish()
    }

    /// Same tree with one leaf renamed.
    pub fn relabel(&self, from: &str, to: Taxon) -> Result<PhyloTree> {
        let v = self
            .leaf_vertex(from)
            .ok_or_else(|| Error::UnknownTaxon(from.to_string()))?;
        if from != to.as_str() && self.contains(to.as_str()) {
            return Err(Error::DuplicateTaxon(to.to_string()));
        }
        let mut raw = RawTree::from_tree(self);
        raw.labels[v] = Some(to);
        raw.finish()
    }

    /// Per edge, the canonical side (the one holding taxon index 0) over `index`,
    /// which must cover exactly this tree's taxa.
    pub(crate) fn split_bits(&self, index: &TaxonIndex) -> Vec<Bits> {
        let n = index.len();
        if self.adj.len() < 2 {
            return Vec::new();
        }
        // iterative post-order from vertex 0
        let mut parent = vec![usize::MAX; self.adj.len()];
        let mut order = Vec::with_capacity(self.adj.len());
        let mut stack = vec![0];
        parent[0] = 0;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in &self.adj[v] {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    stack.push(w);
                }
            }
        }
        let mut below: Vec<Bits> = vec![Bits::empty(n); self.adj.len()];
        let mut out = Vec::with_capacity(self.adj.len() - 1);
        for &v in order.iter().rev() {
            if let Some(t) = &self.labels[v] {
                below[v].set(index.get(t).expect("index covers tree taxa"));
            }
            if v != 0 {
                let side = below[v].clone();
                below[parent[v]].union_with(&side);
                out.push(if side.get(0) { side } else { side.complement(n) });
            }
        }
        out
    }

    /// One split per edge.
    pub fn splits(&self) -> BTreeSet<Split> {
        let index = TaxonIndex::new(self.taxa());
        self.split_bits(&index)
            .iter()
            .map(|b| Split::from_bits(b, &index))
            .collect()
    }

    /// Splits with both sides of size at least 2.
    pub fn nontrivial_splits(&self) -> BTreeSet<Split> {
        self.splits().into_iter().filter(|s| !s.is_trivial()).collect()
    }

    /// All quartets displayed by a binary tree, via leaf-to-leaf path lengths.
    pub fn quartets(&self) -> Result<BTreeSet<Quartet>> {
        if !self.is_binary() {
            return Err(Error::NotBinary { index: 0 });
        }
        let leaves: Vec<(usize, &Taxon)> = self.leaves().collect();
        let dist: Vec<Vec<usize>> = leaves.iter().map(|&(v, _)| self.distances_from(v)).collect();
        let d = |i: usize, j: usize| dist[i][leaves[j].0];
        let mut out = BTreeSet::new();
        let n = leaves.len();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for e in c + 1..n {
                        let sums = [
                            (d(a, b) + d(c, e), (a, b, c, e)),
                            (d(a, c) + d(b, e), (a, c, b, e)),
                            (d(a, e) + d(b, c), (a, e, b, c)),
                        ];
                        let best = sums.iter().min_by_key(|s| s.0).unwrap();
                        let (w, x, y, z) = best.1;
                        out.insert(Quartet::new(
                            leaves[w].1.clone(),
                            leaves[x].1.clone(),
                            leaves[y].1.clone(),
                            leaves[z].1.clone(),
                        )?);
                    }
                }
            }
        }
        Ok(out)
    }

    fn distances_from(&self, s: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.adj.len()];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Taxa on the `to` side of edge `from-to`.
    pub fn branch_taxa(&self, from: usize, to: usize) -> BTreeSet<Taxon> {
        let mut out = BTreeSet::new();
        let mut stack = vec![(to, from)];
        while let Some((v, parent)) = stack.pop() {
            if let Some(t) = &self.labels[v] {
                out.insert(t.clone());
            }
            stack.extend(self.adj[v].iter().filter(|&&w| w != parent).map(|&w| (w, v)));
        }
        out
    }

    /// Vertices on the path from `a` to `b`, both included.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let dist = self.distances_from(b);
        let mut out = vec![a];
        let mut cur = a;
        while cur != b {
            cur = *self.adj[cur]
                .iter()
                .find(|&&w| dist[w] + 1 == dist[cur])
                .expect("connected tree");
            out.push(cur);
        }
        out
    }

    /// Whether `self` displays `other`: restricting `self` to `other`'s taxa
    /// yields the same split set.
    pub fn displays(&self, other: &PhyloTree) -> Result<bool> {
        if let Some(t) = other.taxa().find(|t| !self.contains(t.as_str())) {
            return Err(Error::UnknownTaxon(t.to_string()));
        }
        let restricted = self.restrict(other.taxa())?;
        let index = TaxonIndex::new(other.taxa());
        let mine: BTreeSet<Bits> = restricted.split_bits(&index).into_iter().collect();
        let theirs: BTreeSet<Bits> = other.split_bits(&index).into_iter().collect();
        Ok(mine == theirs)
    }

    /// Same unrooted topology with the same leaf labels.
    pub fn is_label_isomorphic(&self, other: &PhyloTree) -> bool {
        write_newick(self) == write_newick(other)
    }

    pub fn to_newick(&self) -> String {
        write_newick(self)
    }
}

impl fmt::Debug for PhyloTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhyloTree({})", write_newick(self))
    }
}

impl fmt::Display for PhyloTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_newick(self))
    }
}

/// Mutable tree scratch space. [`RawTree::finish`] normalises into a
/// [`PhyloTree`].
#[derive(Clone, Debug, Default)]
pub(crate) struct RawTree {
    pub adj: Vec<Vec<usize>>,
    pub labels: Vec<Option<Taxon>>,
    pub alive: Vec<bool>,
}

impl RawTree {
    pub fn from_tree(t: &PhyloTree) -> Self {
        RawTree {
            adj: t.adj.clone(),
            labels: t.labels.clone(),
            alive: vec![true; t.adj.len()],
        }
    }

    pub fn add_vertex(&mut self, label: Option<Taxon>) -> usize {
        self.adj.push(Vec::new());
        self.labels.push(label);
        self.alive.push(true);
        self.adj.len() - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.adj[a].retain(|&x| x != b);
        self.adj[b].retain(|&x| x != a);
    }

    pub fn remove_vertex(&mut self, v: usize) {
        for w in std::mem::take(&mut self.adj[v]) {
            self.adj[w].retain(|&x| x != v);
        }
        self.alive[v] = false;
    }

    /// Subdivides edge `a-b` with a new vertex and hangs a new leaf from it.
    /// Returns `(subdivision vertex, leaf)`.
    pub fn subdivide_and_pend(&mut self, a: usize, b: usize, label: Taxon) -> (usize, usize) {
        self.remove_edge(a, b);
        let mid = self.add_vertex(None);
        let leaf = self.add_vertex(Some(label));
        self.add_edge(a, mid);
        self.add_edge(mid, b);
        self.add_edge(mid, leaf);
        (mid, leaf)
    }

    /// Live edges `(a, b)` with `a < b`, sorted.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.adj.len() {
            if self.alive[a] {
                out.extend(self.adj[a].iter().filter(|&&b| a < b).map(|&b| (a, b)));
            }
        }
        out.sort_unstable();
        out
    }

    /// Prunes unlabelled leaves, suppresses unlabelled degree-2 vertices,
    /// compacts ids and validates.
    pub fn finish(mut self) -> Result<PhyloTree> {
        let n = self.adj.len();
        let mut stack: Vec<usize> = (0..n).collect();
        while let Some(v) = stack.pop() {
            if self.alive[v] && self.labels[v].is_none() && self.adj[v].len() <= 1 {
                let ns = self.adj[v].clone();
                self.remove_vertex(v);
                stack.extend(ns);
            }
        }
        for v in 0..n {
            if self.alive[v] && self.labels[v].is_none() && self.adj[v].len() == 2 {
                let (a, b) = (self.adj[v][0], self.adj[v][1]);
                if a == b {
                    continue;
                }
                self.remove_vertex(v);
                self.add_edge(a, b);
            }
        }

        let mut index = vec![usize::MAX; n];
        let mut next = 0;
        for v in 0..n {
            if self.alive[v] {
                index[v] = next;
                next += 1;
            }
        }
        if next == 0 {
            return Err(Error::InvalidTree("tree has no taxa".into()));
        }
        let mut adj = vec![Vec::new(); next];
        let mut labels = vec![None; next];
        let mut leaf_of = BTreeMap::new();
        let mut edge_ends = 0;
        for v in 0..n {
            if !self.alive[v] {
                continue;
            }
            let i = index[v];
            let mut ns: Vec<usize> = self.adj[v].iter().map(|&w| index[w]).collect();
            ns.sort_unstable();
            if ns.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidTree("parallel edges".into()));
            }
            edge_ends += ns.len();
            if let Some(t) = self.labels[v].take() {
                if ns.len() > 1 {
                    return Err(Error::InvalidTree(format!("labelled vertex `{t}` is not a leaf")));
                }
                if leaf_of.insert(t.clone(), i).is_some() {
                    return Err(Error::DuplicateTaxon(t.to_string()));
                }
                labels[i] = Some(t);
            }
            adj[i] = ns;
        }
        if edge_ends != 2 * (next - 1) {
            return Err(Error::InvalidTree("not a tree (cycle or disconnected)".into()));
        }
        let tree = PhyloTree { adj, labels, leaf_of };
        if tree.distances_from(0).contains(&usize::MAX) {
            return Err(Error::InvalidTree("disconnected".into()));
        }
        Ok(tree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nw(s: &str) -> PhyloTree {
        parse_newick(s).unwrap()
    }

    #[test]
    fn restrict_quartet_to_three_taxa_gives_star() {
        let t = nw("((a,b),(c,d));").restrict(["a", "b", "c"]).unwrap();
        assert_eq!(t.vertex_count(), 4);
        assert!(t.is_binary());
        assert_eq!(t.to_newick(), "(a,b,c);");
    }

    #[test]
    fn restrict_caterpillar_by_path_contraction() {
        // Caterpillar ab|c|d|e: splits {a,b}|{c,d,e} and {a,b,c}|{d,e}.
        let t = nw("(((a,b),c),(d,e));");
        assert_eq!(t.vertex_count(), 8);
        let r = t.restrict(["a", "b", "d", "e"]).unwrap();
        assert!(r.is_label_isomorphic(&nw("((a,b),(d,e));")));
    }

    #[test]
    fn restrict_identity_and_small_cases() {
        let t = nw("((a,b),(c,(d,e)));");
        assert!(t.restrict(t.taxa().map(|t| t.to_string())).unwrap().is_label_isomorphic(&t));
        let one = t.restrict(["c"]).unwrap();
        assert_eq!((one.vertex_count(), one.edge_count()), (1, 0));
        let two = t.restrict(["a", "e"]).unwrap();
        assert_eq!((two.vertex_count(), two.edge_count()), (2, 1));
    }

    #[test]
    fn restrict_errors() {
        let t = nw("((a,b),(c,d));");
        assert_eq!(t.restrict(Vec::<&str>::new()).unwrap_err(), Error::EmptyTaxa);
        assert_eq!(t.restrict(["a", "z"]).unwrap_err(), Error::UnknownTaxon("z".into()));
    }

    #[test]
    fn split_counts() {
        let q = nw("((a,b),(c,d));");
        let nt = q.nontrivial_splits();
        assert_eq!(nt.len(), 1);
        let s = nt.iter().next().unwrap();
        assert_eq!(s.side_a(), &taxa(["a", "b"]));
        assert_eq!(s.side_b(), &taxa(["c", "d"]));
        assert_eq!(q.splits().len(), 5);

        assert!(nw("(a,b,c);").nontrivial_splits().is_empty());
        // balanced six-leaf tree: edge enumeration gives three internal edges
        let six = nw("((a,b),(c,d),(e,f));");
        assert_eq!(six.nontrivial_splits().len(), 3);
        assert_eq!(six.splits().len(), 2 * 6 - 3);
    }

    #[test]
    fn quartet_sets() {
        let q = nw("((a,b),(c,d));");
        let qs = q.quartets().unwrap();
        assert_eq!(qs.len(), 1);
        assert!(qs.contains(&Quartet::parse("ab|cd").unwrap()));

        let cat = nw("((a,b),c,(d,e));").quartets().unwrap();
        for s in ["ab|cd", "ab|ce", "ab|de", "ac|de", "bc|de"] {
            assert!(cat.contains(&Quartet::parse(s).unwrap()), "{s}");
        }
        assert_eq!(cat.len(), 5);

        let six = nw("(((a,b),c),(d,(e,f)));");
        assert_eq!(six.quartets().unwrap().len(), 15);
    }

    #[test]
    fn displays_examples() {
        let q = nw("((a,b),(c,d));");
        assert!(q.displays(&q).unwrap());
        let six = nw("((a,b),((c,d),(e,f)));");
        assert!(six.displays(&q).unwrap());
        assert!(!q.displays(&nw("((a,c),(b,d));")).unwrap());
        assert_eq!(
            q.displays(&nw("((a,b),(c,z));")).unwrap_err(),
            Error::UnknownTaxon("z".into())
        );
    }

    #[test]
    fn relabel_rejects_collision() {
        let q = nw("((a,b),(c,d));");
        let r = q.relabel("a", Taxon::new("x").unwrap()).unwrap();
        assert!(r.contains("x") && !r.contains("a"));
        assert!(matches!(
            q.relabel("a", Taxon::new("b").unwrap()),
            Err(Error::DuplicateTaxon(_))
        ));
    }

    #[test]
    fn from_edges_normalises() {
        // path a - x - y - b with an unlabelled pendant z on y
        let t = PhyloTree::from_edges(
            &[Some("a"), None, None, Some("b"), None],
            &[(0, 1), (1, 2), (2, 3), (2, 4)],
        )
        .unwrap();
        assert_eq!((t.vertex_count(), t.edge_count()), (2, 1));
        assert!(PhyloTree::from_edges(&[Some("a"), Some("b"), None], &[(0, 1), (1, 2), (2, 0)]).is_err());
    }
}
