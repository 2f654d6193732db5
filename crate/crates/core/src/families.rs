//! Instance generators.
//!
//! The treewidth-3 families chain quartets over a caterpillar: tree `i` is
//! `((t{i},t{i+1}),(t{i+2},t{i+3}))`. Any three consecutive quartets already
//! contain a K4 minor, and the chain is glued in series, so the display graph
//! has treewidth exactly 3 for every `k >= 3`. The caterpillar on `t0..t{k+2}`
//! displays every quartet.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algo::glue_at_edge_image;
use crate::error::{internal, Error, Result};
use crate::phylo::{parse_newick, PhyloTree, RawTree, Taxon};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    CompatibleTw3,
    IncompatibleTw3,
    ConflictingQuartets,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 3] = [
        FamilyKind::CompatibleTw3,
        FamilyKind::IncompatibleTw3,
        FamilyKind::ConflictingQuartets,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyKind::CompatibleTw3 => "compatible_tw3",
            FamilyKind::IncompatibleTw3 => "incompatible_tw3",
            FamilyKind::ConflictingQuartets => "conflicting_quartets",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Contract(format!("unknown family `{s}`")))
    }
}

/// A family and its tree count. `k` is ignored for the two-quartet gadget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub k: usize,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, k: usize) -> Result<Self> {
        let spec = FamilySpec { kind, k };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        if self.kind != FamilyKind::ConflictingQuartets && self.k < 3 {
            return Err(Error::Contract(format!("{} needs k >= 3, got {}", self.kind, self.k)));
        }
        Ok(())
    }

    /// Number of trees [`generate`] returns.
    pub fn tree_count(&self) -> usize {
        match self.kind {
            FamilyKind::ConflictingQuartets => 2,
            _ => self.k,
        }
    }
}

/// Three quartets that are pairwise compatible but admit no common supertree.
/// The first one is also the head of the compatible chain.
pub const INCOMPATIBLE_TRIPLE: [&str; 3] = [
    "((t0,t1),(t2,t3));",
    "((t0,t3),(t1,t4));",
    "((t1,t2),(t3,t4));",
];

fn chain_quartet(i: usize) -> Result<PhyloTree> {
    parse_newick(&format!("((t{},t{}),(t{},t{}));", i, i + 1, i + 2, i + 3))
}

pub fn generate(spec: &FamilySpec) -> Result<Vec<PhyloTree>> {
    spec.check()?;
    match spec.kind {
        FamilyKind::ConflictingQuartets => ["((a,b),(c,d));", "((a,c),(b,d));"]
            .into_iter()
            .map(parse_newick)
            .collect(),
        FamilyKind::CompatibleTw3 => (0..spec.k).map(chain_quartet).collect(),
        FamilyKind::IncompatibleTw3 => {
            let mut out: Vec<PhyloTree> = INCOMPATIBLE_TRIPLE
                .into_iter()
                .map(parse_newick)
                .collect::<Result<_>>()?;
            for i in 3..spec.k {
                out.push(chain_quartet(i)?);
            }
            Ok(out)
        }
    }
}

/// The caterpillar displaying every tree of a compatible family. The result
/// is checked against the generated trees before it is returned.
pub fn witness_supertree(spec: &FamilySpec) -> Result<PhyloTree> {
    spec.check()?;
    if spec.kind != FamilyKind::CompatibleTw3 {
        return Err(Error::Contract(format!("{} has no witness supertree", spec.kind)));
    }
    let mut newick = String::from("t0");
    for i in 1..spec.k + 3 {
        newick = format!("({newick},t{i})");
    }
    let s = parse_newick(&format!("{newick};"))?;
    for t in generate(spec)? {
        if !s.displays(&t)? {
            return Err(internal(format!("caterpillar does not display {t}")));
        }
    }
    Ok(s)
}

/// A random binary tree on `n` taxa `t0..` and `k` restrictions of it to
/// random subsets of at least four taxa. Returns `(supertree, restrictions)`.
pub fn sample_restrictions<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Result<(PhyloTree, Vec<PhyloTree>)> {
    let taxa: Vec<Taxon> = (0..n).map(|i| Taxon::new(&format!("t{i}"))).collect::<Result<_>>()?;
    let s = PhyloTree::random_binary(&taxa, rng)?;
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let size = rng.gen_range(4.min(n)..=n);
        let mut pick = taxa.clone();
        pick.shuffle(rng);
        pick.truncate(size);
        out.push(s.restrict(&pick)?);
    }
    Ok((s, out))
}

/// Shapes whose display graph separates into two blocks through a small
/// separator. Random restrictions of one supertree almost never produce these.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gadget {
    /// Taxon `u` sits in three trees and the quartet `((u,a),(c,d))` links its
    /// inner neighbour to both blocks.
    LeafInner,
    /// The quartet `((a,c),(b,d))` crosses the blocks through its inner edge.
    InnerEdge,
}

/// Random compatible instance of `gadget` with blocks of `3..=5` extra taxa
/// each, returned with a supertree displaying it.
pub fn separator_gadget<R: Rng + ?Sized>(rng: &mut R, gadget: Gadget) -> Result<(PhyloTree, Vec<PhyloTree>)> {
    let block = |rng: &mut R, prefix: &str| -> Result<Vec<Taxon>> {
        let m = rng.gen_range(3..=5);
        (0..m).map(|i| Taxon::new(&format!("{prefix}{i}"))).collect()
    };
    let e = block(rng, "e")?;
    let f = block(rng, "f")?;
    let core = parse_newick(match gadget {
        Gadget::LeafInner => "((u,a),(c,d));",
        Gadget::InnerEdge => "((a,c),(b,d));",
    })?;
    let s = hang(rng, &core, &e)?;
    let s = hang(rng, &s, &f)?;
    let with = |extra: &[&str], side: &[Taxon]| -> Result<PhyloTree> {
        let mut keep: Vec<Taxon> = side.to_vec();
        for x in extra {
            keep.push(Taxon::new(x)?);
        }
        s.restrict(&keep)
    };
    let trees = match gadget {
        Gadget::LeafInner => vec![
            core,
            with(&["u"], &e)?,
            with(&["a"], &e)?,
            with(&["u"], &f)?,
            with(&["c", "d"], &f)?,
        ],
        Gadget::InnerEdge => vec![
            core,
            with(&["a"], &e)?,
            with(&["b"], &e)?,
            with(&["c"], &f)?,
            with(&["d"], &f)?,
        ],
    };
    Ok((s, trees))
}

/// Hangs a random binary tree on `block` from a random edge of `s`.
fn hang<R: Rng + ?Sized>(rng: &mut R, s: &PhyloTree, block: &[Taxon]) -> Result<PhyloTree> {
    let taken: BTreeSet<&str> = s.taxa().chain(block).map(Taxon::as_str).collect();
    let port = (0..)
        .map(|i| format!("__hang{i}"))
        .find(|p| !taken.contains(p.as_str()))
        .expect("unbounded");
    let port = Taxon::new(&port)?;
    let mut side = block.to_vec();
    side.push(port.clone());
    let r = PhyloTree::random_binary(&side, rng)?;
    let edges = s.edges();
    let (a, b) = edges[rng.gen_range(0..edges.len())];
    let mut raw = RawTree::from_tree(s);
    raw.subdivide_and_pend(a, b, port.clone());
    glue_at_edge_image(&raw.finish()?, &r, &port, &port)
}
