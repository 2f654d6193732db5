//! Compatibility of unrooted binary phylogenetic trees through the treewidth of
//! their display graph.
//!
//! When the display graph of a tree set has treewidth at most 2, the set is
//! compatible and [`algo::supertree_tw2`] builds a supertree in polynomial time.
//! The crate also carries the small-instance ground truth used to check that
//! claim ([`oracle`]) and generators for treewidth-3 families ([`families`]).
//!
//! Module map:
//!
//! * [`phylo`]: trees, Newick I/O, restriction, splits, quartets, display relation.
//! * [`dgraph`]: display graph construction, cleanup, components.
//! * [`tw2`]: treewidth <= 2 recognition by series-parallel reduction, K4 minors.
//! * [`planar`]: rotation systems by trace replay, faces, dual labels, face pairs.
//! * [`algo`]: two-tree test and the recursive supertree construction.
//! * [`oracle`]: brute-force supertree search and exact treewidth.
//! * [`families`]: treewidth-3 compatible/incompatible instance generators.

pub mod algo;
pub mod dgraph;
mod error;
pub mod exec;
pub mod families;
pub mod graph;
pub mod oracle;
pub mod phylo;
pub mod planar;
pub mod tw2;

pub use error::{Error, Result};
pub use exec::Exec;
pub use graph::Graph;
pub use phylo::{PhyloTree, Quartet, Split, Taxon};
