use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use supertree_tw::dgraph::{build_display, cleanup, cleanup_with, components, CleanupOrder, DisplayGraph, VertexKind};
use supertree_tw::families::sample_restrictions;
use supertree_tw::PhyloTree;

fn instance() -> impl Strategy<Value = Vec<PhyloTree>> {
    (any::<u64>(), 4usize..=10, 1usize..=5).prop_map(|(seed, n, k)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sample_restrictions(&mut rng, n, k).unwrap().1
    })
}

fn is_clean(d: &DisplayGraph) -> bool {
    let degrees_ok = (0..d.vertex_count()).all(|v| match d.vertex(v).kind {
        VertexKind::Taxon(_) => d.degree(v) >= 2,
        VertexKind::Internal { .. } => d.degree(v) == 3,
    });
    degrees_ok && d.tree_indices().into_iter().all(|i| d.tree_taxa(i).len() >= 4)
}

fn shape(d: &DisplayGraph) -> (usize, usize, Vec<String>, Vec<usize>) {
    let mut degrees: Vec<usize> = (0..d.vertex_count()).map(|v| d.degree(v)).collect();
    degrees.sort();
    let taxa = d.taxa().iter().map(|t| t.to_string()).collect();
    (d.vertex_count(), d.edge_count(), taxa, degrees)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cleanup_is_confluent_and_replayable(trees in instance()) {
        let d = build_display(&trees).unwrap();
        let (base, trace) = cleanup(&d);
        prop_assert!(is_clean(&base));
        let replayed = trace.replay(&d).unwrap();
        prop_assert_eq!(shape(&replayed), shape(&base));
        for order in [CleanupOrder::Fifo, CleanupOrder::Lifo] {
            let (other, _) = cleanup_with(&d, order);
            prop_assert_eq!(shape(&other), shape(&base));
        }
        let (again, t2) = cleanup(&base);
        prop_assert!(t2.events.is_empty());
        prop_assert_eq!(again.vertex_count(), base.vertex_count());
    }

    #[test]
    fn components_partition_the_cleaned_graph(trees in instance()) {
        let (base, _) = cleanup(&build_display(&trees).unwrap());
        let comps = components(&base);
        prop_assert_eq!(comps.iter().map(DisplayGraph::vertex_count).sum::<usize>(), base.vertex_count());
        prop_assert_eq!(comps.iter().map(DisplayGraph::edge_count).sum::<usize>(), base.edge_count());
        for c in &comps {
            prop_assert!(c.to_graph().is_connected());
            prop_assert!(is_clean(c));
        }
    }

    #[test]
    fn display_graph_counts(trees in instance()) {
        let d = build_display(&trees).unwrap();
        let taxa: std::collections::BTreeSet<_> = trees.iter().flat_map(|t| t.taxon_set()).collect();
        let inner: usize = trees.iter().map(|t| t.vertex_count() - t.taxon_count()).sum();
        prop_assert_eq!(d.vertex_count(), taxa.len() + inner);
        prop_assert_eq!(d.edge_count(), trees.iter().map(PhyloTree::edge_count).sum::<usize>());
    }
}
