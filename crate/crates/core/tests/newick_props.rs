use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use supertree_tw::phylo::{parse_newick, parse_newick_file, write_newick};
use supertree_tw::{PhyloTree, Taxon};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn newick_round_trip(seed in any::<u64>(), n in 1usize..=15) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taxa: Vec<Taxon> = (0..n).map(|i| Taxon::new(&format!("tx_{i}")).unwrap()).collect();
        let t = PhyloTree::random_binary(&taxa, &mut rng).unwrap();
        let text = write_newick(&t);
        let back = parse_newick(&text).unwrap();
        prop_assert!(back.is_label_isomorphic(&t));
        prop_assert_eq!(write_newick(&back), text);
    }

    #[test]
    fn restriction_is_displayed(seed in any::<u64>(), n in 4usize..=12, keep in 1usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taxa: Vec<Taxon> = (0..n).map(|i| Taxon::new(&format!("t{i}")).unwrap()).collect();
        let t = PhyloTree::random_binary(&taxa, &mut rng).unwrap();
        let r = t.restrict(&taxa[..keep.min(n)]).unwrap();
        prop_assert!(r.is_binary());
        prop_assert!(t.displays(&r).unwrap());
    }

    #[test]
    fn files_keep_tree_order(seed in any::<u64>(), k in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taxa: Vec<Taxon> = (0..6).map(|i| Taxon::new(&format!("t{i}")).unwrap()).collect();
        let trees: Vec<PhyloTree> = (0..k).map(|_| PhyloTree::random_binary(&taxa, &mut rng).unwrap()).collect();
        let text: String = trees.iter().map(|t| format!("# comment\n{}\n", write_newick(t))).collect();
        let back = parse_newick_file(&text).unwrap();
        prop_assert_eq!(back.len(), k);
        for (a, b) in back.iter().zip(&trees) {
            prop_assert!(a.is_label_isomorphic(b));
        }
    }
}
