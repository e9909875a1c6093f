use locality_core::algos::decomp::{level_bound, rc_decompose, validate_decomposition};
use locality_core::algos::orient::OrientCycle;
use locality_core::graph::{gen_random_regular, gen_random_tree, gen_ring, PortGraph};
use locality_core::lcl::{builtin, check_global, Labeling, LclSpec};
use locality_core::lll::{mt_resample, orientation_labels, sinkless_system};
use locality_core::sim::{random_ids, run_det};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_roundtrip(n in 1usize..200, seed in any::<u64>()) {
        let g = gen_random_tree(n, 3, seed).unwrap();
        let h = PortGraph::from_text(&g.to_text()).unwrap();
        prop_assert_eq!(h.to_text(), g.to_text());
    }

    #[test]
    fn random_tree_shape(n in 1usize..500, delta in 2usize..6, seed in any::<u64>()) {
        let g = gen_random_tree(n, delta, seed).unwrap();
        prop_assert_eq!(g.n(), n);
        prop_assert!(g.is_tree());
        prop_assert!(g.max_degree() <= delta);
        prop_assert!(g.validate().is_ok());
    }

    #[test]
    fn decomposition_is_valid(n in 2usize..800, ell in 2usize..10, seed in any::<u64>()) {
        let g = gen_random_tree(n, 3, seed).unwrap();
        let d = rc_decompose(&g, ell, &random_ids(n, seed)).unwrap();
        prop_assert!(validate_decomposition(&g, &d).is_ok());
        prop_assert!(d.levels() as f64 <= level_bound(n, ell));
        prop_assert!(d.level.iter().all(|&l| l >= 1 && l <= d.levels().max(1)));
    }

    #[test]
    fn resampling_leaves_no_sink(half in 10usize..60, seed in any::<u64>()) {
        let n = 2 * half;
        let g = gen_random_regular(n, 4, seed).unwrap();
        let (sys, edges) = sinkless_system(&g, &random_ids(n, seed)).unwrap();
        let run = mt_resample(&sys, seed).unwrap();
        let lab: Labeling = orientation_labels(&g, &edges, &run.assignment).into_iter().map(Some).collect();
        let sp = builtin("sinkless-orientation", None).unwrap();
        prop_assert!(check_global(&sp, &g, &lab).is_legal());
    }

    #[test]
    fn ring_orientation_is_legal(n in 3usize..400, ell in 1usize..6, seed in any::<u64>()) {
        let g = gen_ring(n).unwrap();
        let sp = LclSpec::parse(&format!("ell-orientation:{ell}")).unwrap();
        let rep = run_det(&g, &sp, &OrientCycle { ell }, &random_ids(n, seed)).unwrap();
        prop_assert!(rep.outcome.is_legal());
    }
}
