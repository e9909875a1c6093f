use std::sync::Arc;

use locality_core::lcl::builtin;
use locality_trees::ptree::dp_fingerprint;
use locality_trees::{Engine, PartialTree, RNode};
use proptest::prelude::*;

/// Random rooted tree with branching at most 2 below the root, as a nested child list.
fn arb_tree(depth: u32) -> impl Strategy<Value = Arc<RNode>> {
    let leaf = prop::option::of(0u32..3).prop_map(|p| RNode::new(p.map(|x| x as _), vec![]));
    leaf.prop_recursive(depth, 12, 2, |inner| {
        (prop::option::weighted(0.2, 0u32..3), prop::collection::vec(inner, 0..=2))
            .prop_map(|(p, kids)| RNode::new(p.map(|x| x as _), kids))
    })
}

fn mirrored(t: &RNode) -> Arc<RNode> {
    RNode::new(t.preset, t.children.iter().rev().map(|c| mirrored(c)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn class_ignores_child_order(t in arb_tree(3)) {
        let mut e = Engine::new(&builtin("proper-coloring", Some(3)).unwrap(), 3).unwrap();
        let a = PartialTree::from_rnode(&t, 3, 1000).unwrap();
        let b = PartialTree::from_rnode(&mirrored(&t), 3, 1000).unwrap();
        prop_assert_eq!(e.class_of_tree(&a), e.class_of_tree(&b));
    }

    #[test]
    fn transition_is_well_defined(core in prop::collection::vec(arb_tree(2), 2..7)) {
        let spec = builtin("proper-coloring", Some(3)).unwrap();
        let mut e = Engine::new(&spec, 3).unwrap();
        let Ok(t) = PartialTree::bipolar(&core, 3, 1000) else { return Ok(()) };
        let cs = e.core_classes(&t);
        let ty = e.type_of_seq(&cs);
        prop_assert_eq!(e.type_of_seq_direct(&cs), ty);
        // swap each tree for its class representative
        let reps: Vec<_> = cs.iter().map(|&c| e.class(c).rep.clone()).collect();
        let r = PartialTree::bipolar(&reps, 3, 1000).unwrap();
        prop_assert_eq!(e.type_of_tree(&r), ty);
        prop_assert_eq!(&dp_fingerprint(&spec, &r).unwrap(), &dp_fingerprint(&spec, &t).unwrap());
    }

    #[test]
    fn pump_stays_in_window(core in prop::collection::vec(0usize..2, 12..40), w in 10usize..60) {
        let mut e = Engine::new(&builtin("two-coloring", None).unwrap(), 3).unwrap();
        let s = e.single();
        let alpha = [s, e.node(None, &[s])];
        let seq: Vec<_> = core.iter().map(|&i| alpha[i]).collect();
        let ty = e.type_of_seq(&seq);
        let lp = e.reachable_types(&alpha, 1000).unwrap().len() + 2;
        prop_assume!(seq.len() >= lp);
        let p = e.pump(&seq, w, lp).unwrap();
        prop_assert!(p.len() >= w && p.len() <= w + lp);
        prop_assert_eq!(e.type_of_seq(&p), ty);
    }
}
