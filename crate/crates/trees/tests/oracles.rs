use std::time::Instant;

use locality_core::lcl::{builtin, LclSpec};
use locality_trees::checks::{class_oracle, composition_oracle, extend_labels_survive, pump_oracle, replace_oracle, type_oracle, w_independence};

fn catalog() -> Vec<LclSpec> {
    vec![builtin("all-sigma", None).unwrap(), builtin("two-coloring", None).unwrap(), builtin("proper-coloring", Some(3)).unwrap()]
}

#[test]
fn class_fingerprints_match_enumeration() {
    for spec in catalog() {
        for delta in 2..=3 {
            let t = Instant::now();
            let r = class_oracle(&spec, delta, 7).unwrap();
            eprintln!("{} Δ={delta}: {} trees in {:?}", spec.name, r.checked, t.elapsed());
            assert!(r.ok(), "{:?}", r.mismatches);
        }
    }
}

#[test]
fn type_fingerprints_match_enumeration() {
    for spec in catalog() {
        for delta in 2..=3 {
            let t = Instant::now();
            let r = type_oracle(&spec, delta, 7).unwrap();
            eprintln!("{} Δ={delta}: {} bipolar trees in {:?}", spec.name, r.checked, t.elapsed());
            assert!(r.ok(), "{:?}", r.mismatches);
        }
    }
}

#[test]
fn replace_keeps_solvability() {
    for spec in catalog() {
        let t = Instant::now();
        let r = replace_oracle(&spec, 3, 4, 10).unwrap();
        eprintln!("{}: {} hosts, {:?} in {:?}", spec.name, r.checked, r.notes, t.elapsed());
        assert!(r.ok(), "{:?}", r.mismatches);
    }
}

#[test]
fn composition_keeps_type() {
    for spec in catalog() {
        let r = composition_oracle(&spec, 3, 4, 8).unwrap();
        eprintln!("{}: {} hosts", spec.name, r.checked);
        assert!(r.ok(), "{:?}", r.mismatches);
    }
}

#[test]
fn pumping_keeps_type() {
    for spec in catalog() {
        let r = pump_oracle(&spec, 3).unwrap();
        assert!(r.ok(), "{:?}", r.mismatches);
    }
}

#[test]
fn converged_classes_do_not_depend_on_w() {
    for spec in [builtin("all-sigma", None).unwrap(), builtin("proper-coloring", Some(3)).unwrap()] {
        let r = w_independence(&spec, 3).unwrap();
        assert_eq!(r.class_sets.len(), 3);
        assert!(r.ok(), "{r:?}");
    }
    let r = w_independence(&builtin("two-coloring", None).unwrap(), 3).unwrap();
    assert!(r.class_sets.is_empty() && r.ok());
}

#[test]
fn middle_labels_survive_completion() {
    for spec in [builtin("all-sigma", None).unwrap(), builtin("proper-coloring", Some(3)).unwrap()] {
        let r = extend_labels_survive(&spec, 3, 200_000).unwrap();
        assert!(r.ok(), "{:?} {:?}", r.mismatches, r.notes);
    }
}
