//! Exhaustive small-instance suites comparing the memoized engine against enumeration.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use locality_core::graph::PortGraph;
use locality_core::lcl::{Label, LclSpec};

use crate::engine::{ClassId, Engine};
use crate::hierarchy::{build_with_rule, search_feasible, Caps, Decision, WParam};
use crate::ptree::{append, brute_fingerprint, complete_labeling, dp_fingerprint, legal_exists_brute, PartialTree, RNode};
use crate::TreeError;

/// Rooted tree in canonical form: children sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shape {
    pub preset: Option<Label>,
    pub kids: Vec<Shape>,
}

impl Shape {
    pub fn leaf() -> Shape {
        Shape { preset: None, kids: Vec::new() }
    }

    pub fn size(&self) -> usize {
        1 + self.kids.iter().map(Shape::size).sum::<usize>()
    }

    pub fn preset_count(&self) -> usize {
        self.preset.is_some() as usize + self.kids.iter().map(Shape::preset_count).sum::<usize>()
    }

    pub fn to_rnode(&self) -> Arc<RNode> {
        RNode::new(self.preset, self.kids.iter().map(Shape::to_rnode).collect())
    }

    fn normalized(mut self) -> Shape {
        self.kids = self.kids.into_iter().map(Shape::normalized).collect();
        self.kids.sort();
        self
    }

    /// Every shape with one more leaf, `cap` children at this node and `delta - 1` below.
    fn grow(&self, cap: usize, delta: usize) -> Vec<Shape> {
        let mut out = Vec::new();
        if self.kids.len() < cap {
            let mut s = self.clone();
            s.kids.push(Shape::leaf());
            out.push(s);
        }
        for i in 0..self.kids.len() {
            for k in self.kids[i].grow(delta - 1, delta) {
                let mut s = self.clone();
                s.kids[i] = k;
                out.push(s);
            }
        }
        out
    }

    /// The shape itself and every way of presetting one vertex.
    pub fn preset_variants(&self, q: usize) -> Vec<Shape> {
        fn go(s: &Shape, q: usize, out: &mut Vec<Shape>) {
            if s.preset.is_none() {
                for l in 0..q {
                    out.push(Shape { preset: Some(l as Label), kids: s.kids.clone() });
                }
            }
            for i in 0..s.kids.len() {
                let mut sub = Vec::new();
                go(&s.kids[i], q, &mut sub);
                for k in sub {
                    let mut t = s.clone();
                    t.kids[i] = k;
                    out.push(t);
                }
            }
        }
        let mut out = vec![self.clone()];
        go(self, q, &mut out);
        let set: BTreeSet<Shape> = out.into_iter().map(Shape::normalized).collect();
        set.into_iter().collect()
    }
}

/// Unlabeled rooted trees with at most `max_n` vertices, root degree at most `root_cap`, other
/// vertices with at most `delta - 1` children.
pub fn rooted_shapes(max_n: usize, root_cap: usize, delta: usize) -> Vec<Shape> {
    let mut all = vec![Shape::leaf()];
    let mut layer = vec![Shape::leaf()];
    for _ in 1..max_n {
        let next: BTreeSet<Shape> = layer.iter().flat_map(|s| s.grow(root_cap, delta)).map(Shape::normalized).collect();
        layer = next.into_iter().collect();
        all.extend(layer.iter().cloned());
    }
    all
}

/// Partially labeled rooted trees with at most `max_unlabeled` unlabeled vertices and at most one
/// preset vertex.
pub fn partial_shapes(max_unlabeled: usize, root_cap: usize, delta: usize, q: usize) -> Vec<Shape> {
    rooted_shapes(max_unlabeled + 1, root_cap, delta)
        .into_iter()
        .flat_map(|s| s.preset_variants(q))
        .filter(|s| s.size() - s.preset_count() <= max_unlabeled)
        .collect()
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub checked: usize,
    pub mismatches: Vec<String>,
    /// Informational counts, e.g. instances where the answer was negative.
    pub notes: BTreeMap<String, usize>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty() && self.checked > 0
    }

    fn fail(&mut self, msg: String) {
        if self.mismatches.len() < 20 {
            self.mismatches.push(msg);
        } else {
            self.mismatches.truncate(20);
            self.mismatches.push("...".into());
        }
    }

    fn note(&mut self, key: &str) {
        *self.notes.entry(key.to_string()).or_default() += 1;
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.checked += other.checked;
        for m in other.mismatches {
            self.fail(m);
        }
        for (k, v) in other.notes {
            *self.notes.entry(k).or_default() += v;
        }
    }
}

/// Memoized class fingerprints against exhaustive ones, for every partially labeled rooted tree
/// with at most `max_unlabeled` unlabeled vertices.
pub fn class_oracle(spec: &LclSpec, delta: usize, max_unlabeled: usize) -> Result<SuiteReport, TreeError> {
    let mut eng = Engine::new(spec, delta)?;
    let mut rep = SuiteReport::default();
    for s in partial_shapes(max_unlabeled, delta, delta, eng.q) {
        let t = PartialTree::from_rnode(&s.to_rnode(), delta, 64)?;
        let c = eng.class_of_tree(&t);
        let memo = eng.class_fp(c);
        let brute = brute_fingerprint(spec, &t)?;
        rep.checked += 1;
        if memo != brute {
            rep.fail(format!("{}: class mismatch for {s:?}", spec.name));
        }
        let r = PartialTree::from_rnode(&eng.class(c).rep.clone(), delta, 64)?;
        if eng.class_of_tree(&r) != c {
            rep.fail(format!("{}: representative of class {c} leaves the class", spec.name));
        }
    }
    Ok(rep)
}

/// Core sequences of rooted trees with total size at most `max_n` and at least two trees.
fn core_sequences(shapes: &[Shape], max_n: usize) -> Vec<Vec<Shape>> {
    let mut out = Vec::new();
    let mut frontier: Vec<(Vec<Shape>, usize)> = vec![(Vec::new(), 0)];
    while let Some((seq, n)) = frontier.pop() {
        if seq.len() >= 2 {
            out.push(seq.clone());
        }
        for s in shapes {
            let m = n + s.size();
            if m <= max_n {
                let mut t = seq.clone();
                t.push(s.clone());
                frontier.push((t, m));
            }
        }
    }
    out
}

/// Memoized type fingerprints against exhaustive ones on bipolar trees with at most
/// `max_unlabeled` unlabeled vertices (one preset at most), and the transition computed through
/// representatives against the direct walk.
pub fn type_oracle(spec: &LclSpec, delta: usize, max_unlabeled: usize) -> Result<SuiteReport, TreeError> {
    let mut eng = Engine::new(spec, delta)?;
    let q = eng.q;
    let mut rep = SuiteReport::default();
    let shapes = rooted_shapes(max_unlabeled, delta - 1, delta);
    for seq in core_sequences(&shapes, max_unlabeled + 1) {
        let mut variants: Vec<Vec<Shape>> = Vec::new();
        if seq.iter().map(Shape::size).sum::<usize>() <= max_unlabeled {
            variants.push(seq.clone());
        }
        for i in 0..seq.len() {
            for v in seq[i].preset_variants(q).into_iter().filter(|v| v.preset_count() == 1) {
                let mut t = seq.clone();
                t[i] = v;
                variants.push(t);
            }
        }
        for var in variants {
            let roots: Vec<Arc<RNode>> = var.iter().map(Shape::to_rnode).collect();
            let Ok(t) = PartialTree::bipolar(&roots, delta, 64) else {
                rep.note("degree-skipped");
                continue;
            };
            let cs = eng.core_classes(&t);
            let ty = eng.type_of_seq(&cs);
            let brute = brute_fingerprint(spec, &t)?;
            rep.checked += 1;
            if eng.type_fp(ty) != &brute {
                rep.fail(format!("{}: type mismatch for {var:?}", spec.name));
            }
            if eng.type_of_seq_direct(&cs) != ty {
                rep.fail(format!("{}: transition depends on the representative for {var:?}", spec.name));
            }
        }
    }
    Ok(rep)
}

/// Attaches a copy of `sub` below vertex `at` of `host`; `None` if the degree bound forbids it.
fn attach(host: &PartialTree, at: usize, sub: &RNode) -> Option<(PortGraph, Vec<Option<Label>>)> {
    if host.g.degree(at) >= host.g.delta() || sub.children.len() + 1 > host.g.delta() {
        return None;
    }
    let mut g = host.g.clone();
    let mut preset = host.preset.clone();
    let r = append(&mut g, &mut preset, sub);
    g.add_edge(at, r).ok()?;
    Some((g, preset))
}

/// Replacing a rooted subtree by another of the same class never changes whether the host has a
/// legal labeling. Subtrees have at most `sub_n` vertices, hosts at most `host_n`.
pub fn replace_oracle(spec: &LclSpec, delta: usize, sub_n: usize, host_n: usize) -> Result<SuiteReport, TreeError> {
    let mut eng = Engine::new(spec, delta)?;
    let q = eng.q;
    let mut rep = SuiteReport::default();
    let mut by_class: BTreeMap<ClassId, Vec<Shape>> = BTreeMap::new();
    for s in partial_shapes(sub_n, delta - 1, delta, q) {
        let t = PartialTree::from_rnode(&s.to_rnode(), delta, 64)?;
        by_class.entry(eng.class_of_tree(&t)).or_default().push(s);
    }
    let contexts: Vec<Shape> = rooted_shapes(host_n - 1, delta, delta).into_iter().flat_map(|s| s.preset_variants(q)).collect();
    for members in by_class.values().filter(|m| m.len() >= 2) {
        let a = &members[0];
        for b in members.iter().skip(1).take(3) {
            let (ra, rb) = (a.to_rnode(), b.to_rnode());
            for ctx in &contexts {
                if ctx.size() + a.size().max(b.size()) > host_n || ctx.preset_count() + a.preset_count().max(b.preset_count()) > 2 {
                    continue;
                }
                let host = PartialTree::from_rnode(&ctx.to_rnode(), delta, 64)?;
                for at in 0..host.n() {
                    let (Some((ga, pa)), Some((gb, pb))) = (attach(&host, at, &ra), attach(&host, at, &rb)) else { continue };
                    let ea = legal_exists_brute(spec, &ga, &pa);
                    let eb = legal_exists_brute(spec, &gb, &pb);
                    rep.checked += 1;
                    if !ea {
                        rep.note("no legal labeling");
                    }
                    if ea != eb {
                        rep.fail(format!("{}: replacing {a:?} by {b:?} in {ctx:?} at {at} changes solvability", spec.name));
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Replacing a bipolar piece by one of the same type keeps the type of the surrounding bipolar
/// tree, by enumeration.
pub fn composition_oracle(spec: &LclSpec, delta: usize, piece_n: usize, max_n: usize) -> Result<SuiteReport, TreeError> {
    let mut eng = Engine::new(spec, delta)?;
    let q = eng.q;
    let mut rep = SuiteReport::default();
    let shapes: Vec<Shape> =
        rooted_shapes(piece_n, delta - 2, delta).into_iter().flat_map(|s| s.preset_variants(q)).collect();
    let mut by_type: BTreeMap<usize, Vec<Vec<Shape>>> = BTreeMap::new();
    for seq in core_sequences(&shapes, piece_n) {
        if seq.iter().map(Shape::preset_count).sum::<usize>() > 1 {
            continue;
        }
        let roots: Vec<Arc<RNode>> = seq.iter().map(Shape::to_rnode).collect();
        let Ok(t) = PartialTree::bipolar(&roots, delta, 64) else { continue };
        by_type.entry(eng.type_of_tree(&t)).or_default().push(seq);
    }
    let sides: Vec<Shape> = rooted_shapes(2, delta - 2, delta);
    for members in by_type.values().filter(|m| m.len() >= 2) {
        let a = &members[0];
        for b in members.iter().skip(1).take(2) {
            for left in &sides {
                for right in &sides {
                    let build = |mid: &[Shape]| -> Vec<Arc<RNode>> {
                        let mut v = vec![left.to_rnode()];
                        v.extend(mid.iter().map(Shape::to_rnode));
                        v.push(right.to_rnode());
                        v
                    };
                    let (ra, rb) = (build(a), build(b));
                    let n = |r: &[Arc<RNode>]| r.iter().map(|x| x.size).sum::<u64>() as usize;
                    if n(&ra).max(n(&rb)) > max_n {
                        continue;
                    }
                    let (Ok(ta), Ok(tb)) = (PartialTree::bipolar(&ra, delta, 64), PartialTree::bipolar(&rb, delta, 64)) else {
                        continue;
                    };
                    rep.checked += 1;
                    if brute_fingerprint(spec, &ta)? != brute_fingerprint(spec, &tb)? {
                        rep.fail(format!("{}: swapping {a:?} for {b:?} changes the host type", spec.name));
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Core sequences over a small alphabet of classes, all lengths in `lens`.
fn class_words(eng: &mut Engine, lens: std::ops::RangeInclusive<usize>) -> Vec<Vec<ClassId>> {
    let s = eng.single();
    let leaf1 = eng.node(None, &[s]);
    let pre = eng.set_preset(s, 0);
    let alpha = [s, leaf1, pre];
    let mut out = Vec::new();
    for len in lens {
        let total = 3usize.pow(len as u32);
        // every word for short lengths, a stride through the rest
        let stride = (total / 200).max(1);
        let mut code = 0;
        while code < total {
            let mut c = code;
            out.push((0..len).map(|_| {
                let x = alpha[c % 3];
                c /= 3;
                x
            }).collect());
            code += stride;
        }
    }
    out
}

/// `x y^j z` has the type of `x y z` for `j` in `0..=3`, checked against the explicit DP
/// fingerprint of the materialized tree.
pub fn pump_oracle(spec: &LclSpec, delta: usize) -> Result<SuiteReport, TreeError> {
    let mut eng = Engine::new(spec, delta)?;
    let mut rep = SuiteReport::default();
    for seq in class_words(&mut eng, 4..=8) {
        let Some((i, j)) = eng.repetition(&seq) else {
            rep.note("no repetition");
            continue;
        };
        let fp = |eng: &Engine, s: &[ClassId]| -> Result<_, TreeError> {
            let roots: Vec<Arc<RNode>> = s.iter().map(|&c| eng.class(c).rep.clone()).collect();
            dp_fingerprint(spec, &PartialTree::bipolar(&roots, delta, 1 << 16)?)
        };
        let base = fp(&eng, &seq)?;
        let ty = eng.type_of_seq(&seq);
        for m in 0..=3 {
            let p = eng.pump_times(&seq, m)?;
            rep.checked += 1;
            if p.len() != seq.len() - (j - i) + m * (j - i) {
                rep.fail(format!("{}: wrong pumped length for {seq:?}", spec.name));
            }
            if fp(&eng, &p)? != base || eng.type_of_seq(&p) != ty {
                rep.fail(format!("{}: pumping {seq:?} {m} times changes the type", spec.name));
            }
        }
        if seq.len() + 1 <= 7 {
            let roots: Vec<Arc<RNode>> = seq.iter().map(|&c| eng.class(c).rep.clone()).collect();
            if let Ok(t) = PartialTree::bipolar(&roots, delta, 64) {
                if (t.n() as f64) * (eng.q as f64).log2() <= 24.0 && brute_fingerprint(spec, &t)? != base {
                    rep.fail(format!("{}: DP and enumeration disagree on {seq:?}", spec.name));
                }
            }
        }
    }
    Ok(rep)
}

/// Converged class sets for `w` in `{ell, ell + 3, 2 ell}` under one fixed feasible rule.
#[derive(Clone, Debug)]
pub struct WReport {
    pub spec: String,
    pub delta: usize,
    pub verdict: &'static str,
    pub class_sets: Vec<(usize, Result<Vec<ClassId>, String>)>,
}

impl WReport {
    pub fn ok(&self) -> bool {
        match self.class_sets.first() {
            None => self.verdict != "undecided",
            Some((_, Ok(first))) => self.class_sets.iter().all(|(_, r)| r.as_ref().is_ok_and(|c| c == first)),
            Some(_) => false,
        }
    }
}

pub fn w_independence(spec: &LclSpec, delta: usize) -> Result<WReport, TreeError> {
    let mut eng = Engine::new(spec, delta)?;
    let caps = Caps::default();
    let d = search_feasible(&mut eng, WParam::ELL, &caps);
    let verdict = d.verdict();
    let mut class_sets = Vec::new();
    if let Decision::Feasible { rule, hierarchy, .. } = d {
        let ell = hierarchy.ell;
        for wp in [WParam::ELL, WParam { mul: 1, add: 3 }, WParam { mul: 2, add: 0 }] {
            let r = build_with_rule(&mut eng, &rule, wp, &caps)
                .map(|h| h.classes().to_vec())
                .map_err(|e| format!("{e:?}"));
            class_sets.push((wp.resolve(ell), r));
        }
    }
    Ok(WReport { spec: spec.name.clone(), delta, verdict, class_sets })
}

/// Materializes every `Extend(Label(H))` of a feasible hierarchy and completes it; the labels
/// written on the middle edge must survive verbatim.
pub fn extend_labels_survive(spec: &LclSpec, delta: usize, limit: u64) -> Result<SuiteReport, TreeError> {
    let mut eng = Engine::new(spec, delta)?;
    let mut rep = SuiteReport::default();
    let Decision::Feasible { hierarchy, .. } = search_feasible(&mut eng, WParam::ELL, &Caps::default()) else {
        return Err(TreeError::Other(format!("{} has no feasible rule", spec.name)));
    };
    for e in &hierarchy.hplus {
        let roots: Vec<Arc<RNode>> = e.seq.iter().map(|&c| eng.class(c).rep.clone()).collect();
        let Ok(t) = PartialTree::bipolar(&roots, delta, limit) else {
            rep.note("too large");
            continue;
        };
        rep.checked += 1;
        let core = t.core_path();
        match complete_labeling(spec, &t, None) {
            Ok(lab) => {
                if [lab[core[e.edge]], lab[core[e.edge + 1]]] != e.labels[..] {
                    rep.fail(format!("{}: middle labels of entry for type {} not kept", spec.name, e.source));
                }
            }
            Err(err) => rep.fail(format!("{}: entry for type {} not completable: {err}", spec.name, e.source)),
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rooted_tree_counts() {
        // unrestricted rooted trees: 1, 1, 2, 4, 9
        let all = rooted_shapes(5, 10, 11);
        let count = |n| all.iter().filter(|s| s.size() == n).count();
        assert_eq!((1..=5).map(count).collect::<Vec<_>>(), vec![1, 1, 2, 4, 9]);
        // binary-branching below the root removes the star-like ones
        let cut = rooted_shapes(5, 3, 3);
        assert!(cut.iter().all(|s| s.kids.len() <= 3));
        assert!(cut.len() < all.len());
    }

    #[test]
    fn preset_variants_count() {
        let path = Shape { preset: None, kids: vec![Shape::leaf()] };
        assert_eq!(path.preset_variants(2).len(), 1 + 2 * 2);
        let cherry = Shape { preset: None, kids: vec![Shape::leaf(), Shape::leaf()] };
        // the two leaves are interchangeable
        assert_eq!(cherry.preset_variants(3).len(), 1 + 3 + 3);
    }
}
