//! Memoized classes of rooted trees and types of bipolar trees for radius-1 star rules.
//!
//! A class is stored as its root preset, the set of admissible root labels and, per child, the
//! child labels compatible with each root label. That form is canonical: two rooted trees get
//! the same key exactly when their fingerprints (`Q` plus extendible set) coincide. Types are
//! computed from a walk state carrying the first and last tree and the relation between the
//! labels of `v_1, v_2, v_{k-1}, v_k`.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use locality_core::lcl::{Label, LclSpec, StarRule};

use crate::canon::{canonicalize, CanonFp, QGraph};
use crate::ptree::{exists_combo, PartialTree, RNode};
use crate::TreeError;

pub type ClassId = usize;
pub type TypeId = usize;

pub const MAX_Q: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChildSig {
    pub preset: Option<Label>,
    /// `allowed[a]`: labels the child may take when the root has label `a`.
    pub allowed: Vec<u16>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassKey {
    pub preset: Option<Label>,
    pub allowed: u16,
    pub children: Vec<ChildSig>,
}

#[derive(Clone, Debug)]
pub struct ClassData {
    pub key: ClassKey,
    pub rep: Arc<RNode>,
    /// `s[p]`: root labels with a consistent completion when the parent has label `p`.
    pub s: Vec<u16>,
    /// `w[p1 * q + p2]`: same with two outside neighbors.
    pub w: Vec<u16>,
    /// Root labels with a completion consistent at the root as well.
    pub free: u16,
}

impl ClassData {
    pub fn degree(&self) -> usize {
        self.key.children.len()
    }

    pub fn good(&self) -> bool {
        self.free != 0
    }
}

/// Walk state of a bipolar tree `T_1 .. T_k`, `k >= 2` (capped at 5 since `Q` stops changing).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TState {
    k: u8,
    first: ClassId,
    last: ClassId,
    p2: Option<Label>,
    pk1: Option<Label>,
    /// Relation over `(x_1, x_2, x_{k-1}, x_k)` satisfiable with every core vertex strictly
    /// between the poles consistent.
    rel: [u64; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prefix {
    Single(ClassId),
    Type(TypeId),
}

#[derive(Clone, Debug)]
pub struct TypeData {
    pub fp: CanonFp,
    rep: TState,
}

pub struct Engine {
    pub spec: LclSpec,
    pub rule: StarRule,
    pub q: usize,
    pub delta: usize,
    classes: Vec<ClassData>,
    class_ix: HashMap<ClassKey, ClassId>,
    types: Vec<TypeData>,
    type_ix: HashMap<CanonFp, TypeId>,
    state_ix: HashMap<TState, TypeId>,
    trans: HashMap<(Prefix, ClassId), TypeId>,
}

fn bits(m: u16) -> impl Iterator<Item = usize> {
    (0..16).filter(move |&i| m >> i & 1 == 1)
}

impl Engine {
    pub fn new(spec: &LclSpec, delta: usize) -> Result<Engine, TreeError> {
        let rule = spec.star_rule().filter(|_| spec.radius == 1).ok_or_else(|| TreeError::Unsupported(spec.name.clone()))?;
        if rule.q > MAX_Q || rule.q == 0 {
            return Err(TreeError::Unsupported(format!("{} (alphabet size {})", spec.name, rule.q)));
        }
        if delta < 2 {
            return Err(TreeError::Other("delta must be at least 2".into()));
        }
        Ok(Engine {
            spec: spec.clone(),
            rule,
            q: rule.q,
            delta,
            classes: Vec::new(),
            class_ix: HashMap::new(),
            types: Vec::new(),
            type_ix: HashMap::new(),
            state_ix: HashMap::new(),
            trans: HashMap::new(),
        })
    }

    pub fn class(&self, c: ClassId) -> &ClassData {
        &self.classes[c]
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    pub fn type_fp(&self, t: TypeId) -> &CanonFp {
        &self.types[t].fp
    }

    fn full(&self) -> u16 {
        ((1u32 << self.q) - 1) as u16
    }

    fn sig(&self, d: ClassId) -> ChildSig {
        ChildSig { preset: self.classes[d].key.preset, allowed: self.classes[d].s.clone() }
    }

    /// Root labels `x` such that some admissible child labels make the root consistent
    /// together with the `extra` neighbors.
    fn extra_ok(&self, key: &ClassKey, extra: &[Label]) -> u16 {
        let mut m = 0;
        for x in bits(key.allowed) {
            let masks: Vec<u16> = key.children.iter().map(|c| c.allowed[x]).collect();
            let mut nb = extra.to_vec();
            if exists_combo(self.rule, x as Label, &mut nb, &masks) {
                m |= 1 << x;
            }
        }
        m
    }

    fn intern(&mut self, preset: Option<Label>, mut children: Vec<ChildSig>, rep: Arc<RNode>) -> ClassId {
        let q = self.q;
        let mut allowed = preset.map_or(self.full(), |p| 1 << p);
        for a in 0..q {
            if children.iter().any(|c| c.allowed[a] == 0) {
                allowed &= !(1 << a);
            }
        }
        for c in children.iter_mut() {
            for a in 0..q {
                if allowed >> a & 1 == 0 {
                    c.allowed[a] = 0;
                }
            }
        }
        children.sort();
        let key = ClassKey { preset, allowed, children };
        if let Some(&id) = self.class_ix.get(&key) {
            if rep.size < self.classes[id].rep.size {
                self.classes[id].rep = rep;
            }
            return id;
        }
        let s = (0..q).map(|p| self.extra_ok(&key, &[p as Label])).collect();
        let mut w = vec![0; q * q];
        for p1 in 0..q {
            for p2 in 0..q {
                w[p1 * q + p2] = self.extra_ok(&key, &[p1 as Label, p2 as Label]);
            }
        }
        let free = self.extra_ok(&key, &[]);
        let id = self.classes.len();
        self.class_ix.insert(key.clone(), id);
        self.classes.push(ClassData { key, rep, s, w, free });
        id
    }

    /// Class of a fresh root with the given preset and child subtrees.
    pub fn node(&mut self, preset: Option<Label>, kids: &[ClassId]) -> ClassId {
        let sigs = kids.iter().map(|&d| self.sig(d)).collect();
        let rep = RNode::new(preset, kids.iter().map(|&d| self.classes[d].rep.clone()).collect());
        self.intern(preset, sigs, rep)
    }

    pub fn single(&mut self) -> ClassId {
        self.node(None, &[])
    }

    /// Class after hanging one more subtree below the root.
    pub fn add_child(&mut self, c: ClassId, d: ClassId) -> ClassId {
        let mut sigs = self.classes[c].key.children.clone();
        sigs.push(self.sig(d));
        let rep = self.classes[c].rep.with_child(self.classes[d].rep.clone());
        let preset = self.classes[c].key.preset;
        self.intern(preset, sigs, rep)
    }

    pub fn set_preset(&mut self, c: ClassId, l: Label) -> ClassId {
        let sigs = self.classes[c].key.children.clone();
        let rep = self.classes[c].rep.with_preset(l);
        self.intern(Some(l), sigs, rep)
    }

    /// Class of the tree rooted at `root`, ignoring the listed neighbors of the root.
    pub fn class_of_rooted(&mut self, t: &PartialTree, root: usize, skip: &[usize]) -> ClassId {
        // post-order without recursion
        let n = t.n();
        let mut parent = vec![usize::MAX; n];
        let mut order = vec![root];
        parent[root] = root;
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            for u in t.g.neighbors(v) {
                if parent[u] == usize::MAX && !skip.contains(&u) {
                    parent[u] = v;
                    order.push(u);
                }
            }
        }
        let mut cls = vec![usize::MAX; n];
        for &v in order.iter().rev() {
            let kids: Vec<ClassId> =
                t.g.neighbors(v).filter(|&u| u != parent[v] && parent[u] == v).map(|u| cls[u]).collect();
            cls[v] = self.node(t.preset[v], &kids);
        }
        cls[root]
    }

    /// Class of a unipolar tree (rooted at its pole).
    pub fn class_of_tree(&mut self, t: &PartialTree) -> ClassId {
        self.class_of_rooted(t, t.poles[0], &[])
    }

    /// Classes of the trees hanging at each core vertex of a bipolar tree.
    pub fn core_classes(&mut self, t: &PartialTree) -> Vec<ClassId> {
        let core = t.core_path();
        (0..core.len())
            .map(|i| {
                let mut skip = Vec::new();
                if i > 0 {
                    skip.push(core[i - 1]);
                }
                if i + 1 < core.len() {
                    skip.push(core[i + 1]);
                }
                self.class_of_rooted(t, core[i], &skip)
            })
            .collect()
    }

    pub fn type_of_tree(&mut self, t: &PartialTree) -> TypeId {
        let seq = self.core_classes(t);
        self.type_of_seq(&seq)
    }

    /// Canonical fingerprint of a class, rebuilt from its key.
    pub fn class_fp(&self, c: ClassId) -> CanonFp {
        let key = &self.classes[c].key;
        let d = key.children.len();
        let mut presets = vec![key.preset];
        presets.extend(key.children.iter().map(|s| s.preset));
        let qg = QGraph { n: d + 1, poles: 1, edges: (1..=d).map(|i| (0, i)).collect(), presets };
        let mut ext = Vec::new();
        for a in bits(key.allowed) {
            let masks: Vec<u16> = key.children.iter().map(|s| s.allowed[a]).collect();
            for_each_product(&masks, &mut |b| {
                let mut t = vec![a as Label];
                t.extend_from_slice(b);
                ext.push(t);
            });
        }
        canonicalize(&qg, &ext, self.q as u64).0
    }

    fn rel_ix(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.q + b) * self.q + c) * self.q + d
    }

    fn init2(&self, c1: ClassId, c2: ClassId) -> TState {
        let mut rel = [0u64; 4];
        for a in 0..self.q {
            for b in 0..self.q {
                let i = self.rel_ix(a, b, a, b);
                rel[i / 64] |= 1 << (i % 64);
            }
        }
        TState { k: 2, first: c1, last: c2, p2: self.classes[c2].key.preset, pk1: self.classes[c1].key.preset, rel }
    }

    fn push(&self, st: &TState, c: ClassId) -> TState {
        let q = self.q;
        let w = &self.classes[st.last].w;
        let mut rel = [0u64; 4];
        for a in 0..q {
            for b in 0..q {
                for cc in 0..q {
                    for d in 0..q {
                        let i = self.rel_ix(a, b, cc, d);
                        if st.rel[i / 64] >> (i % 64) & 1 == 0 {
                            continue;
                        }
                        for e in 0..q {
                            if w[cc * q + e] >> d & 1 == 1 {
                                let j = self.rel_ix(a, b, d, e);
                                rel[j / 64] |= 1 << (j % 64);
                            }
                        }
                    }
                }
            }
        }
        let last_preset = self.classes[st.last].key.preset;
        TState {
            k: (st.k + 1).min(5),
            first: st.first,
            last: c,
            p2: if st.k == 2 { last_preset } else { st.p2 },
            pk1: last_preset,
            rel,
        }
    }

    fn state_fp(&self, st: &TState) -> CanonFp {
        let q = self.q;
        let f = &self.classes[st.first].key;
        let l = &self.classes[st.last].key;
        let (ds, dt) = (f.children.len(), l.children.len());
        let mut presets = vec![f.preset, l.preset];
        let mut edges = Vec::new();
        for (i, s) in f.children.iter().enumerate() {
            presets.push(s.preset);
            edges.push((0, 2 + i));
        }
        for (i, s) in l.children.iter().enumerate() {
            presets.push(s.preset);
            edges.push((1, 2 + ds + i));
        }
        let base = 2 + ds + dt;
        let extra = match st.k {
            2 => {
                edges.push((0, 1));
                0
            }
            3 => {
                presets.push(st.p2);
                edges.push((0, base));
                edges.push((1, base));
                1
            }
            k => {
                presets.push(st.p2);
                presets.push(st.pk1);
                edges.push((0, base));
                edges.push((1, base + 1));
                if k == 4 {
                    edges.push((base, base + 1));
                }
                2
            }
        };
        let n = base + extra;
        let mut ext = Vec::new();
        for a in bits(f.allowed) {
            for d in bits(l.allowed) {
                let ms: Vec<u16> = f.children.iter().map(|s| s.allowed[a]).collect();
                let mt: Vec<u16> = l.children.iter().map(|s| s.allowed[d]).collect();
                for b in 0..q {
                    for c in 0..q {
                        let i = self.rel_ix(a, b, c, d);
                        if st.rel[i / 64] >> (i % 64) & 1 == 0 {
                            continue;
                        }
                        let mid: Vec<Label> = match extra {
                            0 => vec![],
                            1 => vec![b as Label],
                            _ => vec![b as Label, c as Label],
                        };
                        for_each_product(&ms, &mut |bs| {
                            for_each_product(&mt, &mut |bt| {
                                let mut t = vec![a as Label, d as Label];
                                t.extend_from_slice(bs);
                                t.extend_from_slice(bt);
                                t.extend_from_slice(&mid);
                                ext.push(t);
                            })
                        });
                    }
                }
            }
        }
        let qg = QGraph { n, poles: 2, edges, presets };
        canonicalize(&qg, &ext, q as u64).0
    }

    fn type_of_state(&mut self, st: TState) -> TypeId {
        if let Some(&t) = self.state_ix.get(&st) {
            return t;
        }
        let fp = self.state_fp(&st);
        let t = match self.type_ix.get(&fp) {
            Some(&t) => t,
            None => {
                let t = self.types.len();
                self.type_ix.insert(fp.clone(), t);
                self.types.push(TypeData { fp, rep: st.clone() });
                t
            }
        };
        self.state_ix.insert(st, t);
        t
    }

    /// The type transition: type of `prefix ∘ c`, computed from a representative of `prefix`.
    pub fn step(&mut self, p: Prefix, c: ClassId) -> TypeId {
        if let Some(&t) = self.trans.get(&(p, c)) {
            return t;
        }
        let st = match p {
            Prefix::Single(c1) => self.init2(c1, c),
            Prefix::Type(t) => {
                let rep = self.types[t].rep.clone();
                self.push(&rep, c)
            }
        };
        let t = self.type_of_state(st);
        self.trans.insert((p, c), t);
        t
    }

    /// Prefix states after 1, 2, ..., k trees.
    pub fn prefixes(&mut self, seq: &[ClassId]) -> Vec<Prefix> {
        let mut out = Vec::with_capacity(seq.len());
        let mut p = Prefix::Single(seq[0]);
        out.push(p);
        for &c in &seq[1..] {
            p = Prefix::Type(self.step(p, c));
            out.push(p);
        }
        out
    }

    pub fn type_of_seq(&mut self, seq: &[ClassId]) -> TypeId {
        assert!(seq.len() >= 2, "a bipolar tree has at least two core vertices");
        match *self.prefixes(seq).last().unwrap() {
            Prefix::Type(t) => t,
            Prefix::Single(_) => unreachable!(),
        }
    }

    /// Type from walking the actual states of `seq`, without going through representatives.
    pub fn type_of_seq_direct(&mut self, seq: &[ClassId]) -> TypeId {
        let mut st = self.init2(seq[0], seq[1]);
        for &c in &seq[2..] {
            st = self.push(&st, c);
        }
        self.type_of_state(st)
    }

    /// Types reachable from single trees over `alpha`.
    pub fn reachable_types(&mut self, alpha: &[ClassId], cap: usize) -> Result<Vec<TypeId>, TreeError> {
        let mut seen: HashSet<TypeId> = HashSet::new();
        let mut order = Vec::new();
        let mut frontier: Vec<Prefix> = alpha.iter().map(|&c| Prefix::Single(c)).collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in frontier {
                for &c in alpha {
                    let t = self.step(p, c);
                    if seen.insert(t) {
                        order.push(t);
                        if order.len() > cap {
                            return Err(TreeError::Cap(format!("more than {cap} types")));
                        }
                        next.push(Prefix::Type(t));
                    }
                }
            }
            frontier = next;
        }
        Ok(order)
    }

    /// First repetition `(i, j)` among the type prefixes: lengths `2 <= i < j` with equal types.
    pub fn repetition(&mut self, seq: &[ClassId]) -> Option<(usize, usize)> {
        let pre = self.prefixes(seq);
        let mut first: HashMap<Prefix, usize> = HashMap::new();
        for (idx, p) in pre.iter().enumerate().skip(1) {
            let len = idx + 1;
            if let Some(&i) = first.get(p) {
                return Some((i, len));
            }
            first.insert(*p, len);
        }
        None
    }

    /// `x y^m z` for the first repetition of `seq`.
    pub fn pump_times(&mut self, seq: &[ClassId], m: usize) -> Result<Vec<ClassId>, TreeError> {
        let (i, j) = self.repetition(seq).ok_or(TreeError::NoRepeat)?;
        let mut out = seq[..i].to_vec();
        for _ in 0..m {
            out.extend_from_slice(&seq[i..j]);
        }
        out.extend_from_slice(&seq[j..]);
        Ok(out)
    }

    /// Pumps `seq` to a length in `[w, w + ell_pump]` without changing its type.
    pub fn pump(&mut self, seq: &[ClassId], w: usize, ell_pump: usize) -> Result<Vec<ClassId>, TreeError> {
        if seq.len() < ell_pump {
            return Err(TreeError::TooShort { len: seq.len(), need: ell_pump });
        }
        let mut cur = seq.to_vec();
        while cur.len() > w + ell_pump {
            cur = self.pump_times(&cur, 0)?;
        }
        if cur.len() >= w {
            return Ok(cur);
        }
        let (i, j) = self.repetition(&cur).ok_or(TreeError::NoRepeat)?;
        let m = (w - cur.len()).div_ceil(j - i);
        let out = self.pump_times(&cur, 1 + m)?;
        debug_assert!(out.len() >= w && out.len() <= w + ell_pump.max(j - i));
        Ok(out)
    }

    /// Indices of the two trees holding the middle edge `{v_⌊x/2⌋, v_⌊x/2⌋+1}`.
    pub fn middle(x: usize) -> (usize, usize) {
        (x / 2 - 1, x / 2)
    }

    /// Presets the two endpoints of the middle edge.
    pub fn label_seq(&mut self, seq: &[ClassId], labels: &[Label]) -> Vec<ClassId> {
        let (a, b) = Engine::middle(seq.len());
        let mut out = seq.to_vec();
        out[a] = self.set_preset(seq[a], labels[0]);
        out[b] = self.set_preset(seq[b], labels[1]);
        out
    }

    /// `Pump(X, w) ∘ Y ∘ Pump(Z, w)`; also returns the index of the first tree of `Y`.
    pub fn extend(&mut self, seq: &[ClassId], w: usize, ell_pump: usize) -> Result<(Vec<ClassId>, usize), TreeError> {
        let x = seq.len();
        let lo = 2 * (1 + ell_pump);
        if x < lo || x > 2 * w {
            return Err(TreeError::BadLength { x, lo, hi: 2 * w });
        }
        let (a, b) = Engine::middle(x);
        let xs = self.pump(&seq[..a], w, ell_pump)?;
        let zs = self.pump(&seq[b + 1..], w, ell_pump)?;
        let e = xs.len();
        let mut out = xs;
        out.extend_from_slice(&seq[a..=b]);
        out.extend(zs);
        Ok((out, e))
    }

    /// Classes of a bipolar tree seen as rooted at its first and at its last pole.
    pub fn views(&mut self, seq: &[ClassId]) -> (ClassId, ClassId) {
        let k = seq.len();
        let mut cur = seq[k - 1];
        for m in (0..k - 1).rev() {
            cur = self.add_child(seq[m], cur);
        }
        let vs = cur;
        let mut cur = seq[0];
        for &c in &seq[1..] {
            cur = self.add_child(c, cur);
        }
        (vs, cur)
    }

    /// Root labels of class `c` admissible with outside neighbor labels `extra`.
    pub fn admissible(&self, c: ClassId, extra: &[Label]) -> u16 {
        let d = &self.classes[c];
        match extra {
            [] => d.free,
            [p] => d.s[*p as usize],
            [p1, p2] => d.w[*p1 as usize * self.q + *p2 as usize],
            _ => self.extra_ok(&d.key, extra),
        }
    }
}

pub(crate) fn for_each_product(masks: &[u16], f: &mut dyn FnMut(&[Label])) {
    fn go(masks: &[u16], cur: &mut Vec<Label>, f: &mut dyn FnMut(&[Label])) {
        match masks.split_first() {
            None => f(cur),
            Some((&m, rest)) => {
                for b in bits(m) {
                    cur.push(b as Label);
                    go(rest, cur, f);
                    cur.pop();
                }
            }
        }
    }
    go(masks, &mut Vec::new(), f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptree::{brute_fingerprint, dp_fingerprint};
    use locality_core::lcl::builtin;

    fn eng(name: &str, p: Option<usize>) -> Engine {
        Engine::new(&builtin(name, p).unwrap(), 3).unwrap()
    }

    fn path_seq(e: &mut Engine, k: usize) -> Vec<ClassId> {
        let s = e.single();
        vec![s; k]
    }

    #[test]
    fn rejects_other_specs() {
        assert!(Engine::new(&builtin("hier", Some(2)).unwrap(), 3).is_err());
        assert!(Engine::new(&builtin("sinkless-orientation", None).unwrap(), 3).is_err());
    }

    #[test]
    fn single_vertex_class() {
        let mut e = eng("two-coloring", None);
        let s = e.single();
        assert_eq!(e.class(s).key.allowed, 0b11);
        assert!(e.class(s).good());
        let t = PartialTree::from_rnode(&RNode::leaf(), 3, 10).unwrap();
        assert_eq!(e.class_fp(s), brute_fingerprint(&e.spec.clone(), &t).unwrap());
    }

    #[test]
    fn path_types_two_coloring_period() {
        let mut e = eng("two-coloring", None);
        let types: Vec<TypeId> = (2..12).map(|k| {
            let s = path_seq(&mut e, k);
            e.type_of_seq(&s)
        }).collect();
        // Q differs for k = 2, 3, 4; from k = 5 on only the parity remains
        for k in 5..10 {
            assert_eq!(types[k - 2], types[k]);
            assert_ne!(types[k - 2], types[k - 1]);
        }
    }

    #[test]
    fn step_from_path_two() {
        let mut e = eng("proper-coloring", Some(3));
        let s = e.single();
        let t2 = e.type_of_seq(&[s, s]);
        let t3 = e.step(Prefix::Type(t2), s);
        assert_eq!(t3, e.type_of_seq(&[s, s, s]));
    }

    #[test]
    fn memo_matches_brute_on_paths() {
        for (name, p) in [("two-coloring", None), ("proper-coloring", Some(3)), ("all-sigma", None)] {
            let mut e = eng(name, p);
            let spec = e.spec.clone();
            for k in 2..8 {
                let roots: Vec<_> = (0..k).map(|_| RNode::leaf()).collect();
                let t = PartialTree::bipolar(&roots, 3, 100).unwrap();
                let ty = e.type_of_tree(&t);
                assert_eq!(e.type_fp(ty), &dp_fingerprint(&spec, &t).unwrap(), "{name} k={k}");
            }
        }
    }

    #[test]
    fn pumping_keeps_type() {
        let mut e = eng("two-coloring", None);
        let s = e.single();
        let leaf2 = e.node(None, &[s]);
        let seq = vec![s, leaf2, s, s, leaf2, s, s, s, leaf2];
        let ty = e.type_of_seq(&seq);
        for m in 0..4 {
            let p = e.pump_times(&seq, m).unwrap();
            assert_eq!(e.type_of_seq(&p), ty);
            assert_eq!(e.type_of_seq_direct(&p), ty);
        }
        let long = e.pump(&seq, 30, 8).unwrap();
        assert!(long.len() >= 30 && long.len() <= 38);
        assert_eq!(e.type_of_seq(&long), ty);
    }

    #[test]
    fn views_match_explicit_classes() {
        let mut e = eng("proper-coloring", Some(3));
        let s = e.single();
        let a = e.node(None, &[s]);
        let pre = e.set_preset(a, 2);
        let seq = vec![s, a, pre, s, a];
        let (vs, vt) = e.views(&seq);
        let roots: Vec<_> = seq.iter().map(|&c| e.class(c).rep.clone()).collect();
        let t = PartialTree::bipolar(&roots, 3, 100).unwrap();
        let cs = e.class_of_rooted(&t, t.poles[0], &[]);
        let ct = e.class_of_rooted(&t, t.poles[1], &[]);
        assert_eq!((vs, vt), (cs, ct));
    }
}
