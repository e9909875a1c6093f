//! Explicit partially labeled trees, the pole tripartition, and exhaustive or DP-based
//! extendibility used as an independent route to the memoized engine.

use std::collections::VecDeque;
use std::sync::Arc;

use locality_core::graph::{induced_ball, Context, PortGraph};
use locality_core::lcl::{Label, LclSpec, StarRule};

use crate::canon::{canonicalize, CanonFp, QGraph};
use crate::TreeError;

/// Shared rooted tree. Subtrees are reference counted so repeated pieces cost nothing.
#[derive(Debug)]
pub struct RNode {
    pub preset: Option<Label>,
    pub children: Vec<Arc<RNode>>,
    /// Vertex count, saturating.
    pub size: u64,
}

impl RNode {
    pub fn new(preset: Option<Label>, children: Vec<Arc<RNode>>) -> Arc<RNode> {
        let size = children.iter().fold(1u64, |a, c| a.saturating_add(c.size));
        Arc::new(RNode { preset, children, size })
    }

    pub fn leaf() -> Arc<RNode> {
        RNode::new(None, Vec::new())
    }

    pub fn with_preset(&self, l: Label) -> Arc<RNode> {
        RNode::new(Some(l), self.children.clone())
    }

    pub fn with_child(&self, c: Arc<RNode>) -> Arc<RNode> {
        let mut ch = self.children.clone();
        ch.push(c);
        RNode::new(self.preset, ch)
    }
}

/// A tree with per-vertex preset labels and one or two poles.
#[derive(Clone, Debug)]
pub struct PartialTree {
    pub g: PortGraph,
    pub preset: Vec<Option<Label>>,
    pub poles: Vec<usize>,
}

pub(crate) fn append(g: &mut PortGraph, preset: &mut Vec<Option<Label>>, root: &RNode) -> usize {
    let r = g.add_vertex();
    preset.push(root.preset);
    let mut stack: Vec<(usize, &RNode)> = vec![(r, root)];
    while let Some((v, node)) = stack.pop() {
        for c in &node.children {
            let u = g.add_vertex();
            preset.push(c.preset);
            g.add_edge(v, u).expect("degree within bound");
            stack.push((u, c));
        }
    }
    r
}

impl PartialTree {
    pub fn from_rnode(root: &RNode, delta: usize, limit: u64) -> Result<PartialTree, TreeError> {
        if root.size > limit {
            return Err(TreeError::TooLarge(root.size));
        }
        let mut g = PortGraph::new(0, delta);
        let mut preset = Vec::new();
        let r = append(&mut g, &mut preset, root);
        Ok(PartialTree { g, preset, poles: vec![r] })
    }

    /// Core path through the given roots; poles are the first and last root.
    pub fn bipolar(roots: &[Arc<RNode>], delta: usize, limit: u64) -> Result<PartialTree, TreeError> {
        let total = roots.iter().fold(0u64, |a, r| a.saturating_add(r.size));
        if total > limit {
            return Err(TreeError::TooLarge(total));
        }
        let mut g = PortGraph::new(0, delta);
        let mut preset = Vec::new();
        let mut core = Vec::new();
        for r in roots {
            core.push(append(&mut g, &mut preset, r));
        }
        for w in core.windows(2) {
            g.add_edge(w[0], w[1]).map_err(|e| TreeError::Other(e.to_string()))?;
        }
        Ok(PartialTree { g, preset, poles: vec![core[0], *core.last().unwrap()] })
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }

    /// Vertices on the path between the two poles, in order.
    pub fn core_path(&self) -> Vec<usize> {
        let (s, t) = (self.poles[0], self.poles[self.poles.len() - 1]);
        let mut parent = vec![usize::MAX; self.n()];
        let mut q = VecDeque::from([s]);
        parent[s] = s;
        while let Some(v) = q.pop_front() {
            for u in self.g.neighbors(v) {
                if parent[u] == usize::MAX {
                    parent[u] = v;
                    q.push_back(u);
                }
            }
        }
        let mut path = vec![t];
        while *path.last().unwrap() != s {
            path.push(parent[*path.last().unwrap()]);
        }
        path.reverse();
        path
    }
}

/// `D1 = N^{r-1}(poles)`, `D2 = N^r(D1) - D1`, `D3` the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tripartition {
    pub d1: Vec<usize>,
    pub d2: Vec<usize>,
    pub d3: Vec<usize>,
}

pub fn tripartition(t: &PartialTree, r: usize) -> Tripartition {
    assert!(r >= 1);
    let mut dist = vec![usize::MAX; t.n()];
    let mut q = VecDeque::new();
    for &p in &t.poles {
        dist[p] = 0;
        q.push_back(p);
    }
    while let Some(v) = q.pop_front() {
        for u in t.g.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                q.push_back(u);
            }
        }
    }
    let mut out = Tripartition { d1: vec![], d2: vec![], d3: vec![] };
    for v in 0..t.n() {
        match dist[v] {
            d if d < r => out.d1.push(v),
            d if d < 2 * r => out.d2.push(v),
            _ => out.d3.push(v),
        }
    }
    out
}

/// `Q` = the subgraph induced by `D1 ∪ D2`, poles first in pole order, then by vertex index.
pub fn q_graph(t: &PartialTree, tri: &Tripartition) -> (QGraph, Vec<usize>) {
    let mut order: Vec<usize> = t.poles.clone();
    let mut rest: Vec<usize> = tri.d1.iter().chain(&tri.d2).copied().filter(|v| !t.poles.contains(v)).collect();
    rest.sort_unstable();
    order.extend(rest);
    let mut pos = vec![usize::MAX; t.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut edges = Vec::new();
    for (a, b) in t.g.edges() {
        if pos[a] != usize::MAX && pos[b] != usize::MAX {
            edges.push((pos[a], pos[b]));
        }
    }
    let presets = order.iter().map(|&v| t.preset[v]).collect();
    (QGraph { n: order.len(), poles: t.poles.len(), edges, presets }, order)
}

/// All labelings of `Q` that extend to a labeling of `t` respecting presets and locally
/// consistent on `D2 ∪ D3`, by enumerating every labeling of `t`.
pub fn extendible_set_brute(spec: &LclSpec, t: &PartialTree) -> Result<(QGraph, Vec<Vec<Label>>), TreeError> {
    let q = spec.alphabet_size(t.g.delta()) as u64;
    let n = t.n();
    if (n as f64) * (q as f64).log2() > 24.0 {
        return Err(TreeError::TooLarge(n as u64));
    }
    let tri = tripartition(t, spec.radius);
    let (qg, order) = q_graph(t, &tri);
    let checked: Vec<usize> = tri.d2.iter().chain(&tri.d3).copied().collect();
    let balls: Vec<_> = checked.iter().map(|&v| induced_ball(&t.g, v, spec.radius, &Context::default())).collect();
    let mut lab = vec![0 as Label; n];
    let mut out = std::collections::BTreeSet::new();
    let total = q.pow(n as u32);
    'outer: for code in 0..total {
        let mut c = code;
        for v in 0..n {
            lab[v] = (c % q) as Label;
            c /= q;
            if t.preset[v].is_some_and(|p| p != lab[v]) {
                continue 'outer;
            }
        }
        for (view, map) in &balls {
            let local: Vec<Label> = map.iter().map(|&u| lab[u]).collect();
            if !spec.verify(view, &local) {
                continue 'outer;
            }
        }
        out.insert(order.iter().map(|&v| lab[v]).collect::<Vec<_>>());
    }
    Ok((qg, out.into_iter().collect()))
}

/// Exhaustive fingerprint of `t`.
pub fn brute_fingerprint(spec: &LclSpec, t: &PartialTree) -> Result<CanonFp, TreeError> {
    let (qg, ext) = extendible_set_brute(spec, t)?;
    let q = spec.alphabet_size(t.g.delta()) as u64;
    Ok(canonicalize(&qg, &ext, q).0)
}

/// Whether `g` has a complete labeling respecting `preset` and legal at every vertex, by enumeration.
pub fn legal_exists_brute(spec: &LclSpec, g: &PortGraph, preset: &[Option<Label>]) -> bool {
    let q = spec.alphabet_size(g.delta()) as u64;
    let n = g.n();
    assert!((n as f64) * (q as f64).log2() <= 24.0, "instance too large for enumeration");
    let balls: Vec<_> = (0..n).map(|v| induced_ball(g, v, spec.radius, &Context::default())).collect();
    let mut lab = vec![0 as Label; n];
    'outer: for code in 0..q.pow(n as u32) {
        let mut c = code;
        for v in 0..n {
            lab[v] = (c % q) as Label;
            c /= q;
            if preset[v].is_some_and(|p| p != lab[v]) {
                continue 'outer;
            }
        }
        if balls.iter().all(|(view, map)| spec.verify(view, &map.iter().map(|&u| lab[u]).collect::<Vec<_>>())) {
            return true;
        }
    }
    false
}

/// Tree DP for star rules on a forest: `allowed[v]` is a label mask, `check[v]` says whether
/// `v` must be locally consistent.
pub struct ForestSolver<'a> {
    g: &'a PortGraph,
    rule: StarRule,
    check: Vec<bool>,
    order: Vec<usize>,
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
}

impl<'a> ForestSolver<'a> {
    pub fn new(g: &'a PortGraph, rule: StarRule, check: Vec<bool>) -> Self {
        let n = g.n();
        let mut parent = vec![usize::MAX; n];
        let mut children = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                order.push(v);
                for u in g.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        parent[u] = v;
                        children[v].push(u);
                        q.push_back(u);
                    }
                }
            }
        }
        ForestSolver { g, rule, check, order, parent, children }
    }

    fn star_mask(&self, x: Label, extra: Option<Label>, masks: &[u16]) -> bool {
        let mut nb: Vec<Label> = extra.into_iter().collect();
        exists_combo(self.rule, x, &mut nb, masks)
    }

    pub fn feasible(&self, allowed: &[u16]) -> bool {
        let q = self.rule.q;
        let n = self.g.n();
        // feas[v * (q+1) + p]: labels of v admissible under parent label p (q = no parent)
        let mut feas = vec![0u16; n * (q + 1)];
        for &v in self.order.iter().rev() {
            for p in 0..=q {
                let mut m = 0u16;
                for x in 0..q {
                    if allowed[v] >> x & 1 == 0 {
                        continue;
                    }
                    let kids: Vec<u16> = self.children[v].iter().map(|&c| feas[c * (q + 1) + x]).collect();
                    let ok = if self.check[v] {
                        let extra = if p < q { Some(p as Label) } else { None };
                        self.star_mask(x as Label, extra, &kids)
                    } else {
                        kids.iter().all(|&k| k != 0)
                    };
                    if ok {
                        m |= 1 << x;
                    }
                }
                feas[v * (q + 1) + p] = m;
            }
        }
        (0..n).filter(|&v| self.parent[v] == usize::MAX).all(|r| feas[r * (q + 1) + q] != 0)
    }

    /// Lexicographically least completion in vertex-index order.
    pub fn complete(&self, allowed: &[u16]) -> Option<Vec<Label>> {
        let mut a = allowed.to_vec();
        if !self.feasible(&a) {
            return None;
        }
        for v in 0..self.g.n() {
            let opts = a[v];
            for x in 0..self.rule.q {
                if opts >> x & 1 == 1 {
                    a[v] = 1 << x;
                    if self.feasible(&a) {
                        break;
                    }
                }
            }
        }
        Some(a.iter().map(|m| m.trailing_zeros() as Label).collect())
    }
}

/// Whether some choice `b_j ∈ masks[j]` makes `rule.ok(x, nb ++ b)` hold.
pub(crate) fn exists_combo(rule: StarRule, x: Label, nb: &mut Vec<Label>, masks: &[u16]) -> bool {
    match masks.split_first() {
        None => rule.ok(x, nb),
        Some((&m, rest)) => {
            if rule.proper {
                // only the center matters, so pick any admissible label other than x
                let m2 = m & !(1u16 << x);
                if m2 == 0 {
                    return false;
                }
                nb.push(m2.trailing_zeros() as Label);
                let r = exists_combo(rule, x, nb, rest);
                nb.pop();
                return r;
            }
            for b in 0..rule.q {
                if m >> b & 1 == 1 {
                    nb.push(b as Label);
                    let r = exists_combo(rule, x, nb, rest);
                    nb.pop();
                    if r {
                        return true;
                    }
                }
            }
            false
        }
    }
}

fn full_mask(q: usize) -> u16 {
    ((1u32 << q) - 1) as u16
}

fn spec_rule(spec: &LclSpec) -> Result<StarRule, TreeError> {
    spec.star_rule().filter(|_| spec.radius == 1).ok_or_else(|| TreeError::Unsupported(spec.name.clone()))
}

/// Same set as [`extendible_set_brute`], computed by enumerating only labelings of `Q` and
/// deciding each with the forest DP.
pub fn extendible_set_dp(spec: &LclSpec, t: &PartialTree) -> Result<(QGraph, Vec<Vec<Label>>), TreeError> {
    let rule = spec_rule(spec)?;
    let q = rule.q;
    let tri = tripartition(t, 1);
    let (qg, order) = q_graph(t, &tri);
    let mut check = vec![true; t.n()];
    for &v in &tri.d1 {
        check[v] = false;
    }
    let solver = ForestSolver::new(&t.g, rule, check);
    let base: Vec<u16> =
        (0..t.n()).map(|v| t.preset[v].map_or(full_mask(q), |p| 1 << p)).collect();
    let mut out = Vec::new();
    let k = order.len();
    let total = (q as u64).pow(k as u32);
    for code in 0..total {
        let mut c = code;
        let mut a = base.clone();
        let mut tuple = Vec::with_capacity(k);
        for &v in &order {
            let l = (c % q as u64) as usize;
            c /= q as u64;
            a[v] &= 1 << l;
            tuple.push(l as Label);
        }
        if order.iter().all(|&v| a[v] != 0) && solver.feasible(&a) {
            out.push(tuple);
        }
    }
    out.sort();
    Ok((qg, out))
}

pub fn dp_fingerprint(spec: &LclSpec, t: &PartialTree) -> Result<CanonFp, TreeError> {
    let (qg, ext) = extendible_set_dp(spec, t)?;
    Ok(canonicalize(&qg, &ext, spec_rule(spec)?.q as u64).0)
}

/// Lexicographically least labeling of `t` that respects presets, agrees with `boundary` on `Q`
/// (in [`q_graph`] order) when given, and is locally consistent on `D2 ∪ D3`.
pub fn complete_labeling(spec: &LclSpec, t: &PartialTree, boundary: Option<&[Label]>) -> Result<Vec<Label>, TreeError> {
    let rule = spec_rule(spec)?;
    let tri = tripartition(t, 1);
    let (_, order) = q_graph(t, &tri);
    let mut check = vec![true; t.n()];
    for &v in &tri.d1 {
        check[v] = false;
    }
    let mut a: Vec<u16> = (0..t.n()).map(|v| t.preset[v].map_or(full_mask(rule.q), |p| 1 << p)).collect();
    if let Some(b) = boundary {
        for (&v, &l) in order.iter().zip(b) {
            a[v] &= 1 << l;
        }
    }
    ForestSolver::new(&t.g, rule, check).complete(&a).ok_or(TreeError::NoExtension)
}

/// Every vertex checked: a legal labeling of the whole forest respecting presets.
pub fn solve_legal(rule: StarRule, g: &PortGraph, preset: &[Option<Label>]) -> Option<Vec<Label>> {
    let a: Vec<u16> = preset.iter().map(|p| p.map_or(full_mask(rule.q), |l| 1 << l)).collect();
    ForestSolver::new(g, rule, vec![true; g.n()]).complete(&a)
}

/// Copies `H` (vertex set `h`, poles `s` and `t`, each with one outside neighbor), reattaches the
/// outside neighbor of `s` to the copy, and leaves the original attached only at `t`.
pub fn duplicate_cut(t: &PartialTree, h: &[usize], s: usize, tp: usize) -> Result<(PartialTree, Vec<usize>), TreeError> {
    let inside = |v: usize| h.contains(&v);
    let outside_of = |p: usize| -> Result<usize, TreeError> {
        let o: Vec<usize> = t.g.neighbors(p).filter(|&w| !inside(w)).collect();
        match o[..] {
            [u] => Ok(u),
            _ => Err(TreeError::Other(format!("pole {p} needs exactly one outside neighbor"))),
        }
    };
    let u = outside_of(s)?;
    outside_of(tp)?;
    let mut g = t.g.clone();
    let mut preset = t.preset.clone();
    let mut copy = vec![usize::MAX; t.n()];
    for &v in h {
        copy[v] = g.add_vertex();
        preset.push(t.preset[v]);
    }
    for &v in h {
        for w in t.g.neighbors(v) {
            if inside(w) && v < w {
                g.add_edge(copy[v], copy[w]).map_err(|e| TreeError::Other(e.to_string()))?;
            }
        }
    }
    g.remove_edge(u, s).map_err(|e| TreeError::Other(e.to_string()))?;
    g.add_edge(u, copy[s]).map_err(|e| TreeError::Other(e.to_string()))?;
    Ok((PartialTree { g, preset, poles: t.poles.clone() }, copy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use locality_core::lcl::builtin;

    fn path_tree(k: usize) -> PartialTree {
        let roots: Vec<_> = (0..k).map(|_| RNode::leaf()).collect();
        PartialTree::bipolar(&roots, 3, 1000).unwrap()
    }

    #[test]
    fn tripartition_radius_one() {
        let t = path_tree(6);
        let tri = tripartition(&t, 1);
        assert_eq!(tri.d1, vec![0, 5]);
        assert_eq!(tri.d2, vec![1, 4]);
        assert_eq!(tri.d3, vec![2, 3]);
        let tri2 = tripartition(&t, 2);
        assert_eq!(tri2.d1, vec![0, 1, 4, 5]);
        assert_eq!(tri2.d2, vec![2, 3]);
    }

    #[test]
    fn brute_and_dp_agree() {
        for name in ["two-coloring", "all-sigma"] {
            let spec = builtin(name, None).unwrap();
            for k in 2..7 {
                let t = path_tree(k);
                let a = extendible_set_brute(&spec, &t).unwrap();
                let b = extendible_set_dp(&spec, &t).unwrap();
                assert_eq!(a, b, "{name} k={k}");
            }
        }
        let spec = builtin("proper-coloring", Some(3)).unwrap();
        let leaf = RNode::leaf();
        let root = RNode::new(None, vec![RNode::new(Some(1), vec![leaf.clone()]), leaf.clone(), leaf]);
        let t = PartialTree::from_rnode(&root, 3, 100).unwrap();
        assert_eq!(extendible_set_brute(&spec, &t).unwrap(), extendible_set_dp(&spec, &t).unwrap());
    }

    #[test]
    fn two_coloring_path_parity() {
        let spec = builtin("two-coloring", None).unwrap();
        let (_, ext) = extendible_set_brute(&spec, &path_tree(5)).unwrap();
        // poles at even distance share a color
        assert!(ext.iter().all(|t| t[0] == t[1]));
        let (_, ext) = extendible_set_brute(&spec, &path_tree(6)).unwrap();
        assert!(ext.iter().all(|t| t[0] != t[1]));
    }

    #[test]
    fn completion_respects_presets() {
        let spec = builtin("proper-coloring", Some(3)).unwrap();
        let mut t = path_tree(7);
        t.preset[3] = Some(2);
        let lab = complete_labeling(&spec, &t, None).unwrap();
        assert_eq!(lab[3], 2);
        assert!(lab.windows(2).skip(1).take(4).all(|w| w[0] != w[1]));
        assert_eq!(lab[0], 0);
    }

    #[test]
    fn duplicate_cut_on_cycle_with_pendant() {
        // cycle 0..6 with pendant 6 on vertex 0; H = {2, 3, 4}, poles 2 and 4
        let mut g = PortGraph::new(7, 3);
        for i in 0..6 {
            g.add_edge(i, (i + 1) % 6).unwrap();
        }
        g.add_edge(0, 6).unwrap();
        let t = PartialTree { g, preset: vec![None; 7], poles: vec![2, 4] };
        let (out, copy) = duplicate_cut(&t, &[2, 3, 4], 2, 4).unwrap();
        assert_eq!(out.n(), 10);
        assert!(out.g.is_tree());
        assert!(out.g.neighbors(1).any(|w| w == copy[2]));
        assert!(!out.g.neighbors(1).any(|w| w == 2));
        assert!(out.g.neighbors(5).any(|w| w == 4));
    }

    #[test]
    fn duplicate_cut_on_tree_splits_it() {
        let t = PartialTree { g: locality_core::graph::gen_path(7), preset: vec![None; 7], poles: vec![2, 4] };
        let (out, _) = duplicate_cut(&t, &[2, 3, 4], 2, 4).unwrap();
        assert_eq!(out.n(), 10);
        assert!(out.g.is_forest());
        let comps = out.g.components();
        assert_eq!(comps.iter().collect::<std::collections::BTreeSet<_>>().len(), 2);
    }
}
