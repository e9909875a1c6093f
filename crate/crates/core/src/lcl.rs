//! LCL specifications, verifiers and the built-in catalog.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{induced_ball, Context, PortGraph, View};

pub type Label = u32;
/// Per-vertex output; `None` is an unlabeled vertex.
pub type Labeling = Vec<Option<Label>>;

pub const VENUS: Label = 0;
pub const MARS: Label = 1;
pub const MERCURY: Label = 2;
pub const SATURN: Label = 3;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LclError {
    #[error("unknown spec `{0}`")]
    UnknownSpec(String),
    #[error("bad parameter for `{0}`")]
    BadParam(String),
    #[error("bad labeling on line {0}")]
    BadLabeling(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecKind {
    /// Every output in `{0, 1}` is legal.
    AllSigma,
    Coloring(usize),
    Hier(usize),
    EllOrientation(usize),
    Sinkless,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LclSpec {
    pub name: String,
    pub kind: SpecKind,
    pub radius: usize,
    pub sigma_in: usize,
}

/// Verifier of a port-oblivious radius-1 spec that only looks at the center's
/// label and the multiset of its neighbors' labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StarRule {
    pub q: usize,
    pub proper: bool,
}

impl StarRule {
    pub fn ok(&self, center: Label, nbrs: &[Label]) -> bool {
        (center as usize) < self.q && (!self.proper || nbrs.iter().all(|&l| l != center))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalOutcome {
    Ok,
    Violated,
    Incomplete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlobalOutcome {
    Legal,
    Illegal(usize),
    Incomplete(usize),
}

impl GlobalOutcome {
    pub fn is_legal(&self) -> bool {
        matches!(self, GlobalOutcome::Legal)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            GlobalOutcome::Legal => "legal",
            GlobalOutcome::Illegal(_) => "illegal",
            GlobalOutcome::Incomplete(_) => "incomplete",
        }
    }
}

pub fn builtin(name: &str, param: Option<usize>) -> Result<LclSpec, LclError> {
    let need = |p: Option<usize>, min: usize| match p {
        Some(x) if x >= min => Ok(x),
        _ => Err(LclError::BadParam(name.to_string())),
    };
    let (kind, radius, shown) = match name {
        "all-sigma" => (SpecKind::AllSigma, 1, name.to_string()),
        "two-coloring" => (SpecKind::Coloring(2), 1, name.to_string()),
        "proper-coloring" => {
            let q = need(param, 1)?;
            (SpecKind::Coloring(q), 1, format!("proper-coloring:{q}"))
        }
        "hier" => {
            let k = need(param, 1)?;
            (SpecKind::Hier(k), k, format!("hier:{k}"))
        }
        "ell-orientation" => {
            let l = need(param, 1)?;
            (SpecKind::EllOrientation(l), l, format!("ell-orientation:{l}"))
        }
        "sinkless-orientation" => (SpecKind::Sinkless, 1, name.to_string()),
        _ => return Err(LclError::UnknownSpec(name.to_string())),
    };
    Ok(LclSpec { name: shown, kind, radius, sigma_in: 1 })
}

impl LclSpec {
    /// Parses `name`, `name:param` or `name(param)`.
    pub fn parse(s: &str) -> Result<LclSpec, LclError> {
        let s = s.trim();
        let (name, param) = if let Some((a, b)) = s.split_once(':') {
            (a, Some(b))
        } else if let (Some(i), true) = (s.find('('), s.ends_with(')')) {
            (&s[..i], Some(&s[i + 1..s.len() - 1]))
        } else {
            (s, None)
        };
        let param = match param {
            Some(p) => Some(p.trim().parse().map_err(|_| LclError::BadParam(name.to_string()))?),
            None => None,
        };
        builtin(name, param)
    }

    /// Output alphabet size on graphs of max degree `delta`.
    pub fn alphabet_size(&self, delta: usize) -> usize {
        match self.kind {
            SpecKind::AllSigma => 2,
            SpecKind::Coloring(q) => q,
            SpecKind::Hier(_) => 4,
            SpecKind::EllOrientation(_) => 2,
            SpecKind::Sinkless => 1 << delta,
        }
    }

    pub fn port_sensitive(&self) -> bool {
        matches!(self.kind, SpecKind::EllOrientation(_) | SpecKind::Sinkless)
    }

    pub fn star_rule(&self) -> Option<StarRule> {
        match self.kind {
            SpecKind::AllSigma => Some(StarRule { q: 2, proper: false }),
            SpecKind::Coloring(q) => Some(StarRule { q, proper: true }),
            _ => None,
        }
    }

    pub fn label_name(&self, l: Label) -> String {
        match self.kind {
            SpecKind::Hier(_) => ["venus", "mars", "mercury", "saturn"].get(l as usize).map_or(l.to_string(), |s| s.to_string()),
            _ => l.to_string(),
        }
    }

    pub fn parse_label(&self, s: &str) -> Option<Label> {
        if let SpecKind::Hier(_) = self.kind {
            if let Some(i) = ["venus", "mars", "mercury", "saturn"].iter().position(|&x| x == s) {
                return Some(i as Label);
            }
        }
        s.parse().ok()
    }

    /// Verifier on an induced ball centered at local vertex 0; `labels` is indexed by local vertex.
    pub fn verify(&self, ball: &View, labels: &[Label]) -> bool {
        match self.kind {
            SpecKind::AllSigma => labels[0] < 2,
            SpecKind::Coloring(q) => {
                (labels[0] as usize) < q && ball.nbrs(0).all(|(_, w)| labels[w] != labels[0])
            }
            SpecKind::Hier(k) => verify_hier(k, ball, labels),
            SpecKind::EllOrientation(l) => verify_orientation(l, ball, labels),
            SpecKind::Sinkless => verify_sinkless(ball, labels),
        }
    }
}

/// Vertex levels recomputed from a view; `None` where the view does not determine them.
/// Missing edges (degree larger than visible ports) count as unknown neighbors.
pub fn hier_levels_view(view: &View, k: usize) -> Vec<Option<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum St {
        Level(usize),
        Above,
        Unknown,
    }
    let n = view.len();
    let mut st = vec![St::Above; n];
    for i in 1..=k {
        let prev = st.clone();
        for u in 0..n {
            if prev[u] != St::Above {
                continue;
            }
            let vv = &view.verts[u];
            let visible = vv.ports.iter().flatten().count();
            let mut lower = 0;
            let mut unknown = if i >= 2 { vv.degree - visible } else { 0 };
            for &(w, _) in vv.ports.iter().flatten() {
                match prev[w] {
                    St::Level(_) => lower += 1,
                    St::Unknown => unknown += 1,
                    St::Above => {}
                }
            }
            st[u] = if vv.degree - lower <= 2 {
                St::Level(i)
            } else if vv.degree - lower - unknown > 2 {
                St::Above
            } else {
                St::Unknown
            };
        }
    }
    st.into_iter()
        .map(|s| match s {
            St::Level(i) => Some(i),
            St::Above => Some(k + 1),
            St::Unknown => None,
        })
        .collect()
}

fn verify_hier(k: usize, ball: &View, lab: &[Label]) -> bool {
    let lv = hier_levels_view(ball, k);
    let Some(l) = lv[0] else { return false };
    let me = lab[0];
    if me > SATURN {
        return false;
    }
    if l == k + 1 {
        return me == SATURN;
    }
    let nb: Vec<usize> = ball.nbrs(0).map(|(_, w)| w).collect();
    if nb.iter().any(|&w| lv[w].is_none()) {
        return false;
    }
    let exempt = l >= 2 && nb.iter().any(|&w| lv[w].unwrap() < l && lab[w] != MERCURY);
    if (me == SATURN) != exempt {
        return false;
    }
    if me == SATURN {
        return true;
    }
    if me == VENUS || me == MARS {
        if nb.iter().any(|&w| lv[w] == Some(l) && (lab[w] == me || lab[w] == MERCURY)) {
            return false;
        }
    }
    if l == k {
        let same = nb.iter().filter(|&&w| lv[w] == Some(k) && lab[w] != SATURN).count();
        if same <= 1 && me == MERCURY {
            return false;
        }
    }
    true
}

/// Walks a cycle view from the center: returns local indices in walk order
/// (center first, then the port-1 side), plus whether the walk closed up.
pub fn cycle_walk(view: &View) -> Option<(Vec<usize>, Vec<usize>, bool)> {
    if view.verts.iter().any(|v| v.degree != 2) {
        return None;
    }
    let step = |prev: usize, cur: usize| view.nbrs(cur).map(|(_, w)| w).find(|&w| w != prev);
    let mut fwd = Vec::new();
    let mut back = Vec::new();
    let first = |p: usize| view.verts[0].ports[p - 1].map(|(w, _)| w);
    let (mut prev, mut cur) = (0, first(1));
    while let Some(c) = cur {
        if c == 0 {
            return Some((fwd, back, true));
        }
        fwd.push(c);
        let nx = step(prev, c);
        prev = c;
        cur = nx;
    }
    let (mut prev, mut cur) = (0, first(2));
    while let Some(c) = cur {
        if fwd.contains(&c) {
            // both directions met at the far side
            return Some((fwd, back, true));
        }
        back.push(c);
        let nx = step(prev, c);
        prev = c;
        cur = nx;
    }
    Some((fwd, back, false))
}

fn verify_orientation(l: usize, ball: &View, lab: &[Label]) -> bool {
    let Some((fwd, back, closed)) = cycle_walk(ball) else { return false };
    if lab.iter().any(|&x| x != 1 && x != 2) {
        return false;
    }
    // Direction along the walk: +1 if the vertex points to its successor in walk order.
    let mut seq: Vec<usize> = back.iter().rev().copied().collect();
    seq.push(0);
    let c = seq.len() - 1;
    seq.extend(fwd.iter().copied());
    if closed {
        // Cyclic order: center followed by the forward side, then the rest of the backward side.
        let mut cyc = vec![0];
        cyc.extend(fwd.iter().copied());
        for &b in back.iter().rev() {
            if !cyc.contains(&b) {
                cyc.push(b);
            }
        }
        let n = cyc.len();
        let dirs: Vec<i8> = (0..n).map(|i| dir_toward(ball, cyc[i], cyc[(i + 1) % n], lab)).collect();
        let uniform = dirs.iter().all(|&d| d == dirs[0]);
        if n <= l {
            return uniform;
        }
        if uniform {
            return true;
        }
        let mut len = 1;
        let mut i = 1;
        while dirs[i] == dirs[0] {
            len += 1;
            i += 1;
        }
        let mut j = n - 1;
        while j > i && dirs[j] == dirs[0] {
            len += 1;
            j -= 1;
        }
        return len >= l;
    }
    let m = seq.len();
    let dirs: Vec<i8> = (0..m)
        .map(|i| {
            if i + 1 < m {
                dir_toward(ball, seq[i], seq[i + 1], lab)
            } else {
                -dir_toward(ball, seq[i], seq[i - 1], lab)
            }
        })
        .collect();
    let mut lo = c;
    while lo > 0 && dirs[lo - 1] == dirs[c] {
        lo -= 1;
    }
    let mut hi = c;
    while hi + 1 < m && dirs[hi + 1] == dirs[c] {
        hi += 1;
    }
    hi - lo + 1 >= l
}

/// +1 if `u` points at `next`, else -1.
fn dir_toward(ball: &View, u: usize, next: usize, lab: &[Label]) -> i8 {
    match ball.verts[u].ports[lab[u] as usize - 1] {
        Some((w, _)) if w == next => 1,
        _ => -1,
    }
}

fn verify_sinkless(ball: &View, lab: &[Label]) -> bool {
    let d = ball.verts[0].degree;
    let m = lab[0];
    if d < 32 && m >> d != 0 {
        return false;
    }
    if d >= 1 && m == 0 {
        return false;
    }
    for (p, e) in ball.verts[0].ports.iter().enumerate() {
        let Some((w, q)) = *e else { return false };
        let mine = m >> p & 1;
        let theirs = lab[w] >> (q - 1) & 1;
        if mine == theirs {
            return false;
        }
    }
    true
}

pub fn check_local(spec: &LclSpec, g: &PortGraph, labels: &Labeling, v: usize) -> LocalOutcome {
    let (ball, map) = induced_ball(g, v, spec.radius, &Context::default());
    let mut lab = Vec::with_capacity(map.len());
    for &u in &map {
        match labels[u] {
            Some(x) => lab.push(x),
            None => return LocalOutcome::Incomplete,
        }
    }
    if spec.verify(&ball, &lab) {
        LocalOutcome::Ok
    } else {
        LocalOutcome::Violated
    }
}

/// Per-vertex failure flags for a complete labeling.
pub fn local_failures(spec: &LclSpec, g: &PortGraph, labels: &Labeling) -> Vec<bool> {
    (0..g.n()).into_par_iter().map(|v| check_local(spec, g, labels, v) != LocalOutcome::Ok).collect()
}

pub fn check_global(spec: &LclSpec, g: &PortGraph, labels: &Labeling) -> GlobalOutcome {
    if let Some(v) = labels.iter().position(|l| l.is_none()) {
        return GlobalOutcome::Incomplete(v);
    }
    match (0..g.n()).into_par_iter().find_first(|&v| check_local(spec, g, labels, v) != LocalOutcome::Ok) {
        Some(v) => GlobalOutcome::Illegal(v),
        None => GlobalOutcome::Legal,
    }
}

pub fn labeling_to_text(spec: &LclSpec, labels: &Labeling) -> String {
    let mut s = String::new();
    for (v, l) in labels.iter().enumerate() {
        match l {
            Some(x) => writeln!(s, "{v} {}", spec.label_name(*x)).unwrap(),
            None => writeln!(s, "{v} _").unwrap(),
        }
    }
    s
}

pub fn labeling_from_text(spec: &LclSpec, text: &str, n: usize) -> Result<Labeling, LclError> {
    let mut out = vec![None; n];
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let mut it = line.split_whitespace();
        let v: usize = it.next().and_then(|t| t.parse().ok()).ok_or(LclError::BadLabeling(i + 1))?;
        let t = it.next().ok_or(LclError::BadLabeling(i + 1))?;
        if v >= n {
            return Err(LclError::BadLabeling(i + 1));
        }
        out[v] = if t == "_" { None } else { Some(spec.parse_label(t).ok_or(LclError::BadLabeling(i + 1))?) };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_path, gen_ring, gen_star};

    fn lab(v: &[Label]) -> Labeling {
        v.iter().map(|&x| Some(x)).collect()
    }

    #[test]
    fn two_coloring_paths() {
        let s = builtin("two-coloring", None).unwrap();
        let g = gen_path(3);
        assert_eq!(check_local(&s, &g, &lab(&[0, 1, 0]), 1), LocalOutcome::Ok);
        assert_eq!(check_local(&s, &g, &lab(&[0, 0, 1]), 1), LocalOutcome::Violated);
        assert_eq!(check_local(&s, &g, &vec![Some(0), None, Some(0)], 0), LocalOutcome::Incomplete);
    }

    #[test]
    fn global_outcomes() {
        let all = builtin("all-sigma", None).unwrap();
        let g = gen_ring(6).unwrap();
        assert_eq!(check_global(&all, &g, &lab(&[0, 1, 1, 0, 0, 1])), GlobalOutcome::Legal);
        let mut l = lab(&[0; 6]);
        l[4] = None;
        assert_eq!(check_global(&all, &g, &l), GlobalOutcome::Incomplete(4));
        let two = builtin("two-coloring", None).unwrap();
        let g5 = gen_ring(5).unwrap();
        for code in 0..32u32 {
            let l: Labeling = (0..5).map(|i| Some(code >> i & 1)).collect();
            assert!(matches!(check_global(&two, &g5, &l), GlobalOutcome::Illegal(_)));
        }
    }

    #[test]
    fn hier_one_on_paths() {
        let s = builtin("hier", Some(1)).unwrap();
        let g = gen_path(3);
        assert!(check_global(&s, &g, &lab(&[VENUS, MARS, VENUS])).is_legal());
        assert!(!check_global(&s, &g, &lab(&[MERCURY; 3])).is_legal());
        assert!(!check_global(&s, &g, &lab(&[SATURN, MARS, VENUS])).is_legal());
    }

    #[test]
    fn hier_star_levels() {
        let g = gen_star(3);
        let (b, _) = induced_ball(&g, 0, 1, &Context::default());
        assert_eq!(hier_levels_view(&b, 1), vec![Some(2), Some(1), Some(1), Some(1)]);
        let s = builtin("hier", Some(1)).unwrap();
        assert!(check_global(&s, &g, &lab(&[SATURN, VENUS, VENUS, VENUS])).is_legal());
        assert!(!check_global(&s, &g, &lab(&[MERCURY, VENUS, VENUS, VENUS])).is_legal());
    }

    #[test]
    fn orientation_uniform_ring() {
        let s = builtin("ell-orientation", Some(2)).unwrap();
        let g = gen_ring(5).unwrap();
        assert!(check_global(&s, &g, &lab(&[1; 5])).is_legal());
        assert!(!check_global(&s, &g, &lab(&[1, 2, 1, 2, 1])).is_legal());
        let s8 = builtin("ell-orientation", Some(8)).unwrap();
        assert!(check_global(&s8, &g, &lab(&[2; 5])).is_legal());
        assert!(!check_global(&s8, &g, &lab(&[2, 2, 1, 2, 2])).is_legal());
        let g20 = gen_ring(20).unwrap();
        let mut l = vec![1; 20];
        for x in l.iter_mut().take(5) {
            *x = 2;
        }
        assert!(!check_global(&s8, &g20, &lab(&l)).is_legal());
        let s4 = builtin("ell-orientation", Some(4)).unwrap();
        // runs of 5 and 15
        assert!(check_global(&s4, &g20, &lab(&l)).is_legal());
    }

    #[test]
    fn sinkless_on_triangle() {
        let s = builtin("sinkless-orientation", None).unwrap();
        let g = gen_ring(3).unwrap();
        // every vertex sends its edge on port 1 outward
        assert!(check_global(&s, &g, &lab(&[1, 1, 1])).is_legal());
        assert!(!check_global(&s, &g, &lab(&[1, 2, 1])).is_legal());
    }

    #[test]
    fn parse_and_text() {
        assert_eq!(LclSpec::parse("hier:2").unwrap().radius, 2);
        assert_eq!(LclSpec::parse("proper-coloring(3)").unwrap().kind, SpecKind::Coloring(3));
        assert!(LclSpec::parse("nope").is_err());
        let s = builtin("hier", Some(2)).unwrap();
        let l = vec![Some(VENUS), None, Some(SATURN)];
        let t = labeling_to_text(&s, &l);
        assert_eq!(t, "0 venus\n1 _\n2 saturn\n");
        assert_eq!(labeling_from_text(&s, &t, 3).unwrap(), l);
    }
}
