//! Labeling a real tree from a converged hierarchy: classes of the imaginary trees bottom-up along
//! the rake/compress levels, then labels top-down, recovering each compressed path from the labels
//! chosen for the poles of its two `H^+` copies.

use locality_core::algos::decomp::{rc_decompose, Decomposition};
use locality_core::graph::PortGraph;
use locality_core::lcl::Label;

use crate::engine::{ClassId, Engine};
use crate::hierarchy::Hierarchy;
use crate::TreeError;

#[derive(Clone, Debug)]
pub struct SynthReport {
    pub labels: Vec<Label>,
    pub rounds: usize,
    pub levels: usize,
    pub ell: usize,
    pub decomposition_rounds: usize,
    pub paths: usize,
}

#[derive(Clone, Copy, Debug)]
enum Kid {
    Real(usize),
    /// Copy of the `H^+` replacing path `p`, attached through its last pole when `true`.
    Copy(usize, bool),
}

/// Rounds charged per level: the class of a path is gathered along it, then its labels are
/// spread back, each walk covering at most `2 ell` vertices plus the bookend edge.
pub fn rounds_per_level(ell: usize) -> usize {
    2 * (2 * ell + 1)
}

fn first_combo(eng: &Engine, a: Label, extra: &[Label], masks: &[u16]) -> Option<Vec<Label>> {
    fn go(eng: &Engine, a: Label, nb: &mut Vec<Label>, masks: &[u16], cur: &mut Vec<Label>) -> bool {
        match masks.split_first() {
            None => eng.rule.ok(a, nb),
            Some((&m, rest)) => {
                for b in 0..eng.q {
                    if m >> b & 1 == 1 {
                        nb.push(b as Label);
                        cur.push(b as Label);
                        if go(eng, a, nb, rest, cur) {
                            return true;
                        }
                        nb.pop();
                        cur.pop();
                    }
                }
                false
            }
        }
    }
    let mut nb = extra.to_vec();
    let mut cur = Vec::new();
    go(eng, a, &mut nb, masks, &mut cur).then_some(cur)
}

/// Labels for a core path with fixed endpoint labels `ends` and outside neighbor labels `outer`,
/// every core vertex consistent; lexicographically least.
fn label_path(eng: &Engine, cls: &[ClassId], ends: (Label, Label), outer: (Label, Label)) -> Option<Vec<Label>> {
    let q = eng.q;
    let x = cls.len();
    let ok = |m: usize, l: usize, y: usize, r: usize| eng.class(cls[m]).w[l * q + r] >> y & 1 == 1;
    let fixed = |m: usize| -> Option<usize> {
        if m == 0 {
            Some(ends.0 as usize)
        } else if m == x - 1 {
            Some(ends.1 as usize)
        } else {
            None
        }
    };
    // g[m]: pairs (y_{m-1}, y_m) from which positions m..x-1 can be completed
    let mut g = vec![0u32; x];
    for l in 0..q {
        let y = ends.1 as usize;
        if ok(x - 1, l, y, outer.1 as usize) {
            g[x - 1] |= 1 << (l * q + y);
        }
    }
    for m in (0..x - 1).rev() {
        for l in 0..q {
            for y in 0..q {
                if fixed(m).is_some_and(|f| f != y) {
                    continue;
                }
                let good = (0..q).any(|z| g[m + 1] >> (y * q + z) & 1 == 1 && ok(m, l, y, z));
                if good {
                    g[m] |= 1 << (l * q + y);
                }
            }
        }
    }
    let (p_u, a_s) = (outer.0 as usize, ends.0 as usize);
    if g[0] >> (p_u * q + a_s) & 1 == 0 {
        return None;
    }
    let mut out = vec![a_s];
    let mut prev = p_u;
    for m in 1..x {
        let y = out[m - 1];
        let z = (0..q).find(|&z| g[m] >> (y * q + z) & 1 == 1 && ok(m - 1, prev, y, z))?;
        prev = y;
        out.push(z);
    }
    Some(out.into_iter().map(|l| l as Label).collect())
}

pub fn synthesize_run(eng: &mut Engine, h: &Hierarchy, g: &PortGraph, ids: &[u64]) -> Result<SynthReport, TreeError> {
    if g.max_degree() > eng.delta {
        return Err(TreeError::Other(format!("max degree {} exceeds {}", g.max_degree(), eng.delta)));
    }
    let d: Decomposition = rc_decompose(g, h.ell, ids)?;
    let n = g.n();
    let lv = &d.level;
    let mut paths: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, ps) in d.paths.iter().enumerate() {
        for p in ps {
            paths.push((i + 1, p.clone()));
        }
    }
    let mut on_path: Vec<Option<(usize, usize)>> = vec![None; n];
    for (pi, (_, p)) in paths.iter().enumerate() {
        for (k, &v) in p.iter().enumerate() {
            on_path[v] = Some((pi, k));
        }
    }
    let mut kids: Vec<Vec<Kid>> = vec![Vec::new(); n];
    for v in 0..n {
        for u in g.neighbors(v) {
            if lv[u] >= lv[v] {
                continue;
            }
            kids[v].push(match on_path[u] {
                Some((pi, k)) => {
                    let len = paths[pi].1.len();
                    if k != 0 && k + 1 != len {
                        return Err(TreeError::Other(format!("interior path vertex {u} next to higher vertex {v}")));
                    }
                    Kid::Copy(pi, k != 0)
                }
                None => Kid::Real(u),
            });
        }
    }
    let levels = d.levels();
    let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); levels + 1];
    for v in 0..n {
        by_level[lv[v]].push(v);
    }
    let mut paths_at: Vec<Vec<usize>> = vec![Vec::new(); levels + 1];
    for (pi, (i, _)) in paths.iter().enumerate() {
        paths_at[*i].push(pi);
    }
    let allowed = h.classes();
    let mut cls = vec![usize::MAX; n];
    let mut views = vec![(usize::MAX, usize::MAX); paths.len()];
    let kid_class = |k: &Kid, cls: &[ClassId], views: &[(ClassId, ClassId)]| match *k {
        Kid::Real(u) => cls[u],
        Kid::Copy(p, t) => {
            if t {
                views[p].1
            } else {
                views[p].0
            }
        }
    };
    for i in 1..=levels {
        for &v in &by_level[i] {
            let ks: Vec<ClassId> = kids[v].iter().map(|k| kid_class(k, &cls, &views)).collect();
            let c = eng.node(None, &ks);
            if allowed.binary_search(&c).is_err() {
                return Err(TreeError::Other(format!("class of vertex {v} is outside the hierarchy")));
            }
            cls[v] = c;
        }
        for &pi in &paths_at[i] {
            let seq: Vec<ClassId> = paths[pi].1.iter().map(|&v| cls[v]).collect();
            let tau = eng.type_of_seq(&seq);
            let e = h.entry(tau).ok_or_else(|| TreeError::Other(format!("path type {tau} has no H+ entry")))?;
            views[pi] = (e.view_s, e.view_t);
        }
    }
    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut rec: Vec<[Option<(Label, Label)>; 2]> = vec![[None, None]; paths.len()];
    let mut stack: Vec<(usize, Vec<Label>)> = Vec::new();
    for i in (1..=levels).rev() {
        for &v in &by_level[i] {
            if on_path[v].is_none() && g.neighbors(v).all(|u| lv[u] <= lv[v]) {
                let m = eng.admissible(cls[v], &[]);
                if m == 0 {
                    return Err(TreeError::NoExtension);
                }
                labels[v] = Some(m.trailing_zeros() as Label);
                stack.push((v, vec![]));
            }
        }
        drain(eng, &kids, &cls, &views, &mut labels, &mut rec, &mut stack)?;
        for &pi in &paths_at[i] {
            let p = &paths[pi].1;
            let (Some((a_s, p_u)), Some((a_t, p_v))) = (rec[pi][0], rec[pi][1]) else {
                return Err(TreeError::Other(format!("path {pi} reached before its bookends")));
            };
            let seq: Vec<ClassId> = p.iter().map(|&v| cls[v]).collect();
            let lab = label_path(eng, &seq, (a_s, a_t), (p_u, p_v)).ok_or(TreeError::NoExtension)?;
            for (k, &v) in p.iter().enumerate() {
                labels[v] = Some(lab[k]);
                let l = if k == 0 { p_u } else { lab[k - 1] };
                let r = if k + 1 == p.len() { p_v } else { lab[k + 1] };
                stack.push((v, vec![l, r]));
            }
        }
        drain(eng, &kids, &cls, &views, &mut labels, &mut rec, &mut stack)?;
    }
    let labels: Vec<Label> = labels.into_iter().map(|l| l.ok_or(TreeError::NoExtension)).collect::<Result<_, _>>()?;
    Ok(SynthReport {
        labels,
        rounds: d.rounds + levels * rounds_per_level(h.ell),
        levels,
        ell: h.ell,
        decomposition_rounds: d.rounds,
        paths: paths.len(),
    })
}

#[allow(clippy::too_many_arguments)]
fn drain(
    eng: &Engine,
    kids: &[Vec<Kid>],
    cls: &[ClassId],
    views: &[(ClassId, ClassId)],
    labels: &mut [Option<Label>],
    rec: &mut [[Option<(Label, Label)>; 2]],
    stack: &mut Vec<(usize, Vec<Label>)>,
) -> Result<(), TreeError> {
    while let Some((v, extra)) = stack.pop() {
        let a = labels[v].unwrap();
        let masks: Vec<u16> = kids[v]
            .iter()
            .map(|k| {
                let c = match *k {
                    Kid::Real(u) => cls[u],
                    Kid::Copy(p, t) => {
                        if t {
                            views[p].1
                        } else {
                            views[p].0
                        }
                    }
                };
                eng.admissible(c, &[a])
            })
            .collect();
        let b = first_combo(eng, a, &extra, &masks).ok_or(TreeError::NoExtension)?;
        for (k, &l) in kids[v].iter().zip(&b) {
            match *k {
                Kid::Real(u) => {
                    labels[u] = Some(l);
                    stack.push((u, vec![a]));
                }
                Kid::Copy(p, t) => rec[p][usize::from(t)] = Some((l, a)),
            }
        }
    }
    Ok(())
}
