//! Levels and the O(n^{1/k}) solver for the hierarchical 2½-coloring problems.

use std::collections::VecDeque;

use crate::graph::{Context, PortGraph, View};
use crate::lcl::{hier_levels_view, Label, MARS, MERCURY, SATURN, VENUS};
use crate::sim::ViewAlgorithm;

/// `V_i = {v in G_i : deg_{G_i}(v) <= 2}` for `i <= k`, remainder on level `k+1`.
pub fn hier_levels(g: &PortGraph, k: usize) -> Vec<usize> {
    let n = g.n();
    let mut lv = vec![k + 1; n];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    for i in 1..=k {
        let cur: Vec<usize> = (0..n).filter(|&v| lv[v] == k + 1 && deg[v] <= 2).collect();
        for &v in &cur {
            lv[v] = i;
        }
        for &v in &cur {
            for u in g.neighbors(v) {
                deg[u] -= 1;
            }
        }
    }
    lv
}

/// Smallest integer `m` with `m >= 2 n^{1/k}`.
pub fn hier_threshold(n: u64, k: usize) -> u64 {
    let target = (n as u128) << k;
    let mut m = ((2.0 * (n as f64).powf(1.0 / k as f64)).floor() as u64).saturating_sub(2);
    while (m as u128).saturating_pow(k as u32) < target {
        m += 1;
    }
    m
}

#[derive(Clone, Copy, Debug)]
pub struct SolveHier {
    pub k: usize,
}

impl SolveHier {
    /// Centralized run of the level-by-level procedure.
    pub fn solve(&self, g: &PortGraph, ids: &[u64], n_adv: u64) -> Vec<Label> {
        let k = self.k;
        let m = hier_threshold(n_adv, k) as usize;
        let lv = hier_levels(g, k);
        let mut lab: Vec<Option<Label>> = vec![None; g.n()];
        for i in 1..=k {
            let members: Vec<usize> = (0..g.n()).filter(|&v| lv[v] == i).collect();
            let mut active = vec![false; g.n()];
            for &v in &members {
                let exempt = i >= 2 && g.neighbors(v).any(|w| lv[w] < i && lab[w] != Some(MERCURY));
                if exempt {
                    lab[v] = Some(SATURN);
                } else {
                    active[v] = true;
                }
            }
            let mut seen = vec![false; g.n()];
            for &s in &members {
                if !active[s] || seen[s] {
                    continue;
                }
                let mut comp = vec![s];
                seen[s] = true;
                let mut q = VecDeque::from([s]);
                while let Some(v) = q.pop_front() {
                    for w in g.neighbors(v) {
                        if active[w] && !seen[w] {
                            seen[w] = true;
                            comp.push(w);
                            q.push_back(w);
                        }
                    }
                }
                let inner = |v: usize| g.neighbors(v).filter(|&w| active[w]).count();
                color_component(&comp, m, |v| inner(v), |v| ids[v], |v| g.neighbors(v).filter(|&w| active[w]).collect(), |v, l| lab[v] = Some(l));
            }
        }
        lab.into_iter().map(|l| l.unwrap_or(SATURN)).collect()
    }
}

/// Labels one component of `V_i - D_i`: short paths are 2-colored from the lower-id endpoint.
fn color_component(
    comp: &[usize],
    m: usize,
    inner_deg: impl Fn(usize) -> usize,
    id: impl Fn(usize) -> u64,
    inner_nbrs: impl Fn(usize) -> Vec<usize>,
    mut set: impl FnMut(usize, Label),
) {
    let ends: Vec<usize> = comp.iter().copied().filter(|&v| inner_deg(v) <= 1).collect();
    if ends.is_empty() || comp.len() > m {
        for &v in comp {
            set(v, MERCURY);
        }
        return;
    }
    let s = *ends.iter().min_by_key(|&&v| id(v)).unwrap();
    let (mut prev, mut cur, mut parity) = (usize::MAX, s, 0);
    loop {
        set(cur, if parity == 0 { VENUS } else { MARS });
        let Some(nx) = inner_nbrs(cur).into_iter().find(|&w| w != prev) else { break };
        prev = cur;
        cur = nx;
        parity ^= 1;
    }
}

impl ViewAlgorithm for SolveHier {
    fn name(&self) -> String {
        format!("hier{}", self.k)
    }

    fn round_bound(&self, n: u64, _delta: usize) -> usize {
        self.k * (hier_threshold(n, self.k) as usize + 1)
    }

    fn decide(&self, view: &View) -> Label {
        let k = self.k;
        let m = hier_threshold(view.advertised_n, k) as usize;
        let lv = hier_levels_view(view, k);
        let nv = view.len();
        let mut lab: Vec<Option<Label>> = vec![None; nv];
        for u in 0..nv {
            if lv[u] == Some(k + 1) {
                lab[u] = Some(SATURN);
            }
        }
        for i in 1..=k {
            // membership in V_i - D_i, three-valued
            let mut member: Vec<Option<bool>> = vec![None; nv];
            for u in 0..nv {
                member[u] = match lv[u] {
                    None => None,
                    Some(l) if l != i => Some(false),
                    Some(_) if i == 1 => Some(true),
                    Some(_) => {
                        let mut witness = false;
                        let mut open = !view.complete_at(u);
                        for (_, w) in view.nbrs(u) {
                            match (lv[w], lab[w]) {
                                (Some(l), Some(x)) if l < i && x != MERCURY => witness = true,
                                (Some(l), Some(_)) if l < i => {}
                                (Some(l), None) if l < i => open = true,
                                (Some(_), _) => {}
                                (None, _) => open = true,
                            }
                        }
                        if witness {
                            lab[u] = Some(SATURN);
                            Some(false)
                        } else if open {
                            None
                        } else {
                            Some(true)
                        }
                    }
                };
            }
            let mut done = vec![false; nv];
            for s in 0..nv {
                if member[s] != Some(true) || done[s] {
                    continue;
                }
                let mut comp = vec![s];
                done[s] = true;
                let mut certain = true;
                let mut q = VecDeque::from([s]);
                while let Some(v) = q.pop_front() {
                    if !view.complete_at(v) {
                        certain = false;
                    }
                    for (_, w) in view.nbrs(v) {
                        match member[w] {
                            Some(true) if !done[w] => {
                                done[w] = true;
                                comp.push(w);
                                q.push_back(w);
                            }
                            None => certain = false,
                            _ => {}
                        }
                    }
                }
                if comp.len() > m {
                    for &v in &comp {
                        lab[v] = Some(MERCURY);
                    }
                } else if certain {
                    let inner = |v: usize| view.nbrs(v).filter(|&(_, w)| member[w] == Some(true)).map(|(_, w)| w).collect::<Vec<_>>();
                    color_component(
                        &comp,
                        m,
                        |v| inner(v).len(),
                        |v| view.verts[v].id.expect("hier solver needs ids"),
                        inner,
                        |v, l| lab[v] = Some(l),
                    );
                }
            }
        }
        lab[0].expect("view too small to determine the output")
    }

    fn decide_all(&self, g: &PortGraph, ctx: &Context) -> Option<Vec<Label>> {
        Some(self.solve(g, ctx.ids?, ctx.advertised_n))
    }
}
