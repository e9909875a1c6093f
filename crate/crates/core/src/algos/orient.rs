//! Constant-round ℓ-orientation of cycles (recursive doubling of the minimum run length).

use crate::graph::{Context, PortGraph, View};
use crate::lcl::{cycle_walk, Label};
use crate::sim::ViewAlgorithm;

/// Rounds used by `A_k`.
pub fn orient_rounds(k: usize) -> usize {
    match k {
        0 | 1 => 0,
        2 => 2,
        _ => orient_rounds(k.div_ceil(2)) + 2 * k + 1,
    }
}

/// A cycle or path segment in walk order. `plus[i]` is the port of vertex `i` leading to `i+1`.
struct Seq {
    ids: Vec<u64>,
    plus: Vec<usize>,
    cyclic: bool,
}

impl Seq {
    fn len(&self) -> usize {
        self.ids.len()
    }

    fn nb(&self, i: usize, d: i8) -> Option<usize> {
        let m = self.len();
        if d > 0 {
            if i + 1 < m {
                Some(i + 1)
            } else if self.cyclic {
                Some(0)
            } else {
                None
            }
        } else if i > 0 {
            Some(i - 1)
        } else if self.cyclic {
            Some(m - 1)
        } else {
            None
        }
    }

    fn initial(&self) -> Vec<i8> {
        self.plus.iter().map(|&p| if p == 1 { 1 } else { -1 }).collect()
    }

    fn labels(&self, dir: &[i8]) -> Vec<Label> {
        self.plus.iter().zip(dir).map(|(&p, &d)| if d > 0 { p as Label } else { 3 - p as Label }).collect()
    }

    /// The neighbor `i` points at, if it points back at `i`.
    fn partner(&self, dir: &[i8], i: usize) -> Option<usize> {
        self.nb(i, dir[i]).filter(|&j| dir[j] == -dir[i])
    }

    fn step2(&self, dir: &[i8]) -> Vec<i8> {
        let m = self.len();
        let v1: Vec<bool> = (0..m)
            .map(|i| [1, -1].into_iter().filter_map(|d| self.nb(i, d)).any(|j| dir[j] == dir[i]))
            .collect();
        (0..m)
            .map(|i| {
                if v1[i] {
                    return dir[i];
                }
                match self.partner(dir, i) {
                    Some(p) if !v1[p] => {
                        if self.ids[i] < self.ids[p] {
                            -dir[i]
                        } else {
                            dir[i]
                        }
                    }
                    Some(_) => -dir[i],
                    None => dir[i],
                }
            })
            .collect()
    }

    /// Maximal runs as `(start, len)` in walk order; a run wrapping the end of a cycle starts late.
    fn runs(&self, dir: &[i8]) -> Vec<(usize, usize)> {
        let m = self.len();
        let start0 = if self.cyclic {
            match (0..m).find(|&i| dir[i] != dir[(i + m - 1) % m]) {
                Some(s) => s,
                None => return vec![(0, m)],
            }
        } else {
            0
        };
        let mut out = Vec::new();
        let mut s = start0;
        let mut len = 0;
        for off in 0..m {
            let i = (start0 + off) % m;
            if len > 0 && dir[i] != dir[s] {
                out.push((s, len));
                s = i;
                len = 0;
            }
            len += 1;
        }
        out.push((s, len));
        out
    }

    fn stepk(&self, dir: &[i8], k: usize) -> Vec<i8> {
        let m = self.len();
        let runs = self.runs(dir);
        if runs.len() == 1 && self.cyclic {
            return dir.to_vec();
        }
        let mut run_of = vec![0; m];
        for (r, &(s, len)) in runs.iter().enumerate() {
            for off in 0..len {
                run_of[(s + off) % m] = r;
            }
        }
        // runs cut by the edge of an open segment are treated as long
        let long = |r: usize| {
            let (s, len) = runs[r];
            len >= k || (!self.cyclic && (s == 0 || s + len == m))
        };
        let head = |r: usize| {
            let (s, len) = runs[r];
            if dir[s] > 0 {
                (s + len - 1) % m
            } else {
                s
            }
        };
        let mut out = dir.to_vec();
        for r in 0..runs.len() {
            if long(r) {
                continue;
            }
            let h = head(r);
            let Some(o) = self.nb(h, dir[h]) else { continue };
            let q = run_of[o];
            let flip = if long(q) { true } else { self.ids[h] < self.ids[head(q)] };
            if flip {
                let (s, len) = runs[r];
                for off in 0..len {
                    out[(s + off) % m] = -dir[s];
                }
            }
        }
        out
    }

    fn run_ak(&self, k: usize) -> Vec<i8> {
        match k {
            0 | 1 => self.initial(),
            2 => self.step2(&self.initial()),
            _ => {
                let d = self.run_ak(k.div_ceil(2));
                self.stepk(&d, k)
            }
        }
    }

    /// Uniform orientation anchored at the minimum-id vertex's port 1.
    fn uniform(&self) -> Vec<i8> {
        let a = (0..self.len()).min_by_key(|&i| self.ids[i]).unwrap();
        let d = if self.plus[a] == 1 { 1 } else { -1 };
        vec![d; self.len()]
    }

    fn solve(&self, ell: usize) -> Vec<i8> {
        if self.cyclic && self.len() <= ell {
            self.uniform()
        } else {
            self.run_ak(ell)
        }
    }
}

fn cycle_seqs(g: &PortGraph, ids: &[u64]) -> Option<Vec<(Vec<usize>, Seq)>> {
    if (0..g.n()).any(|v| g.degree(v) != 2) {
        return None;
    }
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        let mut order = vec![s];
        seen[s] = true;
        let mut cur = g.follow(s, 1).0;
        while cur != s {
            seen[cur] = true;
            order.push(cur);
            let prev = order[order.len() - 2];
            cur = g.neighbors(cur).find(|&w| w != prev).unwrap();
        }
        let m = order.len();
        let plus: Vec<usize> = (0..m)
            .map(|i| {
                let nx = order[(i + 1) % m];
                (1..=2).find(|&p| g.follow(order[i], p).0 == nx).unwrap()
            })
            .collect();
        let sids = order.iter().map(|&v| ids[v]).collect();
        out.push((order, Seq { ids: sids, plus, cyclic: true }));
    }
    Some(out)
}

/// Centralized `ℓ`-orientation of a disjoint union of cycles; `None` if some vertex has degree other than 2.
pub fn orient_cycles(g: &PortGraph, ids: &[u64], ell: usize) -> Option<Vec<Label>> {
    let mut out = vec![0; g.n()];
    for (order, seq) in cycle_seqs(g, ids)? {
        let lab = seq.labels(&seq.solve(ell));
        for (v, l) in order.into_iter().zip(lab) {
            out[v] = l;
        }
    }
    Some(out)
}

pub struct OrientCycle {
    pub ell: usize,
}

impl ViewAlgorithm for OrientCycle {
    fn name(&self) -> String {
        format!("orient{}", self.ell)
    }

    fn round_bound(&self, _n: u64, _delta: usize) -> usize {
        orient_rounds(self.ell).max(self.ell)
    }

    fn decide(&self, view: &View) -> Label {
        let Some((fwd, back, closed)) = cycle_walk(view) else { return 1 };
        let mut order: Vec<usize> = vec![0];
        order.extend(fwd.iter().copied());
        let c;
        if closed {
            c = 0;
        } else {
            let mut o: Vec<usize> = back.iter().rev().copied().collect();
            c = o.len();
            o.extend(order);
            order = o;
        }
        let m = order.len();
        let ports_to = |a: usize, b: usize| view.nbrs(a).find(|&(_, w)| w == b).map(|(p, _)| p);
        let plus: Vec<usize> = (0..m)
            .map(|i| {
                let nx = if closed || i + 1 < m { Some(order[(i + 1) % m]) } else { None };
                match nx.and_then(|b| ports_to(order[i], b)) {
                    Some(p) => p,
                    None => 3 - ports_to(order[i], order[i - 1]).unwrap_or(2),
                }
            })
            .collect();
        let ids = order.iter().map(|&u| view.verts[u].id.expect("orientation needs ids")).collect();
        let seq = Seq { ids, plus, cyclic: closed };
        seq.labels(&seq.solve(self.ell))[c]
    }

    fn decide_all(&self, g: &PortGraph, ctx: &Context) -> Option<Vec<Label>> {
        orient_cycles(g, ctx.ids?, self.ell)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_ring;
    use crate::lcl::{builtin, check_global};
    use crate::sim::{evaluate_views, random_ids};

    fn ring_with_ports(n: usize, mask: u64) -> PortGraph {
        let mut g = gen_ring(n).unwrap();
        for v in 0..n {
            if mask >> v & 1 == 1 {
                g.permute_ports(v, &[1, 0]);
            }
        }
        g
    }

    fn legal(g: &PortGraph, ell: usize, lab: &[Label]) -> bool {
        let spec = builtin("ell-orientation", Some(ell)).unwrap();
        check_global(&spec, g, &lab.iter().map(|&l| Some(l)).collect()).is_legal()
    }

    #[test]
    fn rounds_recurrence() {
        assert_eq!(orient_rounds(2), 2);
        assert_eq!(orient_rounds(3), 9);
        assert_eq!(orient_rounds(4), 11);
        assert_eq!(orient_rounds(8), 28);
    }

    #[test]
    fn exhaustive_ports_small_cycles() {
        for n in 3..=8 {
            for mask in 0..(1u64 << n) {
                let g = ring_with_ports(n, mask);
                let ids = random_ids(n, mask);
                for ell in [2, 4, 8] {
                    let lab = orient_cycles(&g, &ids, ell).unwrap();
                    assert!(legal(&g, ell, &lab), "n={n} mask={mask} ell={ell}");
                }
            }
        }
    }

    #[test]
    fn views_agree_with_central() {
        for n in 3..=64 {
            let mask = random_ids(1, n as u64)[0];
            let g = ring_with_ports(n, mask);
            let ids = random_ids(n, n as u64 + 7);
            for ell in [2, 3, 4, 8] {
                let central = orient_cycles(&g, &ids, ell).unwrap();
                assert!(legal(&g, ell, &central), "n={n} ell={ell}");
                let ctx = Context { ids: Some(&ids), bits: None, advertised_n: n as u64 };
                let views = evaluate_views(&g, &OrientCycle { ell }, &ctx);
                assert_eq!(views, central, "n={n} ell={ell}");
            }
        }
    }

    #[test]
    fn uniform_input_stays_uniform() {
        for n in 3..20 {
            let g = gen_ring(n).unwrap();
            let ids = random_ids(n, 3);
            for ell in 2..=n {
                let lab = orient_cycles(&g, &ids, ell).unwrap();
                assert!(lab.iter().all(|&l| l == lab[0]));
            }
        }
    }

    #[test]
    fn ell2_on_five_cycle() {
        for mask in 0..32 {
            let g = ring_with_ports(5, mask);
            let lab = orient_cycles(&g, &random_ids(5, 1), 2).unwrap();
            assert!(legal(&g, 2, &lab));
        }
    }
}
