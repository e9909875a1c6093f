//! Port-numbered graphs, instance generators and radius-t views.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits::{BitSource, BitStream};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} out of range")]
    NoSuchVertex(usize),
    #[error("self loop at {0}")]
    SelfLoop(usize),
    #[error("vertex {v} exceeds max degree {delta}")]
    DegreeExceeded { v: usize, delta: usize },
    #[error("port {port} of vertex {v} is inconsistent")]
    AsymmetricPort { v: usize, port: usize },
    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(usize, usize),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Bounded-degree graph. `adj[v][p-1] = (u, q)` means port `p` of `v` leads to `u`,
/// arriving at `u` through its port `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortGraph {
    delta: usize,
    adj: Vec<Vec<(usize, usize)>>,
    inputs: Vec<Option<u32>>,
}

impl PortGraph {
    pub fn new(n: usize, delta: usize) -> Self {
        PortGraph { delta, adj: vec![Vec::new(); n], inputs: vec![None; n] }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(|a| a.len()).max().unwrap_or(0)
    }

    /// Entry `p-1` is `(neighbor, reverse port)`.
    pub fn ports(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    /// Follows 1-based port `p` of `v`.
    pub fn follow(&self, v: usize, p: usize) -> (usize, usize) {
        self.adj[v][p - 1]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(|&(u, _)| u)
    }

    pub fn input(&self, v: usize) -> Option<u32> {
        self.inputs[v]
    }

    pub fn set_input(&mut self, v: usize, x: Option<u32>) {
        self.inputs[v] = x;
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.inputs.push(None);
        self.adj.len() - 1
    }

    /// Adds `{u,v}` using the next free port at each endpoint.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.n();
        if u >= n {
            return Err(GraphError::NoSuchVertex(u));
        }
        if v >= n {
            return Err(GraphError::NoSuchVertex(v));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for w in [u, v] {
            if self.adj[w].len() >= self.delta {
                return Err(GraphError::DegreeExceeded { v: w, delta: self.delta });
            }
        }
        if self.adj[u].iter().any(|&(w, _)| w == v) {
            return Err(GraphError::ParallelEdge(u, v));
        }
        let pu = self.adj[u].len() + 1;
        let pv = self.adj[v].len() + 1;
        self.adj[u].push((v, pv));
        self.adj[v].push((u, pu));
        Ok(())
    }

    /// Removes `{u,v}` and renumbers the remaining ports of both endpoints densely.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let pu = self.adj[u].iter().position(|&(w, _)| w == v).ok_or(GraphError::NoSuchVertex(v))?;
        let pv = self.adj[v].iter().position(|&(w, _)| w == u).ok_or(GraphError::NoSuchVertex(u))?;
        self.adj[u].remove(pu);
        self.adj[v].remove(pv);
        for x in [u, v] {
            for i in 0..self.adj[x].len() {
                let (w, q) = self.adj[x][i];
                self.adj[w][q - 1].1 = i + 1;
            }
        }
        Ok(())
    }

    /// Reorders the ports of `v`: new port `i+1` is old port `perm[i]+1`.
    pub fn permute_ports(&mut self, v: usize, perm: &[usize]) {
        assert_eq!(perm.len(), self.adj[v].len());
        let old = self.adj[v].clone();
        self.adj[v] = perm.iter().map(|&i| old[i]).collect();
        for i in 0..self.adj[v].len() {
            let (w, q) = self.adj[v][i];
            self.adj[w][q - 1].1 = i + 1;
        }
    }

    /// Graph spanned by a view. Ports hidden in the view lead to fresh leaf stubs so that
    /// every view vertex keeps its true degree; returns the stubs as `(owner, port)`.
    pub fn from_view(view: &View) -> (PortGraph, Vec<(usize, usize)>) {
        let m = view.len();
        let mut adj: Vec<Vec<(usize, usize)>> = Vec::with_capacity(m);
        let mut stubs = Vec::new();
        for (u, vv) in view.verts.iter().enumerate() {
            let mut row = Vec::with_capacity(vv.ports.len());
            for (i, e) in vv.ports.iter().enumerate() {
                match e {
                    Some(x) => row.push(*x),
                    None => {
                        row.push((m + stubs.len(), 1));
                        stubs.push((u, i + 1));
                    }
                }
            }
            adj.push(row);
        }
        for &(u, p) in &stubs {
            adj.push(vec![(u, p)]);
        }
        let delta = adj.iter().map(Vec::len).max().unwrap_or(0);
        let mut inputs: Vec<Option<u32>> = view.verts.iter().map(|v| v.input).collect();
        inputs.resize(adj.len(), None);
        (PortGraph { delta, adj, inputs }, stubs)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        for v in 0..self.n() {
            if self.adj[v].len() > self.delta {
                return Err(GraphError::DegreeExceeded { v, delta: self.delta });
            }
            let mut seen = HashSet::new();
            for (i, &(u, q)) in self.adj[v].iter().enumerate() {
                if u >= self.n() {
                    return Err(GraphError::NoSuchVertex(u));
                }
                if u == v {
                    return Err(GraphError::SelfLoop(v));
                }
                if !seen.insert(u) {
                    return Err(GraphError::ParallelEdge(v, u));
                }
                match self.adj[u].get(q.wrapping_sub(1)) {
                    Some(&(w, p)) if w == v && p == i + 1 => {}
                    _ => return Err(GraphError::AsymmetricPort { v, port: i + 1 }),
                }
            }
        }
        Ok(())
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for v in 0..self.n() {
            for &(u, _) in &self.adj[v] {
                if v < u {
                    out.push((v, u));
                }
            }
        }
        out
    }

    pub fn bfs(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[src] = Some(0);
        let mut q = VecDeque::from([src]);
        while let Some(v) = q.pop_front() {
            let d = dist[v].unwrap();
            for u in self.neighbors(v) {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    q.push_back(u);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: usize, v: usize) -> Option<usize> {
        self.bfs(u)[v]
    }

    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n()];
        let mut c = 0;
        for s in 0..self.n() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = c;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for u in self.neighbors(v) {
                    if comp[u] == usize::MAX {
                        comp[u] = c;
                        stack.push(u);
                    }
                }
            }
            c += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    pub fn is_forest(&self) -> bool {
        let comps = self.components().into_iter().max().map_or(0, |c| c + 1);
        self.edge_count() + comps == self.n()
    }

    pub fn is_tree(&self) -> bool {
        self.n() > 0 && self.is_connected() && self.edge_count() + 1 == self.n()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {}", self.n(), self.delta).unwrap();
        for v in 0..self.n() {
            write!(s, "{} {} ", v, self.degree(v)).unwrap();
            match self.inputs[v] {
                Some(x) => write!(s, "{x}").unwrap(),
                None => s.push('-'),
            }
            for (i, &(u, _)) in self.adj[v].iter().enumerate() {
                write!(s, " {}:{}", i + 1, u).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let perr = |line: usize, msg: &str| GraphError::Parse { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, head) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
        let mut it = head.split_whitespace();
        let n: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| perr(1, "bad n"))?;
        let delta: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| perr(1, "bad delta"))?;
        let mut ports: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut g = PortGraph::new(n, delta);
        let mut seen = vec![false; n];
        for (ln, line) in lines {
            let ln = ln + 1;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 3 {
                return Err(perr(ln, "expected `v deg inlabel ...`"));
            }
            let v: usize = toks[0].parse().map_err(|_| perr(ln, "bad vertex"))?;
            if v >= n || seen[v] {
                return Err(perr(ln, "vertex out of range or repeated"));
            }
            seen[v] = true;
            let deg: usize = toks[1].parse().map_err(|_| perr(ln, "bad degree"))?;
            g.inputs[v] = match toks[2] {
                "-" => None,
                t => Some(t.parse().map_err(|_| perr(ln, "bad input label"))?),
            };
            if toks.len() != 3 + deg {
                return Err(perr(ln, "port count does not match degree"));
            }
            for (i, t) in toks[3..].iter().enumerate() {
                let (p, u) = t.split_once(':').ok_or_else(|| perr(ln, "expected p:u"))?;
                let p: usize = p.parse().map_err(|_| perr(ln, "bad port"))?;
                let u: usize = u.parse().map_err(|_| perr(ln, "bad neighbor"))?;
                if p != i + 1 || u >= n {
                    return Err(perr(ln, "ports must be listed 1..deg with valid neighbors"));
                }
                ports[v].push(u);
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(perr(0, "missing vertex lines"));
        }
        // Reverse ports: the k-th occurrence of v in u's list pairs with the k-th of u in v's.
        let mut used: HashMap<(usize, usize), usize> = HashMap::new();
        for v in 0..n {
            let mut row = Vec::with_capacity(ports[v].len());
            for &u in &ports[v] {
                let k = used.entry((v, u)).or_insert(0);
                let q = ports[u]
                    .iter()
                    .enumerate()
                    .filter(|&(_, &w)| w == v)
                    .nth(*k)
                    .map(|(j, _)| j + 1)
                    .ok_or_else(|| perr(v + 2, "edge not listed at both endpoints"))?;
                *k += 1;
                row.push((u, q));
            }
            g.adj[v] = row;
        }
        g.validate()?;
        Ok(g)
    }
}

pub fn gen_path(n: usize) -> PortGraph {
    let mut g = PortGraph::new(n, 2);
    for i in 1..n {
        g.add_edge(i - 1, i).unwrap();
    }
    g
}

/// Cycle with port 1 pointing to `i+1` and port 2 to `i-1`.
pub fn gen_ring(n: usize) -> Result<PortGraph, GraphError> {
    if n < 3 {
        return Err(GraphError::BadParams(format!("ring needs n >= 3, got {n}")));
    }
    let mut g = PortGraph::new(n, 2);
    for i in 0..n {
        g.adj[i] = vec![((i + 1) % n, 2), ((i + n - 1) % n, 1)];
    }
    Ok(g)
}

pub fn gen_star(leaves: usize) -> PortGraph {
    let mut g = PortGraph::new(leaves + 1, leaves.max(1));
    for i in 1..=leaves {
        g.add_edge(0, i).unwrap();
    }
    g
}

/// Random recursive tree: vertex `i` attaches to a uniform earlier vertex with spare degree.
pub fn gen_random_tree(n: usize, delta: usize, seed: u64) -> Result<PortGraph, GraphError> {
    if n == 0 {
        return Err(GraphError::BadParams("tree needs n >= 1".into()));
    }
    if (n >= 3 && delta < 2) || (n == 2 && delta < 1) {
        return Err(GraphError::BadParams(format!("no tree on {n} vertices with max degree {delta}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = PortGraph::new(n, delta.max(1));
    let mut open = vec![0usize];
    for v in 1..n {
        let i = rng.gen_range(0..open.len());
        let u = open[i];
        g.add_edge(u, v).unwrap();
        if g.degree(u) == delta {
            open.swap_remove(i);
        }
        if g.degree(v) < delta {
            open.push(v);
        }
    }
    Ok(g)
}

/// Random `d`-regular simple graph by sequential pairing with restarts.
pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<PortGraph, GraphError> {
    if n * d % 2 == 1 || d >= n {
        return Err(GraphError::BadParams(format!("no {d}-regular graph on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..1000 {
        let mut g = PortGraph::new(n, d);
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
        let ok = |g: &PortGraph, a: usize, b: usize| a != b && !g.adj[a].iter().any(|&(w, _)| w == b);
        while !points.is_empty() {
            let mut fails = 0;
            loop {
                let i = rng.gen_range(0..points.len());
                let j = rng.gen_range(0..points.len());
                if i != j && ok(&g, points[i], points[j]) {
                    let (a, b) = (points[i], points[j]);
                    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                    points.swap_remove(hi);
                    points.swap_remove(lo);
                    g.add_edge(a, b).unwrap();
                    break;
                }
                fails += 1;
                if fails > 64 {
                    let m = points.len();
                    let cands: Vec<(usize, usize)> = (0..m)
                        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
                        .filter(|&(i, j)| ok(&g, points[i], points[j]))
                        .collect();
                    let Some(&(i, j)) = cands.choose(&mut rng) else { continue 'attempt };
                    let (a, b) = (points[i], points[j]);
                    points.swap_remove(j);
                    points.swap_remove(i);
                    g.add_edge(a, b).unwrap();
                    break;
                }
            }
        }
        return Ok(g);
    }
    Err(GraphError::BadParams("pairing failed repeatedly".into()))
}

/// The lower-bound instance for the hierarchical coloring problems.
#[derive(Clone, Debug)]
pub struct HkGraph {
    pub graph: PortGraph,
    pub head: usize,
    pub tail: usize,
    /// Level of the backbone each vertex belongs to (1 = innermost paths).
    pub backbone_level: Vec<usize>,
}

pub fn hk_size(k: usize, x: usize) -> usize {
    let mut h = x;
    for i in 2..=k {
        h = x + if i == k { x + 2 } else { x + 1 } * h;
    }
    h
}

pub fn gen_hk(k: usize, x: usize) -> Result<HkGraph, GraphError> {
    if k < 1 || x < 3 {
        return Err(GraphError::BadParams(format!("gen_hk needs k >= 1 and x >= 3, got k={k} x={x}")));
    }
    let mut g = PortGraph::new(0, 3);
    let mut lvl = Vec::new();
    let (head, tail) = build_h(&mut g, &mut lvl, k, k, x);
    Ok(HkGraph { graph: g, head, tail, backbone_level: lvl })
}

fn build_h(g: &mut PortGraph, lvl: &mut Vec<usize>, i: usize, k: usize, x: usize) -> (usize, usize) {
    let bb: Vec<usize> = (0..x)
        .map(|_| {
            lvl.push(i);
            g.add_vertex()
        })
        .collect();
    for j in 1..x {
        g.add_edge(bb[j - 1], bb[j]).unwrap();
    }
    if i > 1 {
        let mut hosts: Vec<usize> = bb.clone();
        if i == k {
            hosts.insert(0, bb[0]);
        }
        hosts.push(bb[x - 1]);
        for h in hosts {
            let (ch, _) = build_h(g, lvl, i - 1, k, x);
            g.add_edge(h, ch).unwrap();
        }
    }
    (bb[0], bb[x - 1])
}

/// Per-run information attached to views.
#[derive(Clone, Copy, Default)]
pub struct Context<'a> {
    pub ids: Option<&'a [u64]>,
    pub bits: Option<&'a BitSource>,
    pub advertised_n: u64,
}

#[derive(Clone, Debug)]
pub struct ViewVertex {
    pub dist: usize,
    pub degree: usize,
    /// Port `p` resolves to `(local index, reverse port)` when the edge is visible.
    pub ports: Vec<Option<(usize, usize)>>,
    pub id: Option<u64>,
    pub input: Option<u32>,
    pub bits: Option<BitStream>,
}

/// Radius-t neighborhood of a center (local index 0), in BFS order.
///
/// A LOCAL view omits edges between two vertices at distance exactly `t`;
/// an induced view (used by verifiers) keeps them.
#[derive(Clone, Debug)]
pub struct View {
    pub radius: usize,
    pub advertised_n: u64,
    pub induced: bool,
    pub verts: Vec<ViewVertex>,
}

impl View {
    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn center(&self) -> &ViewVertex {
        &self.verts[0]
    }

    /// Visible neighbors of local vertex `u`, as `(port, local index)`.
    pub fn nbrs(&self, u: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.verts[u].ports.iter().enumerate().filter_map(|(i, e)| e.map(|(w, _)| (i + 1, w)))
    }

    /// True when every edge of `u` is visible.
    pub fn complete_at(&self, u: usize) -> bool {
        self.verts[u].ports.iter().all(|e| e.is_some())
    }

    /// Permutes local indices (center stays 0). Used to test that algorithms ignore local order.
    pub fn scrambled(&self, perm: &[usize]) -> View {
        assert_eq!(perm[0], 0);
        let mut verts: Vec<Option<ViewVertex>> = vec![None; self.len()];
        for (old, vv) in self.verts.iter().enumerate() {
            let mut vv = vv.clone();
            for e in vv.ports.iter_mut().flatten() {
                e.0 = perm[e.0];
            }
            verts[perm[old]] = Some(vv);
        }
        View { verts: verts.into_iter().map(Option::unwrap).collect(), ..self.clone() }
    }
}

/// LOCAL view of radius `t` around `v`.
pub fn ball(g: &PortGraph, v: usize, t: usize, ctx: &Context) -> View {
    ball_with_map(g, v, t, ctx, false).0
}

/// Induced radius-`t` ball, as seen by a verifier.
pub fn induced_ball(g: &PortGraph, v: usize, t: usize, ctx: &Context) -> (View, Vec<usize>) {
    ball_with_map(g, v, t, ctx, true)
}

/// Builds a view and returns the local-to-global vertex map alongside it.
pub fn ball_with_map(g: &PortGraph, v: usize, t: usize, ctx: &Context, induced: bool) -> (View, Vec<usize>) {
    let mut local: HashMap<usize, usize> = HashMap::new();
    let mut order = vec![v];
    let mut dist = vec![0usize];
    local.insert(v, 0);
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        let d = dist[head];
        head += 1;
        if d == t {
            continue;
        }
        for w in g.neighbors(u) {
            if let std::collections::hash_map::Entry::Vacant(e) = local.entry(w) {
                e.insert(order.len());
                order.push(w);
                dist.push(d + 1);
            }
        }
    }
    let verts = order
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let ports = g
                .ports(u)
                .iter()
                .map(|&(w, q)| match local.get(&w) {
                    Some(&j) if induced || dist[i] < t || dist[j] < t => Some((j, q)),
                    _ => None,
                })
                .collect();
            ViewVertex {
                dist: dist[i],
                degree: g.degree(u),
                ports,
                id: ctx.ids.map(|ids| ids[u]),
                input: g.input(u),
                bits: ctx.bits.map(|b| b.stream(u)),
            }
        })
        .collect();
    (View { radius: t, advertised_n: ctx.advertised_n, induced, verts }, order)
}
