//! Rake/compress decomposition of forests into O(log n) levels.

use std::fmt::Write as _;

use thiserror::Error;

use super::indep::{independent_set_path, IndepError};
use crate::graph::PortGraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecompError {
    #[error("input is not a forest")]
    NotAForest,
    #[error("ell must be at least 2")]
    EllTooSmall,
    #[error(transparent)]
    Indep(#[from] IndepError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TagKind {
    Compress,
    Rake,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tag {
    pub iter: usize,
    pub kind: TagKind,
    pub promoted: bool,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub ell: usize,
    /// Level of each vertex, starting at 1.
    pub level: Vec<usize>,
    pub tag: Vec<Tag>,
    /// `paths[i-1]`: multi-vertex components of `G[V_i]`, each listed from its lower-id endpoint.
    pub paths: Vec<Vec<Vec<usize>>>,
    pub iterations: usize,
    pub rounds: usize,
}

impl Decomposition {
    pub fn levels(&self) -> usize {
        self.paths.len()
    }

    /// For each vertex, `Some((level index, path index, position))` if it lies on a path.
    pub fn path_index(&self, n: usize) -> Vec<Option<(usize, usize, usize)>> {
        let mut out = vec![None; n];
        for (i, ps) in self.paths.iter().enumerate() {
            for (j, p) in ps.iter().enumerate() {
                for (k, &v) in p.iter().enumerate() {
                    out[v] = Some((i, j, k));
                }
            }
        }
        out
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        for v in 0..self.level.len() {
            let t = self.tag[v];
            let kind = if t.kind == TagKind::Compress { 'C' } else { 'R' };
            let star = if t.promoted { "*" } else { "" };
            writeln!(s, "{} {} {}{}{}", v, self.level[v], t.iter, kind, star).unwrap();
        }
        s
    }
}

/// `log_{1/(1-1/(2(ell+1)))} n + 2`.
pub fn level_bound(n: usize, ell: usize) -> f64 {
    let b = 1.0 / (1.0 - 1.0 / (2.0 * (ell as f64 + 1.0)));
    (n.max(1) as f64).ln() / b.ln() + 2.0
}

pub fn rc_decompose(g: &PortGraph, ell: usize, ids: &[u64]) -> Result<Decomposition, DecompError> {
    if ell < 2 {
        return Err(DecompError::EllTooSmall);
    }
    if !g.is_forest() {
        return Err(DecompError::NotAForest);
    }
    let n = g.n();
    let mut in_u = vec![true; n];
    let mut alive: Vec<usize> = (0..n).collect();
    let mut tag: Vec<Option<Tag>> = vec![None; n];
    let mut runs: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut iter = 0;
    while !alive.is_empty() {
        iter += 1;
        let mut tagged = Vec::new();
        // compress: maximal runs of degree-2 vertices with at least ell members
        let mut seen = vec![false; 0];
        seen.resize(n, false);
        for &s in &alive {
            if deg[s] != 2 || seen[s] {
                continue;
            }
            let d2 = |v: usize| in_u[v] && deg[v] == 2;
            // walk to one end of the run, then collect it in order
            let (mut prev, mut cur) = (usize::MAX, s);
            loop {
                let nx = g.neighbors(cur).find(|&w| w != prev && d2(w));
                match nx {
                    Some(w) if w != s => {
                        prev = cur;
                        cur = w;
                    }
                    _ => break,
                }
            }
            let mut run = vec![cur];
            seen[cur] = true;
            let mut prev = usize::MAX;
            loop {
                let c = *run.last().unwrap();
                let nx = g.neighbors(c).find(|&w| w != prev && d2(w) && !seen[w]);
                match nx {
                    Some(w) => {
                        seen[w] = true;
                        run.push(w);
                        prev = c;
                    }
                    None => break,
                }
            }
            if run.len() >= ell {
                for &v in &run {
                    tag[v] = Some(Tag { iter, kind: TagKind::Compress, promoted: false });
                    tagged.push(v);
                }
                runs.push((iter, run));
            }
        }
        for &v in &alive {
            let raked = match deg[v] {
                0 => true,
                1 => {
                    let u = g.neighbors(v).find(|&w| in_u[w]).unwrap();
                    deg[u] > 1 || (deg[u] == 1 && ids[v] > ids[u])
                }
                _ => false,
            };
            if raked {
                tag[v] = Some(Tag { iter, kind: TagKind::Rake, promoted: false });
                tagged.push(v);
            }
        }
        for &v in &tagged {
            in_u[v] = false;
        }
        for &v in &tagged {
            for u in g.neighbors(v) {
                if in_u[u] {
                    deg[u] -= 1;
                }
            }
        }
        alive.retain(|&v| in_u[v]);
    }
    let mut tag: Vec<Tag> = tag.into_iter().map(Option::unwrap).collect();
    let mut level: Vec<usize> = tag.iter().map(|t| t.iter).collect();
    // postprocessing: rake vertices next to same-iteration compress vertices, then independent sets
    for v in 0..n {
        let t = tag[v];
        if t.kind == TagKind::Rake
            && g.neighbors(v).any(|u| tag[u].kind == TagKind::Compress && tag[u].iter == t.iter)
        {
            level[v] = t.iter + 1;
            tag[v].promoted = true;
        }
    }
    let mut indep_rounds = 0;
    for (it, run) in &runs {
        let rid: Vec<u64> = run.iter().map(|&v| ids[v]).collect();
        let r = independent_set_path(&rid, ell, 2 * ell)?;
        indep_rounds = indep_rounds.max(r.rounds);
        for i in r.set {
            let v = run[i];
            if !tag[v].promoted {
                level[v] = it + 1;
                tag[v].promoted = true;
            }
        }
    }
    let levels = level.iter().copied().max().unwrap_or(0);
    let mut paths: Vec<Vec<Vec<usize>>> = vec![Vec::new(); levels];
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let i = level[s];
        let same = |v: usize| g.neighbors(v).filter(|&w| level[w] == i).count();
        if same(s) == 0 || same(s) == 2 {
            continue;
        }
        let mut p = vec![s];
        seen[s] = true;
        let mut prev = usize::MAX;
        let mut cur = s;
        while let Some(w) = g.neighbors(cur).find(|&w| w != prev && level[w] == i) {
            seen[w] = true;
            p.push(w);
            prev = cur;
            cur = w;
        }
        if ids[*p.last().unwrap()] < ids[p[0]] {
            p.reverse();
        }
        paths[i - 1].push(p);
    }
    for ps in paths.iter_mut() {
        ps.sort_by_key(|p| p[0]);
    }
    Ok(Decomposition { ell, level, tag, paths, iterations: iter, rounds: iter * (ell + 1) + indep_rounds + 1 })
}

/// Checks every structural property of a decomposition; returns a description of the first violation.
pub fn validate_decomposition(g: &PortGraph, d: &Decomposition) -> Result<(), String> {
    let n = g.n();
    let ell = d.ell;
    let up = |v: usize| g.neighbors(v).filter(|&w| d.level[w] >= d.level[v]).count();
    let pidx = d.path_index(n);
    for v in 0..n {
        let i = d.level[v];
        if i < 1 || i > d.levels() {
            return Err(format!("vertex {v} has level {i}"));
        }
        let same = g.neighbors(v).filter(|&w| d.level[w] == i).count();
        match (up(v), same) {
            (0 | 1, 0) => {
                if pidx[v].is_some() {
                    return Err(format!("isolated vertex {v} listed on a path"));
                }
            }
            (2, 1 | 2) => {
                if pidx[v].is_none() {
                    return Err(format!("path vertex {v} missing from paths"));
                }
            }
            (a, b) => return Err(format!("vertex {v} on level {i}: up-degree {a}, same-level degree {b}")),
        }
    }
    for (i, ps) in d.paths.iter().enumerate() {
        for p in ps {
            if p.len() < ell || p.len() > 2 * ell {
                return Err(format!("path on level {} has {} vertices", i + 1, p.len()));
            }
            if p.iter().any(|&v| d.level[v] != i + 1) {
                return Err("path vertex on wrong level".into());
            }
        }
    }
    if d.paths.last().is_some_and(|ps| !ps.is_empty()) {
        return Err("top level contains a path".into());
    }
    Ok(())
}
