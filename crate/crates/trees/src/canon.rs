//! Canonical fingerprints of a small pole-rooted graph `Q` together with a set of labelings of it.

use locality_core::lcl::Label;

/// Small graph on the first `n` indices; indices `0..poles` are the poles, in pole order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QGraph {
    pub n: usize,
    pub poles: usize,
    pub edges: Vec<(usize, usize)>,
    pub presets: Vec<Option<Label>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonFp {
    pub poles: usize,
    pub edges: Vec<(u8, u8)>,
    /// `u8::MAX` marks an unlabeled vertex.
    pub presets: Vec<u8>,
    /// Labelings packed base `q`, vertex `i` at digit `i`, sorted.
    pub ext: Vec<u64>,
}

impl CanonFp {
    pub fn ext_len(&self) -> usize {
        self.ext.len()
    }
}

fn next_perm(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Minimum encoding over all pole-fixing relabelings that keep non-poles grouped by the set of
/// poles they touch. Returns the fingerprint and the map `old index -> canonical index`.
pub fn canonicalize(q: &QGraph, ext: &[Vec<Label>], base: u64) -> (CanonFp, Vec<usize>) {
    assert!(q.poles <= q.n && q.n <= 16);
    let mut sig = vec![0u32; q.n];
    for &(a, b) in &q.edges {
        if a < q.poles && b >= q.poles {
            sig[b] |= 1 << a;
        }
        if b < q.poles && a >= q.poles {
            sig[a] |= 1 << b;
        }
    }
    let mut keys: Vec<u32> = (q.poles..q.n).map(|v| sig[v]).collect();
    keys.sort_unstable();
    keys.dedup();
    let groups: Vec<Vec<usize>> = keys.iter().map(|&k| (q.poles..q.n).filter(|&v| sig[v] == k).collect()).collect();
    let mut perms: Vec<Vec<usize>> = groups.iter().map(|g| (0..g.len()).collect()).collect();
    let mut best: Option<(CanonFp, Vec<usize>)> = None;
    loop {
        let mut pos: Vec<usize> = (0..q.n).collect();
        let mut next = q.poles;
        for (g, p) in groups.iter().zip(&perms) {
            for &i in p {
                pos[g[i]] = next;
                next += 1;
            }
        }
        let mut edges: Vec<(u8, u8)> = q
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (pos[a] as u8, pos[b] as u8);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        let mut presets = vec![u8::MAX; q.n];
        for v in 0..q.n {
            presets[pos[v]] = q.presets[v].map_or(u8::MAX, |l| l as u8);
        }
        let mut pw = vec![1u64; q.n];
        for i in 1..q.n {
            pw[i] = pw[i - 1] * base;
        }
        let mut codes: Vec<u64> =
            ext.iter().map(|t| (0..q.n).map(|v| t[v] as u64 * pw[pos[v]]).sum()).collect();
        codes.sort_unstable();
        codes.dedup();
        let fp = CanonFp { poles: q.poles, edges, presets, ext: codes };
        if best.as_ref().map_or(true, |(b, _)| fp < *b) {
            best = Some((fp, pos));
        }
        // advance the product of per-group permutations
        let mut k = 0;
        while k < perms.len() {
            if next_perm(&mut perms[k]) {
                break;
            }
            perms[k].sort_unstable();
            k += 1;
        }
        if k == perms.len() {
            break;
        }
    }
    best.unwrap()
}
