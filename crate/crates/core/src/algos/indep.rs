//! (α,β)-independent sets on paths via color reduction, with simulated round counts.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IndepError {
    #[error("need beta >= 2 alpha (alpha={alpha}, beta={beta})")]
    BetaTooSmall { alpha: usize, beta: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndepSet {
    /// Positions along the path, increasing.
    pub set: Vec<usize>,
    pub rounds: usize,
}

/// Number of distinct sets of at most two values drawn from `0..2L`, when colors fit in `L` bits.
fn next_bound(c: u64) -> u64 {
    let l = 64 - (c.max(2) - 1).leading_zeros() as u64;
    2 * l + l * (2 * l - 1)
}

fn encode(me: u64, nb: &[u64], l: u64) -> u64 {
    let mut vals: Vec<u64> = nb
        .iter()
        .map(|&u| {
            let i = (me ^ u).trailing_zeros() as u64;
            2 * i + (me >> i & 1)
        })
        .collect();
    vals.sort_unstable();
    vals.dedup();
    match vals[..] {
        [] => 0,
        [a] => a,
        [a, b] => 2 * l + b * (b - 1) / 2 + a,
        _ => unreachable!(),
    }
}

/// Proper 3-coloring of a path (given as distinct colors in order), and the rounds it took.
pub fn three_color_path(ids: &[u64]) -> (Vec<u8>, usize) {
    let m = ids.len();
    let mut col = ids.to_vec();
    let mut bound = ids.iter().max().map_or(1, |&x| x + 1);
    let mut rounds = 0;
    let nbrs = |c: &[u64], i: usize| {
        let mut v = Vec::with_capacity(2);
        if i > 0 {
            v.push(c[i - 1]);
        }
        if i + 1 < m {
            v.push(c[i + 1]);
        }
        v
    };
    loop {
        let nb = next_bound(bound);
        if nb >= bound {
            break;
        }
        let l = 64 - (bound.max(2) - 1).leading_zeros() as u64;
        col = (0..m).map(|i| encode(col[i], &nbrs(&col, i), l)).collect();
        bound = nb;
        rounds += 1;
    }
    for c in 3..bound {
        let snapshot = col.clone();
        for i in 0..m {
            if snapshot[i] == c {
                let used = nbrs(&snapshot, i);
                col[i] = (0..3).find(|x| !used.contains(x)).unwrap();
            }
        }
        rounds += 1;
    }
    (col.into_iter().map(|c| c as u8).collect(), rounds)
}

/// Maximal independent set of a path from a 3-coloring: one color class per round.
pub fn mis_path(ids: &[u64]) -> (Vec<bool>, usize) {
    let (col, mut rounds) = three_color_path(ids);
    let m = ids.len();
    let mut inn = vec![false; m];
    for c in 0..3 {
        for i in 0..m {
            if col[i] == c && !(i > 0 && inn[i - 1]) && !(i + 1 < m && inn[i + 1]) {
                inn[i] = true;
            }
        }
        rounds += 1;
    }
    (inn, rounds)
}

/// Splits `g` consecutive vertices into pieces of size in `[alpha, 2 alpha]` separated by
/// single vertices; returns separator offsets.
fn split_offsets(g: usize, alpha: usize) -> Vec<usize> {
    let p = (g + 1) / (alpha + 1);
    let total = g + 1 - p;
    let (base, extra) = (total / p, total % p);
    let mut out = Vec::new();
    let mut pos = 0;
    for j in 0..p - 1 {
        pos += base + usize::from(j < extra);
        out.push(pos);
        pos += 1;
    }
    out
}

/// An independent set `I` of the path `ids[0..m]` that avoids both endpoints and leaves
/// components of sizes in `[alpha, beta]`; empty when `m < alpha`.
pub fn independent_set_path(ids: &[u64], alpha: usize, beta: usize) -> Result<IndepSet, IndepError> {
    if beta < 2 * alpha || alpha == 0 {
        return Err(IndepError::BetaTooSmall { alpha, beta });
    }
    let m = ids.len();
    if m <= 2 * alpha {
        return Ok(IndepSet { set: vec![], rounds: 0 });
    }
    // anchors: iterated MIS on the allowed interior until consecutive anchors are > alpha apart
    let mut anchors: Vec<usize> = (alpha..m - alpha).collect();
    let mut rounds = 0;
    loop {
        let gaps_ok = anchors.windows(2).all(|w| w[1] - w[0] > alpha);
        if gaps_ok {
            break;
        }
        let hop = anchors.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(1);
        let sub: Vec<u64> = anchors.iter().map(|&i| ids[i]).collect();
        let (inn, r) = mis_path(&sub);
        rounds += r * hop;
        anchors = anchors.into_iter().zip(inn).filter(|&(_, b)| b).map(|(i, _)| i).collect();
    }
    let mut set = Vec::new();
    let mut longest = 0;
    let mut seg = |lo: usize, hi: usize, from_hi: bool, set: &mut Vec<usize>| {
        let g = hi - lo;
        longest = longest.max(g);
        for off in split_offsets(g, alpha) {
            set.push(if from_hi { hi - 1 - off } else { lo + off });
        }
    };
    seg(0, anchors[0], false, &mut set);
    for w in anchors.windows(2) {
        let from_hi = ids[w[1]] < ids[w[0]];
        seg(w[0] + 1, w[1], from_hi, &mut set);
    }
    seg(anchors[anchors.len() - 1] + 1, m, true, &mut set);
    set.extend(anchors.iter().copied());
    set.sort_unstable();
    Ok(IndepSet { set, rounds: rounds + longest + 1 })
}

/// Checks the defining properties; used by tests and by the decomposition validator.
pub fn is_alpha_beta_set(m: usize, set: &[usize], alpha: usize, beta: usize) -> bool {
    if m < alpha {
        return set.is_empty();
    }
    if set.iter().any(|&i| i == 0 || i + 1 == m || i >= m) {
        return false;
    }
    if set.windows(2).any(|w| w[1] <= w[0] + 1) {
        return false;
    }
    let mut prev = 0;
    for &i in set.iter().chain(std::iter::once(&m)) {
        let size = i - prev;
        if size < alpha || size > beta {
            return false;
        }
        prev = i + 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ids(m: usize, seed: u64) -> Vec<u64> {
        crate::sim::random_ids(m, seed)
    }

    #[test]
    fn examples() {
        assert_eq!(independent_set_path(&ids(3, 0), 4, 8).unwrap().set, Vec::<usize>::new());
        let r = independent_set_path(&ids(12, 0), 4, 8).unwrap();
        assert_eq!(r.set.len(), 1);
        assert!(is_alpha_beta_set(12, &r.set, 4, 8));
        let r = independent_set_path(&ids(100, 1), 4, 8).unwrap();
        assert!(is_alpha_beta_set(100, &r.set, 4, 8));
        assert!(independent_set_path(&ids(20, 0), 4, 7).is_err());
    }

    #[test]
    fn twelve_four_is_forced() {
        // exhaustive oracle: every valid set for |P|=12, alpha=4, beta=8 has exactly one element
        let mut sizes = std::collections::BTreeSet::new();
        for mask in 0u32..(1 << 12) {
            let s: Vec<usize> = (0..12).filter(|&i| mask >> i & 1 == 1).collect();
            if is_alpha_beta_set(12, &s, 4, 8) {
                sizes.insert(s.len());
            }
        }
        assert_eq!(sizes.into_iter().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn coloring_is_proper() {
        for m in [1, 2, 5, 50, 1000] {
            let (c, _) = three_color_path(&ids(m, m as u64));
            assert!(c.iter().all(|&x| x < 3));
            assert!(c.windows(2).all(|w| w[0] != w[1]));
        }
    }

    proptest! {
        #[test]
        fn valid_for_all_lengths(m in 1usize..400, alpha in 1usize..10, extra in 0usize..4, seed in 0u64..1000) {
            let beta = 2 * alpha + extra;
            let r = independent_set_path(&ids(m, seed), alpha, beta).unwrap();
            prop_assert!(is_alpha_beta_set(m, &r.set, alpha, beta), "m={} set={:?}", m, r.set);
        }

        #[test]
        fn mis_is_maximal(m in 1usize..300, seed in 0u64..1000) {
            let (inn, _) = mis_path(&ids(m, seed));
            for i in 0..m {
                let l = i > 0 && inn[i - 1];
                let r = i + 1 < m && inn[i + 1];
                prop_assert!(!(inn[i] && (l || r)));
                prop_assert!(inn[i] || l || r);
            }
        }
    }
}
