//! Reading a labeling rule off a randomized algorithm: run it on `Extend` of each queried type and
//! keep the most frequent labeling of the middle edge.

use std::collections::BTreeMap;

use locality_core::bits::BitSource;
use locality_core::graph::{ball, Context, PortGraph, View};
use locality_core::lcl::Label;
use locality_core::sim::ViewAlgorithm;

use crate::engine::{ClassId, Engine};
use crate::hierarchy::{build_hierarchy, BuildCtx, BuildStop, Caps, Hierarchy, LabelRule, WParam};
use crate::ptree::RNode;
use crate::TreeError;

/// Trial-color algorithm: in each of `rounds` phases an uncolored vertex proposes a uniform color
/// among those its colored neighbors do not hold, and keeps it unless an uncolored neighbor
/// proposed the same. A phase takes two rounds. Vertices still uncolored afterwards take the least
/// color unused by their colored neighbors.
#[derive(Clone, Copy, Debug)]
pub struct RandomizedColoring {
    pub q: usize,
    pub rounds: usize,
}

impl RandomizedColoring {
    fn run(&self, n: usize, nbrs: &dyn Fn(usize) -> Vec<usize>, pick: &dyn Fn(usize, u64, u64) -> u64) -> Vec<Label> {
        let adj: Vec<Vec<usize>> = (0..n).map(nbrs).collect();
        let mut color: Vec<Option<Label>> = vec![None; n];
        for j in 0..self.rounds {
            let prop: Vec<Option<Label>> = (0..n)
                .map(|u| {
                    if color[u].is_some() {
                        return None;
                    }
                    let free: Vec<Label> =
                        (0..self.q as Label).filter(|&c| adj[u].iter().all(|&x| color[x] != Some(c))).collect();
                    (!free.is_empty()).then(|| free[pick(u, j as u64, free.len() as u64) as usize])
                })
                .collect();
            for u in 0..n {
                let Some(c) = prop[u] else { continue };
                if adj[u].iter().all(|&x| prop[x] != Some(c)) {
                    color[u] = Some(c);
                }
            }
        }
        (0..n)
            .map(|u| {
                color[u].unwrap_or_else(|| {
                    (0..self.q as Label).find(|&c| adj[u].iter().all(|&x| color[x] != Some(c))).unwrap_or(0)
                })
            })
            .collect()
    }
}

impl ViewAlgorithm for RandomizedColoring {
    fn name(&self) -> String {
        format!("trial-color{}x{}", self.q, self.rounds)
    }

    fn round_bound(&self, _n: u64, _delta: usize) -> usize {
        2 * self.rounds + 1
    }

    fn decide(&self, view: &View) -> Label {
        let out = self.run(
            view.len(),
            &|u| view.nbrs(u).map(|(_, x)| x).collect(),
            &|u, j, m| view.verts[u].bits.as_ref().expect("randomized algorithm needs bits").below(j, m),
        );
        out[0]
    }

    fn decide_all(&self, g: &PortGraph, ctx: &Context) -> Option<Vec<Label>> {
        let bits = ctx.bits?;
        Some(self.run(g.n(), &|u| g.neighbors(u).collect(), &|u, j, m| bits.stream(u).below(j, m)))
    }
}

#[derive(Clone, Debug)]
pub struct ExtractConfig {
    /// Defaults to `w = max(4(1 + t), ell)`.
    pub wp: Option<WParam>,
    pub trials: usize,
    pub seed: u64,
    /// `N` in the advertised size `β·N + 1`, `β = q^Δ`.
    pub n_base: u64,
    pub caps: Caps,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig { wp: None, trials: 200, seed: 0, n_base: 1_000_000, caps: Caps::default() }
    }
}

#[derive(Debug)]
pub struct Extracted {
    pub rule: LabelRule,
    /// Per queried type: the modal pair and its frequency.
    pub votes: BTreeMap<usize, (Vec<Label>, usize)>,
    pub rounds: usize,
    pub advertised_n: u64,
    pub hierarchy: Result<Hierarchy, BuildStop>,
}

pub fn advertised_n(eng: &Engine, n_base: u64) -> u64 {
    (eng.q as u64).saturating_pow(eng.delta as u32).saturating_mul(n_base).saturating_add(1)
}

/// Appends `node` and its descendants down to `depth`, returning the new root.
fn append_trunc(g: &mut PortGraph, node: &RNode, depth: usize) -> Result<usize, TreeError> {
    let r = g.add_vertex();
    if depth > 0 {
        for c in &node.children {
            let u = append_trunc(g, c, depth - 1)?;
            g.add_edge(r, u).map_err(|e| TreeError::Other(e.to_string()))?;
        }
    }
    Ok(r)
}

/// The part of the bipolar tree `seq` within distance `radius` of the edge `{seq[e], seq[e+1]}`.
/// Returns the graph and the two edge endpoints.
pub fn window(eng: &Engine, seq: &[ClassId], e: usize, radius: usize) -> Result<(PortGraph, usize, usize), TreeError> {
    let lo = e.saturating_sub(radius);
    let hi = (e + 1 + radius).min(seq.len() - 1);
    let mut g = PortGraph::new(0, eng.delta);
    let mut core = Vec::new();
    for i in lo..=hi {
        let dist = if i <= e { e - i } else { i - e - 1 };
        core.push(append_trunc(&mut g, &eng.class(seq[i]).rep, radius - dist)?);
    }
    for p in core.windows(2) {
        g.add_edge(p[0], p[1]).map_err(|e| TreeError::Other(e.to_string()))?;
    }
    Ok((g, core[e - lo], core[e + 1 - lo]))
}

/// Runs `alg` at the two middle vertices over `trials` seeds; returns the modal pair (least
/// pair on ties) and its count.
pub fn modal_pair(g: &PortGraph, s: usize, t: usize, alg: &dyn ViewAlgorithm, rounds: usize, adv: u64, trials: usize, seed: u64) -> (Vec<Label>, usize) {
    let mut counts: BTreeMap<Vec<Label>, usize> = BTreeMap::new();
    for k in 0..trials.max(1) {
        let bits = BitSource::new(seed.wrapping_add(k as u64));
        let ctx = Context { ids: None, bits: Some(&bits), advertised_n: adv };
        let pair = vec![alg.decide(&ball(g, s, rounds, &ctx)), alg.decide(&ball(g, t, rounds, &ctx))];
        *counts.entry(pair).or_default() += 1;
    }
    let best = counts.values().copied().max().unwrap_or(0);
    counts.into_iter().find(|&(_, c)| c == best).unwrap()
}

/// Builds the hierarchy with the rule read off `alg`.
pub fn extract_f(eng: &mut Engine, alg: &dyn ViewAlgorithm, cfg: &ExtractConfig) -> Result<Extracted, TreeError> {
    let adv = advertised_n(eng, cfg.n_base);
    let rounds = alg.round_bound(adv, eng.delta);
    let need = 4 * (1 + rounds);
    let mut votes = BTreeMap::new();
    let mut chooser = |eng: &mut Engine, tau: usize, seq: &[ClassId], ctx: &BuildCtx| -> Result<Option<Vec<Label>>, TreeError> {
        if ctx.w < need {
            return Err(TreeError::WTooSmall { w: ctx.w, need });
        }
        let (plus, e) = eng.extend(seq, ctx.w, ctx.ell_pump)?;
        let (g, s, t) = window(eng, &plus, e, rounds + 1)?;
        let (pair, count) = modal_pair(&g, s, t, alg, rounds, adv, cfg.trials, cfg.seed);
        votes.insert(tau, (pair.clone(), count));
        Ok(Some(pair))
    };
    let hierarchy = build_hierarchy(eng, &mut chooser, cfg.wp.unwrap_or(WParam::fixed(need)), &cfg.caps);
    if let Err(BuildStop::Error(e)) = hierarchy {
        return Err(e);
    }
    let rule = votes.iter().map(|(&t, (p, _))| (t, p.clone())).collect();
    Ok(Extracted { rule, votes, rounds, advertised_n: adv, hierarchy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::build_with_rule;
    use locality_core::graph::gen_random_tree;
    use locality_core::lcl::{builtin, local_failures};
    use locality_core::sim::{evaluate, evaluate_views, ConstantAlg};

    fn random_tree(n: usize, seed: u64) -> PortGraph {
        gen_random_tree(n, 3, seed).unwrap()
    }

    #[test]
    fn batch_agrees_with_views() {
        let alg = RandomizedColoring { q: 3, rounds: 4 };
        let g = random_tree(200, 5);
        let bits = BitSource::new(9);
        let ctx = Context { ids: None, bits: Some(&bits), advertised_n: 200 };
        assert_eq!(evaluate(&g, &alg, &ctx), evaluate_views(&g, &alg, &ctx));
    }

    #[test]
    fn trial_coloring_is_mostly_proper() {
        let spec = builtin("proper-coloring", Some(3)).unwrap();
        let alg = RandomizedColoring { q: 3, rounds: 8 };
        let (mut bad, mut total) = (0, 0);
        for s in 0..20 {
            let g = random_tree(300, s);
            let bits = BitSource::new(s);
            let ctx = Context { ids: None, bits: Some(&bits), advertised_n: 300 };
            let out: Vec<_> = evaluate(&g, &alg, &ctx).into_iter().map(Some).collect();
            bad += local_failures(&spec, &g, &out).iter().filter(|&&f| f).count();
            total += g.n();
        }
        assert!(bad * 50 < total, "{bad} of {total}");
    }

    #[test]
    fn window_has_both_sides() {
        let mut e = Engine::new(&builtin("proper-coloring", Some(3)).unwrap(), 3).unwrap();
        let s = e.single();
        let a = e.node(None, &[s]);
        let seq = vec![a; 20];
        let (g, u, v) = window(&e, &seq, 9, 2).unwrap();
        assert!(g.neighbors(u).any(|x| x == v));
        // core 7..=12, the outer two without their leaf
        assert!(g.is_tree());
        assert_eq!(g.n(), 6 + 4);
    }

    #[test]
    fn deterministic_alg_needs_one_trial() {
        let mut e = Engine::new(&builtin("all-sigma", None).unwrap(), 3).unwrap();
        let cfg = ExtractConfig { trials: 1, ..ExtractConfig::default() };
        let x = extract_f(&mut e, &ConstantAlg(0), &cfg).unwrap();
        assert!(x.hierarchy.is_ok());
        assert!(x.votes.values().all(|(p, c)| p == &vec![0, 0] && *c == 1));
    }

    #[test]
    fn extracted_three_coloring_rule_is_feasible() {
        let spec = builtin("proper-coloring", Some(3)).unwrap();
        let mut e = Engine::new(&spec, 3).unwrap();
        let alg = RandomizedColoring { q: 3, rounds: 3 };
        let cfg = ExtractConfig { trials: 300, ..ExtractConfig::default() };
        let x = extract_f(&mut e, &alg, &cfg).unwrap();
        let h = x.hierarchy.expect("extracted rule should be feasible");
        assert!(h.classes().iter().all(|&c| e.class(c).good()));
        assert!(x.rule.values().all(|p| p[0] != p[1]));
        let again = build_with_rule(&mut e, &x.rule, WParam::ELL, &Caps::default()).unwrap();
        assert_eq!(again.classes(), h.classes());
    }

    #[test]
    fn small_w_is_rejected() {
        let mut e = Engine::new(&builtin("proper-coloring", Some(3)).unwrap(), 3).unwrap();
        let alg = RandomizedColoring { q: 3, rounds: 20 };
        let cfg = ExtractConfig { wp: Some(WParam::ELL), ..ExtractConfig::default() };
        let r = extract_f(&mut e, &alg, &cfg);
        assert!(matches!(r, Err(TreeError::WTooSmall { .. })), "{r:?}");
    }
}
