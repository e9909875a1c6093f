//! Full-information LOCAL execution: after `t` rounds a vertex outputs a function of its radius-t view.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bits::BitSource;
use crate::graph::{ball, Context, PortGraph, View};
use crate::lcl::{check_global, local_failures, GlobalOutcome, Label, Labeling, LclSpec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("duplicate id {0}")]
    DuplicateId(u64),
    #[error("expected {expected} ids, got {got}")]
    IdCount { expected: usize, got: usize },
}

pub trait ViewAlgorithm: Send + Sync {
    fn name(&self) -> String;

    fn round_bound(&self, n: u64, delta: usize) -> usize;

    fn decide(&self, view: &View) -> Label;

    /// Batch evaluation over the whole graph. Implementations must agree with
    /// `decide` on `ball(g, v, round_bound)` for every `v`.
    fn decide_all(&self, _g: &PortGraph, _ctx: &Context) -> Option<Vec<Label>> {
        None
    }
}

/// Outputs the same label everywhere in zero rounds.
pub struct ConstantAlg(pub Label);

impl ViewAlgorithm for ConstantAlg {
    fn name(&self) -> String {
        format!("const{}", self.0)
    }

    fn round_bound(&self, _n: u64, _delta: usize) -> usize {
        0
    }

    fn decide(&self, _view: &View) -> Label {
        self.0
    }
}

/// Each vertex picks a uniform label from `0..q` using its own bits.
pub struct RandomLabelAlg(pub u32);

impl ViewAlgorithm for RandomLabelAlg {
    fn name(&self) -> String {
        format!("uniform{}", self.0)
    }

    fn round_bound(&self, _n: u64, _delta: usize) -> usize {
        0
    }

    fn decide(&self, view: &View) -> Label {
        view.center().bits.expect("randomized algorithm needs bits").below(0, self.0 as u64) as Label
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub graph: String,
    pub n: usize,
    pub delta: usize,
    pub spec: String,
    pub alg: String,
    pub seed: Option<u64>,
    pub advertised_n: u64,
    pub rounds_used: usize,
    pub labeling: Labeling,
    pub outcome: GlobalOutcome,
    pub failures: Vec<bool>,
}

impl RunReport {
    pub const CSV_HEADER: &'static str = "graph,n,Δ,spec,alg,seed,rounds,outcome,fail_local_max";

    pub fn fail_local_max(&self) -> u8 {
        self.failures.iter().any(|&f| f) as u8
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.graph,
            self.n,
            self.delta,
            self.spec,
            self.alg,
            self.seed.map_or("-".to_string(), |s| s.to_string()),
            self.rounds_used,
            self.outcome.tag(),
            self.fail_local_max()
        )
    }
}

/// Distinct ids drawn uniformly from `[1, n^3]`.
pub fn random_ids(n: usize, seed: u64) -> Vec<u64> {
    let hi = (n.max(2) as u64).pow(3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1d5);
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = rng.gen_range(1..=hi);
        if seen.insert(x) {
            out.push(x);
        }
    }
    out
}

pub fn evaluate(g: &PortGraph, alg: &dyn ViewAlgorithm, ctx: &Context) -> Vec<Label> {
    if let Some(out) = alg.decide_all(g, ctx) {
        return out;
    }
    let t = alg.round_bound(ctx.advertised_n, g.delta());
    (0..g.n()).into_par_iter().map(|v| alg.decide(&ball(g, v, t, ctx))).collect()
}

/// Per-view evaluation only, ignoring any batch path.
pub fn evaluate_views(g: &PortGraph, alg: &dyn ViewAlgorithm, ctx: &Context) -> Vec<Label> {
    let t = alg.round_bound(ctx.advertised_n, g.delta());
    (0..g.n()).into_par_iter().map(|v| alg.decide(&ball(g, v, t, ctx))).collect()
}

fn report(g: &PortGraph, spec: &LclSpec, alg: &dyn ViewAlgorithm, out: Vec<Label>, seed: Option<u64>, adv: u64) -> RunReport {
    let labeling: Labeling = out.into_iter().map(Some).collect();
    let outcome = check_global(spec, g, &labeling);
    let failures = if outcome.is_legal() { vec![false; g.n()] } else { local_failures(spec, g, &labeling) };
    RunReport {
        graph: "-".into(),
        n: g.n(),
        delta: g.delta(),
        spec: spec.name.clone(),
        alg: alg.name(),
        seed,
        advertised_n: adv,
        rounds_used: alg.round_bound(adv, g.delta()),
        labeling,
        outcome,
        failures,
    }
}

pub fn run_det(g: &PortGraph, spec: &LclSpec, alg: &dyn ViewAlgorithm, ids: &[u64]) -> Result<RunReport, SimError> {
    if ids.len() != g.n() {
        return Err(SimError::IdCount { expected: g.n(), got: ids.len() });
    }
    let mut seen = HashSet::with_capacity(ids.len());
    for &x in ids {
        if !seen.insert(x) {
            return Err(SimError::DuplicateId(x));
        }
    }
    let adv = g.n() as u64;
    let ctx = Context { ids: Some(ids), bits: None, advertised_n: adv };
    let out = evaluate(g, alg, &ctx);
    Ok(report(g, spec, alg, out, None, adv))
}

pub fn run_rand(g: &PortGraph, spec: &LclSpec, alg: &dyn ViewAlgorithm, seed: u64, advertised_n: u64) -> RunReport {
    let bits = BitSource::new(seed);
    let ctx = Context { ids: None, bits: Some(&bits), advertised_n };
    let out = evaluate(g, alg, &ctx);
    report(g, spec, alg, out, Some(seed), advertised_n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FailureStats {
    pub trials: usize,
    pub global_rate: f64,
    pub local_max_rate: f64,
}

pub fn estimate_failure(g: &PortGraph, spec: &LclSpec, alg: &dyn ViewAlgorithm, trials: usize, base_seed: u64) -> FailureStats {
    assert!(trials >= 1);
    let mut global = 0usize;
    let mut local = vec![0usize; g.n()];
    for t in 0..trials {
        let r = run_rand(g, spec, alg, base_seed.wrapping_add(t as u64), g.n() as u64);
        if !r.outcome.is_legal() {
            global += 1;
        }
        for (c, f) in local.iter_mut().zip(&r.failures) {
            *c += *f as usize;
        }
    }
    FailureStats {
        trials,
        global_rate: global as f64 / trials as f64,
        local_max_rate: local.into_iter().max().unwrap_or(0) as f64 / trials as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_path, gen_random_tree};
    use crate::lcl::builtin;

    #[test]
    fn constant_alg_is_legal_for_all_sigma() {
        let g = gen_random_tree(50, 3, 1).unwrap();
        let s = builtin("all-sigma", None).unwrap();
        let r = run_det(&g, &s, &ConstantAlg(1), &random_ids(50, 0)).unwrap();
        assert!(r.outcome.is_legal());
        assert_eq!(r.rounds_used, 0);
        let p: Vec<u64> = random_ids(50, 9);
        let r2 = run_det(&g, &s, &ConstantAlg(1), &p).unwrap();
        assert_eq!(r.labeling, r2.labeling);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let g = gen_path(3);
        let s = builtin("all-sigma", None).unwrap();
        assert_eq!(run_det(&g, &s, &ConstantAlg(0), &[1, 2, 1]).unwrap_err(), SimError::DuplicateId(1));
    }

    #[test]
    fn ids_distinct_and_bounded() {
        let ids = random_ids(1000, 4);
        let set: HashSet<_> = ids.iter().collect();
        assert_eq!(set.len(), 1000);
        assert!(ids.iter().all(|&x| (1..=1_000_000_000).contains(&x)));
    }

    #[test]
    fn rand_runs_reproducible() {
        let g = gen_random_tree(40, 3, 2).unwrap();
        let s = builtin("proper-coloring", Some(3)).unwrap();
        let a = run_rand(&g, &s, &RandomLabelAlg(3), 11, 40);
        let b = run_rand(&g, &s, &RandomLabelAlg(3), 11, 40);
        assert_eq!(a.labeling, b.labeling);
        assert_eq!(a.csv_row(), b.csv_row());
    }

    #[test]
    fn single_edge_failure_rate_half() {
        let g = gen_path(2);
        let s = builtin("two-coloring", None).unwrap();
        let st = estimate_failure(&g, &s, &RandomLabelAlg(2), 10000, 0);
        let sigma = (0.25f64 / 10000.0).sqrt();
        assert!((st.global_rate - 0.5).abs() < 3.0 * sigma, "{}", st.global_rate);
        let det = estimate_failure(&g, &builtin("all-sigma", None).unwrap(), &ConstantAlg(0), 20, 0);
        assert_eq!(det.global_rate, 0.0);
    }
}
