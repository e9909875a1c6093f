//! Distributed Lovász Local Lemma: bad-event systems, ID-priority resampling, and the
//! speedup wrapper that runs an algorithm with a lied-about `n` and repairs it by resampling.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::bits::{BitSource, BitStream};
use crate::graph::{ball_with_map, induced_ball, Context, PortGraph, View};
use crate::lcl::{check_global, GlobalOutcome, Label, LclSpec};
use crate::sim::ViewAlgorithm;

const DRAW_BASE: u64 = 1 << 40;
const ID_WORD: u64 = 1 << 41;

#[derive(Debug, Error, PartialEq)]
pub enum LllError {
    #[error("duplicate event id {0}")]
    DuplicateEventId(u64),
    #[error("event {event} reads variable {var}, but only {vars} exist")]
    BadScope { event: usize, var: usize, vars: usize },
    #[error("resampling did not terminate within {cap} iterations ({remaining} events still occur)")]
    CapExceeded { cap: usize, remaining: usize },
    #[error("no advertised size up to 2^62 satisfies t* < log_Δ(n*)/(2c) - r")]
    NoConfig,
}

/// How a variable draws values; draw `j` is a pure function of `(sampler, j)`.
#[derive(Clone, Copy, Debug)]
pub enum Sampler {
    /// Uniform on `0..range` (`0` means all of `u64`), keyed by the run seed and variable index.
    Uniform(u64),
    /// An epoch for a vertex's bit stream: draw 0 is the stream itself.
    Stream(BitStream),
}

impl Sampler {
    fn draw(&self, src: &BitSource, var: usize, j: u64) -> u64 {
        match *self {
            Sampler::Uniform(0) => src.stream(var).word(j),
            Sampler::Uniform(r) => src.stream(var).below(j, r),
            Sampler::Stream(_) if j == 0 => 0,
            Sampler::Stream(s) => s.word(DRAW_BASE + j),
        }
    }
}

pub type Predicate = Arc<dyn Fn(&[u64]) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct Event {
    pub id: u64,
    /// Variables read by the predicate, which receives their values in this order.
    pub scope: Vec<usize>,
    pub occurs: Predicate,
}

#[derive(Clone)]
pub struct BadEventSystem {
    pub vars: Vec<Sampler>,
    pub events: Vec<Event>,
    var_events: Vec<Vec<usize>>,
}

impl BadEventSystem {
    pub fn new(vars: Vec<Sampler>, events: Vec<Event>) -> Result<Self, LllError> {
        let mut seen = std::collections::HashSet::new();
        let mut var_events = vec![Vec::new(); vars.len()];
        for (i, e) in events.iter().enumerate() {
            if !seen.insert(e.id) {
                return Err(LllError::DuplicateEventId(e.id));
            }
            for &x in &e.scope {
                if x >= vars.len() {
                    return Err(LllError::BadScope { event: i, var: x, vars: vars.len() });
                }
                var_events[x].push(i);
            }
        }
        for l in var_events.iter_mut() {
            l.dedup();
        }
        Ok(BadEventSystem { vars, events, var_events })
    }

    pub fn occurs(&self, e: usize, assignment: &[u64]) -> bool {
        let vals: Vec<u64> = self.events[e].scope.iter().map(|&x| assignment[x]).collect();
        (self.events[e].occurs)(&vals)
    }

    pub fn dependency_graph(&self, p: f64) -> DependencyGraph {
        let adj: Vec<Vec<usize>> = (0..self.events.len())
            .into_par_iter()
            .map(|a| {
                let mut nb: Vec<usize> = self.events[a]
                    .scope
                    .iter()
                    .flat_map(|&x| self.var_events[x].iter().copied())
                    .filter(|&b| b != a)
                    .collect();
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect();
        let d = adj.iter().map(Vec::len).max().unwrap_or(0);
        DependencyGraph { adj, p, d }
    }
}

#[derive(Clone, Debug)]
pub struct DependencyGraph {
    pub adj: Vec<Vec<usize>>,
    pub p: f64,
    pub d: usize,
}

/// `p d^c < 1`.
pub fn check_criterion(p: f64, d: usize, c: f64) -> bool {
    p == 0.0 || p * (d as f64).powf(c) < 1.0
}

pub fn default_cap(n: usize) -> usize {
    (100.0 * (n.max(2) as f64).log2()).ceil() as usize
}

#[derive(Clone, Debug)]
pub struct MtRun {
    pub assignment: Vec<u64>,
    pub iterations: usize,
    pub redraws: usize,
}

/// One resampling iteration, as seen by an observer.
pub struct MtStep<'a> {
    pub iteration: usize,
    pub occurring: &'a [usize],
    pub selected: &'a [usize],
    pub before: &'a [u64],
    pub after: &'a [u64],
}

pub fn mt_resample(sys: &BadEventSystem, seed: u64) -> Result<MtRun, LllError> {
    mt_resample_with(sys, seed, default_cap(sys.events.len()), &mut |_| {})
}

/// Each iteration resamples the variables of every occurring event whose id is smaller than
/// the ids of all occurring events it shares a variable with.
pub fn mt_resample_with(
    sys: &BadEventSystem,
    seed: u64,
    cap: usize,
    observer: &mut dyn FnMut(&MtStep),
) -> Result<MtRun, LllError> {
    let src = BitSource::new(seed);
    let mut draws = vec![0u64; sys.vars.len()];
    let mut asg: Vec<u64> = sys.vars.iter().enumerate().map(|(x, s)| s.draw(&src, x, 0)).collect();
    let mut occ: Vec<bool> = (0..sys.events.len()).into_par_iter().map(|e| sys.occurs(e, &asg)).collect();
    let mut iterations = 0;
    let mut redraws = 0;
    loop {
        let occurring: Vec<usize> = (0..occ.len()).filter(|&e| occ[e]).collect();
        if occurring.is_empty() {
            break;
        }
        if iterations >= cap {
            return Err(LllError::CapExceeded { cap, remaining: occurring.len() });
        }
        let selected: Vec<usize> = occurring
            .iter()
            .copied()
            .filter(|&a| {
                let id = sys.events[a].id;
                sys.events[a]
                    .scope
                    .iter()
                    .all(|&x| sys.var_events[x].iter().all(|&b| b == a || !occ[b] || sys.events[b].id > id))
            })
            .collect();
        let mut vars: Vec<usize> = selected.iter().flat_map(|&a| sys.events[a].scope.iter().copied()).collect();
        vars.sort_unstable();
        vars.dedup();
        let before = asg.clone();
        for &x in &vars {
            draws[x] += 1;
            asg[x] = sys.vars[x].draw(&src, x, draws[x]);
        }
        redraws += vars.len();
        iterations += 1;
        let mut touched: Vec<usize> = vars.iter().flat_map(|&x| sys.var_events[x].iter().copied()).collect();
        touched.sort_unstable();
        touched.dedup();
        let fresh: Vec<bool> = touched.par_iter().map(|&e| sys.occurs(e, &asg)).collect();
        for (e, f) in touched.into_iter().zip(fresh) {
            occ[e] = f;
        }
        observer(&MtStep { iteration: iterations, occurring: &occurring, selected: &selected, before: &before, after: &asg });
    }
    assert!((0..sys.events.len()).all(|e| !sys.occurs(e, &asg)));
    Ok(MtRun { assignment: asg, iterations, redraws })
}

/// One fair bit per edge (`0`: from the lower to the higher endpoint); one event per
/// non-isolated vertex, occurring when every incident edge points inward.
pub fn sinkless_system(g: &PortGraph, ids: &[u64]) -> Result<(BadEventSystem, Vec<(usize, usize)>), LllError> {
    let edges = g.edges();
    let index: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut events = Vec::new();
    for v in 0..g.n() {
        if g.degree(v) == 0 {
            continue;
        }
        let scope: Vec<usize> = g.neighbors(v).map(|w| index[&(v.min(w), v.max(w))]).collect();
        let lower: Vec<bool> = g.neighbors(v).map(|w| v < w).collect();
        let occurs: Predicate = Arc::new(move |vals: &[u64]| vals.iter().zip(&lower).all(|(&x, &lo)| (x == 1) == lo));
        events.push(Event { id: ids[v], scope, occurs });
    }
    let sys = BadEventSystem::new(vec![Sampler::Uniform(2); edges.len()], events)?;
    Ok((sys, edges))
}

/// Out-port masks for an edge assignment produced by [`sinkless_system`].
pub fn orientation_labels(g: &PortGraph, edges: &[(usize, usize)], assignment: &[u64]) -> Vec<Label> {
    let index: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    (0..g.n())
        .map(|v| {
            let mut mask = 0;
            for (p, &(w, _)) in g.ports(v).iter().enumerate() {
                let x = assignment[index[&(v.min(w), v.max(w))]];
                if (x == 0) == (v < w) {
                    mask |= 1 << p;
                }
            }
            mask
        })
        .collect()
}

/// Runs `alg` at every vertex with the given per-vertex streams.
pub fn label_with_streams(g: &PortGraph, alg: &dyn ViewAlgorithm, streams: &[BitStream], advertised_n: u64) -> Vec<Label> {
    let t = alg.round_bound(advertised_n, g.delta());
    let ctx = Context { ids: None, bits: None, advertised_n };
    (0..g.n())
        .into_par_iter()
        .map(|v| {
            let (mut view, map) = ball_with_map(g, v, t, &ctx, false);
            for (i, &w) in map.iter().enumerate() {
                view.verts[i].bits = Some(streams[w]);
            }
            alg.decide(&view)
        })
        .collect()
}

/// Upper bound on the dependency degree: `Δ^{2(r+t)}`.
pub fn dependency_bound(delta: usize, r: usize, t: usize) -> f64 {
    (delta as f64).powi(2 * (r + t) as i32)
}

/// One event per vertex: the radius-`r` ball around it is labeled illegally. The event reads
/// the stream epochs of every vertex within `r + t*`.
pub fn events_for_streams(
    g: &Arc<PortGraph>,
    spec: &Arc<LclSpec>,
    alg: &Arc<dyn ViewAlgorithm>,
    n_star: u64,
    streams: &[BitStream],
) -> Result<BadEventSystem, LllError> {
    let r = spec.radius;
    let t = alg.round_bound(n_star, g.delta());
    let events = (0..g.n())
        .into_par_iter()
        .map(|v| {
            let mut scope: Vec<usize> = g.bfs(v).iter().enumerate().filter(|(_, d)| d.is_some_and(|d| d <= r + t)).map(|(u, _)| u).collect();
            scope.sort_unstable();
            let base: Vec<BitStream> = scope.iter().map(|&u| streams[u]).collect();
            let (g, spec, alg, sc) = (g.clone(), spec.clone(), alg.clone(), scope.clone());
            let occurs: Predicate = Arc::new(move |vals: &[u64]| {
                let ctx = Context { ids: None, bits: None, advertised_n: n_star };
                let (rb, rmap) = induced_ball(&g, v, r, &Context::default());
                let labs: Vec<Label> = rmap
                    .iter()
                    .map(|&u| {
                        let (mut view, map) = ball_with_map(&g, u, t, &ctx, false);
                        for (i, w) in map.iter().enumerate() {
                            let k = sc.binary_search(w).unwrap();
                            view.verts[i].bits = Some(base[k].with_epoch(vals[k]));
                        }
                        alg.decide(&view)
                    })
                    .collect();
                !spec.verify(&rb, &labs)
            });
            Event { id: streams[v].word(ID_WORD), scope, occurs }
        })
        .collect();
    BadEventSystem::new(streams.iter().map(|&s| Sampler::Stream(s)).collect(), events)
}

/// Monte Carlo upper estimate of the per-vertex failure probability, with safety factor 2.
pub fn estimate_event_probability(g: &PortGraph, spec: &LclSpec, alg: &dyn ViewAlgorithm, n_star: u64, trials: usize, seed: u64) -> f64 {
    let mut fails = 0usize;
    for i in 0..trials {
        let src = BitSource::new(seed.wrapping_add(i as u64));
        let streams: Vec<BitStream> = (0..g.n()).map(|v| src.stream(v)).collect();
        let labs: Vec<Option<Label>> = label_with_streams(g, alg, &streams, n_star).into_iter().map(Some).collect();
        fails += crate::lcl::local_failures(spec, g, &labs).into_iter().filter(|&f| f).count();
    }
    2.0 * fails as f64 / (trials * g.n().max(1)) as f64
}

pub fn events_from_algorithm(
    g: &Arc<PortGraph>,
    spec: &Arc<LclSpec>,
    alg: &Arc<dyn ViewAlgorithm>,
    n_star: u64,
    seed: u64,
    p: Option<f64>,
) -> Result<(BadEventSystem, DependencyGraph), LllError> {
    let src = BitSource::new(seed);
    let streams: Vec<BitStream> = (0..g.n()).map(|v| src.stream(v)).collect();
    let sys = events_for_streams(g, spec, alg, n_star, &streams)?;
    let p = p.unwrap_or_else(|| estimate_event_probability(g, spec, alg.as_ref(), n_star, 50, seed ^ 0xabc));
    let dep = sys.dependency_graph(p);
    Ok((sys, dep))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpeedupConfig {
    pub c: f64,
    pub r: usize,
    pub delta: usize,
    pub n_star: u64,
    pub t_star: usize,
}

/// Smallest `n*` in `2, 4, 8, ...` with `T(n*) < log_Δ(n*)/(2c) - r`.
pub fn find_config(alg: &dyn ViewAlgorithm, r: usize, delta: usize, c: f64) -> Result<SpeedupConfig, LllError> {
    let ln_d = (delta.max(2) as f64).ln();
    for e in 1..=62 {
        let n_star = 1u64 << e;
        let t_star = alg.round_bound(n_star, delta);
        if (t_star as f64) < (n_star as f64).ln() / ln_d / (2.0 * c) - r as f64 {
            return Ok(SpeedupConfig { c, r, delta, n_star, t_star });
        }
    }
    Err(LllError::NoConfig)
}

#[derive(Clone, Debug)]
pub struct WrapOutcome {
    pub labels: Vec<Label>,
    pub iterations: usize,
    pub rounds: usize,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct WrapReport {
    pub n: usize,
    pub config: SpeedupConfig,
    pub p: f64,
    pub d: usize,
    pub d_bound: f64,
    pub criterion: bool,
    pub iterations: usize,
    pub rounds: usize,
    pub labels: Vec<Label>,
    pub outcome: GlobalOutcome,
}

impl WrapReport {
    pub const CSV_HEADER: &'static str = "n,Δ,p,d,c,criterion,iterations,outcome";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:e},{},{},{},{},{}",
            self.n,
            self.config.delta,
            self.p,
            self.d,
            self.config.c,
            self.criterion,
            self.iterations,
            self.outcome.tag()
        )
    }
}

/// Runs the inner algorithm as if the graph had `n*` vertices, then resamples the bit streams
/// of vertices around failed balls until every ball is legal.
pub struct SpeedupWrapper {
    pub alg: Arc<dyn ViewAlgorithm>,
    pub spec: Arc<LclSpec>,
    pub config: SpeedupConfig,
    pub p: Option<f64>,
}

impl SpeedupWrapper {
    pub fn new(alg: Arc<dyn ViewAlgorithm>, spec: LclSpec, delta: usize, c: f64) -> Result<Self, LllError> {
        let config = find_config(alg.as_ref(), spec.radius, delta, c)?;
        Ok(SpeedupWrapper { alg, spec: Arc::new(spec), config, p: None })
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    /// Initial labeling takes `t*`; each detection phase `2(r+t*)`; each resampling `r+t*`.
    pub fn account(&self, iterations: usize) -> usize {
        let rt = self.config.r + self.config.t_star;
        self.config.t_star + 2 * rt * (iterations + 1) + rt * iterations
    }

    fn solve(&self, g: PortGraph, streams: &[BitStream], cap: usize) -> Result<(WrapOutcome, Arc<PortGraph>, BadEventSystem), LllError> {
        let g = Arc::new(g);
        let sys = events_for_streams(&g, &self.spec, &self.alg, self.config.n_star, streams)?;
        let (asg, iterations, converged) = match mt_resample_with(&sys, 0, cap, &mut |_| {}) {
            Ok(run) => (run.assignment, run.iterations, true),
            Err(LllError::CapExceeded { .. }) => {
                // replay to the cap to recover the final assignment
                let mut last = Vec::new();
                let _ = mt_resample_with(&sys, 0, cap, &mut |s| last = s.after.to_vec());
                (last, cap, false)
            }
            Err(e) => return Err(e),
        };
        let cur: Vec<BitStream> = streams.iter().zip(&asg).map(|(s, &e)| s.with_epoch(e)).collect();
        let labels = label_with_streams(&g, self.alg.as_ref(), &cur, self.config.n_star);
        Ok((WrapOutcome { labels, iterations, rounds: self.account(iterations), converged }, g, sys))
    }

    pub fn run(&self, g: &PortGraph, seed: u64) -> Result<WrapReport, LllError> {
        let src = BitSource::new(seed);
        let streams: Vec<BitStream> = (0..g.n()).map(|v| src.stream(v)).collect();
        let (out, g, sys) = self.solve(g.clone(), &streams, default_cap(g.n()))?;
        if !out.converged {
            return Err(LllError::CapExceeded { cap: out.iterations, remaining: 0 });
        }
        let p = self
            .p
            .unwrap_or_else(|| estimate_event_probability(&g, &self.spec, self.alg.as_ref(), self.config.n_star, 50, seed ^ 0xabc));
        let d = sys.dependency_graph(p).d;
        let outcome = check_global(&self.spec, &g, &out.labels.iter().map(|&l| Some(l)).collect());
        Ok(WrapReport {
            n: g.n(),
            config: self.config,
            p,
            d,
            d_bound: dependency_bound(self.config.delta, self.config.r, self.config.t_star),
            criterion: check_criterion(p, d, self.config.c),
            iterations: out.iterations,
            rounds: out.rounds,
            labels: out.labels,
            outcome,
        })
    }
}

impl ViewAlgorithm for SpeedupWrapper {
    fn name(&self) -> String {
        format!("lll[{}]", self.alg.name())
    }

    fn round_bound(&self, n: u64, _delta: usize) -> usize {
        self.account(default_cap(n as usize))
    }

    /// Replays the whole wrapper on the graph spanned by the view; hidden ports become leaf stubs.
    fn decide(&self, view: &View) -> Label {
        let (g, stubs) = PortGraph::from_view(view);
        let mut streams: Vec<BitStream> = view.verts.iter().map(|v| v.bits.expect("wrapper needs random bits")).collect();
        for &(owner, p) in &stubs {
            streams.push(streams[owner].derived(p as u64));
        }
        let cap = default_cap(view.advertised_n as usize);
        match self.solve(g, &streams, cap) {
            Ok((out, _, _)) => out.labels[0],
            Err(_) => 0,
        }
    }

    fn decide_all(&self, g: &PortGraph, ctx: &Context) -> Option<Vec<Label>> {
        let bits = ctx.bits?;
        let streams: Vec<BitStream> = (0..g.n()).map(|v| bits.stream(v)).collect();
        let cap = default_cap(ctx.advertised_n as usize);
        self.solve(g.clone(), &streams, cap).ok().map(|(out, _, _)| out.labels)
    }
}

/// One-round randomized sinkless-orientation guess: each edge gets an independent fair
/// direction computed from both endpoints' bits. A degree-`d` vertex is a sink with probability `2^-d`.
pub struct SinklessGuess;

impl SinklessGuess {
    pub fn failure_probability(delta: usize) -> f64 {
        0.5f64.powi(delta as i32)
    }
}

impl ViewAlgorithm for SinklessGuess {
    fn name(&self) -> String {
        "sinkless-guess".into()
    }

    fn round_bound(&self, _n: u64, _delta: usize) -> usize {
        1
    }

    fn decide(&self, view: &View) -> Label {
        let me = view.center();
        let mine = me.bits.expect("randomized algorithm needs bits");
        let mut mask = 0;
        for (p, e) in me.ports.iter().enumerate() {
            let Some((w, q)) = *e else { continue };
            let a = mine.word(p as u64 + 1);
            let b = view.verts[w].bits.expect("randomized algorithm needs bits").word(q as u64);
            let coin = (a ^ b) & 1 == 1;
            if (a > b) != coin {
                mask |= 1 << p;
            }
        }
        mask
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_random_regular, gen_ring};
    use crate::lcl::builtin;
    use crate::sim::{random_ids, ConstantAlg};

    #[test]
    fn criterion_examples() {
        assert!(check_criterion(0.5f64.powi(16), 16, 3.0));
        assert!(!check_criterion(0.25, 2, 3.0));
        assert!(check_criterion(0.0, 1000, 3.0));
    }

    #[test]
    fn impossible_events_take_zero_iterations() {
        let ev = Event { id: 1, scope: vec![0], occurs: Arc::new(|_| false) };
        let sys = BadEventSystem::new(vec![Sampler::Uniform(2)], vec![ev]).unwrap();
        assert_eq!(mt_resample(&sys, 3).unwrap().iterations, 0);
    }

    #[test]
    fn single_coin_mean_iterations_one() {
        let ev = Event { id: 1, scope: vec![0], occurs: Arc::new(|v| v[0] == 1) };
        let sys = BadEventSystem::new(vec![Sampler::Uniform(2)], vec![ev]).unwrap();
        let trials = 4000;
        let total: usize = (0..trials).map(|s| mt_resample(&sys, s).unwrap().iterations).sum();
        let mean = total as f64 / trials as f64;
        // geometric number of heads before the first tails: mean 1, variance 2
        let sigma = (2.0 / trials as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * sigma, "{mean}");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let ev = Event { id: 1, scope: vec![0], occurs: Arc::new(|_| false) };
        assert_eq!(BadEventSystem::new(vec![Sampler::Uniform(2)], vec![ev.clone(), ev]).err(), Some(LllError::DuplicateEventId(1)));
    }

    #[test]
    fn sinkless_resampling_invariants() {
        let spec = builtin("sinkless-orientation", None).unwrap();
        for seed in 0..10 {
            let g = gen_random_regular(300, 3, seed).unwrap();
            let (sys, edges) = sinkless_system(&g, &random_ids(300, seed)).unwrap();
            let dep = sys.dependency_graph(0.125);
            assert_eq!(dep.d, 3);
            assert!(dep.adj.iter().enumerate().all(|(a, l)| l.iter().all(|&b| dep.adj[b].contains(&a))));
            let mut steps = 0;
            let run = mt_resample_with(&sys, seed, default_cap(300), &mut |s| {
                steps += 1;
                let sel: std::collections::HashSet<usize> = s.selected.iter().copied().collect();
                assert!(!s.selected.is_empty());
                for &a in s.selected {
                    assert!(s.occurring.contains(&a));
                    for &b in &dep.adj[a] {
                        assert!(!sel.contains(&b));
                        if s.occurring.contains(&b) {
                            assert!(sys.events[a].id < sys.events[b].id);
                        }
                    }
                }
                let allowed: std::collections::HashSet<usize> =
                    s.selected.iter().flat_map(|&a| sys.events[a].scope.iter().copied()).collect();
                for x in 0..s.before.len() {
                    if !allowed.contains(&x) {
                        assert_eq!(s.before[x], s.after[x]);
                    }
                }
            })
            .unwrap();
            assert_eq!(steps, run.iterations);
            let lab = orientation_labels(&g, &edges, &run.assignment);
            assert!(check_global(&spec, &g, &lab.into_iter().map(Some).collect()).is_legal());
        }
    }

    #[test]
    fn ring_event_scopes() {
        let g = Arc::new(gen_ring(20).unwrap());
        let spec = Arc::new(builtin("sinkless-orientation", None).unwrap());
        let alg: Arc<dyn ViewAlgorithm> = Arc::new(SinklessGuess);
        let (sys, dep) = events_from_algorithm(&g, &spec, &alg, 1 << 20, 1, Some(0.25)).unwrap();
        assert!(sys.events.iter().all(|e| e.scope.len() == 5));
        assert_eq!(dep.d, 8);
        assert!(dep.d as f64 <= dependency_bound(2, 1, 1));
        let alg: Arc<dyn ViewAlgorithm> = Arc::new(ConstantAlg(0));
        let spec0 = Arc::new(builtin("all-sigma", None).unwrap());
        let (sys, dep) = events_from_algorithm(&g, &spec0, &alg, 1 << 20, 1, None).unwrap();
        assert!(sys.events.iter().all(|e| e.scope.len() == 3));
        assert_eq!(dep.d, 4);
        assert_eq!(dep.p, 0.0);
        assert_eq!(mt_resample(&sys, 0).unwrap().iterations, 0);
    }

    #[test]
    fn config_search() {
        let c = find_config(&SinklessGuess, 1, 16, 3.0).unwrap();
        assert_eq!(c.t_star, 1);
        assert_eq!(c.n_star, 1 << 49);
        assert!(find_config(&crate::algos::hier::SolveHier { k: 1 }, 1, 3, 3.0).is_err());
    }

    #[test]
    fn wrapper_repairs_guesses() {
        let spec = builtin("sinkless-orientation", None).unwrap();
        let w = SpeedupWrapper::new(Arc::new(SinklessGuess), spec, 12, 3.0).unwrap().with_p(SinklessGuess::failure_probability(12));
        let mut resampled = false;
        for seed in 0..20 {
            let g = gen_random_regular(1000, 12, seed).unwrap();
            let r = w.run(&g, seed).unwrap();
            assert!(r.outcome.is_legal(), "seed {seed}");
            assert!(r.rounds <= 3 * (w.config.r + w.config.t_star) * (r.iterations + 1));
            resampled |= r.iterations > 0;
        }
        assert!(resampled);
    }

    #[test]
    fn wrapper_views_agree_with_batch() {
        let spec = builtin("sinkless-orientation", None).unwrap();
        let w = SpeedupWrapper::new(Arc::new(SinklessGuess), spec, 3, 3.0).unwrap().with_p(0.125);
        let g = gen_random_regular(16, 3, 4).unwrap();
        for seed in 0..5 {
            let bits = BitSource::new(seed);
            let ctx = Context { ids: None, bits: Some(&bits), advertised_n: 16 };
            let batch = w.decide_all(&g, &ctx).unwrap();
            let views = crate::sim::evaluate_views(&g, &w, &ctx);
            assert_eq!(batch, views);
        }
    }
}
