//! The hierarchy `T_1, H_1, H_1^+, T_2, ...` over classes, and the search for a feasible labeling rule.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use locality_core::lcl::Label;

use crate::engine::{ClassId, Engine, Prefix, TypeId};
use crate::TreeError;

/// `w = max(mul * ell + add, ell)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WParam {
    pub mul: usize,
    pub add: usize,
}

impl WParam {
    pub const ELL: WParam = WParam { mul: 1, add: 0 };

    pub fn fixed(w: usize) -> WParam {
        WParam { mul: 0, add: w }
    }

    pub fn resolve(&self, ell: usize) -> usize {
        (self.mul * ell + self.add).max(ell)
    }
}

#[derive(Clone, Debug)]
pub struct Caps {
    pub max_iterations: usize,
    pub max_classes: usize,
    pub max_types: usize,
    pub max_restarts: usize,
    pub max_nodes: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_iterations: 40, max_classes: 20_000, max_types: 5_000, max_restarts: 40, max_nodes: 2_000 }
    }
}

/// A member of `H^+`: `Extend(Label(H))` for the first `H` of a given type.
#[derive(Clone, Debug)]
pub struct PlusEntry {
    pub source: TypeId,
    pub source_seq: Vec<ClassId>,
    pub labels: Vec<Label>,
    pub seq: Vec<ClassId>,
    /// The labeled edge joins `seq[edge]` and `seq[edge + 1]`.
    pub edge: usize,
    pub view_s: ClassId,
    pub view_t: ClassId,
    /// Iteration at which the entry was added.
    pub level: usize,
}

#[derive(Clone, Debug)]
pub struct Hierarchy {
    pub ell: usize,
    pub w: usize,
    pub ell_pump: usize,
    /// `levels[i-1]` = `Class(T_i)`, sorted.
    pub levels: Vec<Vec<ClassId>>,
    pub hplus: Vec<PlusEntry>,
    pub converged: bool,
    plus_ix: HashMap<TypeId, usize>,
}

impl Hierarchy {
    pub fn k_reached(&self) -> usize {
        self.levels.len()
    }

    pub fn classes(&self) -> &[ClassId] {
        self.levels.last().map_or(&[], |v| v.as_slice())
    }

    pub fn entry(&self, source: TypeId) -> Option<&PlusEntry> {
        self.plus_ix.get(&source).map(|&i| &self.hplus[i])
    }

    pub fn rule(&self) -> LabelRule {
        self.hplus.iter().map(|e| (e.source, e.labels.clone())).collect()
    }

    pub fn dump(&self, eng: &Engine) -> String {
        let mut s = String::new();
        writeln!(s, "ell {} w {} ell_pump {} converged {} k {}", self.ell, self.w, self.ell_pump, self.converged, self.k_reached()).unwrap();
        for (i, lv) in self.levels.iter().enumerate() {
            writeln!(s, "T{} classes {}", i + 1, lv.len()).unwrap();
            for &c in lv {
                let d = eng.class(c);
                writeln!(s, "  class {c} degree {} admissible {:0w$b} size {}", d.degree(), d.free, d.rep.size, w = eng.q).unwrap();
            }
        }
        for e in &self.hplus {
            writeln!(
                s,
                "H+ level {} source type {} length {} labels {:?} core {} views {} {}",
                e.level,
                e.source,
                e.source_seq.len(),
                e.labels,
                e.seq.len(),
                e.view_s,
                e.view_t
            )
            .unwrap();
        }
        s
    }
}

/// Label choice per source type, for the two endpoints of the middle edge.
pub type LabelRule = BTreeMap<TypeId, Vec<Label>>;

#[derive(Clone, Debug)]
pub struct BuildCtx {
    pub ell: usize,
    pub w: usize,
    pub ell_pump: usize,
}

#[derive(Debug)]
pub enum BuildStop {
    NeedChoice(TypeId),
    Bad { level: usize, class: ClassId },
    Cap(String),
    Error(TreeError),
}

impl From<TreeError> for BuildStop {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::Cap(s) => BuildStop::Cap(s),
            e => BuildStop::Error(e),
        }
    }
}

pub type Chooser<'a> = dyn FnMut(&mut Engine, TypeId, &[ClassId], &BuildCtx) -> Result<Option<Vec<Label>>, TreeError> + 'a;

fn ell_pump(eng: &mut Engine, alpha: &[ClassId], caps: &Caps) -> Result<usize, TreeError> {
    Ok(eng.reachable_types(alpha, caps.max_types)?.len() + 2)
}

/// Types of `H_i` in canonical order (length, then lexicographic class sequence) with the first
/// sequence of each.
fn h_types(eng: &mut Engine, alpha: &[ClassId], ell: usize) -> Vec<(TypeId, Vec<ClassId>)> {
    let mut out = Vec::new();
    let mut done: HashSet<TypeId> = HashSet::new();
    let mut layer: Vec<(Prefix, Vec<ClassId>)> = alpha.iter().map(|&c| (Prefix::Single(c), vec![c])).collect();
    for len in 2..=2 * ell {
        let mut next = Vec::new();
        let mut seen: HashSet<Prefix> = HashSet::new();
        for (p, seq) in &layer {
            for &c in alpha {
                let np = Prefix::Type(eng.step(*p, c));
                if seen.insert(np) {
                    let mut s = seq.clone();
                    s.push(c);
                    next.push((np, s));
                }
            }
        }
        if len >= ell {
            for (p, s) in &next {
                if let Prefix::Type(t) = p {
                    if done.insert(*t) {
                        out.push((*t, s.clone()));
                    }
                }
            }
        }
        layer = next;
    }
    out
}

/// Multisets of size at most `k` over `0..m`, as sorted index vectors.
fn multisets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &frontier {
            let lo = s.last().copied().unwrap_or(0);
            for i in lo..m {
                let mut t: Vec<usize> = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn build_hierarchy(eng: &mut Engine, choose: &mut Chooser<'_>, wp: WParam, caps: &Caps) -> Result<Hierarchy, BuildStop> {
    let delta = eng.delta;
    let mut lp = 2;
    for _ in 0..caps.max_restarts {
        let ell = 2 * (1 + lp);
        let w = wp.resolve(ell);
        let ctx = BuildCtx { ell, w, ell_pump: lp };
        let single = eng.single();
        let mut t_set: BTreeSet<ClassId> = BTreeSet::from([single]);
        let mut levels = vec![vec![single]];
        let mut hplus: Vec<PlusEntry> = Vec::new();
        let mut plus_ix: HashMap<TypeId, usize> = HashMap::new();
        let eligible = |eng: &Engine, set: &BTreeSet<ClassId>| -> Vec<ClassId> {
            set.iter().copied().filter(|&c| eng.class(c).degree() + 2 <= delta).collect()
        };
        let now = ell_pump(eng, &eligible(eng, &t_set), caps)?;
        if now > lp {
            lp = now;
            continue;
        }
        let mut restart = false;
        for i in 1..=caps.max_iterations {
            let alpha = eligible(eng, &t_set);
            for (tau, seq) in h_types(eng, &alpha, ell) {
                if plus_ix.contains_key(&tau) {
                    continue;
                }
                let labels = choose(eng, tau, &seq, &ctx)?.ok_or(BuildStop::NeedChoice(tau))?;
                let labeled = eng.label_seq(&seq, &labels);
                let (plus, edge) = eng.extend(&labeled, w, lp)?;
                let (view_s, view_t) = eng.views(&plus);
                // roots holding one or two views already belong to T_{i+1}
                let mut probe = vec![vec![view_s], vec![view_t], vec![view_s, view_t]];
                for e in &hplus {
                    for v in [view_s, view_t] {
                        probe.push(vec![v, e.view_s]);
                        probe.push(vec![v, e.view_t]);
                    }
                }
                for kids in probe.into_iter().filter(|k| k.len() <= delta) {
                    let c = eng.node(None, &kids);
                    if !eng.class(c).good() {
                        return Err(BuildStop::Bad { level: i + 1, class: c });
                    }
                }
                plus_ix.insert(tau, hplus.len());
                hplus.push(PlusEntry { source: tau, source_seq: seq, labels, seq: plus, edge, view_s, view_t, level: i });
            }
            // children of T_{i+1} roots, one class per distinct child signature
            let mut kid: Vec<ClassId> = t_set.iter().copied().filter(|&c| eng.class(c).degree() < delta).collect();
            for e in &hplus {
                kid.push(e.view_s);
                kid.push(e.view_t);
            }
            let mut by_sig: BTreeMap<(Option<Label>, Vec<u16>), ClassId> = BTreeMap::new();
            for c in kid {
                let d = eng.class(c);
                let k = (d.key.preset, d.s.clone());
                match by_sig.get(&k) {
                    Some(&o) if eng.class(o).rep.size <= d.rep.size => {}
                    _ => {
                        by_sig.insert(k, c);
                    }
                }
            }
            let kids: Vec<ClassId> = by_sig.into_values().collect();
            let mut next: BTreeSet<ClassId> = BTreeSet::new();
            for ms in multisets(kids.len(), delta) {
                let cs: Vec<ClassId> = ms.iter().map(|&j| kids[j]).collect();
                next.insert(eng.node(None, &cs));
            }
            if let Some(&bad) = next.iter().find(|&&c| !eng.class(c).good()) {
                return Err(BuildStop::Bad { level: i + 1, class: bad });
            }
            if eng.class_count() > caps.max_classes {
                return Err(BuildStop::Cap(format!("more than {} classes", caps.max_classes)));
            }
            let now = ell_pump(eng, &eligible(eng, &next), caps)?;
            if now > lp {
                lp = now;
                restart = true;
                break;
            }
            let converged = next == t_set;
            t_set = next;
            if converged {
                return Ok(Hierarchy { ell, w, ell_pump: lp, levels, hplus, converged: true, plus_ix });
            }
            levels.push(t_set.iter().copied().collect());
        }
        if !restart {
            return Err(BuildStop::Cap(format!("no convergence within {} iterations", caps.max_iterations)));
        }
    }
    Err(BuildStop::Cap(format!("ell_pump still growing after {} restarts", caps.max_restarts)))
}

/// Builds the hierarchy for a fixed rule; types missing from the rule stop the build.
pub fn build_with_rule(eng: &mut Engine, rule: &LabelRule, wp: WParam, caps: &Caps) -> Result<Hierarchy, BuildStop> {
    build_hierarchy(eng, &mut |_, t, _, _| Ok(rule.get(&t).cloned()), wp, caps)
}

#[derive(Debug)]
pub enum Decision {
    Feasible { rule: LabelRule, hierarchy: Hierarchy, explored: usize },
    Infeasible { explored: usize },
    Undecided { reason: String, explored: usize },
}

impl Decision {
    /// Complexity class on bounded-degree trees implied by the outcome.
    pub fn verdict(&self) -> &'static str {
        match self {
            Decision::Feasible { .. } => "O(log n)",
            Decision::Infeasible { .. } => "n^{Ω(1)}",
            Decision::Undecided { .. } => "undecided",
        }
    }
}

/// Depth-first search over label choices, in lexicographic order, pruning a branch as soon as
/// a class without a consistent labeling appears.
pub fn search_feasible(eng: &mut Engine, wp: WParam, caps: &Caps) -> Decision {
    let q = eng.q as Label;
    let choices: Vec<Vec<Label>> = (0..q).flat_map(|a| (0..q).map(move |b| vec![a, b])).collect();
    let mut stack: Vec<LabelRule> = vec![LabelRule::new()];
    let mut explored = 0;
    while let Some(rule) = stack.pop() {
        explored += 1;
        if explored > caps.max_nodes {
            return Decision::Undecided { reason: format!("more than {} search nodes", caps.max_nodes), explored };
        }
        match build_with_rule(eng, &rule, wp, caps) {
            Ok(h) => return Decision::Feasible { rule, hierarchy: h, explored },
            Err(BuildStop::NeedChoice(t)) => {
                for c in choices.iter().rev() {
                    let mut r = rule.clone();
                    r.insert(t, c.clone());
                    stack.push(r);
                }
            }
            Err(BuildStop::Bad { .. }) => {}
            Err(BuildStop::Cap(reason)) => return Decision::Undecided { reason, explored },
            Err(BuildStop::Error(e)) => return Decision::Undecided { reason: e.to_string(), explored },
        }
    }
    Decision::Infeasible { explored }
}
