//! Shared pieces of the `locality` command line: algorithm selection, size sweeps and slope fits.

use std::sync::Arc;

use anyhow::{anyhow, bail, Context as _, Result};
use locality_core::algos::hier::SolveHier;
use locality_core::algos::orient::OrientCycle;
use locality_core::graph::{gen_hk, gen_path, gen_random_regular, gen_random_tree, gen_ring, gen_star, PortGraph};
use locality_core::lcl::{check_global, Labeling, LclSpec, SpecKind};
use locality_core::lll::{SinklessGuess, SpeedupWrapper};
use locality_core::sim::{random_ids, run_det, run_rand, ConstantAlg, RandomLabelAlg, ViewAlgorithm};
use locality_trees::hierarchy::{search_feasible, Caps, Decision, WParam};
use locality_trees::{synthesize_run, Engine, RandomizedColoring};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// Error carrying a process exit code.
#[derive(Debug)]
pub struct Exit(pub i32, pub String);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Exit {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    Exit(EXIT_USAGE, msg.into()).into()
}

pub fn cap(msg: impl Into<String>) -> anyhow::Error {
    Exit(EXIT_CAP, msg.into()).into()
}

/// `a..b` (inclusive), `a..b:step`, or a comma list.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    let out: Vec<usize> = if let Some((a, rest)) = s.split_once("..") {
        let (b, step) = rest.split_once(':').map_or((rest, "1"), |(b, st)| (b, st));
        let (a, b, step): (usize, usize, usize) = (a.parse()?, b.parse()?, step.parse()?);
        if step == 0 {
            return Err(usage("step must be positive"));
        }
        (a..=b).step_by(step).collect()
    } else {
        s.split(',').map(|x| x.trim().parse::<usize>()).collect::<Result<_, _>>()?
    };
    if out.is_empty() {
        return Err(usage(format!("empty size list {s:?}")));
    }
    if out.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage(format!("sizes must be strictly increasing: {s:?}")));
    }
    Ok(out)
}

pub fn parse_spec(s: &str) -> Result<LclSpec> {
    LclSpec::parse(s).map_err(|e| usage(format!("bad spec {s:?}: {e}")))
}

/// Instance families for `gen` and `experiment`.
pub fn generate(family: &str, n: usize, k: usize, delta: usize, seed: u64) -> Result<PortGraph> {
    let g = match family {
        "path" => gen_path(n),
        "ring" => gen_ring(n)?,
        "star" => gen_star(n),
        "tree" => gen_random_tree(n, delta, seed)?,
        "regular" => gen_random_regular(n, delta, seed)?,
        "hk" => gen_hk(k, n)?.graph,
        other => return Err(usage(format!("unknown family {other:?} (path, ring, star, tree, regular, hk)"))),
    };
    Ok(g)
}

/// Least-squares fit of `ln y = slope ln x + intercept`, with the RMS residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub points: usize,
}

pub fn fit_loglog(points: &[(f64, f64)]) -> Option<Fit> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum::<f64>() / m).sqrt();
    Some(Fit { slope, intercept, residual, points: pts.len() })
}

/// One measured run, as a CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub family: String,
    pub n: usize,
    pub delta: usize,
    pub spec: String,
    pub alg: String,
    pub seed: u64,
    pub rounds: usize,
    pub outcome: String,
}

impl Row {
    pub const HEADER: &'static str = "family,n,Δ,spec,alg,seed,rounds,outcome";

    pub fn csv(&self) -> String {
        format!("{},{},{},{},{},{},{},{}", self.family, self.n, self.delta, self.spec, self.alg, self.seed, self.rounds, self.outcome)
    }

    pub fn legal(&self) -> bool {
        self.outcome == "legal"
    }
}

/// The algorithms reachable from the command line.
pub enum Alg {
    Det(Box<dyn ViewAlgorithm>),
    Rand(Box<dyn ViewAlgorithm>),
    /// Rake/compress synthesis from a feasible rule found by search.
    Synth,
}

pub fn pick_alg(name: &str, spec: &LclSpec, delta: usize) -> Result<Alg> {
    let (head, arg) = name.split_once(':').map_or((name, None), |(a, b)| (a, Some(b)));
    let num = |default: Option<usize>| -> Result<usize> {
        match arg {
            Some(a) => a.parse().with_context(|| format!("bad parameter in {name:?}")),
            None => default.ok_or_else(|| usage(format!("{name:?} needs a parameter"))),
        }
    };
    let alg = match head {
        "hier" => match spec.kind {
            SpecKind::Hier(k) => Alg::Det(Box::new(SolveHier { k: num(Some(k))? })),
            _ => Alg::Det(Box::new(SolveHier { k: num(None)? })),
        },
        "orient" => match spec.kind {
            SpecKind::EllOrientation(l) => Alg::Det(Box::new(OrientCycle { ell: num(Some(l))? })),
            _ => Alg::Det(Box::new(OrientCycle { ell: num(None)? })),
        },
        "const" => Alg::Det(Box::new(ConstantAlg(num(Some(0))? as _))),
        "uniform" => Alg::Rand(Box::new(RandomLabelAlg(num(Some(spec.alphabet_size(delta)))? as u32))),
        "trial" => Alg::Rand(Box::new(RandomizedColoring { q: spec.alphabet_size(delta), rounds: num(Some(4))? })),
        "sinkless-guess" => Alg::Rand(Box::new(SinklessGuess)),
        "lll" => {
            let w = SpeedupWrapper::new(Arc::new(SinklessGuess), spec.clone(), delta, arg.map_or(Ok(3.0), |a| a.parse())?)?;
            Alg::Rand(Box::new(w))
        }
        "synth" => Alg::Synth,
        other => {
            return Err(usage(format!("unknown algorithm {other:?} (hier, orient, const, uniform, trial, sinkless-guess, lll, synth)")))
        }
    };
    Ok(alg)
}

/// Runs `alg` on `g` and verifies the output globally.
pub fn run_one(g: &PortGraph, spec: &LclSpec, alg: &Alg, seed: u64, advertised_n: Option<u64>) -> Result<(usize, Labeling, String, String)> {
    let adv = advertised_n.unwrap_or(g.n() as u64);
    match alg {
        Alg::Det(a) => {
            let ids = random_ids(g.n(), seed);
            let r = run_det(g, spec, a.as_ref(), &ids)?;
            Ok((r.rounds_used, r.labeling, r.outcome.tag().to_string(), a.name()))
        }
        Alg::Rand(a) => {
            let r = run_rand(g, spec, a.as_ref(), seed, adv);
            Ok((r.rounds_used, r.labeling, r.outcome.tag().to_string(), a.name()))
        }
        Alg::Synth => {
            let mut eng = Engine::new(spec, g.delta())?;
            let rule = match search_feasible(&mut eng, WParam::ELL, &Caps::default()) {
                Decision::Feasible { hierarchy, .. } => hierarchy,
                Decision::Infeasible { .. } => bail!(Exit(EXIT_VERIFY, format!("{} has no feasible rule on trees", spec.name))),
                Decision::Undecided { reason, .. } => return Err(cap(reason)),
            };
            let ids = random_ids(g.n(), seed);
            let rep = synthesize_run(&mut eng, &rule, g, &ids)?;
            let labeling: Labeling = rep.labels.iter().map(|&l| Some(l)).collect();
            let outcome = check_global(spec, g, &labeling);
            Ok((rep.rounds, labeling, outcome.tag().to_string(), "synth".into()))
        }
    }
}

/// Sweep for `experiment`; rows sorted by `(n, seed)`.
pub struct Plan {
    pub spec: LclSpec,
    pub family: String,
    pub sizes: Vec<usize>,
    pub k: usize,
    pub delta: usize,
    pub alg: String,
    pub seeds: Vec<u64>,
}

pub fn sweep(plan: &Plan) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for &x in &plan.sizes {
        for &seed in &plan.seeds {
            let g = generate(&plan.family, x, plan.k, plan.delta, seed)?;
            let alg = pick_alg(&plan.alg, &plan.spec, g.delta())?;
            let (rounds, _, outcome, name) = run_one(&g, &plan.spec, &alg, seed, None)?;
            rows.push(Row {
                family: plan.family.clone(),
                n: g.n(),
                delta: g.max_degree(),
                spec: plan.spec.name.clone(),
                alg: name,
                seed,
                rounds,
                outcome,
            });
        }
    }
    rows.sort_by_key(|r| (r.n, r.seed));
    Ok(rows)
}

pub fn fit_rows(rows: &[Row]) -> Option<Fit> {
    fit_loglog(&rows.iter().map(|r| (r.n as f64, r.rounds as f64)).collect::<Vec<_>>())
}

pub fn footer(fit: Option<Fit>) -> String {
    match fit {
        Some(f) => format!("# slope={:.4},intercept={:.4},residual={:.4},points={}", f.slope, f.intercept, f.residual, f.points),
        None => "# slope=NA".to_string(),
    }
}

pub fn read_graph(path: &str) -> Result<PortGraph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    PortGraph::from_text(&text).map_err(|e| anyhow!("parsing {path}: {e}"))
}
