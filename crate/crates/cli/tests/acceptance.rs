//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any criterion fails.

use std::sync::Arc;
use std::time::Instant;

use locality_cli::{fit_rows, sweep, Plan};
use locality_core::algos::decomp::{level_bound, rc_decompose, validate_decomposition};
use locality_core::algos::orient::OrientCycle;
use locality_core::graph::{gen_random_regular, gen_random_tree, gen_ring, Context, PortGraph};
use locality_core::lcl::{builtin, check_global, Labeling, LclSpec};
use locality_core::lll::{check_criterion, mt_resample, orientation_labels, sinkless_system, SinklessGuess, SpeedupWrapper};
use locality_core::sim::{evaluate_views, random_ids, run_det};
use locality_trees::checks::{class_oracle, composition_oracle, pump_oracle, replace_oracle, type_oracle, w_independence, SuiteReport};
use locality_trees::hierarchy::{search_feasible, Caps, Decision, WParam};
use locality_trees::{synthesize_run, Engine};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = f();
    println!("{} criterion {id} ({name}): {} [{:.1}s]", if o.pass { "PASS" } else { "FAIL" }, o.detail, t.elapsed().as_secs_f64());
    o.pass
}

fn spec(s: &str) -> LclSpec {
    LclSpec::parse(s).unwrap()
}

fn hier_exponent() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 1..=3 {
        let plan = Plan {
            spec: spec(&format!("hier:{k}")),
            family: "hk".into(),
            sizes: (4..=32).collect(),
            k,
            delta: 3,
            alg: "hier".into(),
            seeds: vec![0],
        };
        let rows = sweep(&plan).unwrap();
        let legal = rows.iter().all(|r| r.legal());
        let fit = fit_rows(&rows).unwrap();
        let target = 1.0 / k as f64;
        let ok = legal && (fit.slope - target).abs() <= 0.15;
        pass &= ok;
        parts.push(format!("k={k} slope {:.3} (target {:.3}, n up to {}, legal {legal})", fit.slope, target, rows.last().unwrap().n));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn rake_compress() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut bad = Vec::new();
    let mut count = 0;
    for i in 0..200 {
        let ell = if i % 2 == 0 { 4 } else { 8 };
        let n = (10f64.powf(1.0 + 4.0 * (i / 2) as f64 / 99.0)).round() as usize;
        let g = gen_random_tree(n, 3, rng.gen()).unwrap();
        let d = rc_decompose(&g, ell, &random_ids(n, i as u64)).unwrap();
        count += 1;
        if let Err(e) = validate_decomposition(&g, &d) {
            bad.push(format!("n={n} ell={ell}: {e}"));
        }
        let b = level_bound(n, ell);
        worst = worst.max(d.levels() as f64 - b);
        if d.levels() as f64 > b {
            bad.push(format!("n={n} ell={ell}: {} levels > {b:.2}", d.levels()));
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("{count} trees up to n=100000, max(levels - bound) = {worst:.2}; {bad:?}") }
}

fn ring_with_ports(n: usize, mask: u64) -> PortGraph {
    let mut g = gen_ring(n).unwrap();
    for v in 0..n {
        if mask >> v & 1 == 1 {
            g.permute_ports(v, &[1, 0]);
        }
    }
    g
}

fn orientation() -> Outcome {
    let mut bad = Vec::new();
    let mut rounds = Vec::new();
    for ell in [2, 4, 8] {
        let sp = spec(&format!("ell-orientation:{ell}"));
        let alg = OrientCycle { ell };
        let r: Vec<usize> = [100, 10_000]
            .iter()
            .map(|&n| {
                let g = gen_ring(n).unwrap();
                let rep = run_det(&g, &sp, &alg, &random_ids(n, 1)).unwrap();
                if !rep.outcome.is_legal() {
                    bad.push(format!("ell={ell} n={n} illegal"));
                }
                rep.rounds_used
            })
            .collect();
        if r[0] != r[1] {
            bad.push(format!("ell={ell}: rounds {} vs {}", r[0], r[1]));
        }
        rounds.push(r[0]);
        for n in 3..=1000 {
            let g = gen_ring(n).unwrap();
            let rep = run_det(&g, &sp, &alg, &random_ids(n, n as u64)).unwrap();
            if !rep.outcome.is_legal() {
                bad.push(format!("ell={ell} n={n} illegal"));
            }
        }
        for n in 3..=8 {
            for mask in 0..(1u64 << n) {
                let g = ring_with_ports(n, mask);
                let ids = random_ids(n, mask ^ 0x55);
                let ctx = Context { ids: Some(&ids), bits: None, advertised_n: n as u64 };
                let lab: Labeling = evaluate_views(&g, &alg, &ctx).into_iter().map(Some).collect();
                if !check_global(&sp, &g, &lab).is_legal() {
                    bad.push(format!("ell={ell} n={n} ports {mask:b} illegal"));
                }
            }
        }
    }
    bad.truncate(10);
    Outcome { pass: bad.is_empty(), detail: format!("rounds for ell=2,4,8: {rounds:?} at n=100 and n=10000; {bad:?}") }
}

fn lll_resampling() -> Outcome {
    let sp = builtin("sinkless-orientation", None).unwrap();
    let p = 0.5f64.powi(16);
    let mut bad = Vec::new();
    let mut per_n = Vec::new();
    for n in [500, 2000, 8000] {
        let mut iters = Vec::new();
        for seed in 0..20 {
            let g = gen_random_regular(n, 16, seed).unwrap();
            let ids = random_ids(n, seed);
            let (sys, edges) = sinkless_system(&g, &ids).unwrap();
            let d = sys.dependency_graph(p).d;
            if d > 16 || !check_criterion(p, d, 3.0) {
                bad.push(format!("n={n} seed={seed}: d={d}"));
            }
            match mt_resample(&sys, seed) {
                Ok(run) => {
                    let lab: Labeling = orientation_labels(&g, &edges, &run.assignment).into_iter().map(Some).collect();
                    if !check_global(&sp, &g, &lab).is_legal() {
                        bad.push(format!("n={n} seed={seed}: bad events remain"));
                    }
                    iters.push(run.iterations);
                }
                Err(e) => bad.push(format!("n={n} seed={seed}: {e}")),
            }
        }
        per_n.push((n, iters));
    }
    // fitted at n = 500; a run with no iteration at all counts as one
    let c = per_n[0].1.iter().map(|&i| i.max(1)).max().unwrap_or(1) as f64 / 500f64.log2();
    for (n, iters) in &per_n {
        let lim = c * (*n as f64).log2();
        if let Some(&m) = iters.iter().max() {
            if m as f64 > lim {
                bad.push(format!("n={n}: {m} iterations > {lim:.2}"));
            }
        }
    }
    let maxes: Vec<String> = per_n.iter().map(|(n, it)| format!("n={n} max {}", it.iter().max().unwrap_or(&0))).collect();
    Outcome { pass: bad.is_empty(), detail: format!("C={c:.3}; {}; {bad:?}", maxes.join(", ")) }
}

fn speedup_wrapper() -> Outcome {
    let sp = builtin("sinkless-orientation", None).unwrap();
    let w = SpeedupWrapper::new(Arc::new(SinklessGuess), sp, 16, 3.0).unwrap().with_p(SinklessGuess::failure_probability(16));
    let rt = w.config.r + w.config.t_star;
    let mut bad = Vec::new();
    let mut total_iter = 0;
    for seed in 0..20 {
        let g = gen_random_regular(1000, 16, seed).unwrap();
        match w.run(&g, seed) {
            Ok(r) => {
                total_iter += r.iterations;
                if !r.outcome.is_legal() {
                    bad.push(format!("seed {seed}: illegal"));
                }
                if r.rounds != w.account(r.iterations) || r.rounds > 3 * rt * (r.iterations + 1) {
                    bad.push(format!("seed {seed}: {} rounds for {} iterations", r.rounds, r.iterations));
                }
            }
            Err(e) => bad.push(format!("seed {seed}: {e}")),
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("20 seeds on 16-regular n=1000, r+t*={rt}, n*={}, resampling iterations {total_iter}; {bad:?}", w.config.n_star),
    }
}

fn catalog() -> Vec<LclSpec> {
    vec![builtin("all-sigma", None).unwrap(), builtin("two-coloring", None).unwrap(), builtin("proper-coloring", Some(3)).unwrap()]
}

fn summarize(r: &SuiteReport) -> String {
    format!("{} checked, {} mismatches {:?}", r.checked, r.mismatches.len(), r.mismatches.first())
}

fn oracle_equivalence() -> Outcome {
    let (mut cl, mut ty) = (SuiteReport::default(), SuiteReport::default());
    for s in catalog() {
        for delta in 2..=3 {
            cl.merge(class_oracle(&s, delta, 7).unwrap());
            ty.merge(type_oracle(&s, delta, 7).unwrap());
        }
    }
    Outcome { pass: cl.ok() && ty.ok(), detail: format!("classes: {}; types: {}", summarize(&cl), summarize(&ty)) }
}

fn surgery_soundness() -> Outcome {
    let (mut pu, mut re, mut co) = (SuiteReport::default(), SuiteReport::default(), SuiteReport::default());
    for s in catalog() {
        pu.merge(pump_oracle(&s, 3).unwrap());
        re.merge(replace_oracle(&s, 3, 4, 10).unwrap());
        co.merge(composition_oracle(&s, 3, 4, 8).unwrap());
    }
    Outcome {
        pass: pu.ok() && re.ok() && co.ok(),
        detail: format!("pump j=0..3: {}; replace: {}; bipolar replace: {}", summarize(&pu), summarize(&re), summarize(&co)),
    }
}

fn decidability() -> Outcome {
    let mut bad = Vec::new();
    let mut verdicts = Vec::new();
    for (name, want) in [("all-sigma", "O(log n)"), ("proper-coloring:3", "O(log n)"), ("two-coloring", "n^{Ω(1)}")] {
        let mut e = Engine::new(&spec(name), 3).unwrap();
        let d = search_feasible(&mut e, WParam::ELL, &Caps::default());
        if d.verdict() != want {
            bad.push(format!("{name}: {}", d.verdict()));
        }
        verdicts.push(format!("{name} {}", d.verdict()));
    }
    let sp = spec("proper-coloring:3");
    let mut eng = Engine::new(&sp, 3).unwrap();
    let Decision::Feasible { hierarchy, .. } = search_feasible(&mut eng, WParam::ELL, &Caps::default()) else {
        return Outcome { pass: false, detail: "no rule for 3-coloring".into() };
    };
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for n in [100, 500, 2000] {
        for seed in 0..5 {
            let g = gen_random_tree(n, 3, seed).unwrap();
            match synthesize_run(&mut eng, &hierarchy, &g, &random_ids(n, seed)) {
                Ok(r) => {
                    let lab: Labeling = r.labels.iter().map(|&l| Some(l)).collect();
                    if !check_global(&sp, &g, &lab).is_legal() {
                        bad.push(format!("n={n} seed={seed}: illegal"));
                    }
                    if r.levels as f64 > level_bound(n, r.ell) || r.rounds != r.decomposition_rounds + r.levels * 2 * (2 * r.ell + 1) {
                        bad.push(format!("n={n} seed={seed}: {} levels, {} rounds", r.levels, r.rounds));
                    }
                    runs.push((n, r.rounds));
                }
                Err(e) => bad.push(format!("n={n} seed={seed}: {e}")),
            }
        }
    }
    let ratio = |&(n, r): &(usize, usize)| r as f64 / (n as f64).log2();
    let c = runs.iter().map(ratio).fold(0.0, f64::max);
    for &(n, r) in &runs {
        if r as f64 > c * (n as f64).log2() {
            bad.push(format!("n={n}: {r} rounds > {:.1}", c * (n as f64).log2()));
        }
    }
    let c_at = |n| runs.iter().filter(|r| r.0 == n).map(ratio).fold(0.0, f64::max);
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{}; synthesis legal on 15 trees, C={c:.1} (max rounds/log2 n at n=100/500/2000: {:.1} / {:.1} / {:.1}); {bad:?}",
            verdicts.join(", "),
            c_at(100),
            c_at(500),
            c_at(2000)
        ),
    }
}

fn w_indep() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, delta) in [("all-sigma", 3), ("two-coloring", 3), ("proper-coloring:3", 3), ("proper-coloring:3", 4)] {
        let r = w_independence(&spec(name), delta).unwrap();
        pass &= r.ok();
        let sizes: Vec<String> = r.class_sets.iter().map(|(w, c)| format!("w={w}:{}", c.as_ref().map_or(0, |v| v.len()))).collect();
        parts.push(format!("{name} Δ={delta} {} [{}]", r.verdict, sizes.join(" ")));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn main() {
    let results = [
        report(1, "hierarchical coloring exponent", hier_exponent),
        report(2, "rake/compress levels", rake_compress),
        report(3, "orientation in constant rounds", orientation),
        report(4, "resampling iterations", lll_resampling),
        report(5, "speedup wrapper", speedup_wrapper),
        report(6, "class/type oracle equivalence", oracle_equivalence),
        report(7, "pumping and replacement soundness", surgery_soundness),
        report(8, "decidability and synthesis", decidability),
        report(9, "independence from w", w_indep),
    ];
    let failed = results.iter().filter(|&&p| !p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
