use std::io::Write as _;
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Parser, Subcommand};
use locality_core::algos::decomp::{level_bound, rc_decompose, validate_decomposition};
use locality_core::lcl::{builtin, check_global, labeling_to_text, Labeling};
use locality_core::lll::{check_criterion, default_cap, mt_resample_with, orientation_labels, sinkless_system, LllError, SinklessGuess, SpeedupWrapper, WrapReport};
use locality_core::sim::{random_ids, RunReport};
use locality_cli::*;
use locality_trees::hierarchy::{search_feasible, Caps, Decision, WParam};
use locality_trees::{extract_f, Engine, ExtractConfig, RandomizedColoring, TreeError};

#[derive(Parser)]
#[command(name = "locality", about = "LOCAL-model simulator, tree LCL engine and experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated graph in text format.
    Gen {
        /// path, ring, star, tree, regular or hk
        family: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Backbone length for hk.
        #[arg(long)]
        x: Option<usize>,
        /// Degree bound for tree, degree for regular.
        #[arg(long, default_value_t = 3)]
        delta: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Run an algorithm on a graph file and verify the result.
    Run {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        spec: String,
        #[arg(long)]
        alg: String,
        /// Seed for ids (deterministic algorithms) or random bits.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Network size announced to randomized algorithms.
        #[arg(long)]
        advertised_n: Option<u64>,
        /// Also write the labeling here.
        #[arg(long)]
        labels: Option<String>,
    },
    /// Rake/compress decomposition of a tree.
    Decompose {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 4)]
        ell: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sinkless orientation by resampling, or the speedup wrapper around a one-round guess.
    Lll {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exponent in the criterion `p d^c < 1`.
        #[arg(long, default_value_t = 3.0)]
        c: f64,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        wrap: bool,
    },
    /// Decide O(log n) versus n^{Ω(1)} on bounded-degree trees.
    Decide {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 3)]
        delta: usize,
        #[arg(long, default_value_t = 1)]
        w_mul: usize,
        #[arg(long, default_value_t = 0)]
        w_add: usize,
        #[arg(long, default_value_t = 2000)]
        max_nodes: usize,
        #[arg(long)]
        dump: bool,
        /// Read the rule off the trial-coloring algorithm with this many phases instead of searching.
        #[arg(long)]
        from_trial: Option<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Sweep sizes, write CSV rows and a fitted log-log slope.
    Experiment {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        family: String,
        /// Backbone lengths for hk.
        #[arg(long)]
        x: Option<String>,
        /// Sizes for the other families.
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 3)]
        delta: usize,
        #[arg(long)]
        alg: String,
        #[arg(long, default_value = "0")]
        seeds: String,
        #[arg(short, long)]
        output: Option<String>,
    },
}

fn emit(output: &Option<String>, text: &str) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {p}")),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_gen(family: &str, n: usize, k: usize, x: Option<usize>, delta: usize, seed: u64, output: &Option<String>) -> Result<i32> {
    let size = if family == "hk" { x.ok_or_else(|| usage("hk needs --x"))? } else { n };
    let g = generate(family, size, k, delta, seed)?;
    emit(output, &g.to_text())?;
    eprintln!("{family}: {} vertices, {} edges", g.n(), g.edge_count());
    Ok(EXIT_OK)
}

fn cmd_run(graph: &str, spec: &str, alg: &str, seed: u64, adv: Option<u64>, labels: &Option<String>) -> Result<i32> {
    let g = read_graph(graph)?;
    let spec = parse_spec(spec)?;
    let a = pick_alg(alg, &spec, g.delta())?;
    let (rounds, labeling, outcome, name) = run_one(&g, &spec, &a, seed, adv)?;
    println!("{}", RunReport::CSV_HEADER);
    let fails = (outcome != "legal") as u8;
    let seed_col = if matches!(a, Alg::Rand(_)) { seed.to_string() } else { "-".into() };
    println!("{graph},{},{},{},{name},{seed_col},{rounds},{outcome},{fails}", g.n(), g.delta(), spec.name);
    if let Some(p) = labels {
        std::fs::write(p, labeling_to_text(&spec, &labeling))?;
    }
    Ok(if outcome == "legal" { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_decompose(graph: &str, ell: usize, seed: u64) -> Result<i32> {
    let g = read_graph(graph)?;
    let d = rc_decompose(&g, ell, &random_ids(g.n(), seed)).map_err(|e| usage(e.to_string()))?;
    print!("{}", d.dump());
    println!("# levels={} bound={:.2} iterations={} rounds={}", d.levels(), level_bound(g.n(), ell), d.iterations, d.rounds);
    match validate_decomposition(&g, &d) {
        Ok(()) => Ok(EXIT_OK),
        Err(e) => {
            eprintln!("invalid decomposition: {e}");
            Ok(EXIT_VERIFY)
        }
    }
}

fn cmd_lll(graph: &str, seed: u64, c: f64, cap_arg: Option<usize>, wrap: bool) -> Result<i32> {
    let g = read_graph(graph)?;
    let spec = builtin("sinkless-orientation", None)?;
    if wrap {
        let w = SpeedupWrapper::new(std::sync::Arc::new(SinklessGuess), spec, g.delta(), c)?.with_p(SinklessGuess::failure_probability(g.delta()));
        return match w.run(&g, seed) {
            Ok(r) => {
                println!("{}", WrapReport::CSV_HEADER);
                println!("{}", r.csv_row());
                eprintln!("rounds={} n*={} t*={}", r.rounds, r.config.n_star, r.config.t_star);
                Ok(if r.outcome.is_legal() { EXIT_OK } else { EXIT_VERIFY })
            }
            Err(e @ LllError::CapExceeded { .. }) => Err(cap(e.to_string())),
            Err(e) => Err(e.into()),
        };
    }
    let ids = random_ids(g.n(), seed);
    let (sys, edges) = sinkless_system(&g, &ids)?;
    let min_deg = (0..g.n()).map(|v| g.degree(v)).filter(|&d| d > 0).min().unwrap_or(0);
    let p = 0.5f64.powi(min_deg as i32);
    let d = sys.dependency_graph(p).d;
    let run = match mt_resample_with(&sys, seed, cap_arg.unwrap_or_else(|| default_cap(sys.events.len())), &mut |_| {}) {
        Ok(r) => r,
        Err(e @ LllError::CapExceeded { .. }) => return Err(cap(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let labels: Labeling = orientation_labels(&g, &edges, &run.assignment).into_iter().map(Some).collect();
    let outcome = check_global(&spec, &g, &labels);
    println!("{}", WrapReport::CSV_HEADER);
    println!("{},{},{:e},{},{},{},{},{}", g.n(), g.delta(), p, d, c, check_criterion(p, d, c), run.iterations, outcome.tag());
    Ok(if outcome.is_legal() { EXIT_OK } else { EXIT_VERIFY })
}

#[allow(clippy::too_many_arguments)]
fn cmd_decide(spec: &str, delta: usize, w_mul: usize, w_add: usize, max_nodes: usize, dump: bool, from_trial: Option<usize>, trials: usize) -> Result<i32> {
    let spec = parse_spec(spec)?;
    let mut eng = match Engine::new(&spec, delta) {
        Ok(e) => e,
        Err(e @ TreeError::Unsupported(_)) => return Err(usage(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let wp = WParam { mul: w_mul, add: w_add };
    let caps = Caps { max_nodes, ..Caps::default() };
    if let Some(rounds) = from_trial {
        let alg = RandomizedColoring { q: eng.q, rounds };
        let cfg = ExtractConfig { wp: ((w_mul, w_add) != (1, 0)).then_some(wp), trials, caps, ..ExtractConfig::default() };
        let x = extract_f(&mut eng, &alg, &cfg)?;
        for (t, (pair, count)) in &x.votes {
            eprintln!("type {t}: {pair:?} in {count} of {trials} trials");
        }
        return match x.hierarchy {
            Ok(h) => {
                println!("O(log n)");
                if dump {
                    print!("{}", h.dump(&eng));
                }
                Ok(EXIT_OK)
            }
            Err(stop) => {
                println!("extracted rule is not feasible: {stop:?}");
                Ok(EXIT_VERIFY)
            }
        };
    }
    let d = search_feasible(&mut eng, wp, &caps);
    println!("{}", d.verdict());
    match &d {
        Decision::Feasible { hierarchy, explored, .. } => {
            eprintln!("explored {explored} rules; ell={} w={} classes={} types={}", hierarchy.ell, hierarchy.w, hierarchy.classes().len(), eng.type_count());
            if dump {
                print!("{}", hierarchy.dump(&eng));
            }
            Ok(EXIT_OK)
        }
        Decision::Infeasible { explored } => {
            eprintln!("explored {explored} rules, none feasible");
            Ok(EXIT_OK)
        }
        Decision::Undecided { reason, .. } => Err(cap(reason.clone())),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(spec: &str, family: &str, x: &Option<String>, n: &Option<String>, k: Option<usize>, delta: usize, alg: &str, seeds: &str, output: &Option<String>) -> Result<i32> {
    let spec = parse_spec(spec)?;
    let sizes = match (family, x, n) {
        ("hk", Some(x), _) => parse_sizes(x)?,
        ("hk", None, _) => return Err(usage("hk needs --x")),
        (_, _, Some(n)) => parse_sizes(n)?,
        _ => return Err(usage("give --n sizes")),
    };
    let k = k.unwrap_or(match spec.kind {
        locality_core::lcl::SpecKind::Hier(k) => k,
        _ => 1,
    });
    let seeds: Vec<u64> = parse_sizes(seeds)?.into_iter().map(|s| s as u64).collect();
    let plan = Plan { spec, family: family.to_string(), sizes, k, delta, alg: alg.to_string(), seeds };
    let rows = sweep(&plan)?;
    let mut text = String::from(Row::HEADER);
    text.push('\n');
    for r in &rows {
        text.push_str(&r.csv());
        text.push('\n');
    }
    text.push_str(&footer(fit_rows(&rows)));
    text.push('\n');
    emit(output, &text)?;
    Ok(if rows.iter().all(Row::legal) { EXIT_OK } else { EXIT_VERIFY })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let res = match &cli.cmd {
        Cmd::Gen { family, n, k, x, delta, seed, output } => cmd_gen(family, *n, *k, *x, *delta, *seed, output),
        Cmd::Run { graph, spec, alg, seed, advertised_n, labels } => cmd_run(graph, spec, alg, *seed, *advertised_n, labels),
        Cmd::Decompose { graph, ell, seed } => cmd_decompose(graph, *ell, *seed),
        Cmd::Lll { graph, seed, c, cap, wrap } => cmd_lll(graph, *seed, *c, *cap, *wrap),
        Cmd::Decide { spec, delta, w_mul, w_add, max_nodes, dump, from_trial, trials } => {
            cmd_decide(spec, *delta, *w_mul, *w_add, *max_nodes, *dump, *from_trial, *trials)
        }
        Cmd::Experiment { spec, family, x, n, k, delta, alg, seeds, output } => cmd_experiment(spec, family, x, n, *k, *delta, alg, seeds, output),
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Exit>().map_or(EXIT_USAGE, |x| x.0);
            ExitCode::from(code as u8)
        }
    }
}
