//! The `stallings` command line.
//!
//! Every subcommand prints JSON (or CSV with `--csv`) to stdout or `--out`.
//! Failures print `{"error": kind, "message": ...}` to stderr and exit with 2
//! (budget exhausted), 3 (invalid input) or 4 (enumeration guard).

pub mod graph_arg;
pub mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use stallings_core::completion::{purpose, trial_rng, Completer};
use stallings_core::graph::{based_core, core, pullback, stallings_graph, LabeledGraph};
use stallings_core::lifts::{
    enumerate_quotients, exact_lift_stats, expected_lifts_leading, monte_carlo_lift_stats, relative_rank,
    variance_leading, LeadingTerm, LiftStats, LiftTarget,
};
use stallings_core::recognition::{classify, Verdict, DEFAULT_BUDGET};
use stallings_core::separability::{separate_conjugacy, separate_membership, SearchOptions, SubgroupSpec};
use stallings_core::word::parse_word_list;
use stallings_core::{Error, Result};

use graph_arg::load;
pub use report::{wilson, ExperimentReport, Frequency};

pub const SEED_ENV: &str = "STALLINGS_SEED";

#[derive(Parser, Debug)]
#[command(name = "stallings", version, about = "Stallings graphs, random covers and alternating quotients of free groups")]
pub struct Cli {
    /// Seed for every random choice; falls back to $STALLINGS_SEED, then 0
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit CSV where the command supports it
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Folded Stallings graph of a list of words
    Fold {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Comma-separated words, e.g. `aab,bA`
        #[arg(long, allow_hyphen_values = true)]
        words: String,
    },
    /// Core of a graph (based core with --based)
    Core {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long)]
        based: bool,
    },
    /// Pullback of two based graphs, restricted to the base component
    Pullback {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
    /// One random completion of a precover, with its classification
    Complete {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// How often random completions generate A_n or S_n
    Dixon {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long)]
        condition: Option<String>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Lift counts of a target graph into random completions
    Lifts {
        #[arg(long)]
        condition: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Count basepoint images (fixed points) instead of all maps
        #[arg(long)]
        based: bool,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Average over every completion instead of sampling
        #[arg(long)]
        exact: bool,
    },
    /// Quotients of g ⊔ h with their relative Euler characteristics
    Quotients {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
    /// Alternating quotient separating elements from a subgroup
    SepMember {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, allow_hyphen_values = true)]
        subgroup: String,
        #[arg(long, allow_hyphen_values = true)]
        elements: String,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Alternating quotient preserving non-conjugacy-into among subgroups
    SepConj {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Generator lists separated by `;`, e.g. `ab;a`
        #[arg(long, allow_hyphen_values = true)]
        subgroups: String,
        /// Comma-separated primes (only 2 gives sound certificates)
        #[arg(long)]
        primes: Option<String>,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Accept a symmetric image as well as an alternating one
    #[arg(long)]
    symmetric_ok: bool,
    /// Samples per degree
    #[arg(long, default_value_t = 200)]
    trials: u64,
    /// Comma-separated degrees to try, in order
    #[arg(long = "n")]
    n_schedule: Option<String>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

impl SearchArgs {
    fn options(&self, seed: u64) -> Result<SearchOptions> {
        let n_schedule = self
            .n_schedule
            .as_deref()
            .map(|s| s.split(',').map(|x| x.trim().parse().map_err(|_| Error::InvalidInput(format!("bad degree `{x}`")))).collect())
            .transpose()?;
        Ok(SearchOptions {
            n_schedule,
            trials: self.trials,
            seed,
            budget: self.budget,
            accept_symmetric: self.symmetric_ok,
            ..SearchOptions::default()
        })
    }
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExhausted(_) => 2,
        e if e.is_guard() => 4,
        _ => 3,
    }
}

fn error_json(e: &Error) -> String {
    json!({ "error": e.kind(), "message": e.to_string() }).to_string() + "\n"
}

/// Parses and runs a command line (first item is the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok(text) => match &cli.out {
            Some(path) => match std::fs::write(path, &text) {
                Ok(()) => Outcome { code: 0, stdout: String::new(), stderr: String::new() },
                Err(e) => {
                    let e = Error::InvalidInput(format!("{}: {e}", path.display()));
                    Outcome { code: 3, stdout: String::new(), stderr: error_json(&e) }
                }
            },
            None => Outcome { code: 0, stdout: text, stderr: String::new() },
        },
        Err(e) => Outcome { code: exit_code(&e), stdout: String::new(), stderr: error_json(&e) },
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::InvalidInput(format!("{SEED_ENV}={v} is not a u64"))),
        Err(_) => Ok(0),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn execute(cli: &Cli) -> Result<String> {
    let seed = resolve_seed(cli.seed)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| Error::InvalidInput(e.to_string()))?;
    pool.install(|| dispatch(cli, seed))
}

fn dispatch(cli: &Cli, seed: u64) -> Result<String> {
    match &cli.command {
        Command::Fold { rank, words } => to_json(&stallings_graph(&parse_word_list(words, *rank)?, *rank)?),
        Command::Core { graph, rank, based } => {
            let g = load(graph, *rank)?;
            if *based {
                to_json(&based_core(&g.based("--based")?))
            } else {
                to_json(&core(&g.graph))
            }
        }
        Command::Pullback { a, b, rank } => {
            to_json(&pullback(&load(a, *rank)?.based("--a")?, &load(b, *rank)?.based("--b")?)?)
        }
        Command::Complete { graph, n, rank, budget } => {
            let completer = Completer::new(&load(graph, *rank)?.graph, *n)?;
            let tuple = completer.sample(&mut trial_rng(seed, purpose::COMPLETION, 0));
            let classification = classify(&tuple, *budget, &mut trial_rng(seed, purpose::RECOGNITION, 0));
            to_json(&json!({
                "n": n,
                "seed": seed,
                "cover": completer.cover(&tuple),
                "tuple": tuple,
                "classification": classification,
            }))
        }
        Command::Dixon { rank, condition, n, trials, budget } => {
            let report = dixon(cli_echo(cli), seed, *rank, condition.as_deref(), *n, *trials, *budget)?;
            if cli.csv {
                Ok(report.csv())
            } else {
                to_json(&report)
            }
        }
        Command::Lifts { condition, target, rank, based, n, trials, exact } => {
            let g = load(condition, *rank)?.graph;
            let h = load(target, *rank)?;
            let report = lifts(&g, h, *based, *n, *trials, *exact, seed)?;
            if cli.csv {
                Ok(report.csv())
            } else {
                to_json(&report)
            }
        }
        Command::Quotients { g, h, rank } => {
            let (g, h) = (load(g, *rank)?.graph, load(h, *rank)?.graph);
            let quotients = enumerate_quotients(&g, &h)?;
            let (r, _) = relative_rank(&g, &h)?;
            if cli.csv {
                let mut out = String::from("index,vertices,edges,chi_rel,g_injective,critical\n");
                for (i, q) in quotients.iter().enumerate() {
                    let critical = q.g_injective && q.chi_rel == r;
                    out += &format!(
                        "{i},{},{},{},{},{critical}\n",
                        q.quotient.vertex_count(),
                        q.quotient.edge_count(),
                        q.chi_rel,
                        q.g_injective
                    );
                }
                Ok(out)
            } else {
                let rows: Vec<_> = quotients
                    .iter()
                    .map(|q| json!({ "descriptor": q, "critical": q.g_injective && q.chi_rel == r }))
                    .collect();
                to_json(&json!({ "relative_rank": r, "count": quotients.len(), "quotients": rows }))
            }
        }
        Command::SepMember { rank, subgroup, elements, search } => {
            let h = SubgroupSpec::new(parse_word_list(subgroup, *rank)?, *rank)?;
            let elements = parse_word_list(elements, *rank)?;
            if elements.is_empty() {
                return Err(Error::InvalidInput("no elements given".into()));
            }
            let cert = separate_membership(&h, &elements, &search.options(seed)?)?;
            to_json(&cert)
        }
        Command::SepConj { rank, subgroups, primes, search } => {
            let specs = subgroups
                .split(';')
                .map(|s| SubgroupSpec::new(parse_word_list(s, *rank)?, *rank))
                .collect::<Result<Vec<_>>>()?;
            let primes = primes
                .as_deref()
                .map(|s| {
                    s.split(',')
                        .map(|p| p.trim().parse::<u32>().map_err(|_| Error::InvalidInput(format!("bad prime `{p}`"))))
                        .collect::<Result<Vec<_>>>()
                })
                .transpose()?;
            let cert = separate_conjugacy(&specs, primes.as_deref(), &search.options(seed)?)?;
            to_json(&cert)
        }
    }
}

fn cli_echo(cli: &Cli) -> Vec<String> {
    // the parsed form, so the echo does not depend on argument order
    vec![format!("{:?}", cli.command)]
}

pub fn dixon(
    command: Vec<String>,
    seed: u64,
    rank: usize,
    condition: Option<&str>,
    n: usize,
    trials: u64,
    budget: usize,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let g = match condition {
        Some(c) => load(c, rank)?.graph,
        None => LabeledGraph::empty(rank),
    };
    if g.rank() != rank {
        return Err(Error::InvalidInput(format!("condition has rank {}, expected {rank}", g.rank())));
    }
    let completer = Completer::new(&g, n)?;
    let verdicts: Vec<Verdict> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let tuple = completer.sample(&mut trial_rng(seed, purpose::COMPLETION, t));
            classify(&tuple, budget, &mut trial_rng(seed, purpose::RECOGNITION, t)).verdict
        })
        .collect();
    let mut counts = BTreeMap::new();
    for v in verdicts {
        *counts.entry(v).or_insert(0u64) += 1;
    }
    Ok(ExperimentReport {
        command,
        seed,
        wall_time_ms: start.elapsed().as_millis() as u64,
        rank,
        n,
        trials,
        condition_vertices: g.vertex_count(),
        expected_alternating: 0.5f64.powi(rank as i32),
        outcomes: ExperimentReport::outcomes_from(&counts, trials),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Prediction {
    pub mean: LeadingTerm,
    pub variance: LeadingTerm,
    pub mean_at_n: f64,
    pub variance_at_n: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftsReport {
    pub stats: LiftStats,
    pub based: bool,
    pub exact: bool,
    /// Leading-order prediction; absent for based targets.
    pub prediction: Option<Prediction>,
    /// Why no prediction was made for an unbased target.
    pub prediction_error: Option<String>,
}

impl LiftsReport {
    pub fn csv(&self) -> String {
        let (pm, pv) = self.prediction.as_ref().map_or((String::new(), String::new()), |p| {
            (p.mean_at_n.to_string(), p.variance_at_n.to_string())
        });
        format!("{},predicted_mean,predicted_variance\n{},{pm},{pv}\n", LiftStats::csv_header(), self.stats.csv_row())
    }
}

pub fn lifts(g: &LabeledGraph, h: graph_arg::GraphArg, based: bool, n: usize, trials: u64, exact: bool, seed: u64) -> Result<LiftsReport> {
    let graph = h.graph.clone();
    let target = if based { LiftTarget::Based(h.based("--target")?) } else { LiftTarget::Unbased(graph.clone()) };
    let stats = if exact { exact_lift_stats(g, &target, n)? } else { monte_carlo_lift_stats(g, &target, n, trials, seed)? };
    let (mut prediction, mut prediction_error) = (None, None);
    if !based {
        match expected_lifts_leading(g, &graph).and_then(|m| Ok((m, variance_leading(g, &graph)?))) {
            Ok((mean, variance)) => {
                prediction = Some(Prediction {
                    mean,
                    variance,
                    mean_at_n: mean.value_at(n as f64),
                    variance_at_n: variance.value_at(n as f64),
                })
            }
            Err(e) => prediction_error = Some(e.kind().to_string()),
        }
    }
    Ok(LiftsReport { stats, based, exact, prediction, prediction_error })
}
