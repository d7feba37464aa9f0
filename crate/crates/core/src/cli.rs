//! Command-line front end. Results go to stdout or `--out`; wall times and
//! other diagnostics go to stderr so result files are reproducible.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::load_config;
use crate::dp::{bellman_residual_check, solve_dp_with, value_of, DpTable, Expansion, SolveOptions, DEFAULT_STATE_CAP};
use crate::error::{Error, Result};
use crate::graph::{gen_grid, gen_scale_free, write_graph_file, Graph};
use crate::policy::external::{echo_serve, EchoOptions};
use crate::policy::{ExternalConfig, PolicyKind, Resources};
use crate::sim::{evaluate, EvalConfig, CSV_HEADER};
use crate::vi::value_iteration_oracle;

#[derive(Debug, Parser)]
#[command(name = "pegkit", version, about = "Pursuit-evasion games on graphs: exact solver and simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated graph file.
    GenGraph(GenGraphArgs),
    /// Solve a no-exit game and save the step table.
    Solve(SolveArgs),
    /// Play seeded episodes between two policies and report metrics.
    Evaluate(EvaluateArgs),
    /// Check a solved table against value iteration and the Bellman equation.
    Validate(ValidateArgs),
    /// Protocol test double that never moves.
    #[command(hide = true)]
    EchoPolicy(EchoArgs),
}

#[derive(Debug, Args)]
pub struct GenGraphArgs {
    #[command(subcommand)]
    pub kind: GraphKind,
    /// Number of exits to place uniformly at random.
    #[arg(long, global = true, default_value_t = 0)]
    pub exits: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GraphKind {
    /// 4-connected lattice, node id = row * width + col.
    Grid { width: usize, height: usize },
    /// Preferential attachment.
    ScaleFree { n: usize, attach: usize },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    pub state_cap: u128,
    /// Solve sorted pursuer tuples only and copy to permutations.
    #[arg(long)]
    pub canonical: bool,
    #[arg(long, value_enum, default_value_t = ExpansionArg::Layered)]
    pub expansion: ExpansionArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExpansionArg {
    Rescan,
    Countdown,
    Layered,
}

impl From<ExpansionArg> for Expansion {
    fn from(e: ExpansionArg) -> Self {
        match e {
            ExpansionArg::Rescan => Expansion::Rescan,
            ExpansionArg::Countdown => Expansion::Countdown,
            ExpansionArg::Layered => Expansion::Layered,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// dp, grouped-dp, exit-heuristic, sps, random, external:<cmd>, tcp:<addr>
    #[arg(long)]
    pub pursuer: String,
    #[arg(long)]
    pub evader: String,
    #[arg(long, default_value_t = 500)]
    pub episodes: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    /// Worker threads; defaults to the available cores.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    pub state_cap: u128,
    /// Use a saved table instead of solving.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Override the starting distance bound of no-exit episodes.
    #[arg(long)]
    pub min_distance: Option<u32>,
    /// Reply timeout for external policies, in milliseconds.
    #[arg(long, default_value_t = 10_000)]
    pub timeout_ms: u64,
    /// Also write every episode as a JSON line to this file.
    #[arg(long)]
    pub episodes_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Validate a saved table instead of a fresh solve.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    pub state_cap: u128,
}

#[derive(Debug, Args)]
pub struct EchoArgs {
    #[arg(long)]
    pub illegal: bool,
    #[arg(long)]
    pub bad_fingerprint: bool,
    #[arg(long)]
    pub silent: bool,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenGraph(a) => gen_graph(a),
        Command::Solve(a) => solve(a),
        Command::Evaluate(a) => run_evaluate(a),
        Command::Validate(a) => validate(a),
        Command::EchoPolicy(a) => {
            let opts = EchoOptions { illegal: a.illegal, bad_fingerprint: a.bad_fingerprint, silent: a.silent };
            echo_serve(std::io::stdin().lock(), std::io::stdout().lock(), opts)
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn wall(label: &str, d: Duration) {
    eprintln!("{label} wall time: {:.3}s", d.as_secs_f64());
}

fn gen_graph(a: GenGraphArgs) -> Result<()> {
    let graph: Graph = match a.kind {
        GraphKind::Grid { width, height } => gen_grid(width, height)?,
        GraphKind::ScaleFree { n, attach } => gen_scale_free(n, attach, a.seed)?,
    };
    let n = graph.node_count();
    if a.exits > n {
        return Err(Error::Argument(format!("cannot place {} exits on {n} nodes", a.exits)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut exits = sample(&mut rng, n, a.exits).into_vec();
    exits.sort_unstable();
    let mut out = output(a.out.as_deref())?;
    out.write_all(write_graph_file(&graph, &exits).as_bytes())?;
    out.flush()?;
    Ok(())
}

fn solve(a: SolveArgs) -> Result<()> {
    let loaded = load_config(&a.spec)?;
    let opts = SolveOptions { state_cap: a.state_cap, expansion: a.expansion.into(), canonical_pursuers: a.canonical };
    let start = Instant::now();
    let (table, stats) = solve_dp_with(&loaded.spec, &opts)?;
    wall("solve", start.elapsed());
    table.write_to(BufWriter::new(File::create(&a.out)?))?;
    let summary = json!({
        "spec_id": format!("{:016x}", loaded.spec.fingerprint()),
        "states": stats.states,
        "finite_fraction": stats.finite_fraction(),
        "max_finite_d": stats.max_finite,
        "pushes": stats.pushes,
        "all_finite": stats.finite == stats.states,
    });
    println!("{summary}");
    Ok(())
}

fn run_evaluate(a: EvaluateArgs) -> Result<()> {
    let loaded = load_config(&a.spec)?;
    let spec = &loaded.spec;
    let pursuer: PolicyKind = a.pursuer.parse()?;
    let evader: PolicyKind = a.evader.parse()?;
    let preloaded = match &a.table {
        Some(p) => Some(DpTable::read_for(File::open(p)?, spec)?),
        None => None,
    };
    let opts = SolveOptions { state_cap: a.state_cap, ..SolveOptions::default() };
    let start = Instant::now();
    let mut resources =
        Resources::prepare(spec, &[&pursuer, &evader], loaded.config.grouping.as_ref(), &opts, preloaded)?;
    resources.external = ExternalConfig { timeout: Duration::from_millis(a.timeout_ms), ..ExternalConfig::default() };
    wall("prepare", start.elapsed());

    let mut sampler = loaded.sampler.clone();
    if let Some(d) = a.min_distance {
        sampler.min_distance = d;
    }
    let threads = a.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let cfg = EvalConfig { episodes: a.episodes, base_seed: a.seed, threads, sampler, record: false };
    let start = Instant::now();
    let (report, results) = evaluate(spec, &resources, &pursuer, &evader, &cfg)?;
    wall("evaluate", start.elapsed());

    let mut out = output(a.out.as_deref())?;
    match a.format {
        Format::Jsonl => writeln!(out, "{}", report.to_json_line())?,
        Format::Csv => writeln!(out, "{CSV_HEADER}\n{}", report.to_csv_row())?,
    }
    out.flush()?;
    if let Some(path) = &a.episodes_out {
        let mut w = BufWriter::new(File::create(path)?);
        for r in &results {
            writeln!(w, "{}", serde_json::to_string(r)?)?;
        }
        w.flush()?;
    }
    Ok(())
}

fn validate(a: ValidateArgs) -> Result<()> {
    let loaded = load_config(&a.spec)?;
    let spec = &loaded.spec;
    let vi = value_iteration_oracle(spec, 1e-12).map_err(|e| match e {
        Error::Capacity { states, cap } => Error::Argument(format!(
            "{states} states exceed the value-iteration limit of {cap}; shrink the graph or the pursuer count"
        )),
        e => e,
    })?;
    let table = match &a.table {
        Some(p) => DpTable::read_for(File::open(p)?, spec)?,
        None => solve_dp_with(spec, &SolveOptions { state_cap: a.state_cap, ..SolveOptions::default() })?.0,
    };
    let violations = bellman_residual_check(&table, spec)?;
    let gamma = spec.discount();
    let max_dev = table.raw().iter().zip(&vi.values).map(|(&d, &v)| (value_of(d, gamma) - v).abs()).fold(0.0, f64::max);
    let pass = violations == 0 && max_dev < a.tolerance;
    let report = json!({
        "spec_id": format!("{:016x}", spec.fingerprint()),
        "states": table.len(),
        "max_deviation": max_dev,
        "vi_residual": vi.residual,
        "violations": violations,
        "pass": pass,
    });
    println!("{report}");
    if pass {
        Ok(())
    } else {
        Err(Error::Validation(format!("{violations} Bellman violations, max deviation {max_dev:e}")))
    }
}
