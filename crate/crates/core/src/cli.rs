//! The `ce-adversary` command line.
//!
//! Exit codes: 0 success or verified, 1 a negative domain result
//! (certificate found, guarantee failure, no solving profile), 2 usage or
//! parse errors. Every output is JSON with exact `"num/den"` rationals
//! except `lemma`, which prints `key: value` lines unless `--json` is given.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::adversary::max_budget;
use crate::dynamics::{self, DuelResult, Querier, ReducedInstance};
use crate::game_core::io::{DistributionFile, GameFile};
use crate::game_core::{
    self, differences_from_utilities, is_correlated_equilibrium, GameTable, Verdict,
};
use crate::hypercube::{self, VertexSet};
use crate::lp_ce;
use crate::rational::{self, Rational};

pub const LOG_ENV: &str = "CE_ADVERSARY_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "ce-adversary",
    version,
    about = "Adaptive adversary for pure-query correlated equilibrium"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Copy, Default)]
pub struct OutputFlags {
    /// Add `<field>_float` decimal approximations next to exact rationals.
    #[arg(long, global = true)]
    pub float: bool,
    /// Omit the timestamp field so repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub reproducible: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play queriers against the adversary and verify the final certificate.
    Duel(DuelArgs),
    /// Check whether a distribution is a correlated equilibrium of a game.
    Verify(VerifyArgs),
    /// Delete random vertex sets from the n-cube and check the giant component.
    Lemma(LemmaArgs),
    /// Run regret matching and report the empirical distribution.
    Rm(RmArgs),
    /// Find a profile with a positive weighted regret sum.
    Reduce(ReduceArgs),
    /// Compute an exact correlated equilibrium of a small binary game.
    Solve(SolveArgs),
}

#[derive(Debug, Args)]
pub struct DuelArgs {
    #[arg(long)]
    pub n: usize,
    /// lex, greedy, scatter or chaser.
    #[arg(long, required_unless_present = "all_queriers", value_parser = parse_querier_name)]
    pub querier: Option<String>,
    /// Run every built-in querier, in parallel.
    #[arg(long, conflicts_with = "querier")]
    pub all_queriers: bool,
    /// Defaults to the largest budget the guarantee covers.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Allow budgets beyond the guarantee.
    #[arg(long)]
    pub force: bool,
    /// Worker threads for --all-queriers (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// JSON-lines transcript; with --all-queriers the querier name is
    /// inserted before the extension.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// Result file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub game: PathBuf,
    /// Distribution file, or `-` for stdin.
    #[arg(long)]
    pub dist: PathBuf,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Args)]
pub struct LemmaArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Largest deleted set size; defaults to the largest size below
    /// `2^n/(n^2+1)`.
    #[arg(long)]
    pub max_s: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RmArgs {
    #[arg(long)]
    pub game: PathBuf,
    #[arg(long = "T", default_value_t = 10_000)]
    pub rounds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub game: PathBuf,
    /// Comma-separated non-negative weights; all ones if omitted.
    #[arg(long, value_delimiter = ',', value_parser = parse_rational_arg)]
    pub y: Option<Vec<Rational>>,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub game: PathBuf,
    #[command(flatten)]
    pub output: OutputFlags,
}

fn parse_querier_name(name: &str) -> Result<String, String> {
    match dynamics::querier_by_name(name) {
        Some(_) => Ok(name.to_string()),
        None => {
            let known: Vec<_> = dynamics::builtin_queriers()
                .iter()
                .map(|q| q.name())
                .collect();
            Err(format!(
                "unknown querier {name:?} (known: {})",
                known.join(", ")
            ))
        }
    }
}

fn parse_rational_arg(text: &str) -> Result<Rational, String> {
    rational::parse(text.trim()).map_err(|e| e.to_string())
}

/// A failed command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn domain(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn"))
        .format_timestamp(None)
        .try_init();
    let outcome = match cli.command {
        Command::Duel(a) => cmd_duel(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Lemma(a) => cmd_lemma(&a),
        Command::Rm(a) => cmd_rm(&a),
        Command::Reduce(a) => cmd_reduce(&a),
        Command::Solve(a) => cmd_solve(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::usage(format!("stdin: {e}")))?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }
}

fn load_game(path: &Path) -> Result<GameTable, Failure> {
    let text = read_input(path)?;
    let file: GameFile = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    file.to_game()
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Adds `<key>_float` siblings for every `"num/den"` string (or array of
/// them) in `value`, recursively.
pub fn add_float_fields(value: &mut Value) {
    fn as_float(v: &Value) -> Option<f64> {
        let s = v.as_str()?;
        if !s.contains('/') {
            return None;
        }
        rational::parse(s).ok().map(|r| rational::to_f64(&r))
    }
    match value {
        Value::Object(map) => {
            let mut extra = Map::new();
            for (k, v) in map.iter_mut() {
                if let Some(f) = as_float(v) {
                    extra.insert(format!("{k}_float"), Value::from(f));
                } else if let Some(items) = v.as_array().filter(|a| !a.is_empty()) {
                    let floats: Option<Vec<Value>> =
                        items.iter().map(|x| as_float(x).map(Value::from)).collect();
                    match floats {
                        Some(fs) => {
                            extra.insert(format!("{k}_float"), Value::Array(fs));
                        }
                        None => add_float_fields(v),
                    }
                } else {
                    add_float_fields(v);
                }
            }
            for (k, v) in extra {
                map.entry(k).or_insert(v);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(add_float_fields),
        _ => {}
    }
}

fn render(result: &impl Serialize, flags: OutputFlags, stamp: bool) -> String {
    let mut value = serde_json::to_value(result).expect("results serialize");
    if flags.float {
        add_float_fields(&mut value);
    }
    if stamp && !flags.reproducible {
        if let Value::Object(map) = &mut value {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            map.insert("timestamp".into(), Value::from(secs));
        }
    }
    serde_json::to_string_pretty(&value).expect("values serialize") + "\n"
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::usage(format!("stdout: {e}")))
        }
    }
}

fn transcript_path(base: &Path, querier: &str, many: bool) -> PathBuf {
    if !many {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("transcript");
    let name = match base.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}.{querier}.{ext}"),
        None => format!("{stem}.{querier}"),
    };
    base.with_file_name(name)
}

pub fn cmd_duel(args: &DuelArgs) -> CmdResult {
    let n = args.n;
    if !(2..=hypercube::MAX_DIMENSION).contains(&n) {
        return Err(Failure::usage(format!(
            "--n must lie in 2..={}",
            hypercube::MAX_DIMENSION
        )));
    }
    let limit = max_budget(n);
    let budget = args.budget.unwrap_or(limit);
    if budget > limit && !args.force {
        return Err(Failure::usage(format!(
            "budget {budget} exceeds the guaranteed {limit} for n = {n}; pass --force to run anyway"
        )));
    }
    if budget > limit || n < 6 {
        log::warn!(
            "n = {n}, budget = {budget}: outside the guaranteed regime, finalization may fail"
        );
    }

    let queriers: Vec<Box<dyn Querier>> = match &args.querier {
        Some(name) => vec![dynamics::querier_by_name(name)
            .ok_or_else(|| Failure::usage(format!("unknown querier {name:?}")))?],
        None => dynamics::builtin_queriers(),
    };
    let many = args.all_queriers;
    let duel = |q: &dyn Querier| dynamics::run_duel(q, n, budget);
    let outcomes: Vec<_> = if many {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build()
            .map_err(|e| Failure::usage(format!("thread pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            queriers.par_iter().map(|q| duel(q.as_ref())).collect()
        })
    } else {
        queriers.iter().map(|q| duel(q.as_ref())).collect()
    };

    let mut results: Vec<DuelResult> = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        let mut r = outcome.map_err(|e| Failure::domain(e.to_string()))?;
        if let Some(base) = &args.transcript {
            let path = transcript_path(base, &r.querier, many);
            fs::write(&path, r.transcript.to_json_lines())
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            r.transcript_path = Some(path.display().to_string());
        }
        results.push(r);
    }

    let text = if many {
        render(&results, args.output, false)
    } else {
        render(&results[0], args.output, true)
    };
    emit(&text, args.out.as_deref())?;
    for r in &results {
        if let Some(msg) = &r.failure {
            eprintln!("{}: guarantee failure: {msg}", r.querier);
        }
    }
    Ok(if results.iter().all(|r| r.verifier_agreement) {
        0
    } else {
        1
    })
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    equilibrium: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<game_core::Certificate>,
}

pub fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let game = load_game(&args.game)?;
    let text = read_input(&args.dist)?;
    let file: DistributionFile = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", args.dist.display())))?;
    let sigma = file
        .to_distribution_with(game.actions())
        .map_err(|e| Failure::usage(format!("{}: {e}", args.dist.display())))?;
    let verdict =
        is_correlated_equilibrium(&game, &sigma).map_err(|e| Failure::usage(e.to_string()))?;
    let report = match verdict {
        Verdict::Equilibrium => VerifyReport {
            equilibrium: true,
            certificate: None,
        },
        Verdict::Violation(c) => VerifyReport {
            equilibrium: false,
            certificate: Some(c),
        },
    };
    emit(&render(&report, args.output, false), None)?;
    Ok(if report.equilibrium { 0 } else { 1 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub n: usize,
    pub trials: usize,
    pub max_s: usize,
    pub seed: u64,
    pub min_largest_component: usize,
    pub half_cube: usize,
    pub violations: usize,
}

/// `trials` random deletion sets of size `1..=max_s`, each checked with
/// [`hypercube::giant_component_holds`].
pub fn lemma_batch(n: usize, trials: usize, max_s: usize, seed: u64) -> LemmaReport {
    let size = 1usize << n;
    let max_s = max_s.clamp(1, size);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut min_largest = size;
    for _ in 0..trials {
        let k = rng.random_range(1..=max_s);
        let removed = VertexSet::from_profiles(
            n,
            rand::seq::index::sample(&mut rng, size, k)
                .into_iter()
                .map(|v| game_core::Profile(v as u64)),
        );
        let largest = hypercube::largest_component(n, &removed).map_or(0, |c| c.len());
        min_largest = min_largest.min(largest);
        if !hypercube::giant_component_holds(n, &removed) {
            violations += 1;
        }
    }
    LemmaReport {
        n,
        trials,
        max_s,
        seed,
        min_largest_component: min_largest,
        half_cube: size / 2,
        violations,
    }
}

pub fn cmd_lemma(args: &LemmaArgs) -> CmdResult {
    let n = args.n;
    if !(1..=hypercube::MAX_DIMENSION).contains(&n) {
        return Err(Failure::usage(format!(
            "--n must lie in 1..={}",
            hypercube::MAX_DIMENSION
        )));
    }
    let max_s = args
        .max_s
        .unwrap_or_else(|| hypercube::giant_component_budget(n));
    if max_s == 0 {
        return Err(Failure::usage(format!(
            "no non-empty deletion set is small enough for n = {n}; pass --max-s"
        )));
    }
    let report = lemma_batch(n, args.trials, max_s, args.seed);
    let text = if args.json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        format!(
            "n: {}\ntrials: {}\nmax_s: {}\nseed: {}\nmin_largest_component: {}\nhalf_cube: {}\nviolations: {}\n",
            report.n,
            report.trials,
            report.max_s,
            report.seed,
            report.min_largest_component,
            report.half_cube,
            report.violations
        )
    };
    emit(&text, None)?;
    Ok(if report.violations == 0 { 0 } else { 1 })
}

pub fn cmd_rm(args: &RmArgs) -> CmdResult {
    let game = load_game(&args.game)?;
    let report = dynamics::regret_matching(&game, args.rounds, args.seed)
        .map_err(|e| Failure::usage(e.to_string()))?;
    emit(&render(&report, args.output, true), None)?;
    Ok(0)
}

#[derive(Debug, Serialize)]
struct ReduceReport {
    y: Vec<String>,
    profile: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<String>,
}

pub fn cmd_reduce(args: &ReduceArgs) -> CmdResult {
    let game = load_game(&args.game)?;
    if !game.is_binary() {
        return Err(Failure::usage("reduce needs a binary-action game"));
    }
    let diff = differences_from_utilities(&game).map_err(|e| Failure::usage(e.to_string()))?;
    let y = args
        .y
        .clone()
        .unwrap_or_else(|| vec![rational::one(); game.n()]);
    let inst = ReducedInstance::new(y, diff).map_err(|e| Failure::usage(e.to_string()))?;
    let found = dynamics::solve_reduced(&inst);
    let report = ReduceReport {
        y: inst.y().iter().map(rational::format).collect(),
        profile: found.map(|s| s.bitstring(game.n())),
        value: found.map(|s| rational::format(&inst.value(s))),
    };
    emit(&render(&report, args.output, false), None)?;
    Ok(if found.is_some() { 0 } else { 1 })
}

pub fn cmd_solve(args: &SolveArgs) -> CmdResult {
    let game = load_game(&args.game)?;
    let sigma = lp_ce::find_exact_ce(&game).map_err(|e| match e {
        lp_ce::LpError::Internal(msg) => Failure::domain(msg),
        other => Failure::usage(other.to_string()),
    })?;
    emit(
        &render(
            &DistributionFile::from_distribution(&sigma),
            args.output,
            false,
        ),
        None,
    )?;
    Ok(0)
}
