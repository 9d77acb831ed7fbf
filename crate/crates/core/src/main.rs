use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use stablebmc::check::{gen_benchmark, run_check_with_program, CheckError, CheckRequest, Query};
use stablebmc::ltl::parse_formula;
use stablebmc::net::{parse_net, Semantics};
use stablebmc::parse_condition;

#[derive(Parser)]
#[command(name = "stablebmc", version, about = "Bounded model checking of 1-safe Petri nets with stable models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a counterexample within a range of bounds.
    Check(CheckArgs),
    /// Write a benchmark net.
    Gen {
        #[arg(value_enum)]
        kind: Benchmark,
        /// Size parameter (number of philosophers).
        k: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Benchmark {
    /// Dining philosophers.
    Dp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Deadlock,
    Reach,
    Ltl,
}

#[derive(clap::Args)]
struct CheckArgs {
    #[arg(long)]
    net: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    /// LTL specification; the search looks for executions violating it.
    #[arg(long, conflicts_with = "target")]
    formula: Option<String>,
    /// Target condition of reach mode.
    #[arg(long)]
    target: Option<String>,
    /// Condition on initial markings (default: the declared initial marking).
    #[arg(long)]
    init: Option<String>,
    #[arg(long, default_value = "step")]
    semantics: Semantics,
    /// Bound range `A..B`, both ends included.
    #[arg(long, default_value = "1..10", value_parser = parse_bounds)]
    bounds: (usize, usize),
    /// Write the ground program of the last bound handed to the solver.
    #[arg(long)]
    dump: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    /// Conflict budget of the solver at each bound.
    #[arg(long)]
    solver_budget: Option<u64>,
    /// Node budget of the explicit-state searches.
    #[arg(long, default_value_t = 1_000_000)]
    oracle_budget: usize,
    /// Create atoms only from the first step they can hold on.
    #[arg(long)]
    staged: bool,
}

fn parse_bounds(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected `A..B`, got `{s}`"))?;
    let a = a.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

fn check(args: CheckArgs) -> anyhow::Result<i32> {
    let text = fs::read_to_string(&args.net)
        .with_context(|| format!("reading {}", args.net.display()))?;
    let net = parse_net(&text).with_context(|| format!("parsing {}", args.net.display()))?;
    let query = match args.mode {
        Mode::Deadlock => Query::Deadlock,
        Mode::Reach => {
            let t = args.target.as_deref().ok_or_else(|| anyhow!("reach mode needs --target"))?;
            Query::Reach(parse_condition(t, &net)?)
        }
        Mode::Ltl => {
            let f = args.formula.as_deref().ok_or_else(|| anyhow!("ltl mode needs --formula"))?;
            Query::Ltl(parse_formula(f)?)
        }
    };
    let mut req = CheckRequest::new(&net, query);
    if let Some(init) = &args.init {
        req.initial = parse_condition(init, &net)?;
    }
    req.semantics = args.semantics;
    (req.min_bound, req.max_bound) = args.bounds;
    req.solver_budget = args.solver_budget;
    req.oracle_budget = args.oracle_budget;
    req.staged = args.staged;

    let (report, program) = match run_check_with_program(&net, &req) {
        Ok(r) => r,
        Err(e @ (CheckError::Verification(_) | CheckError::Decode(_))) => {
            eprintln!("internal error: {e}");
            return Ok(4);
        }
        Err(e) => bail!(e),
    };
    if let Some(path) = &args.dump {
        let program = program.ok_or_else(|| anyhow!("no ground program was built (bound 0 only)"))?;
        fs::write(path, program.to_text()).with_context(|| format!("writing {}", path.display()))?;
    }
    if args.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text(&net));
    }
    Ok(report.exit_code())
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Check(args) => check(args),
        Command::Gen { kind: Benchmark::Dp, k, output } => {
            let text = gen_benchmark(k)?;
            fs::write(&output, text).with_context(|| format!("writing {}", output.display()))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
