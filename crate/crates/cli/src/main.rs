//! Command-line front end for the subdivision search simulator.
//!
//! Exit statuses: 0 success, 1 verification or runtime failure, 2 usage
//! error. Data goes to standard output, diagnostics to standard error, and
//! every command with a `--seed` is byte-reproducible.

mod example;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qsubdiv::analysis::cost_sweep_with_monte_carlo;
use qsubdiv::differentiator::{make_plan, run_chain, second_register_model, ChainMode};
use qsubdiv::statevec::OracleSpec;
use qsubdiv::subdiv::{search, BranchPolicy, RestartPolicy, SearchConfig, SizeMode};

/// Search sizes above this allocate joint states beyond the desk budget
/// unless explicitly allowed.
const DEFAULT_SEARCH_CAP: usize = 24;

#[derive(Parser)]
#[command(
    name = "qsubdiv",
    version,
    about = "Bit-by-bit subdivision search over an unsorted list, driven by a non-unitary flag-state discriminator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SizeModeArg {
    /// Sublist size of the current depth.
    Exact,
    /// Full list size 2^n at every depth.
    Paper,
}

impl From<SizeModeArg> for SizeMode {
    fn from(arg: SizeModeArg) -> Self {
        match arg {
            SizeModeArg::Exact => SizeMode::Exact,
            SizeModeArg::Paper => SizeMode::Paper,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Every chain step takes the M0 branch.
    Forced,
    /// Branches drawn with their true probabilities.
    Stochastic,
}

impl From<ModeArg> for ChainMode {
    fn from(arg: ModeArg) -> Self {
        match arg {
            ModeArg::Forced => ChainMode::Forced,
            ModeArg::Stochastic => ChainMode::Stochastic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    /// Fix the complement bit without a second query when b=0 tests absent.
    InferComplement,
    /// Query both branches; error if both test absent.
    TestBoth,
}

impl From<PolicyArg> for BranchPolicy {
    fn from(arg: PolicyArg) -> Self {
        match arg {
            PolicyArg::InferComplement => BranchPolicy::InferComplement,
            PolicyArg::TestBoth => BranchPolicy::TestBoth,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RestartArg {
    /// Re-run chains until one is clean.
    Retry,
    /// Majority readout over a fixed odd number of chains.
    Majority,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputArg {
    /// Flag state with the target in the sublist.
    Present,
    /// Flag state with the target absent.
    Absent,
}

#[derive(Subcommand)]
enum Command {
    /// Print the differentiator plan (D, Q, V, R, M0, M1) as JSON.
    Matrices {
        /// Index qubits; the plan size follows --size-mode.
        #[arg(long)]
        n: usize,
        /// Root power override (power of two).
        #[arg(long)]
        v: Option<u32>,
        #[arg(long, value_enum, default_value = "exact")]
        size_mode: SizeModeArg,
    },
    /// Run one differentiator chain on a model flag state.
    Differentiate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "present")]
        input: InputArg,
        #[arg(long, value_enum, default_value = "forced")]
        mode: ModeArg,
        #[arg(long)]
        v: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "exact")]
        size_mode: SizeModeArg,
    },
    /// Run the subdivision search and print its trace as JSON.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        target: u64,
        #[arg(long, value_enum, default_value = "forced")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "infer-complement")]
        policy: PolicyArg,
        #[arg(long, value_enum, default_value = "exact")]
        size_mode: SizeModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "retry")]
        restart_policy: RestartArg,
        #[arg(long, default_value_t = 1000)]
        max_restarts: u32,
        /// Odd number of chains per majority vote.
        #[arg(long, default_value_t = 1)]
        vote_trials: u32,
        /// Allow n above the default cap of 24 (up to 30).
        #[arg(long)]
        allow_large: bool,
    },
    /// Cost sweep: closed-form restart bill per n, optional Monte Carlo column.
    Bench {
        /// Comma-separated list sizes, e.g. --n 1,2,4.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Stochastic chains per row for the Monte Carlo column (0 = none).
        #[arg(long, default_value_t = 0)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long, value_enum, default_value = "exact")]
        size_mode: SizeModeArg,
    },
    /// Reproduce the n=20 worked chain trace and verify every checkpoint.
    Example,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Matrices { n, v, size_mode } => cmd_matrices(n, v, size_mode.into()),
        Command::Differentiate {
            n,
            input,
            mode,
            v,
            seed,
            size_mode,
        } => cmd_differentiate(n, input, mode.into(), v, seed, size_mode.into()),
        Command::Search {
            n,
            target,
            mode,
            policy,
            size_mode,
            seed,
            restart_policy,
            max_restarts,
            vote_trials,
            allow_large,
        } => cmd_search(
            n,
            target,
            mode.into(),
            policy.into(),
            size_mode.into(),
            seed,
            restart_policy,
            max_restarts,
            vote_trials,
            allow_large,
        ),
        Command::Bench {
            n,
            trials,
            seed,
            format,
            size_mode,
        } => cmd_bench(&n, trials, seed, format, size_mode.into()),
        Command::Example => example::run(),
    }
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn failure(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(1)
}

/// Sublist size the plan is built for, per size mode.
fn plan_size(n: usize, size_mode: SizeMode) -> Result<u64, String> {
    if !(1..=OracleSpec::MAX_INDEX_QUBITS).contains(&n) {
        return Err(format!(
            "--n must be between 1 and {}",
            OracleSpec::MAX_INDEX_QUBITS
        ));
    }
    let m = match size_mode {
        SizeMode::Paper => 1u64 << n,
        SizeMode::Exact => 1u64 << (n - 1),
    };
    if m < 2 {
        return Err("exact size mode at n = 1 leaves a one-item sublist with no differentiator; use --size-mode paper".into());
    }
    Ok(m)
}

fn cmd_matrices(n: usize, v: Option<u32>, size_mode: SizeMode) -> ExitCode {
    let m = match plan_size(n, size_mode) {
        Ok(m) => m,
        Err(msg) => return usage_error(&msg),
    };
    match make_plan(m, v) {
        Ok(plan) => {
            println!("{}", plan.to_json());
            ExitCode::SUCCESS
        }
        Err(e) => usage_error(&e.to_string()),
    }
}

fn cmd_differentiate(
    n: usize,
    input: InputArg,
    mode: ChainMode,
    v: Option<u32>,
    seed: u64,
    size_mode: SizeMode,
) -> ExitCode {
    let m = match plan_size(n, size_mode) {
        Ok(m) => m,
        Err(msg) => return usage_error(&msg),
    };
    let plan = match make_plan(m, v) {
        Ok(plan) => plan,
        Err(e) => return usage_error(&e.to_string()),
    };
    let state = match second_register_model(m, matches!(input, InputArg::Present)) {
        Ok(state) => state,
        Err(e) => return usage_error(&e.to_string()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match run_chain(&state, &plan, mode, &mut rng) {
        Ok(outcome) => {
            println!("{}", outcome.to_json());
            ExitCode::SUCCESS
        }
        Err(e) => failure(&e.to_string()),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    n: usize,
    target: u64,
    mode: ChainMode,
    policy: BranchPolicy,
    size_mode: SizeMode,
    seed: u64,
    restart_policy: RestartArg,
    max_restarts: u32,
    vote_trials: u32,
    allow_large: bool,
) -> ExitCode {
    let cap = if allow_large {
        OracleSpec::MAX_INDEX_QUBITS
    } else {
        DEFAULT_SEARCH_CAP
    };
    if n < 1 || n > cap {
        return usage_error(&format!(
            "--n must be between 1 and {cap} (pass --allow-large for up to {})",
            OracleSpec::MAX_INDEX_QUBITS
        ));
    }
    if target >= 1u64 << n {
        return usage_error(&format!("--target {target} out of range for n = {n}"));
    }

    let restart_policy = match restart_policy {
        RestartArg::Retry => RestartPolicy::RetryUntilClean { max_restarts },
        RestartArg::Majority => RestartPolicy::MajorityVote {
            trials: vote_trials,
        },
    };
    let config = SearchConfig {
        n,
        mode,
        size_mode,
        policy,
        restart_policy,
        seed,
    };
    if let Err(e) = config.validate() {
        return usage_error(&e.to_string());
    }

    let mut oracle = match OracleSpec::new(n, target) {
        Ok(oracle) => oracle,
        Err(e) => return usage_error(&e.to_string()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match search(&mut oracle, &config, &mut rng) {
        Ok(trace) => {
            println!("{}", trace.to_json());
            if trace.result == target {
                ExitCode::SUCCESS
            } else {
                eprintln!(
                    "search misclassified: found {} instead of {target}",
                    trace.result
                );
                ExitCode::from(1)
            }
        }
        Err(e) => failure(&e.to_string()),
    }
}

fn cmd_bench(
    n_values: &[usize],
    trials: u64,
    seed: u64,
    format: FormatArg,
    size_mode: SizeMode,
) -> ExitCode {
    let mut config = SearchConfig::new(n_values.first().copied().unwrap_or(1));
    config.size_mode = size_mode;
    config.seed = seed;
    match cost_sweep_with_monte_carlo(n_values, &config, trials) {
        Ok(report) => {
            match format {
                FormatArg::Csv => print!("{}", report.to_csv()),
                FormatArg::Json => println!("{}", report.to_json()),
            }
            ExitCode::SUCCESS
        }
        Err(e) => usage_error(&e.to_string()),
    }
}
