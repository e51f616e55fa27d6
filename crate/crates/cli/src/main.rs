//! cpkw: command-line front end for the protocol toolkit.
//!
//! Subcommands: `verify` checks a refutation line by line, `tree` extracts and
//! serializes its falsified-axiom search tree, `play` runs the randomized
//! two-party search game on a split assignment, and `bench` measures empirical
//! error rates and transcript sizes over seeded Monte-Carlo trials.
//!
//! Exit codes: 0 success; 1 content failure (a rejected proof, a malformed
//! artifact file, a protocol run that misses its error budget or transcript
//! bound); 2 usage error (bad flags or values, unreadable paths, malformed
//! partition or assignment strings, invalid configurations).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpkw_core::bench::{csv_header, run_bench, BenchConfig, BenchProtocol, InputClass};
use cpkw_core::coins::CoinStream;
use cpkw_core::cp::{parse_proof, parse_system, verify_proof, ParseError, Proof, System, VerifyOptions};
use cpkw_core::kw::{build_search_tree, kw_bound, kw_play, serialize_search_tree};
use cpkw_core::threshold::Partition;

#[derive(Parser)]
#[command(
    name = "cpkw",
    version,
    about = "Verify cutting-planes refutations and run the randomized protocols built from them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// The system/proof pair most subcommands start from.
#[derive(Args)]
struct ProofArgs {
    /// System file: n on the first significant line, then one axiom per line
    #[arg(long)]
    system: PathBuf,
    /// Refutation file: one "Lk: <rule> ; <stated inequality>" line per step
    #[arg(long)]
    proof: PathBuf,
    /// Disable the implicit Boolean axioms x_i <= 1 and -x_i <= 0
    #[arg(long)]
    no_bool_axioms: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check a refutation against its system (tree-like by default)
    Verify {
        #[command(flatten)]
        input: ProofArgs,
        /// Allow a line to be used as a premise more than once
        #[arg(long)]
        dag: bool,
    },
    /// Build the falsified-axiom search tree of a refutation and serialize it
    Tree {
        #[command(flatten)]
        input: ProofArgs,
        /// Write the serialized tree to this file instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a summary instead of the serialized tree
        #[arg(long)]
        human: bool,
    },
    /// Play the two-party search game for a falsified axiom
    Play {
        #[command(flatten)]
        input: ProofArgs,
        /// Variable split "1,3;2,4": Alice's indices ; Bob's indices
        #[arg(long)]
        partition: String,
        /// Full assignment as a 0/1 string, one character per variable
        #[arg(long)]
        alpha: String,
        /// Total error budget for one game
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Number of independent games to play
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Seed for the shared protocol coins
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Measure empirical error and transcript size over seeded trials
    Bench {
        /// Protocol to exercise
        #[arg(long, value_enum)]
        protocol: Protocol,
        /// Input length in bits (number of variables for threshold)
        #[arg(long)]
        n: usize,
        /// Target error probability
        #[arg(long, default_value_t = 0.125)]
        epsilon: f64,
        /// Number of trials
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Seed deriving every trial's input and protocol coins
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hardest inputs: GT gets x = y + 1, EQ a last-bit flip, threshold
        /// boundary-weight assignments
        #[arg(long, conflicts_with = "equal")]
        adversarial: bool,
        /// One-sided inputs: x = y (threshold: weight exactly at the bound)
        #[arg(long)]
        equal: bool,
        /// Write the CSV (or --human text) to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Aligned prose instead of CSV
        #[arg(long)]
        human: bool,
    },
}

/// CLI names for the benchmarked protocols.
#[derive(Clone, Copy, Debug, ValueEnum)]
enum Protocol {
    Eq,
    GtBaseline,
    GtWalk,
    Threshold,
}

impl From<Protocol> for BenchProtocol {
    fn from(p: Protocol) -> Self {
        match p {
            Protocol::Eq => BenchProtocol::EqFingerprint,
            Protocol::GtBaseline => BenchProtocol::GtBaseline,
            Protocol::GtWalk => BenchProtocol::GtWalk,
            Protocol::Threshold => BenchProtocol::Threshold,
        }
    }
}

/// Failures are split by exit code: usage errors (2) for bad invocations,
/// content failures (1) for artifacts or protocol runs that do not check out.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Failure(msg) => f.write_str(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { input, dag } => cmd_verify(&input, dag),
        Command::Tree { input, out, human } => cmd_tree(&input, out.as_deref(), human),
        Command::Play { input, partition, alpha, epsilon, trials, seed } => {
            cmd_play(&input, &partition, &alpha, epsilon, trials, seed)
        }
        Command::Bench { protocol, n, epsilon, trials, seed, adversarial, equal, out, human } => {
            cmd_bench(protocol, n, epsilon, trials, seed, adversarial, equal, out.as_deref(), human)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// "file:line: message" for parse errors, so diagnostics point into the file.
fn at(path: &Path, e: ParseError) -> CliError {
    CliError::Failure(format!("{}:{}: {}", path.display(), e.line, e.message))
}

fn load_inputs(args: &ProofArgs) -> Result<(System, Proof, VerifyOptions), CliError> {
    let system = parse_system(&read_file(&args.system)?).map_err(|e| at(&args.system, e))?;
    let proof = parse_proof(&read_file(&args.proof)?).map_err(|e| at(&args.proof, e))?;
    let opts =
        VerifyOptions { require_tree: true, implicit_bool_axioms: !args.no_bool_axioms };
    Ok((system, proof, opts))
}

fn cmd_verify(input: &ProofArgs, dag: bool) -> Result<(), CliError> {
    let (system, proof, mut opts) = load_inputs(input)?;
    opts.require_tree = !dag;
    let summary = verify_proof(&proof, &system, &opts)
        .map_err(|v| CliError::Failure(format!("{}: {v}", input.proof.display())))?;
    let shape = if summary.tree_like { "tree-like" } else { "dag" };
    println!("ok: {shape}, {} lines", summary.lines);
    Ok(())
}

fn cmd_tree(input: &ProofArgs, out: Option<&Path>, human: bool) -> Result<(), CliError> {
    let (system, proof, opts) = load_inputs(input)?;
    let tree = build_search_tree(&proof, &system, &opts)
        .map_err(|v| CliError::Failure(format!("{}: {v}", input.proof.display())))?;
    if human {
        println!(
            "tree over {} variables: {} nodes ({} queries), depth {}",
            tree.n(),
            tree.len(),
            tree.internal_count(),
            tree.depth()
        );
    }
    let text = serialize_search_tree(&tree);
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        None if !human => print!("{text}"),
        None => {}
    }
    Ok(())
}

fn parse_alpha(text: &str, n: usize) -> Result<Vec<u8>, CliError> {
    let bits = text
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => {
                Err(CliError::Usage(format!("alpha must be a 0/1 string, found {other:?}")))
            }
        })
        .collect::<Result<Vec<u8>, CliError>>()?;
    if bits.len() != n {
        return Err(CliError::Usage(format!(
            "alpha assigns {} variables, the system has {n}",
            bits.len()
        )));
    }
    Ok(bits)
}

fn cmd_play(
    input: &ProofArgs,
    partition: &str,
    alpha: &str,
    epsilon: f64,
    trials: u64,
    seed: u64,
) -> Result<(), CliError> {
    if trials == 0 {
        return Err(CliError::Usage("trials must be >= 1".into()));
    }
    let (system, proof, opts) = load_inputs(input)?;
    let tree = build_search_tree(&proof, &system, &opts)
        .map_err(|v| CliError::Failure(format!("{}: {v}", input.proof.display())))?;
    let part =
        Partition::parse(partition, tree.n()).map_err(|e| CliError::Usage(e.to_string()))?;
    let alpha_bits = parse_alpha(alpha, tree.n())?;
    let alpha_a: Vec<u8> = part.part_a().iter().map(|&i| alpha_bits[i - 1]).collect();
    let alpha_b: Vec<u8> = part.part_b().iter().map(|&i| alpha_bits[i - 1]).collect();
    let bound = kw_bound(&tree, epsilon).map_err(|e| CliError::Usage(e.to_string()))?;

    let mut failures = 0u64;
    let mut max_bits = 0u64;
    for trial in 0..trials {
        let mut coins = CoinStream::for_trial(seed, trial);
        let game = kw_play(&tree, &part, &alpha_a, &alpha_b, epsilon, &mut coins)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let bits = game.transcript.total_bits();
        max_bits = max_bits.max(bits);
        let axiom = system
            .resolve_axiom(game.output, opts.implicit_bool_axioms)
            .ok_or_else(|| {
                CliError::Failure(format!("game answered unknown axiom index {}", game.output))
            })?;
        let falsified = !axiom.satisfied_by(&alpha_bits);
        if !falsified {
            failures += 1;
        }
        if trials == 1 {
            println!("axiom {}: {axiom}", game.output);
            println!("falsified by {alpha}: {}", if falsified { "yes" } else { "no" });
            println!("bits: {bits} (bound {bound})");
        }
    }
    let rate = failures as f64 / trials as f64;
    if trials > 1 {
        println!(
            "{}/{trials} answers falsified (failure rate {rate:.2e}, budget {epsilon}), \
             max bits {max_bits} (bound {bound})",
            trials - failures
        );
    }
    if max_bits > bound {
        return Err(CliError::Failure(format!(
            "transcript reached {max_bits} bits, above the bound {bound}"
        )));
    }
    // statistical gate: the budget plus 3-sigma sampling slack
    if rate > epsilon + 3.0 * (epsilon / trials as f64).sqrt() {
        return Err(CliError::Failure(format!(
            "{failures}/{trials} answers were not falsified, above the {epsilon} budget"
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    protocol: Protocol,
    n: usize,
    epsilon: f64,
    trials: u64,
    seed: u64,
    adversarial: bool,
    equal: bool,
    out: Option<&Path>,
    human: bool,
) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Usage("n must be >= 1".into()));
    }
    let class = if adversarial {
        InputClass::Adversarial
    } else if equal {
        InputClass::Equal
    } else {
        InputClass::Uniform
    };
    let cfg = BenchConfig { protocol: protocol.into(), n, epsilon, trials, seed, class };
    let row = run_bench(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = if human {
        format!("{}\n", row.to_human())
    } else {
        format!("{}\n{}\n", csv_header(), row.to_csv())
    };
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}
