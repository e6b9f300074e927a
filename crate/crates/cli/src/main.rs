//! `exkit` command-line front end.
//!
//! Every command writes a `#`-prefixed parameter echo followed by its
//! result. Exit status: 0 success, 1 property failure, 2 usage, parse or
//! budget error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use exkit::graph::DEFAULT_MAX_SUBSETS;
use exkit::Eps;

#[derive(Parser, Debug)]
#[command(name = "exkit", version, about = "Extractors, verifiers and conditional-coding experiments")]
pub struct Cli {
    /// Largest number of subsets a verifier may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_SUBSETS)]
    pub max_subsets: u64,
    /// Verifier threads (0 = all cores). Output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Write the output here instead of stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Hash,
    Trevisan,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Extractor,
    Disperser,
    Prefix,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleArg {
    All,
    Majority,
}

fn eps_arg(s: &str) -> Result<Eps, String> {
    if !s.contains('/') {
        return Err(format!("eps `{s}` must be written as p/q"));
    }
    exkit::rational::parse_eps(s).map_err(|e| e.to_string())
}

fn ratio_arg(s: &str) -> Result<num::rational::Ratio<u64>, String> {
    s.parse::<num::rational::Ratio<u64>>()
        .map_err(|_| format!("`{s}` is not a rational p/q"))
}

fn bits_arg(s: &str) -> Result<exkit::BitString, String> {
    s.parse().map_err(|e: exkit::Error| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Apply an extractor to each source sample.
    Extract {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        n: usize,
        /// Hash output length.
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_parser = eps_arg)]
        eps: Option<Eps>,
        /// Trevisan: fix the field exponent and skip the parameter budget.
        #[arg(long)]
        exponent: Option<u32>,
        #[arg(long)]
        seed_file: PathBuf,
        #[arg(long)]
        source_file: PathBuf,
    },
    /// Exhaustively check a graph file.
    VerifyGraph {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        kind: GraphKind,
        /// Min-entropy in bits (`K = 2^k`).
        #[arg(long)]
        k: Option<usize>,
        /// Explicit `K` for extractor and disperser checks.
        #[arg(long)]
        k_size: Option<usize>,
        #[arg(long, value_parser = eps_arg)]
        eps: Eps,
    },
    /// Greedy weak design.
    GenDesign {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_parser = ratio_arg, default_value = "1")]
        rho: num::rational::Ratio<u64>,
    },
    /// Encode messages with the concatenated code.
    EncodeCode {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = ratio_arg)]
        delta: Option<num::rational::Ratio<u64>>,
        #[arg(long)]
        exponent: Option<u32>,
        #[arg(long)]
        message_file: PathBuf,
    },
    /// Sample a random left-regular bipartite graph.
    SampleGraph {
        #[arg(long)]
        left: usize,
        #[arg(long)]
        right: usize,
        /// Left degree; taken from the existence bound when omitted.
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, value_enum)]
        kind: Option<GraphKind>,
        #[arg(long)]
        k_size: Option<usize>,
        #[arg(long, value_parser = eps_arg)]
        eps: Option<Eps>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
    /// Sample graphs at the existence degree and verify each.
    ExistenceTrial {
        #[arg(long)]
        left: usize,
        #[arg(long)]
        right: usize,
        #[arg(long)]
        k_size: usize,
        #[arg(long, value_parser = eps_arg)]
        eps: Eps,
        #[arg(long, value_enum, default_value = "extractor")]
        kind: GraphKind,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        degree: Option<u64>,
    },
    /// Trace a merger composition on random table extractors.
    ComposeDemo {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d1: usize,
        #[arg(long, default_value_t = 2)]
        d2: usize,
        #[arg(long, default_value_t = 2)]
        m2: usize,
        #[arg(long, default_value_t = 2)]
        mu: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = bits_arg)]
        x: exkit::BitString,
        #[arg(long, value_parser = bits_arg)]
        r1: exkit::BitString,
        #[arg(long, value_parser = bits_arg)]
        r2: exkit::BitString,
    },
    /// Bad sets, encode/decode table and bad-set chain for a graph and set.
    MuchnikDemo {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        set: PathBuf,
        /// `K = 2^k`.
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = eps_arg)]
        eps: Eps,
        #[arg(long, value_enum, default_value = "all")]
        rule: RuleArg,
        /// Second condition set for prefix coding.
        #[arg(long)]
        multi: Option<PathBuf>,
        /// Bits of the second condition (defaults to `k`).
        #[arg(long)]
        k2: Option<usize>,
    },
}

/// Result of a command that ran to completion.
pub struct Report {
    pub text: String,
    pub ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(report) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &report.text).map_err(anyhow::Error::from),
                None => {
                    print!("{}", report.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
