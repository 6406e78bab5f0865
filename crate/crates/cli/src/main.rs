//! `treedist`: pairwise tree distances from the command line.
//!
//! Exit codes: 0 success, 2 input error, 3 engine error.

mod dist;
mod input;
mod output;

use std::fmt::Display;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use treedist::splits::encode;
use treedist::tree::serialize_newick;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Engine(String),
}

impl CliError {
    pub fn input(origin: &str, e: impl Display) -> Self {
        CliError::Input(format!("{origin}: {e}"))
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Engine(_) => 3,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Engine(m) => write!(f, "engine error: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "treedist", version, about = "Distances between rooted, leaf-labeled trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise distance matrix over every tree in the inputs.
    Dist(DistArgs),
    /// Newick trees to split-vector blocks.
    Encode(IoArgs),
    /// Split-vector blocks to Newick trees.
    Decode(IoArgs),
    /// Check every line of a tree or split-vector file.
    Validate {
        input: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Rf,
    Rfl,
    Quartet,
    Triplet,
    TripletLength,
    Mast,
    Align,
    Node,
    Node2,
    Cophenetic,
    Simprob,
    Geodesic,
    Cone,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Args)]
pub struct DistArgs {
    #[arg(long, value_enum)]
    pub metric: Metric,
    /// Matrix destination; the flag report goes to `<out>.report.json`.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Node distance exponent.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
    pub k: u32,
    /// Cophenetic classes as `<cluster> <class>` lines.
    #[arg(long)]
    pub class_map: Option<String>,
    #[arg(long)]
    pub tol_guard: Option<f64>,
    #[arg(long)]
    pub tol_ratio: Option<f64>,
    #[arg(long)]
    pub tol_flow: Option<f64>,
    #[arg(required = true)]
    pub inputs: Vec<String>,
}

#[derive(Args)]
struct IoArgs {
    input: String,
    #[arg(long)]
    out: Option<String>,
}

fn emit(out: Option<&str>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Input(format!("{path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_encode(args: &IoArgs) -> Result<(), CliError> {
    let text = input::read(&args.input)?;
    let trees = input::parse_trees(&args.input, &text)?;
    let mut out = String::from("# split vectors: leaf-edge weights are not stored; zero-weight edges are omitted\n");
    for e in &trees {
        let t = e.tree()?;
        out.push_str(&output::vector_block(&encode(&t)).map_err(|err| CliError::input(&e.origin, err))?);
        out.push('\n');
    }
    emit(args.out.as_deref(), &out)
}

fn cmd_decode(args: &IoArgs) -> Result<(), CliError> {
    let text = input::read(&args.input)?;
    let vectors = input::parse_vectors(&args.input, &text)?;
    let mut out = String::from("# trees rebuilt from split vectors: every leaf edge has weight 1\n");
    for e in &vectors {
        out.push_str(&serialize_newick(&e.tree()?));
        out.push('\n');
    }
    emit(args.out.as_deref(), &out)
}

fn cmd_validate(path: &str) -> Result<(), CliError> {
    let text = input::read(path)?;
    let mut results: Vec<(String, Result<(), CliError>)> = Vec::new();
    if input::is_vector_text(&text) {
        for b in input::raw_blocks(path, &text)? {
            let r = input::parse_block(path, &b).and_then(|e| e.tree().map(|_| ()));
            results.push((format!("{path}:{}", b.header), r));
        }
    } else {
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let origin = format!("{path}:{}", no + 1);
            let r = treedist::tree::parse_newick(line).map(|_| ()).map_err(|e| CliError::input(&origin, e));
            results.push((origin, r));
        }
    }
    let mut first = None;
    for (origin, r) in results {
        match r {
            Ok(()) => println!("{origin}: OK"),
            Err(CliError::Input(m) | CliError::Engine(m)) => {
                println!("{m}");
                first.get_or_insert(m);
            }
        }
    }
    match first {
        None => Ok(()),
        Some(m) => Err(CliError::Input(m)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::Dist(args) => dist::run(args),
        Command::Encode(args) => cmd_encode(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Validate { input } => cmd_validate(input),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("treedist: {e}");
            ExitCode::from(e.code())
        }
    }
}
