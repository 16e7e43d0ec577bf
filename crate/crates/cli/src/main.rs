//! Command-line front end: exact formulas, brute-force censuses, Monte Carlo
//! estimates and the verification battery.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stingray_kneser::census::CensusError;

use output::{Format, Status};

#[derive(Parser, Debug)]
#[command(
    name = "stingray-kneser",
    version,
    about = "Stingray duos in GL_d(q) and walks in q-Kneser graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Recompute values by independent routes and fail on disagreement.
    #[arg(long, global = true)]
    verify_mode: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact proportion, bounds and related values for each (e1, e2, q).
    Formulas(FormulasArgs),
    /// Run the verification battery.
    Verify(VerifyArgs),
    /// Brute-force enumeration in a small group or graph.
    Census(CensusArgs),
    /// Monte Carlo estimates compared with the exact values.
    Sample(SampleArgs),
    /// The formulas over a grid, one row per (e1, e2, q).
    Table(TableArgs),
    /// Check that the walk decomposition sums to one.
    Identity(IdentityArgs),
}

/// A list of integers such as `2,3,5-7`.
#[derive(Clone, Debug)]
pub struct NumList(pub Vec<u64>);

impl std::str::FromStr for NumList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let range = part.split_once("..").or_else(|| part.split_once('-'));
            match range {
                Some((a, b)) => {
                    let a: u64 = a.trim().parse().map_err(|_| format!("bad range start in '{part}'"))?;
                    let b: u64 = b.trim().parse().map_err(|_| format!("bad range end in '{part}'"))?;
                    if a > b {
                        return Err(format!("empty range '{part}'"));
                    }
                    out.extend(a..=b);
                }
                None => out.push(part.parse().map_err(|_| format!("not an integer: '{part}'"))?),
            }
        }
        if out.is_empty() {
            return Err("empty list".into());
        }
        Ok(NumList(out))
    }
}

#[derive(Args, Debug)]
pub struct FormulasArgs {
    #[arg(long)]
    pub e1: NumList,
    #[arg(long)]
    pub e2: NumList,
    #[arg(long, visible_alias = "qs")]
    pub q: NumList,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long, visible_alias = "q", default_value = "2,3,4,5")]
    pub qs: NumList,
    #[arg(long, default_value_t = 6)]
    pub max_e: u32,
}

#[derive(Args, Debug)]
pub struct IdentityArgs {
    #[arg(long, requires_all = ["e2", "q"])]
    pub e1: Option<NumList>,
    #[arg(long, requires_all = ["e1", "q"])]
    pub e2: Option<NumList>,
    #[arg(long, visible_alias = "qs", requires_all = ["e1", "e2"])]
    pub q: Option<NumList>,
    /// Grid bound on e1 when no explicit lists are given.
    #[arg(long, default_value_t = 8)]
    pub max_e: u32,
    /// Grid bound on q when no explicit lists are given.
    #[arg(long, default_value_t = 16)]
    pub max_q: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FaultArg {
    #[value(name = "rank_matrix_count")]
    RankMatrixCount,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 8)]
    pub max_e: u32,
    #[arg(long, default_value_t = 16)]
    pub max_q: u64,
    /// Also run the Monte Carlo battery (about a minute on one core).
    #[arg(long)]
    pub full: bool,
    /// Multiplies every Monte Carlo trial count.
    #[arg(long, default_value_t = 1.0)]
    pub mc_scale: f64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Duo pairs drawn per group when comparing the criterion with spinning.
    #[arg(long, default_value_t = 10_000)]
    pub equivalence_trials: usize,
    #[arg(long, hide = true, value_enum)]
    pub inject_fault: Option<FaultArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CensusKind {
    /// Classify all pairs of stingray elements in GL_d(q).
    Duo,
    /// Count 3-walks in the bipartite q-Kneser graph, both oracles.
    Walks,
    /// Histogram of ranks of e2 x e1 matrices.
    Rank,
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    #[arg(long, value_enum, default_value_t = CensusKind::Duo)]
    pub kind: CensusKind,
    #[arg(long)]
    pub e1: u32,
    #[arg(long)]
    pub e2: u32,
    #[arg(long)]
    pub q: u64,
    /// Ambient dimension for the duo census; defaults to e1 + e2.
    #[arg(long)]
    pub d: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ExperimentArg {
    /// Proportion of duos generating an irreducible group.
    Irreducible,
    /// Proportion of stingray pairs that are duos.
    DuoFraction,
    /// Proportion of stingray pairs that are reducible duos.
    ReduciblePair,
    /// Proportion of GL_d(q) that are e1-stingray elements (needs --d).
    Acceptance,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    UniformGroup,
    FixedClassPair,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SourceArg {
    ClassThenConjugate,
    Rejection,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value_t = ExperimentArg::Irreducible)]
    pub experiment: ExperimentArg,
    #[arg(long, value_enum, default_value_t = ModeArg::UniformGroup)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = SourceArg::ClassThenConjugate)]
    pub source: SourceArg,
    #[arg(long, required_unless_present = "battery")]
    pub e1: Option<u32>,
    #[arg(long, required_unless_present_any = ["battery", "d"])]
    pub e2: Option<u32>,
    #[arg(long, required_unless_present = "battery")]
    pub q: Option<u64>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Largest acceptable |z|.
    #[arg(long, default_value_t = 4.0)]
    pub threshold: f64,
    /// Run the fixed 32-experiment battery instead of one experiment.
    #[arg(long)]
    pub battery: bool,
    /// Multiplies every battery trial count.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

pub struct Global {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub verify_mode: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let global = Global {
        format: cli.format,
        out: cli.out,
        verify_mode: cli.verify_mode,
    };
    let result = match &cli.command {
        Command::Formulas(a) => commands::formulas(a, &global),
        Command::Table(a) => commands::table(a, &global),
        Command::Identity(a) => commands::identity(a, &global),
        Command::Verify(a) => commands::verify(a, &global),
        Command::Census(a) => commands::census(a, &global),
        Command::Sample(a) => commands::sample(a, &global),
    };
    match result {
        Ok(Status::Pass | Status::Skipped) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) if e.is::<commands::UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if let Some(CensusError::EnumerationTooLarge { .. }) = e.downcast_ref::<CensusError>() {
                eprintln!("hint: set {} to raise the enumeration caps", commands::CAP_OVERRIDE_ENV);
            }
            ExitCode::from(1)
        }
    }
}
