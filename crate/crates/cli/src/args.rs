use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use runsdist::pmf::PmfEngineId;
use runsdist::{parse_rational, IndexScheme, MomentKind, VariantSpec};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "runsdist", version, about = "Negative binomial distribution of order k: pmf, moments, engine comparisons and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability mass function over a range of n.
    Pmf(PmfArgs),
    /// Factorial, raw or central moments.
    Moments(MomentArgs),
    /// Pairwise comparison of pmf engines.
    Compare(CompareArgs),
    /// Monte Carlo simulation of the waiting time.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Run length.
    #[arg(long)]
    pub k: u32,
    /// Number of runs.
    #[arg(long)]
    pub r: u32,
    /// Success probability, as a decimal or a fraction `a/b`. A fraction selects exact arithmetic.
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    /// Exact rational arithmetic even when p is a decimal.
    #[arg(long)]
    pub exact: bool,
    /// type1, type2, overlap=L or gap=G.
    #[arg(long, default_value = "type1", value_parser = parse_variant)]
    pub variant: VariantSpec,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PmfArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 0)]
    pub n_min: i64,
    #[arg(long)]
    pub n_max: i64,
    #[arg(long, default_value = "recurrence-pg", value_parser = parse_engine)]
    pub engine: PmfEngineId,
    #[arg(long, value_enum, default_value_t = Scheme::Full)]
    pub scheme: Scheme,
}

#[derive(Debug, Args)]
pub struct MomentArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = Kind::Factorial)]
    pub kind: Kind,
    #[arg(long, default_value_t = 4)]
    pub order_max: usize,
    #[arg(long, value_enum, default_value_t = Route::Partition)]
    pub route: Route,
    #[arg(long, value_enum, default_value_t = Scheme::Full)]
    pub scheme: Scheme,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 0)]
    pub n_min: i64,
    #[arg(long)]
    pub n_max: i64,
    /// Comma-separated engine ids, each optionally suffixed `@full` or `@cut`
    /// to override the scheme for that engine; `type1` expands to the seven
    /// Type I engines.
    #[arg(long, value_delimiter = ',', required = true)]
    pub engines: Vec<String>,
    #[arg(long, value_enum, default_value_t = Scheme::Full)]
    pub scheme: Scheme,
    /// Largest allowed absolute difference between any two engines.
    #[arg(long, default_value_t = 1e-11)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also write the histogram (`n,count`) as CSV to this file.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Full,
    Cut,
}

impl From<Scheme> for IndexScheme {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Full => IndexScheme::Full,
            Scheme::Cut => IndexScheme::Cut,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Factorial,
    Raw,
    Central,
}

impl From<Kind> for MomentKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Factorial => MomentKind::Factorial,
            Kind::Raw => MomentKind::Raw,
            Kind::Central => MomentKind::Central,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Recurrence,
    Partition,
    Pgf,
    Root,
    Summation,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Recurrence => "recurrence",
            Route::Partition => "partition",
            Route::Pgf => "pgf",
            Route::Root => "root",
            Route::Summation => "summation",
        }
    }
}

pub fn parse_variant(text: &str) -> Result<VariantSpec, String> {
    let bad = || format!("`{text}` is not one of type1, type2, overlap=L, gap=G");
    match text {
        "type1" => return Ok(VariantSpec::type1()),
        "type2" => return Ok(VariantSpec::type2()),
        _ => {}
    }
    let (name, value) = text.split_once('=').ok_or_else(bad)?;
    let value: u32 = value.parse().map_err(|_| bad())?;
    match name {
        "overlap" => Ok(VariantSpec::overlap(value)),
        "gap" if value >= 1 => Ok(VariantSpec::gap(value)),
        "gap" => Err("gap must be at least 1".into()),
        _ => Err(bad()),
    }
}

pub fn parse_engine(text: &str) -> Result<PmfEngineId, String> {
    text.parse().map_err(|e: runsdist::Error| e.to_string())
}

/// The success probability in the mode the flags select.
#[derive(Debug, Clone)]
pub enum Probability {
    Float(f64),
    Exact(rug::Rational),
}

impl ParamArgs {
    pub fn probability(&self) -> Result<Probability, CliError> {
        let text = self.p.trim();
        if self.exact || text.contains('/') {
            parse_rational(text)
                .map(Probability::Exact)
                .ok_or_else(|| CliError::usage(format!("--p: cannot parse `{text}` as a number")))
        } else {
            text.parse::<f64>()
                .ok()
                .filter(|p| p.is_finite())
                .map(Probability::Float)
                .ok_or_else(|| CliError::usage(format!("--p: cannot parse `{text}` as a number")))
        }
    }
}
