//! Command-line arguments and `key=value` config files.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::CliError;
use crate::report::Format;

#[derive(Parser, Debug)]
#[command(
    name = "infoplan",
    version,
    about = "Plans measurement sequences that maximize information and runs the reference experiments",
    args_override_self = true
)]
pub struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; CSV tables after the first go to `<stem>.<table>.csv`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// File of `key=value` lines; flags on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Add wall-clock timings to the report (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Heavy-ball weighing puzzle solved exactly.
    Weighing(PuzzleArgs),
    /// Guess-my-number with interval questions, solved exactly.
    Guess(PuzzleArgs),
    /// Exact sonar search on a small grid.
    SubmarineExact(ExactArgs),
    /// Greedy or rollout sonar search from every start.
    SubmarineRollout(RolloutArgs),
    /// Gaussian-process transect planning.
    GpTransect(TransectArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Weighing(_) => "weighing",
            Command::Guess(_) => "guess",
            Command::SubmarineExact(_) => "submarine-exact",
            Command::SubmarineRollout(_) => "submarine-rollout",
            Command::GpTransect(_) => "gp-transect",
        }
    }
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PuzzleArgs {
    /// Problem sizes: `4`, a range `2-27`, or a list `2,5,9`.
    #[arg(long)]
    pub n: Option<String>,
    /// Solve at a fixed horizon.
    #[arg(long, conflicts_with = "target_bits")]
    pub horizon: Option<usize>,
    /// Find the fewest stages reaching this many bits; defaults to log2 n.
    #[arg(long)]
    pub target_bits: Option<f64>,
    #[arg(long, default_value_t = 32)]
    pub max_stages: usize,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GridArgs {
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    /// Square grid side; sets both width and height.
    #[arg(long)]
    pub size: Option<usize>,
}

impl GridArgs {
    pub fn dims(&self) -> Result<(usize, usize), CliError> {
        match (self.size, self.width, self.height) {
            (Some(s), None, None) => Ok((s, s)),
            (None, Some(w), Some(h)) => Ok((w, h)),
            _ => Err(CliError::Usage(
                "give either --size or both --width and --height".into(),
            )),
        }
    }
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExactArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// Fixed horizon; by default the fewest sweeps that guarantee a find.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Largest horizon tried when searching; defaults to the cell count.
    #[arg(long)]
    pub max_stages: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RolloutArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = PolicyArg::Rollout)]
    pub policy: PolicyArg,
    /// `all` or a comma list of cells.
    #[arg(long, default_value = "all")]
    pub starts: String,
    #[arg(long, value_enum, default_value_t = TieBreakArg::First)]
    pub tie_break: TieBreakArg,
    /// `natural`, `greedy-complete`, or eight `dr:dc` moves separated by commas.
    #[arg(long)]
    pub move_order: Option<String>,
    /// Sweep limit per run; defaults to twice the cell count.
    #[arg(long)]
    pub step_cap: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct TransectArgs {
    /// `line:N[:spacing[:reach]]` or `grid:WxH[:spacing]`.
    #[arg(long, default_value = "line:5")]
    pub lattice: String,
    #[arg(long, default_value_t = 1.0)]
    pub length_scale: f64,
    #[arg(long, default_value_t = 1.0)]
    pub signal_variance: f64,
    #[arg(long, default_value_t = 0.0)]
    pub noise_variance: f64,
    /// Number of moves after the start.
    #[arg(long, default_value_t = 3)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0)]
    pub start: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Deterministic)]
    pub mode: ModeArg,
    /// Slip probability in stochastic mode.
    #[arg(long, default_value_t = 0.1)]
    pub slip: f64,
    /// Multi-field kernels as `length:signal:noise` separated by `;`.
    #[arg(long)]
    pub fields: Option<String>,
    /// Allowed sensor selections as bit strings separated by `;`, e.g. `10;01`.
    #[arg(long)]
    pub selections: Option<String>,
    /// Continuation samples per candidate move.
    #[arg(long, default_value_t = 16)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = LookaheadArg::Rollout)]
    pub lookahead: LookaheadArg,
    /// Conditioning radius around each query.
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long, value_enum, default_value_t = TieBreakArg::First)]
    pub tie_break: TieBreakArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyArg {
    Greedy,
    Rollout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreakArg {
    /// First maximizer in enumeration order.
    First,
    /// Maximizer with the lowest id.
    Lowest,
}

impl From<TieBreakArg> for infoplan::rollout::TieBreak {
    fn from(t: TieBreakArg) -> Self {
        match t {
            TieBreakArg::First => Self::FirstInEnumeration,
            TieBreakArg::Lowest => Self::LowestControlId,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Deterministic,
    Stochastic,
    MultiField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LookaheadArg {
    Rollout,
    Exhaustive,
}

/// Reads `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {} is not key=value: {line}", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Long flags given on the command line.
fn given_flags(argv: &[String]) -> BTreeSet<String> {
    argv.iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect()
}

/// Appends config-file settings that the command line does not override.
pub fn merge_config(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    let given = given_flags(&argv);
    let mut merged = argv;
    for (k, v) in parse_config(&text)? {
        if given.contains(&k) || k == "config" {
            continue;
        }
        match v.as_str() {
            "true" => merged.push(format!("--{k}")),
            "false" => {}
            _ => merged.push(format!("--{k}={v}")),
        }
    }
    Ok(merged)
}

/// Effective settings of a subcommand as `key -> value`, unset options omitted.
pub fn echo<T: Serialize>(args: &T) -> BTreeMap<String, String> {
    let value = serde_json::to_value(args).expect("arguments serialize");
    let mut out = BTreeMap::new();
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            match v {
                serde_json::Value::Null => {}
                serde_json::Value::String(s) => {
                    out.insert(k, s);
                }
                other => {
                    out.insert(k, other.to_string());
                }
            }
        }
    }
    out
}
