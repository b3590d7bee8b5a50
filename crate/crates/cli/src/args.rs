use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cyclewalk::{CoinState, WalkConfig, C64};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "cyclewalk",
    version,
    about = "Coin-decohered quantum walks on the N-cycle"
)]
pub struct Cli {
    /// Flat `key=value` file supplying defaults for any flag (flags win).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the walk and write P(x, t) for every step as CSV.
    Simulate(SimulateArgs),
    /// Eigenvalues and classification of every momentum-pair superoperator.
    Spectrum(SpectrumArgs),
    /// Total-variation trace and mixing time as JSON.
    Mixing(MixingArgs),
    /// Run the numerical check suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    /// Cycle length N.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Decoherence rate p in [0, 1].
    #[arg(long)]
    pub decoherence: Option<f64>,
    /// `up` (|1>), `down` (|-1>), `balanced` ((|-1> + i|1>)/√2) or `re,im,re,im`
    /// amplitudes of (|1>, |-1>).
    #[arg(long, value_name = "STATE")]
    pub initial_coin: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Fourier,
    Direct,
    Classical,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Fourier => "fourier",
            Method::Direct => "direct",
            Method::Classical => "classical",
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// CSV destination; stdout if omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructionArg {
    Definitional,
    ClosedForm,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long, value_enum)]
    pub construction: Option<ConstructionArg>,
    /// CSV destination; stdout if omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// JSON summary destination; stderr if omitted.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Averaged,
    Instantaneous,
}

#[derive(Debug, Args)]
pub struct MixingArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_enum)]
    pub target: Option<TargetArg>,
    /// Steps to scan; defaults to ceil(20·N²/ε), capped at 10⁶.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Attach B(τ, N) at the mixing time (odd N, initial coin `up`, averaged target).
    #[arg(long)]
    pub bound: bool,
    /// Keep every n-th entry of the TV trace (the last entry is always kept).
    #[arg(long)]
    pub trace_stride: Option<usize>,
    /// JSON destination; stdout if omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Reduced sizes: N ≤ 7, t ≤ 50.
    #[arg(long)]
    pub quick: bool,
    /// Run only the named check (repeatable).
    #[arg(long = "check", value_name = "NAME")]
    pub checks: Vec<String>,
    /// JSON report destination; stdout if omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// `key=value` pairs from a config file. Keys use the flag spelling without
/// dashes (`initial-coin` and `initial_coin` are both accepted).
#[derive(Debug, Default)]
pub struct FileConfig {
    entries: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!(
                    "config line {}: expected key=value, got '{line}'",
                    i + 1
                ))
            })?;
            entries.insert(key.trim().replace('_', "-"), value.trim().to_owned());
        }
        Ok(Self { entries })
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Usage(format!("config key '{key}' = '{v}': {e}")))
            })
            .transpose()
    }

    pub fn get_enum<T: ValueEnum>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.entries
            .get(key)
            .map(|v| {
                T::from_str(v, true)
                    .map_err(|e| CliError::Usage(format!("config key '{key}' = '{v}': {e}")))
            })
            .transpose()
    }
}

/// The flag value if given, else the config-file value.
pub fn pick<T>(flag: Option<T>, file: &FileConfig, key: &str) -> Result<Option<T>, CliError>
where
    T: FromStr,
    T::Err: Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.get(key),
    }
}

pub fn require<T>(value: Option<T>, key: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing required --{key}")))
}

/// Parses a coin specification. Raw amplitudes are normalized; the second
/// return value is set when that changed the norm by more than 1e-6.
pub fn parse_coin(spec: &str) -> Result<(CoinState, Option<f64>), CliError> {
    match spec.trim() {
        "up" => Ok((CoinState::up(), None)),
        "down" => Ok((CoinState::down(), None)),
        "balanced" => Ok((CoinState::balanced(), None)),
        raw => {
            let parts: Vec<f64> = raw
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Usage(format!("initial coin '{raw}': {e}")))?;
            let [a, b, cc, d] = parts[..] else {
                return Err(CliError::Usage(format!(
                    "initial coin '{raw}': expected up, down, balanced or re,im,re,im"
                )));
            };
            let (state, norm) = CoinState::normalized([C64::new(a, b), C64::new(cc, d)])?;
            let renormalized = ((norm - 1.0).abs() > 1e-6).then_some(norm);
            Ok((state, renormalized))
        }
    }
}

/// Builds the walk configuration from flags and file, warning on stderr when
/// raw coin amplitudes needed renormalizing.
pub fn resolve_walk(
    walk: &WalkArgs,
    file: &FileConfig,
    default_coin: &str,
) -> Result<WalkConfig, CliError> {
    let nodes = require(pick(walk.nodes, file, "nodes")?, "nodes")?;
    let p = require(pick(walk.decoherence, file, "decoherence")?, "decoherence")?;
    let coin_spec = pick(walk.initial_coin.clone(), file, "initial-coin")?
        .unwrap_or_else(|| default_coin.to_owned());
    let (coin, renormalized) = parse_coin(&coin_spec)?;
    if let Some(norm) = renormalized {
        eprintln!("warning: initial coin had norm {norm}; renormalized to 1");
    }
    Ok(WalkConfig::new(nodes, p, coin)?)
}
