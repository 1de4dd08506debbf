use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value;

/// Directory that relative output paths are resolved against.
pub const OUTPUT_DIR_ENV: &str = "WEYLPATH_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "weylpath",
    version,
    about = "Phase-space transport of wave-packets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Geometric phase around a closed (x, k) loop.
    LoopPhase {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: LoopPhaseArgs,
    },
    /// Phase accumulated along an open (x, k) path.
    Transport {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: TransportArgs,
    },
    /// Integrate a mass-shell trajectory.
    Trajectory {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: TrajectoryArgs,
    },
    /// Bare-mass spread of a boosted wave-packet.
    MassSpread {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: MassSpreadArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Common {
    /// JSON file whose keys override the command-line flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,

    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = 4096)]
    pub n_points: usize,
    #[arg(long, default_value_t = 128.0)]
    pub box_length: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub x0: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub k0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopPreset {
    Circle,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LoopPhaseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// Rectangle side along x.
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub dx: f64,
    /// Rectangle side along k.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
    pub dk: f64,
    /// Closed planar path (CSV with header `x0,k0`) instead of a rectangle.
    #[arg(long, conflicts_with = "preset")]
    pub path: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<LoopPreset>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub radius: f64,
    /// Finest step count of the convergence table.
    #[arg(long, default_value_t = 1024)]
    pub steps: usize,
    /// Rows in the convergence table, halving the step count each time.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransportPreset {
    /// Upper half circle from (−r, 0) to (r, 0); starts at k = 0.
    HalfCircle,
    /// Straight segment from (0, 0) to (dx, dk).
    Segment,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TransportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long, conflicts_with = "preset")]
    pub path: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "half-circle")]
    pub preset: TransportPreset,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub dx: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub dk: f64,
    #[arg(long, default_value_t = 512)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TrajectoryArgs {
    /// Initial wave 4-vector, temporal component first.
    #[arg(
        long = "k0",
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "5,3"
    )]
    pub k0: Vec<f64>,
    /// Initial position; zeros when absent.
    #[arg(long = "x0", value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    /// Expected shell value `k·k`; checked against `k0` when given.
    #[arg(long, allow_hyphen_values = true)]
    pub k_c_sq: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub ds: f64,
    #[arg(long, default_value_t = 10_000)]
    pub n_steps: usize,
    /// Rapidity gained per step through an in-plane boost.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub boost_rate: f64,
    /// Accept light-cone initial data with an affine parameter.
    #[arg(long)]
    pub affine_lightlike: bool,
    /// Also write the sampled trajectory to this CSV file.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MassSpreadArgs {
    /// lep2-electron, tevatron-proton or e300-supraluminal.
    #[arg(long)]
    pub preset: Option<String>,
    /// Rest mass in MeV (overrides the preset).
    #[arg(long, allow_hyphen_values = true)]
    pub m0: Option<f64>,
    /// Beam energy in MeV (overrides the preset).
    #[arg(long, allow_hyphen_values = true)]
    pub energy: Option<f64>,
    /// Rest-frame momentum width in MeV/c (overrides the preset).
    #[arg(long, allow_hyphen_values = true)]
    pub delta_p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub n_sigma: Option<f64>,
    /// Comma-separated beam energies (MeV) evaluated concurrently.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<f64>>,
    /// Monte-Carlo cross-check sample count; 0 disables it.
    #[arg(long, default_value_t = 0)]
    pub mc_samples: usize,
    #[arg(long, default_value_t = 8)]
    pub mc_chunks: usize,
}

/// Applies `--config` on top of the parsed flags. Keys are distributed to
/// the common options first, then to the command's own arguments.
pub fn apply_config<A>(common: Common, args: A) -> anyhow::Result<(Common, A)>
where
    A: Serialize + DeserializeOwned,
{
    let Some(path) = common.config.clone() else {
        return Ok((common, args));
    };
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let overrides: Value = serde_json::from_str(&text)
        .with_context(|| format!("config {} is not valid JSON", path.display()))?;
    let Value::Object(overrides) = overrides else {
        bail!("config {} must hold a JSON object", path.display());
    };

    let mut common_value = serde_json::to_value(&common)?;
    let mut args_value = serde_json::to_value(&args)?;
    for (key, value) in overrides {
        let key = key.replace('-', "_");
        let target = if common_value.get(&key).is_some() {
            &mut common_value
        } else if args_value.get(&key).is_some() {
            &mut args_value
        } else {
            bail!("config {}: unknown key {key:?}", path.display());
        };
        target[&key] = value;
    }
    let mut merged: Common = serde_json::from_value(common_value)
        .with_context(|| format!("config {}: bad value for a common option", path.display()))?;
    merged.config = Some(path.clone());
    let args = serde_json::from_value(args_value)
        .with_context(|| format!("config {}: bad value", path.display()))?;
    Ok((merged, args))
}

/// Resolves a relative path against `$WEYLPATH_OUTPUT_DIR` when set.
pub fn output_path(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}
