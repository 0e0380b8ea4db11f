//! Flag parsing and config-file merging. Flags win over the config file,
//! which wins over defaults; unknown config keys are rejected.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use mimo_dof::{AntennaConfig, ChannelKind, CornerLabel, QualityExponents};

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MIMO_DOF_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "mimo-dof",
    about = "DoF regions, phase-Markov scheme plans, and Monte Carlo verification \
             for the two-user MIMO broadcast and interference channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Compute outer/inner/baseline DoF regions and corner points.
    Region(CommonArgs),
    /// Calibrate a phase plan for a corner-point target.
    Plan(PlanArgs),
    /// Run the Monte Carlo feasibility simulation and regress DoF slopes.
    Simulate(SimArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum KindArg {
    Bc,
    Ic,
}

impl From<KindArg> for ChannelKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Bc => ChannelKind::Bc,
            KindArg::Ic => ChannelKind::Ic,
        }
    }
}

#[derive(Args)]
pub struct CommonArgs {
    /// Channel kind: broadcast (bc) or interference (ic).
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Transmit antennas per transmitter.
    #[arg(long)]
    pub m: Option<usize>,
    /// Receive antennas per receiver.
    #[arg(long)]
    pub n: Option<usize>,
    /// Current-CSIT quality exponents (user 1, user 2).
    #[arg(long, num_args = 2)]
    pub alpha: Option<Vec<f64>>,
    /// Delayed-CSIT quality exponents (user 1, user 2).
    #[arg(long, num_args = 2)]
    pub beta: Option<Vec<f64>>,
    /// Structured config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default: $MIMO_DOF_OUT_DIR, then the current dir).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Corner-point label to calibrate for (e.g. "C*", "E*").
    #[arg(long)]
    pub target: Option<String>,
    /// Slots per phase.
    #[arg(long)]
    pub t_slots: Option<usize>,
    /// Phases per block.
    #[arg(long)]
    pub s_phases: Option<usize>,
}

#[derive(Args)]
pub struct SimArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    /// SNR ladder (linear powers, e.g. 1e3 1e4 1e5 1e6).
    #[arg(long, num_args = 1..)]
    pub snr_ladder: Option<Vec<f64>>,
    /// Phases per SNR point.
    #[arg(long)]
    pub trials: Option<usize>,
    /// RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Delayed-CSIT availability lag in slots.
    #[arg(long)]
    pub eta: Option<usize>,
    /// Private-rate backoff in bits per slot.
    #[arg(long)]
    pub backoff_bits: Option<f64>,
}

/// On-disk config; every field is optional so a file can set just a subset.
#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub kind: Option<String>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub alpha: Option<[f64; 2]>,
    pub beta: Option<[f64; 2]>,
    pub target: Option<String>,
    pub t_slots: Option<usize>,
    pub s_phases: Option<usize>,
    pub snr_ladder: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub eta: Option<usize>,
    pub backoff_bits: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

/// Fully resolved parameters for any subcommand.
pub struct RunConfig {
    pub cfg: AntennaConfig,
    pub q: QualityExponents,
    pub target: Option<CornerLabel>,
    pub t_slots: usize,
    pub s_phases: usize,
    pub snr_ladder: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub eta: usize,
    pub backoff_bits: Option<f64>,
    pub out_dir: PathBuf,
}

fn load_file(path: Option<&PathBuf>) -> Result<FileConfig, CliError> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("bad config {}: {e}", p.display())))
        }
    }
}

fn parse_kind(s: &str) -> Result<ChannelKind, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "bc" => Ok(ChannelKind::Bc),
        "ic" => Ok(ChannelKind::Ic),
        other => Err(CliError::Validation(format!(
            "unknown channel kind {other:?}, expected \"bc\" or \"ic\""
        ))),
    }
}

fn pair(v: Option<Vec<f64>>, file: Option<[f64; 2]>, default: [f64; 2]) -> [f64; 2] {
    match v {
        Some(v) => [v[0], v[1]],
        None => file.unwrap_or(default),
    }
}

pub fn resolve(
    common: &CommonArgs,
    plan: Option<&PlanArgs>,
    sim: Option<&SimArgs>,
) -> Result<RunConfig, CliError> {
    let file = load_file(common.config.as_ref())?;

    let kind = match common.kind {
        Some(k) => ChannelKind::from(k),
        None => match &file.kind {
            Some(s) => parse_kind(s)?,
            None => ChannelKind::Bc,
        },
    };
    let m = common
        .m
        .or(file.m)
        .ok_or_else(|| CliError::Validation("missing --m (transmit antennas)".into()))?;
    let n = common
        .n
        .or(file.n)
        .ok_or_else(|| CliError::Validation("missing --n (receive antennas)".into()))?;
    let cfg = AntennaConfig::new(m, n, kind).map_err(|e| CliError::Validation(e.to_string()))?;

    let alpha = pair(common.alpha.clone(), file.alpha, [0.0, 0.0]);
    let beta = pair(common.beta.clone(), file.beta, [1.0, 1.0]);
    let q = QualityExponents::from_averages(alpha, beta)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let target = match plan.and_then(|p| p.target.clone()).or(file.target.clone()) {
        Some(s) => Some(s.parse::<CornerLabel>().map_err(CliError::Validation)?),
        None => None,
    };

    let out_dir = common
        .out_dir
        .clone()
        .or(file.out_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    Ok(RunConfig {
        cfg,
        q,
        target,
        t_slots: plan.and_then(|p| p.t_slots).or(file.t_slots).unwrap_or(8),
        s_phases: plan.and_then(|p| p.s_phases).or(file.s_phases).unwrap_or(100),
        snr_ladder: sim
            .and_then(|s| s.snr_ladder.clone())
            .or(file.snr_ladder.clone())
            .unwrap_or_else(|| vec![1e3, 1e4, 1e5, 1e6]),
        trials: sim.and_then(|s| s.trials).or(file.trials).unwrap_or(50),
        seed: sim.and_then(|s| s.seed).or(file.seed).unwrap_or(0),
        eta: sim.and_then(|s| s.eta).or(file.eta).unwrap_or(1),
        backoff_bits: sim.and_then(|s| s.backoff_bits).or(file.backoff_bits),
        out_dir,
    })
}
